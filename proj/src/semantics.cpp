// Copyright 2026 The qcirc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcirc/semantics.hpp"

#include <functional>
#include <random>

#include "qcirc/error.hpp"

namespace qcirc {

namespace {

SelectorKey key_from_track(const Gate &g, const Track &f) {
    SelectorKey key;
    key.reserve(g.controls.size());
    for (const auto &src : g.controls) {
        auto it = f.outcomes.find(src);
        if (it == f.outcomes.end()) {
            throw InvalidArgument("track has no outcome for '" + src + "', a classical source of '" + g.id + "'");
        }
        key.push_back(it->second);
    }
    return key;
}

Choice choose(const QuantumCircuit &c, const Gate &g, const SelectorKey &key) {
    if (key.size() != g.controls.size()) {
        throw InvalidArgument("gate '" + g.id + "' has " + std::to_string(g.controls.size()) +
                              " classical sources but " + std::to_string(key.size()) + " outcomes were given");
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
        const Gate &src = c.gate(g.controls[i]);
        if (!src.outcomes().contains(key[i])) {
            throw InvalidArgument("'" + key[i] + "' is not an outcome of '" + src.id + "'");
        }
    }
    auto it = g.selector.find(key);
    if (it == g.selector.end()) {
        throw InvalidArgument("selector of '" + g.id + "' has no entry for the given outcomes");
    }
    if (g.is_measurement()) {
        auto m = g.measurements.find(it->second);
        if (m == g.measurements.end()) {
            throw InvalidArgument("selector of '" + g.id + "' names unknown measurement '" + it->second + "'");
        }
        return &m->second;
    }
    auto u = g.unitaries.find(it->second);
    if (u == g.unitaries.end()) {
        throw InvalidArgument("selector of '" + g.id + "' names unknown unitary '" + it->second + "'");
    }
    return &u->second;
}

const Gate &gate_by_id(const QuantumCircuit &c, const GateId &id) { return c.gate(id); }

void require_dimension(const QuantumCircuit &c, const DensityOperator &rho) {
    if (rho.n_qubits() != c.n_registers()) {
        throw DimensionError("state has " + std::to_string(rho.n_qubits()) + " qubits, circuit has " +
                             std::to_string(c.n_registers()) + " registers");
    }
}

/// Substream for bout t of a run seeded with `seed`.
double bout_variate(std::uint64_t seed, std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 gen(seq);
    // 53 random bits -> [0, 1); avoids the unspecified distribution classes.
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct Candidate {
    std::vector<std::pair<GateId, OutcomeLabel>> outcomes;
    ComplexMatrix state;
    double weight = 0;  // Tr of the post-bout state
};

/// All joint outcomes of the bout with their un-normalized post states.
std::vector<Candidate> expand_bout(const QuantumCircuit &c, const Bout &bout, const Track &partial,
                                   const ComplexMatrix &sigma) {
    std::size_t n = c.n_registers();
    std::vector<const Gate *> unitaries, measures;
    for (const auto &id : bout) {
        const Gate &g = gate_by_id(c, id);
        (g.is_measurement() ? measures : unitaries).push_back(&g);
    }
    ComplexMatrix base = sigma;
    for (const Gate *g : unitaries) {
        const auto *u = std::get<const UnitaryOp *>(choose(c, *g, key_from_track(*g, partial)));
        base = conjugate_local(u->matrix, g->registers, n, base);
    }
    std::vector<const Measurement *> selected;
    for (const Gate *g : measures) {
        selected.push_back(std::get<const Measurement *>(choose(c, *g, key_from_track(*g, partial))));
    }
    std::vector<Candidate> out;
    Candidate current;
    std::function<void(std::size_t, const ComplexMatrix &)> walk = [&](std::size_t i, const ComplexMatrix &state) {
        if (i == measures.size()) {
            current.state = state;
            current.weight = trace(state).real();
            out.push_back(current);
            return;
        }
        for (const auto &[label, op] : selected[i]->outcomes) {
            current.outcomes.emplace_back(measures[i]->id, label);
            walk(i + 1, conjugate_local(op, measures[i]->registers, n, state));
            current.outcomes.pop_back();
        }
    };
    walk(0, base);
    return out;
}

using Chooser = std::function<std::size_t(std::size_t t, const std::vector<Candidate> &, double before)>;

RunResult execute(const QuantumCircuit &c, const Schedule &x, const DensityOperator &rho, const Chooser &pick) {
    require_dimension(c, rho);
    if (!validate_schedule(c, x)) {
        throw InvalidArgument("not a valid schedule of the circuit");
    }
    RunResult result;
    ComplexMatrix sigma = rho.matrix();
    double before = rho.trace();
    for (std::size_t t = 0; t < x.bouts.size(); ++t) {
        auto candidates = expand_bout(c, x.bouts[t], result.track, sigma);
        std::size_t k = pick(t, candidates, before);
        Candidate &chosen = candidates[k];
        StepRecord step;
        step.bout = x.bouts[t];
        step.outcomes = chosen.outcomes;
        step.probability = before > 0 ? chosen.weight / before : 0.0;
        for (const auto &[gate, label] : chosen.outcomes) {
            result.track.outcomes[gate] = label;
        }
        result.steps.push_back(std::move(step));
        sigma = std::move(chosen.state);
        before = chosen.weight;
    }
    result.final_state = std::move(sigma);
    return result;
}

}  // namespace

Choice select_measurement(const QuantumCircuit &c, const GateId &g, const SelectorKey &source_outcomes) {
    return choose(c, c.gate(g), source_outcomes);
}

bool is_coherent_track(const QuantumCircuit &c, const Track &f) {
    std::size_t measured = 0;
    for (const Gate &g : c.gates) {
        if (!g.is_measurement()) {
            if (f.outcomes.contains(g.id)) {
                return false;
            }
            continue;
        }
        auto it = f.outcomes.find(g.id);
        if (it == f.outcomes.end()) {
            return false;
        }
        ++measured;
        try {
            const auto *m = std::get<const Measurement *>(choose(c, g, key_from_track(g, f)));
            if (!m->outcomes.contains(it->second)) {
                return false;
            }
        } catch (const InvalidArgument &) {
            return false;
        }
    }
    return measured == f.outcomes.size();
}

const ComplexMatrix &gate_operator(const QuantumCircuit &c, const Gate &g, const Track &f) {
    Choice choice = choose(c, g, key_from_track(g, f));
    if (const auto *u = std::get_if<const UnitaryOp *>(&choice)) {
        return (*u)->matrix;
    }
    const auto *m = std::get<const Measurement *>(choice);
    auto it = f.outcomes.find(g.id);
    if (it == f.outcomes.end()) {
        throw InvalidArgument("track has no outcome for measurement gate '" + g.id + "'");
    }
    auto op = m->outcomes.find(it->second);
    if (op == m->outcomes.end()) {
        throw InvalidArgument("incoherent track: '" + it->second + "' is not an outcome of the measurement '" +
                              g.id + "' selects");
    }
    return op->second;
}

ComplexMatrix bout_operator(const QuantumCircuit &c, const Bout &b, const Track &f) {
    if (b.empty()) {
        throw InvalidArgument("empty bout");
    }
    ComplexMatrix local = ComplexMatrix::identity(1);
    std::vector<std::size_t> registers;
    for (const auto &id : b) {
        const Gate &g = gate_by_id(c, id);
        local = tensor(local, gate_operator(c, g, f));
        registers.insert(registers.end(), g.registers.begin(), g.registers.end());
    }
    return embed(local, registers, c.n_registers());
}

std::vector<Track> enumerate_tracks(const QuantumCircuit &c, std::size_t cap) {
    Precedence p(c);
    std::vector<const Gate *> order;
    for (std::size_t i : p.topological_order()) {
        if (c.gates[i].is_measurement()) {
            order.push_back(&c.gates[i]);
        }
    }
    std::vector<Track> out;
    Track current;
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == order.size()) {
            if (out.size() == cap) {
                throw Error("circuit has more than " + std::to_string(cap) + " tracks");
            }
            out.push_back(current);
            return;
        }
        const Gate &g = *order[i];
        const auto *m = std::get<const Measurement *>(choose(c, g, key_from_track(g, current)));
        for (const auto &[label, op] : m->outcomes) {
            current.outcomes[g.id] = label;
            walk(i + 1);
        }
        current.outcomes.erase(g.id);
    };
    walk(0);
    return out;
}

ComplexMatrix cumulative_operator(const QuantumCircuit &c, const Schedule &x, const Track &f) {
    if (!validate_schedule(c, x)) {
        throw InvalidArgument("not a valid schedule of the circuit");
    }
    if (!is_coherent_track(c, f)) {
        throw InvalidArgument("incoherent track");
    }
    std::size_t n = c.n_registers();
    ComplexMatrix acc = ComplexMatrix::identity(std::size_t{1} << n);
    for (const Bout &bout : x.bouts) {
        // Gates of a bout act on disjoint registers, so applying them one by
        // one equals applying their tensor product.
        for (const auto &id : bout) {
            const Gate &g = gate_by_id(c, id);
            apply_local_to_columns(gate_operator(c, g, f), g.registers, n, acc);
        }
    }
    return acc;
}

double AggregateMeasurement::completeness_error() const {
    if (operators.empty()) {
        return 0;
    }
    std::size_t dim = operators.front().second.cols();
    ComplexMatrix sum(dim, dim);
    for (const auto &[f, op] : operators) {
        sum += dagger(op) * op;
    }
    return max_abs_diff(sum, ComplexMatrix::identity(dim));
}

AggregateMeasurement aggregate_measurement(const QuantumCircuit &c, std::size_t cap) {
    Schedule x = greedy_schedule(c);
    AggregateMeasurement out;
    for (Track &f : enumerate_tracks(c, cap)) {
        ComplexMatrix op = cumulative_operator(c, x, f);
        out.operators.emplace_back(std::move(f), std::move(op));
    }
    return out;
}

bool schedules_equivalent(const QuantumCircuit &c, const Schedule &x, const Schedule &y, double tol) {
    for (const Track &f : enumerate_tracks(c)) {
        if (!approx_equal(cumulative_operator(c, x, f), cumulative_operator(c, y, f), tol)) {
            return false;
        }
    }
    return true;
}

double track_probability(const QuantumCircuit &c, const Track &f, const DensityOperator &rho) {
    require_dimension(c, rho);
    if (!is_coherent_track(c, f)) {
        throw InvalidArgument("incoherent track");
    }
    std::size_t n = c.n_registers();
    Precedence p(c);
    ComplexMatrix sigma = rho.matrix();
    for (std::size_t i : p.topological_order()) {
        const Gate &g = c.gates[i];
        sigma = conjugate_local(gate_operator(c, g, f), g.registers, n, sigma);
    }
    return trace(sigma).real() / rho.trace();
}

double RunResult::probability() const {
    double p = 1.0;
    for (const auto &s : steps) {
        p *= s.probability;
    }
    return p;
}

RunResult run(const QuantumCircuit &c, const Schedule &x, const DensityOperator &rho, std::uint64_t seed) {
    return execute(c, x, rho, [seed](std::size_t t, const std::vector<Candidate> &cands, double before) {
        double total = 0;
        for (const auto &cand : cands) {
            total += std::max(cand.weight, 0.0);
        }
        if (!(before > 0) || !(total > 0)) {
            throw Error("zero-trace state reached while sampling bout " + std::to_string(t));
        }
        double u = bout_variate(seed, t) * total;
        double acc = 0;
        std::size_t last_positive = 0;
        for (std::size_t k = 0; k < cands.size(); ++k) {
            if (cands[k].weight <= 0) {
                continue;
            }
            last_positive = k;
            acc += cands[k].weight;
            if (u < acc) {
                return k;
            }
        }
        return last_positive;
    });
}

RunResult replay(const QuantumCircuit &c, const Schedule &x, const DensityOperator &rho, const Track &f) {
    if (!is_coherent_track(c, f)) {
        throw InvalidArgument("incoherent track");
    }
    return execute(c, x, rho, [&f](std::size_t, const std::vector<Candidate> &cands, double) {
        for (std::size_t k = 0; k < cands.size(); ++k) {
            bool match = true;
            for (const auto &[gate, label] : cands[k].outcomes) {
                match = match && f.outcomes.at(gate) == label;
            }
            if (match) {
                return k;
            }
        }
        throw InvalidArgument("track outcome not offered by the selected measurement");
    });
}

std::vector<std::pair<Track, StateVector>> branch_pure(const QuantumCircuit &c, const StateVector &psi,
                                                       std::size_t cap) {
    std::size_t n = c.n_registers();
    if (psi.size() != (std::size_t{1} << n)) {
        throw DimensionError("state has length " + std::to_string(psi.size()) + " for " + std::to_string(n) +
                             " registers");
    }
    Precedence p(c);
    const auto &order = p.topological_order();
    std::vector<std::pair<Track, StateVector>> out;
    Track current;
    std::function<void(std::size_t, StateVector)> walk = [&](std::size_t pos, StateVector state) {
        while (pos < order.size() && !c.gates[order[pos]].is_measurement()) {
            const Gate &g = c.gates[order[pos]];
            apply_local(gate_operator(c, g, current), g.registers, n, state);
            ++pos;
        }
        if (pos == order.size()) {
            if (out.size() == cap) {
                throw Error("circuit has more than " + std::to_string(cap) + " tracks");
            }
            out.emplace_back(current, std::move(state));
            return;
        }
        const Gate &g = c.gates[order[pos]];
        const auto *m = std::get<const Measurement *>(choose(c, g, key_from_track(g, current)));
        for (const auto &[label, op] : m->outcomes) {
            StateVector next = state;
            apply_local(op, g.registers, n, next);
            current.outcomes[g.id] = label;
            walk(pos + 1, std::move(next));
        }
        current.outcomes.erase(g.id);
    };
    walk(0, psi);
    return out;
}

}  // namespace qcirc
