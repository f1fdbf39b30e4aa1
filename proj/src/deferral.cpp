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

#include "qcirc/deferral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace qcirc {

namespace {

constexpr double kCompletionFloor = 1e-7;

ComplexMatrix cnot_matrix() {
    return ComplexMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
}

std::string fresh_name(const std::set<std::string> &used, const std::string &base) {
    if (!used.contains(base)) {
        return base;
    }
    for (std::size_t i = 1;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!used.contains(candidate)) {
            return candidate;
        }
    }
}

std::set<std::string> gate_ids(const QuantumCircuit &c) {
    std::set<std::string> ids;
    for (const auto &g : c.gates) {
        ids.insert(g.id);
    }
    return ids;
}

std::size_t add_ancilla(QuantumCircuit &c, const std::string &base) {
    std::set<std::string> names(c.register_names.begin(), c.register_names.end());
    c.register_names.push_back(fresh_name(names, base));
    return c.register_names.size() - 1;
}

std::string bit_string(std::size_t value, std::size_t width) {
    std::string out(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if ((value >> (width - 1 - i)) & 1) {
            out[i] = '1';
        }
    }
    return out;
}

std::size_t bits_value(const std::string &bits) {
    std::size_t v = 0;
    for (char ch : bits) {
        v = (v << 1) | (ch == '1' ? 1u : 0u);
    }
    return v;
}

/// b such that op = |b><b| within tol.
std::optional<std::size_t> basis_projector_index(const ComplexMatrix &op, double tol) {
    if (!op.is_square()) {
        return std::nullopt;
    }
    std::optional<std::size_t> found;
    for (std::size_t r = 0; r < op.rows(); ++r) {
        for (std::size_t c = 0; c < op.cols(); ++c) {
            Complex expected = 0;
            if (r == c && std::abs(op(r, c) - Complex{1, 0}) <= tol) {
                if (found) {
                    return std::nullopt;
                }
                found = r;
                continue;
            }
            if (std::abs(op(r, c) - expected) > tol) {
                return std::nullopt;
            }
        }
    }
    return found;
}

const Measurement &sole_measurement(const Gate &g) {
    if (!g.is_measurement() || g.measurements.size() != 1) {
        throw InvalidArgument("gate '" + g.id + "' is not a measurement gate with a single measurement");
    }
    return g.measurements.begin()->second;
}

/// Label -> basis index of a standard measurement.
std::map<OutcomeLabel, std::size_t> standard_basis(const Measurement &m, double tol) {
    std::map<OutcomeLabel, std::size_t> out;
    for (const auto &[label, op] : m.outcomes) {
        auto b = basis_projector_index(op, tol);
        if (!b) {
            throw InvalidArgument("measurement '" + m.id + "' is not standard");
        }
        out.emplace(label, *b);
    }
    return out;
}

OutcomeLabel label_for_basis(const Measurement &m, std::size_t b, double tol) {
    for (const auto &[label, index] : standard_basis(m, tol)) {
        if (index == b) {
            return label;
        }
    }
    throw InvalidArgument("measurement '" + m.id + "' has no outcome for basis state " + std::to_string(b));
}

void require_constraint(const QuantumCircuit &c) {
    auto violations = deferral_constraint_violations(c);
    if (!violations.empty()) {
        throw DeferralRejected(std::move(violations));
    }
}

std::size_t control_position(const Gate &g, const GateId &src) {
    return static_cast<std::size_t>(std::find(g.controls.begin(), g.controls.end(), src) - g.controls.begin());
}

/// Collapses repeated sources of `g` (same gate listed twice) by keeping only
/// selector entries where the repeated positions agree.
void collapse_repeated_sources(Gate &g) {
    for (std::size_t j = 0; j < g.controls.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (g.controls[i] != g.controls[j]) {
                continue;
            }
            std::map<SelectorKey, std::string> kept;
            for (const auto &[key, target] : g.selector) {
                if (key[i] == key[j]) {
                    SelectorKey k = key;
                    k.erase(k.begin() + static_cast<std::ptrdiff_t>(j));
                    kept.emplace(std::move(k), target);
                }
            }
            g.selector = std::move(kept);
            g.controls.erase(g.controls.begin() + static_cast<std::ptrdiff_t>(j));
            collapse_repeated_sources(g);
            return;
        }
    }
}

/// Keeps only the choice a non-CC gate's selector still names.
void prune_unselected(Gate &g) {
    if (g.is_classically_controlled()) {
        return;
    }
    const std::string target = g.selector.at(SelectorKey{});
    std::erase_if(g.unitaries, [&](const auto &kv) { return kv.first != target; });
    std::erase_if(g.measurements, [&](const auto &kv) { return kv.first != target; });
}

StateVector normalized(const StateVector &psi) {
    double norm = 0;
    for (const auto &a : psi) {
        norm += std::norm(a);
    }
    if (!(norm > 0)) {
        throw InvalidArgument("input state is zero");
    }
    StateVector out = psi;
    double scale = 1.0 / std::sqrt(norm);
    for (auto &a : out) {
        a *= scale;
    }
    return out;
}

double squared_norm(const StateVector &v) {
    double s = 0;
    for (const auto &a : v) {
        s += std::norm(a);
    }
    return s;
}

/// Reduced state of the leading `kept` qubits of a pure vector, ancillas being
/// the trailing `traced` qubits.
ComplexMatrix reduce_trailing(const StateVector &phi, std::size_t kept, std::size_t traced) {
    std::size_t dim = std::size_t{1} << kept;
    std::size_t inner = std::size_t{1} << traced;
    ComplexMatrix out(dim, dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
            Complex acc = 0;
            for (std::size_t t = 0; t < inner; ++t) {
                acc += phi[a * inner + t] * std::conj(phi[b * inner + t]);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

}  // namespace

MeasurementClass classify_measurement(const Measurement &m, double tol) {
    MeasurementClass out;
    std::vector<const ComplexMatrix *> ops;
    for (const auto &[label, op] : m.outcomes) {
        ops.push_back(&op);
    }
    bool projective = !ops.empty();
    for (const auto *op : ops) {
        projective = projective && op->is_square() && is_hermitian(*op, tol) && approx_equal(*op * *op, *op, tol);
    }
    for (std::size_t i = 0; projective && i < ops.size(); ++i) {
        for (std::size_t j = i + 1; projective && j < ops.size(); ++j) {
            ComplexMatrix prod = *ops[i] * *ops[j];
            projective = approx_equal(prod, ComplexMatrix(prod.rows(), prod.cols()), tol);
        }
    }
    out.projective = projective;
    if (!projective) {
        return out;
    }
    // The rank of a projector is its trace.
    out.complete = std::all_of(ops.begin(), ops.end(),
                               [&](const ComplexMatrix *op) { return std::abs(trace(*op) - Complex{1, 0}) <= tol; });
    out.standard = out.complete && std::all_of(ops.begin(), ops.end(), [&](const ComplexMatrix *op) {
                       return basis_projector_index(*op, tol).has_value();
                   });
    return out;
}

GateSet red_gates(const QuantumCircuit &c) {
    Precedence p(c);
    GateSet out;
    for (std::size_t j = 0; j < c.gates.size(); ++j) {
        if (c.gates[j].is_measurement()) {
            continue;
        }
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
            if (c.gates[i].is_measurement() && p.precedes(i, j)) {
                out.insert(c.gates[j].id);
                break;
            }
        }
    }
    return out;
}

std::vector<Diagnostic> deferral_constraint_violations(const QuantumCircuit &c) {
    std::vector<Diagnostic> out;
    for (const Gate &g : c.gates) {
        if (g.is_measurement() && g.is_classically_controlled()) {
            out.push_back({Severity::error, "cc-measurement", g.id,
                           "classically controlled measurement gates cannot be deferred"});
        }
    }
    return out;
}

DeferralRejected::DeferralRejected(std::vector<Diagnostic> diagnostics)
    : Error("circuit is outside the deferrable class (" + std::to_string(diagnostics.size()) + " violation" +
            (diagnostics.size() == 1 ? "" : "s") + ")"),
      diagnostics_(std::move(diagnostics)) {}

Commensuration identity_commensuration(const QuantumCircuit &c) {
    Commensuration z;
    for (const Gate &g : c.gates) {
        if (g.is_measurement()) {
            z.zeta.emplace(g.id, g.id);
        }
    }
    return z;
}

std::vector<std::string> commensuration_errors(const QuantumCircuit &c, const QuantumCircuit &d,
                                               const Commensuration &zeta) {
    std::vector<std::string> errors;
    std::set<GateId> image;
    for (const auto &[from, to] : zeta.zeta) {
        auto ci = c.index_of(from);
        auto di = d.index_of(to);
        if (!ci || !c.gates[*ci].is_measurement()) {
            errors.push_back("'" + from + "' is not a measurement gate of the simulated circuit");
            continue;
        }
        if (!di || !d.gates[*di].is_measurement()) {
            errors.push_back("'" + to + "' is not a measurement gate of the simulating circuit");
            continue;
        }
        if (!image.insert(to).second) {
            errors.push_back("'" + to + "' is the image of more than one measurement");
        }
        auto have = d.gates[*di].outcomes();
        for (const auto &label : c.gates[*ci].outcomes()) {
            if (!have.contains(label)) {
                errors.push_back("'" + to + "' lacks outcome '" + label + "' of '" + from + "'");
            }
        }
    }
    for (const Gate &g : c.gates) {
        if (g.is_measurement() && !zeta.zeta.contains(g.id) && g.outcomes().size() != 1) {
            errors.push_back("measurement '" + g.id + "' has no counterpart");
        }
    }
    for (const Gate &g : d.gates) {
        if (g.is_measurement() && !image.contains(g.id)) {
            errors.push_back("measurement '" + g.id + "' of the simulating circuit is not in the image");
        }
    }
    return errors;
}

ComplexMatrix standardization_unitary(const Measurement &m, double tol) {
    if (m.outcomes.empty()) {
        throw InvalidArgument("measurement has no outcomes");
    }
    std::vector<const ComplexMatrix *> ops;
    for (const auto &[label, op] : m.outcomes) {
        ops.push_back(&op);
    }
    std::size_t count = ops.size();
    std::size_t l = count <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(count - 1));
    std::size_t local = ops.front()->rows();
    std::size_t slice = std::size_t{1} << l;
    std::size_t dim = local * slice;
    ComplexMatrix u(dim, dim);
    std::vector<StateVector> columns;
    std::vector<char> filled(dim, 0);
    for (std::size_t x = 0; x < local; ++x) {
        StateVector v(dim);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t y = 0; y < local; ++y) {
                v[y * slice + i] = (*ops[i])(y, x);
            }
        }
        double norm = std::sqrt(squared_norm(v));
        if (std::abs(norm - 1.0) > std::sqrt(tol)) {
            throw InvalidArgument("measurement '" + m.id + "' is not complete");
        }
        for (std::size_t r = 0; r < dim; ++r) {
            u(r, x * slice) = v[r];
        }
        filled[x * slice] = 1;
        columns.push_back(std::move(v));
    }
    std::size_t next_col = 0;
    for (std::size_t cand = 0; cand < dim && columns.size() < dim; ++cand) {
        StateVector r(dim);
        r[cand] = 1;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : columns) {
                Complex overlap = 0;
                for (std::size_t i = 0; i < dim; ++i) {
                    overlap += std::conj(b[i]) * r[i];
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    r[i] -= overlap * b[i];
                }
            }
        }
        double norm = std::sqrt(squared_norm(r));
        if (norm <= kCompletionFloor) {
            continue;
        }
        for (auto &a : r) {
            a /= norm;
        }
        while (filled[next_col]) {
            ++next_col;
        }
        for (std::size_t i = 0; i < dim; ++i) {
            u(i, next_col) = r[i];
        }
        filled[next_col] = 1;
        columns.push_back(std::move(r));
    }
    return u;
}

StandardizeResult standardize_measurement(const QuantumCircuit &c, const GateId &g, double tol) {
    require_constraint(c);
    auto idx = c.index_of(g);
    if (!idx) {
        throw UnknownName("unknown gate '" + g + "'");
    }
    const Gate &gate = c.gates[*idx];
    const Measurement &m = sole_measurement(gate);
    if (classify_measurement(m, tol).standard) {
        throw InvalidArgument("measurement gate '" + g + "' is already standard");
    }
    StandardizeResult res;
    QuantumCircuit w = c;
    std::vector<OutcomeLabel> labels;
    for (const auto &[label, op] : m.outcomes) {
        labels.push_back(label);
    }

    if (labels.size() == 1) {
        // A one-outcome measurement is a unitary; its channels carry no information.
        w.gates[*idx] = Gate::unitary(g, gate.registers, m.outcomes.begin()->second);
        for (Gate &consumer : w.gates) {
            std::size_t pos = control_position(consumer, g);
            if (pos == consumer.controls.size()) {
                continue;
            }
            std::map<SelectorKey, std::string> kept;
            for (const auto &[key, target] : consumer.selector) {
                if (key[pos] == labels.front()) {
                    SelectorKey k = key;
                    k.erase(k.begin() + static_cast<std::ptrdiff_t>(pos));
                    kept.emplace(std::move(k), target);
                }
            }
            consumer.selector = std::move(kept);
            consumer.controls.erase(consumer.controls.begin() + static_cast<std::ptrdiff_t>(pos));
            prune_unselected(consumer);
        }
        res.circuit = std::move(w);
        res.unitary_gate = g;
        for (const auto &[from, to] : identity_commensuration(c).zeta) {
            if (from != g) {
                res.zeta.zeta.emplace(from, to);
            }
        }
        return res;
    }

    std::size_t l = static_cast<std::size_t>(std::bit_width(labels.size() - 1));
    for (std::size_t j = 0; j < l; ++j) {
        res.ancilla_registers.push_back(add_ancilla(w, g + "_anc" + std::to_string(j)));
    }
    res.ancilla_count = l;
    auto used = gate_ids(c);
    GateId u_id = fresh_name(used, "U_" + g);
    used.insert(u_id);
    GateId p_id = fresh_name(used, "P_" + g);

    std::vector<std::size_t> u_regs = gate.registers;
    u_regs.insert(u_regs.end(), res.ancilla_registers.begin(), res.ancilla_registers.end());
    Gate u_gate = Gate::unitary(u_id, u_regs, standardization_unitary(m, tol));

    std::size_t slice = std::size_t{1} << l;
    Measurement p{"p", {}};
    std::set<OutcomeLabel> taken(labels.begin(), labels.end());
    std::vector<OutcomeLabel> extras;
    for (std::size_t i = 0; i < slice; ++i) {
        OutcomeLabel label;
        if (i < labels.size()) {
            label = labels[i];
        } else {
            label = "~" + std::to_string(i);
            while (taken.contains(label)) {
                label = "~" + label;
            }
            taken.insert(label);
            extras.push_back(label);
        }
        p.outcomes.emplace(label, ComplexMatrix::basis_projector(slice, i));
    }
    Gate p_gate = Gate::measure(p_id, res.ancilla_registers, std::move(p));

    w.gates[*idx] = std::move(u_gate);
    w.gates.insert(w.gates.begin() + static_cast<std::ptrdiff_t>(*idx) + 1, std::move(p_gate));
    for (Gate &consumer : w.gates) {
        std::size_t pos = control_position(consumer, g);
        if (pos == consumer.controls.size()) {
            continue;
        }
        consumer.controls[pos] = p_id;
        std::map<SelectorKey, std::string> extra_entries;
        for (const auto &[key, target] : consumer.selector) {
            if (key[pos] != labels.front()) {
                continue;
            }
            for (const auto &e : extras) {
                SelectorKey k = key;
                k[pos] = e;
                extra_entries.emplace(std::move(k), target);
            }
        }
        consumer.selector.merge(extra_entries);
    }
    res.circuit = std::move(w);
    res.unitary_gate = u_id;
    res.measurement_gate = p_id;
    for (const auto &[from, to] : identity_commensuration(c).zeta) {
        res.zeta.zeta.emplace(from, from == g ? p_id : to);
    }
    return res;
}

SplitResult split_standard_measurements(const QuantumCircuit &c, double tol) {
    require_constraint(c);
    SplitResult res;
    QuantumCircuit &w = res.circuit;
    w.register_names = c.register_names;
    auto used = gate_ids(c);
    // Original multi-register gate -> its pieces, for consumer rewriting.
    std::map<GateId, const SplitGroup *> split;

    for (const Gate &g : c.gates) {
        if (!g.is_measurement()) {
            w.gates.push_back(g);
            continue;
        }
        const Measurement &m = sole_measurement(g);
        auto basis = standard_basis(m, tol);
        SplitGroup group;
        std::size_t k = g.arity();
        for (const auto &[label, b] : basis) {
            group.bits.emplace(label, bit_string(b, k));
        }
        if (k == 1) {
            w.gates.push_back(g);
            group.pieces = {g.id};
        } else {
            for (std::size_t j = 0; j < k; ++j) {
                GateId piece = fresh_name(used, g.id + "_" + std::to_string(j));
                used.insert(piece);
                w.gates.push_back(Gate::measure(piece, {g.registers[j]}, standard_measurement("m", 1)));
                group.pieces.push_back(piece);
            }
        }
        auto [it, inserted] = res.groups.emplace(g.id, std::move(group));
        if (k > 1) {
            split.emplace(g.id, &it->second);
        }
    }

    for (Gate &consumer : w.gates) {
        for (std::size_t pos = consumer.controls.size(); pos-- > 0;) {
            auto it = split.find(consumer.controls[pos]);
            if (it == split.end()) {
                continue;
            }
            const SplitGroup &group = *it->second;
            std::map<SelectorKey, std::string> rekeyed;
            for (const auto &[key, target] : consumer.selector) {
                const std::string &bits = group.bits.at(key[pos]);
                SelectorKey k(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(pos));
                for (char bit : bits) {
                    k.push_back(std::string(1, bit));
                }
                k.insert(k.end(), key.begin() + static_cast<std::ptrdiff_t>(pos) + 1, key.end());
                rekeyed.emplace(std::move(k), target);
            }
            consumer.selector = std::move(rekeyed);
            consumer.controls.erase(consumer.controls.begin() + static_cast<std::ptrdiff_t>(pos));
            consumer.controls.insert(consumer.controls.begin() + static_cast<std::ptrdiff_t>(pos),
                                     group.pieces.begin(), group.pieces.end());
        }
    }

    // Drop a standard measurement that directly follows one on the same register.
    for (bool changed = true; changed;) {
        changed = false;
        std::map<std::size_t, std::size_t> last_on_register;
        for (std::size_t i = 0; i < w.gates.size() && !changed; ++i) {
            const Gate &t = w.gates[i];
            auto prev = last_on_register.find(t.registers.front());
            if (t.is_measurement() && prev != last_on_register.end() && w.gates[prev->second].is_measurement()) {
                const Gate &s = w.gates[prev->second];
                const Measurement &sm = sole_measurement(s);
                const Measurement &tm = sole_measurement(t);
                GateId dropped = t.id;
                GateId survivor = s.id;
                std::map<OutcomeLabel, OutcomeLabel> relabel;
                for (const auto &[label, b] : standard_basis(tm, tol)) {
                    relabel.emplace(label, label_for_basis(sm, b, tol));
                }
                for (Gate &consumer : w.gates) {
                    std::size_t pos = control_position(consumer, dropped);
                    if (pos == consumer.controls.size()) {
                        continue;
                    }
                    consumer.controls[pos] = survivor;
                    std::map<SelectorKey, std::string> rekeyed;
                    for (const auto &[key, target] : consumer.selector) {
                        SelectorKey k = key;
                        k[pos] = relabel.at(key[pos]);
                        rekeyed.emplace(std::move(k), target);
                    }
                    consumer.selector = std::move(rekeyed);
                    collapse_repeated_sources(consumer);
                }
                for (auto &[orig, group] : res.groups) {
                    std::replace(group.pieces.begin(), group.pieces.end(), dropped, survivor);
                }
                w.gates.erase(w.gates.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
            for (std::size_t r : t.registers) {
                last_on_register[r] = i;
            }
        }
    }
    return res;
}

DeferStepResult defer_past_gate(const QuantumCircuit &c, const GateId &g, double tol) {
    require_constraint(c);
    auto gi = c.index_of(g);
    if (!gi) {
        throw UnknownName("unknown gate '" + g + "'");
    }
    const Gate &target = c.gates[*gi];
    if (target.is_measurement()) {
        throw InvalidArgument("'" + g + "' is a measurement gate");
    }
    for (const Gate &h : c.gates) {
        if (h.is_measurement() && (h.arity() != 1 || !classify_measurement(sole_measurement(h), tol).standard)) {
            throw InvalidArgument("measurement '" + h.id + "' is not a single-register standard measurement");
        }
    }
    auto red = red_gates(c);
    if (!red.contains(g)) {
        throw InvalidArgument("'" + g + "' is not red");
    }
    Precedence p(c);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (p.precedes(i, *gi) && red.contains(c.gates[i].id)) {
            throw InvalidArgument("'" + g + "' has the red prerequisite '" + c.gates[i].id + "'");
        }
    }

    DeferStepResult res;
    QuantumCircuit w;
    w.register_names = c.register_names;
    auto used = gate_ids(c);
    std::map<GateId, std::size_t> carrier;
    std::vector<Gate> head, moved, tail;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (i == *gi) {
            continue;
        }
        const Gate &h = c.gates[i];
        if (!p.precedes(i, *gi)) {
            tail.push_back(h);
            continue;
        }
        if (!h.is_measurement()) {
            head.push_back(h);
            continue;
        }
        std::size_t r = h.registers.front();
        if (std::find(target.registers.begin(), target.registers.end(), r) != target.registers.end()) {
            std::size_t a = add_ancilla(w, h.id + "_copy");
            res.new_ancillas.push_back(a);
            GateId cx = fresh_name(used, "cx_" + h.id);
            used.insert(cx);
            head.push_back(Gate::unitary(cx, {r, a}, cnot_matrix()));
            Gate copy = h;
            copy.registers = {a};
            moved.push_back(std::move(copy));
            carrier[h.id] = a;
        } else {
            moved.push_back(h);
            carrier[h.id] = r;
        }
    }

    std::vector<std::size_t> control_regs;
    for (const auto &src : target.controls) {
        std::size_t r = carrier.at(src);
        if (std::find(control_regs.begin(), control_regs.end(), r) == control_regs.end()) {
            control_regs.push_back(r);
        }
    }
    std::size_t cbits = control_regs.size();
    std::size_t block = std::size_t{1} << target.arity();
    ComplexMatrix sigma_op(block << cbits, block << cbits);
    for (std::size_t j = 0; j < (std::size_t{1} << cbits); ++j) {
        SelectorKey key;
        for (const auto &src : target.controls) {
            auto pos = static_cast<std::size_t>(
                std::find(control_regs.begin(), control_regs.end(), carrier.at(src)) - control_regs.begin());
            std::size_t bit = (j >> (cbits - 1 - pos)) & 1;
            key.push_back(label_for_basis(sole_measurement(c.gate(src)), bit, tol));
        }
        const ComplexMatrix &u = target.unitaries.at(target.selector.at(key)).matrix;
        for (std::size_t r = 0; r < block; ++r) {
            for (std::size_t col = 0; col < block; ++col) {
                sigma_op(j * block + r, j * block + col) = u(r, col);
            }
        }
    }
    std::vector<std::size_t> sigma_regs = control_regs;
    sigma_regs.insert(sigma_regs.end(), target.registers.begin(), target.registers.end());

    w.gates = std::move(head);
    w.gates.push_back(Gate::unitary(g, std::move(sigma_regs), std::move(sigma_op)));
    w.gates.insert(w.gates.end(), moved.begin(), moved.end());
    w.gates.insert(w.gates.end(), tail.begin(), tail.end());
    res.circuit = std::move(w);
    res.zeta = identity_commensuration(c);
    return res;
}

DeferralResult defer_measurements(const QuantumCircuit &c, double tol) {
    auto diagnostics = validate_circuit(c, tol);
    if (!diagnostics.empty()) {
        throw InvalidArgument("circuit does not validate: " + diagnostics.front().code + " at " +
                              diagnostics.front().location);
    }
    require_constraint(c);
    if (red_gates(c).empty()) {
        return {c, identity_commensuration(c), {}};
    }

    QuantumCircuit w = c;
    std::vector<GateId> originals;
    std::map<GateId, GateId> current;
    for (const Gate &g : c.gates) {
        if (g.is_measurement()) {
            originals.push_back(g.id);
            current.emplace(g.id, g.id);
        }
    }
    for (const auto &id : originals) {
        if (classify_measurement(sole_measurement(w.gate(id)), tol).standard) {
            continue;
        }
        auto step = standardize_measurement(w, id, tol);
        w = std::move(step.circuit);
        if (step.measurement_gate) {
            current[id] = *step.measurement_gate;
        } else {
            current.erase(id);
        }
    }
    auto split = split_standard_measurements(w, tol);
    w = std::move(split.circuit);

    for (GateSet red = red_gates(w); !red.empty(); red = red_gates(w)) {
        Precedence p(w);
        std::optional<GateId> pick;
        for (std::size_t j = 0; j < w.gates.size() && !pick; ++j) {
            if (!red.contains(w.gates[j].id)) {
                continue;
            }
            bool clean = true;
            for (std::size_t i = 0; i < w.gates.size() && clean; ++i) {
                clean = !(p.precedes(i, j) && red.contains(w.gates[i].id));
            }
            if (clean) {
                pick = w.gates[j].id;
            }
        }
        w = defer_past_gate(w, *pick, tol).circuit;
    }

    // Every measurement now sits after all unitaries on its register and all
    // are diagonal, so they commute: measure each original once at the end.
    DeferralResult out;
    QuantumCircuit &d = out.circuit;
    d.register_names = w.register_names;
    std::set<GateId> final_ids;
    for (const auto &id : originals) {
        if (current.contains(id)) {
            final_ids.insert(current.at(id));
        }
    }
    std::set<GateId> used = final_ids;
    for (const Gate &g : w.gates) {
        if (!g.is_measurement()) {
            used.insert(g.id);
        }
    }
    for (const Gate &g : w.gates) {
        if (g.is_measurement()) {
            continue;
        }
        Gate u = g;
        if (final_ids.contains(u.id)) {
            u.id = fresh_name(used, u.id + "_u");
            used.insert(u.id);
        }
        d.gates.push_back(std::move(u));
    }
    for (const auto &id : originals) {
        auto it = current.find(id);
        if (it == current.end()) {
            continue;
        }
        const SplitGroup &group = split.groups.at(it->second);
        std::vector<std::size_t> regs;
        for (const auto &piece : group.pieces) {
            regs.push_back(w.gate(piece).registers.front());
        }
        std::size_t dim = std::size_t{1} << regs.size();
        Measurement m{"m", {}};
        for (const auto &[label, bits] : group.bits) {
            m.outcomes.emplace(label, ComplexMatrix::basis_projector(dim, bits_value(bits)));
        }
        d.gates.push_back(Gate::measure(it->second, std::move(regs), std::move(m)));
        out.zeta.zeta.emplace(id, it->second);
    }
    for (std::size_t r = c.n_registers(); r < d.n_registers(); ++r) {
        out.ancilla_registers.push_back(r);
    }
    auto post = validate_circuit(d, tol);
    if (!post.empty()) {
        throw Error("deferral produced an invalid circuit: " + post.front().code + " at " + post.front().location +
                    ": " + post.front().message);
    }
    return out;
}

std::vector<StateVector> basis_inputs(std::size_t n) {
    std::size_t dim = std::size_t{1} << n;
    std::vector<StateVector> out;
    for (std::size_t b = 0; b < dim; ++b) {
        StateVector v(dim);
        v[b] = 1;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<StateVector> random_inputs(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::size_t dim = std::size_t{1} << n;
    std::vector<StateVector> out;
    for (std::size_t k = 0; k < count; ++k) {
        StateVector v(dim);
        for (auto &a : v) {
            double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
            double angle = 2.0 * std::numbers::pi * uniform();
            a = {radius * std::cos(angle), radius * std::sin(angle)};
        }
        out.push_back(normalized(v));
    }
    return out;
}

FaithfulnessReport check_faithful(const QuantumCircuit &c, const QuantumCircuit &d, const Commensuration &zeta,
                                  std::span<const StateVector> inputs, double tol) {
    std::size_t nc = c.n_registers();
    std::size_t nd = d.n_registers();
    if (nd < nc) {
        throw InvalidArgument("simulating circuit has fewer registers than the simulated one");
    }
    auto errors = commensuration_errors(c, d, zeta);
    if (!errors.empty()) {
        throw InvalidArgument("invalid commensuration: " + errors.front());
    }
    std::size_t anc = nd - nc;
    FaithfulnessReport rep;
    auto fail = [&rep](FaithfulnessWitness w) {
        if (rep.passed) {
            rep.passed = false;
            rep.witness = std::move(w);
        }
    };

    for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (inputs[k].size() != (std::size_t{1} << nc)) {
            throw InvalidArgument("input " + std::to_string(k) + " has the wrong dimension");
        }
        StateVector psi = normalized(inputs[k]);
        StateVector psi_d(std::size_t{1} << nd);
        for (std::size_t x = 0; x < psi.size(); ++x) {
            psi_d[x << anc] = psi[x];
        }
        auto c_branches = branch_pure(c, psi);
        auto d_branches = branch_pure(d, psi_d);
        std::map<Track, const StateVector *> d_by_track;
        for (const auto &[g, phi] : d_branches) {
            d_by_track.emplace(g, &phi);
        }
        std::set<Track> matched;
        for (const auto &[f, phi_c] : c_branches) {
            Track g;
            for (const auto &[gate, label] : f.outcomes) {
                auto z = zeta.zeta.find(gate);
                if (z != zeta.zeta.end()) {
                    g.outcomes.emplace(z->second, label);
                }
            }
            double p_c = squared_norm(phi_c);
            auto it = d_by_track.find(g);
            double p_d = it == d_by_track.end() ? 0.0 : squared_norm(*it->second);
            double perr = std::abs(p_c - p_d);
            rep.max_probability_error = std::max(rep.max_probability_error, perr);
            ++rep.tracks_checked;
            if (perr > tol) {
                fail({k, "probability", f, g, p_c, p_d});
            }
            if (it != d_by_track.end()) {
                matched.insert(g);
                if (p_c > tol && p_d > tol) {
                    ComplexMatrix out_c = ComplexMatrix::outer(phi_c, phi_c);
                    out_c *= 1.0 / p_c;
                    ComplexMatrix out_d = reduce_trailing(*it->second, nc, anc);
                    out_d *= 1.0 / p_d;
                    double oerr = max_abs_diff(out_c, out_d);
                    rep.max_output_error = std::max(rep.max_output_error, oerr);
                    if (oerr > tol) {
                        fail({k, "output", f, g, 0.0, oerr});
                    }
                }
            }
        }
        for (const auto &[g, phi] : d_branches) {
            if (matched.contains(g)) {
                continue;
            }
            double p = squared_norm(phi);
            rep.max_stray_probability = std::max(rep.max_stray_probability, p);
            if (p > tol) {
                fail({k, "stray-track", Track{}, g, 0.0, p});
            }
        }
        ++rep.inputs_checked;
    }
    return rep;
}

}  // namespace qcirc
