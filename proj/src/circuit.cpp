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

#include "qcirc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "qcirc/error.hpp"

namespace qcirc {

namespace {

std::string join_key(const SelectorKey &key) {
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += key[i];
    }
    return out;
}

class DiagnosticSink {
   public:
    void error(std::string code, std::string location, std::string message) {
        out_.push_back({Severity::error, std::move(code), std::move(location), std::move(message)});
    }
    std::vector<Diagnostic> take() { return std::move(out_); }

   private:
    std::vector<Diagnostic> out_;
};

bool finite_matrix(const ComplexMatrix &m) {
    return std::all_of(m.entries().begin(), m.entries().end(),
                       [](const Complex &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void check_operator_shape(DiagnosticSink &sink, const std::string &where, const ComplexMatrix &m, std::size_t dim) {
    if (m.rows() != dim || m.cols() != dim) {
        sink.error("dimension-mismatch", where,
                   "operator is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                       std::to_string(dim) + "x" + std::to_string(dim));
    }
}

void validate_choices(DiagnosticSink &sink, const Gate &g, double tol) {
    std::size_t dim = g.registers.empty() || g.registers.size() > 20 ? 0 : std::size_t{1} << g.registers.size();
    if (g.kind == GateKind::unitary) {
        if (!g.measurements.empty()) {
            sink.error("kind-mismatch", g.id, "unitary gate carries measurements");
        }
        if (g.unitaries.empty()) {
            sink.error("no-choices", g.id, "unitary gate has no unitaries");
        }
        for (const auto &[key, op] : g.unitaries) {
            std::string where = g.id + "/" + key;
            if (op.id != key) {
                sink.error("kind-mismatch", where, "op id '" + op.id + "' does not match its key");
            }
            if (!finite_matrix(op.matrix)) {
                sink.error("non-finite", where, "matrix has non-finite entries");
                continue;
            }
            check_operator_shape(sink, where, op.matrix, dim);
            if (op.matrix.rows() == dim && op.matrix.cols() == dim && !is_unitary(op.matrix, tol)) {
                sink.error("not-unitary", where, "U^dagger U differs from identity");
            }
        }
        return;
    }
    if (!g.unitaries.empty()) {
        sink.error("kind-mismatch", g.id, "measurement gate carries unitaries");
    }
    if (g.measurements.empty()) {
        sink.error("no-choices", g.id, "measurement gate has no measurements");
    }
    std::map<OutcomeLabel, std::string> owner;
    for (const auto &[key, m] : g.measurements) {
        std::string where = g.id + "/" + key;
        if (m.id != key) {
            sink.error("kind-mismatch", where, "measurement id '" + m.id + "' does not match its key");
        }
        if (m.outcomes.empty()) {
            sink.error("empty-measurement", where, "measurement has no outcomes");
            continue;
        }
        bool shapes_ok = true;
        for (const auto &[label, op] : m.outcomes) {
            if (label.empty() || label.find(',') != std::string::npos) {
                sink.error("invalid-label", where, "outcome label '" + label + "' is empty or contains a comma");
            }
            auto [it, inserted] = owner.emplace(label, key);
            if (!inserted && it->second != key) {
                sink.error("outcome-overlap", where,
                           "outcome '" + label + "' also belongs to measurement '" + it->second + "'");
            }
            if (!finite_matrix(op)) {
                sink.error("non-finite", where + "/" + label, "operator has non-finite entries");
                shapes_ok = false;
                continue;
            }
            if (op.rows() != dim || op.cols() != dim) {
                check_operator_shape(sink, where + "/" + label, op, dim);
                shapes_ok = false;
            }
        }
        if (shapes_ok && dim != 0) {
            ComplexMatrix sum(dim, dim);
            for (const auto &[label, op] : m.outcomes) {
                sum += dagger(op) * op;
            }
            double err = max_abs_diff(sum, ComplexMatrix::identity(dim));
            if (err > tol) {
                sink.error("incomplete-measurement", where,
                           "sum of A^dagger A differs from identity by " + std::to_string(err));
            }
        }
    }
}

void validate_selector(DiagnosticSink &sink, const Gate &g, const QuantumCircuit &c) {
    std::set<std::string> targets;
    if (g.kind == GateKind::unitary) {
        for (const auto &[k, v] : g.unitaries) {
            targets.insert(k);
        }
    } else {
        for (const auto &[k, v] : g.measurements) {
            targets.insert(k);
        }
    }
    for (const auto &[key, target] : g.selector) {
        if (!targets.contains(target)) {
            sink.error("selector-unknown-target", g.id,
                       "selector entry '" + join_key(key) + "' names unknown choice '" + target + "'");
        }
    }
    if (!g.is_classically_controlled()) {
        if (targets.size() > 1) {
            sink.error("non-cc-multiple-choices", g.id, "gate without classical sources has several choices");
        }
        for (const auto &[key, target] : g.selector) {
            if (!key.empty()) {
                sink.error("selector-bad-key", g.id, "selector key '" + join_key(key) + "' on a non-CC gate");
            }
        }
        if (!g.selector.contains(SelectorKey{})) {
            sink.error("selector-not-total", g.id, "missing the empty selector key");
        }
        return;
    }
    std::vector<std::set<OutcomeLabel>> source_outcomes;
    for (const auto &src : g.controls) {
        auto idx = c.index_of(src);
        if (!idx || !c.gates[*idx].is_measurement()) {
            return;  // reported elsewhere
        }
        source_outcomes.push_back(c.gates[*idx].outcomes());
    }
    for (const auto &[key, target] : g.selector) {
        bool ok = key.size() == source_outcomes.size();
        for (std::size_t i = 0; ok && i < key.size(); ++i) {
            ok = source_outcomes[i].contains(key[i]);
        }
        if (!ok) {
            sink.error("selector-bad-key", g.id,
                       "selector key '" + join_key(key) + "' is not a tuple of source outcomes");
        }
    }
    // Totality over the product of source outcome sets.
    SelectorKey key(source_outcomes.size());
    std::function<bool(std::size_t)> walk = [&](std::size_t i) {
        if (i == source_outcomes.size()) {
            if (!g.selector.contains(key)) {
                sink.error("selector-not-total", g.id, "no selector entry for '" + join_key(key) + "'");
                return false;
            }
            return true;
        }
        for (const auto &label : source_outcomes[i]) {
            key[i] = label;
            if (!walk(i + 1)) {
                return false;
            }
        }
        return true;
    };
    walk(0);
}

}  // namespace

std::set<OutcomeLabel> Gate::outcomes() const {
    std::set<OutcomeLabel> out;
    for (const auto &[id, m] : measurements) {
        for (const auto &[label, op] : m.outcomes) {
            out.insert(label);
        }
    }
    return out;
}

const Measurement *Gate::measurement_with_outcome(const OutcomeLabel &label) const {
    for (const auto &[id, m] : measurements) {
        if (m.outcomes.contains(label)) {
            return &m;
        }
    }
    return nullptr;
}

Gate Gate::unitary(GateId id, std::vector<std::size_t> registers, ComplexMatrix matrix) {
    Gate g;
    g.id = std::move(id);
    g.registers = std::move(registers);
    g.kind = GateKind::unitary;
    g.unitaries.emplace("u", UnitaryOp{"u", std::move(matrix)});
    g.selector.emplace(SelectorKey{}, "u");
    return g;
}

Gate Gate::measure(GateId id, std::vector<std::size_t> registers, Measurement m) {
    Gate g;
    g.id = std::move(id);
    g.registers = std::move(registers);
    g.kind = GateKind::measure;
    std::string key = m.id;
    g.measurements.emplace(key, std::move(m));
    g.selector.emplace(SelectorKey{}, key);
    return g;
}

Gate Gate::controlled_unitary(GateId id, std::vector<std::size_t> registers, ComplexMatrix when_set,
                              std::vector<GateId> controls, const OutcomeLabel &set_label) {
    Gate g;
    g.id = std::move(id);
    g.registers = std::move(registers);
    g.kind = GateKind::unitary;
    std::size_t dim = when_set.rows();
    g.unitaries.emplace("id", UnitaryOp{"id", ComplexMatrix::identity(dim)});
    g.unitaries.emplace("u", UnitaryOp{"u", std::move(when_set)});
    g.controls = std::move(controls);
    std::size_t k = g.controls.size();
    for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
        SelectorKey key;
        bool all_set = true;
        for (std::size_t i = 0; i < k; ++i) {
            bool bit = (bits >> (k - 1 - i)) & 1;
            key.push_back(bit ? "1" : "0");
            all_set = all_set && key.back() == set_label;
        }
        g.selector.emplace(key, all_set ? "u" : "id");
    }
    return g;
}

std::optional<std::size_t> QuantumCircuit::index_of(const GateId &id) const {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (gates[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

const Gate &QuantumCircuit::gate(const GateId &id) const {
    auto idx = index_of(id);
    if (!idx) {
        throw UnknownName("unknown gate '" + id + "'");
    }
    return gates[*idx];
}

Gate &QuantumCircuit::gate(const GateId &id) {
    auto idx = index_of(id);
    if (!idx) {
        throw UnknownName("unknown gate '" + id + "'");
    }
    return gates[*idx];
}

Measurement standard_measurement(std::string id, std::size_t k) {
    Measurement m;
    m.id = std::move(id);
    std::size_t dim = std::size_t{1} << k;
    for (std::size_t b = 0; b < dim; ++b) {
        std::string label;
        for (std::size_t i = 0; i < k; ++i) {
            label += ((b >> (k - 1 - i)) & 1) ? '1' : '0';
        }
        m.outcomes.emplace(label, ComplexMatrix::basis_projector(dim, b));
    }
    return m;
}

const std::vector<std::string> &diagnostic_codes() {
    static const std::vector<std::string> codes = {
        "json-syntax",          "schema",
        "bad-registers",        "bad-gate-id",
        "no-registers",         "register-out-of-range",
        "duplicate-register",   "kind-mismatch",
        "no-choices",           "non-finite",
        "dimension-mismatch",   "not-unitary",
        "empty-measurement",    "incomplete-measurement",
        "invalid-label",        "outcome-overlap",
        "unknown-source",       "source-not-measurement",
        "duplicate-source",     "non-cc-multiple-choices",
        "selector-bad-key",     "selector-unknown-target",
        "selector-not-total",   "cycle",
        "cc-measurement",       "enumeration-truncated",
    };
    return codes;
}

std::vector<Diagnostic> validate_circuit(const QuantumCircuit &c, double tol) {
    DiagnosticSink sink;
    std::size_t n = c.n_registers();
    if (n == 0) {
        sink.error("bad-registers", "registers", "circuit has no registers");
    }
    {
        std::set<std::string> names;
        for (const auto &name : c.register_names) {
            if (!names.insert(name).second) {
                sink.error("bad-registers", "registers", "register name '" + name + "' is repeated");
            }
        }
    }
    std::set<GateId> ids;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate &g = c.gates[i];
        std::string where = g.id.empty() ? "#" + std::to_string(i) : g.id;
        if (g.id.empty()) {
            sink.error("bad-gate-id", where, "gate id is empty");
        } else if (!ids.insert(g.id).second) {
            sink.error("bad-gate-id", where, "gate id is used more than once");
        }
        if (g.registers.empty()) {
            sink.error("no-registers", where, "gate acts on no registers");
        }
        std::set<std::size_t> seen;
        for (std::size_t r : g.registers) {
            if (r >= n) {
                sink.error("register-out-of-range", where, "register " + std::to_string(r) + " does not exist");
            }
            if (!seen.insert(r).second) {
                sink.error("duplicate-register", where, "register " + std::to_string(r) + " listed twice");
            }
        }
        validate_choices(sink, g, tol);
    }

    bool sources_resolved = true;
    for (const Gate &g : c.gates) {
        std::set<GateId> seen;
        for (const auto &src : g.controls) {
            if (!seen.insert(src).second) {
                sink.error("duplicate-source", g.id, "classical source '" + src + "' listed twice");
            }
            auto idx = c.index_of(src);
            if (!idx) {
                sink.error("unknown-source", g.id, "classical source '" + src + "' does not exist");
                sources_resolved = false;
            } else if (!c.gates[*idx].is_measurement()) {
                sink.error("source-not-measurement", g.id, "classical source '" + src + "' is not a measurement gate");
            }
        }
        validate_selector(sink, g, c);
    }

    if (sources_resolved && ids.size() == c.gates.size()) {
        try {
            Precedence p(c);
        } catch (const InvalidArgument &e) {
            sink.error("cycle", "gates", e.what());
        }
    }
    return sink.take();
}

Precedence::Precedence(const QuantumCircuit &c) {
    std::size_t count = c.gates.size();
    direct_.assign(count, {});
    std::map<std::size_t, std::size_t> last_on_register;
    for (std::size_t i = 0; i < count; ++i) {
        std::set<std::size_t> srcs;
        for (std::size_t r : c.gates[i].registers) {
            auto it = last_on_register.find(r);
            if (it != last_on_register.end() && it->second != i) {
                srcs.insert(it->second);
            }
            last_on_register[r] = i;
        }
        for (const auto &src : c.gates[i].controls) {
            auto idx = c.index_of(src);
            if (!idx) {
                throw InvalidArgument("gate '" + c.gates[i].id + "' names unknown classical source '" + src + "'");
            }
            srcs.insert(*idx);
        }
        direct_[i].assign(srcs.begin(), srcs.end());
    }

    // Kahn's algorithm with a min-heap on sequence index.
    std::vector<std::size_t> indegree(count, 0);
    std::vector<std::vector<std::size_t>> consumers(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t s : direct_[i]) {
            if (s == i) {
                throw InvalidArgument("gate '" + c.gates[i].id + "' is its own classical source");
            }
            consumers[s].push_back(i);
            ++indegree[i];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < count; ++i) {
        if (indegree[i] == 0) {
            ready.push(i);
        }
    }
    while (!ready.empty()) {
        std::size_t i = ready.top();
        ready.pop();
        topo_.push_back(i);
        for (std::size_t j : consumers[i]) {
            if (--indegree[j] == 0) {
                ready.push(j);
            }
        }
    }
    if (topo_.size() != count) {
        std::string members;
        for (std::size_t i = 0; i < count; ++i) {
            if (indegree[i] != 0) {
                members += (members.empty() ? "" : ", ") + c.gates[i].id;
            }
        }
        throw InvalidArgument("source relation has a cycle through {" + members + "}");
    }

    closure_.assign(count, std::vector<char>(count, 0));
    for (std::size_t i : topo_) {
        for (std::size_t s : direct_[i]) {
            closure_[i][s] = 1;
            for (std::size_t k = 0; k < count; ++k) {
                closure_[i][k] |= closure_[s][k];
            }
        }
    }
}

namespace {

std::vector<std::size_t> resolve(const QuantumCircuit &c, const GateSet &s) {
    std::vector<std::size_t> out;
    for (const auto &id : s) {
        auto idx = c.index_of(id);
        if (!idx) {
            throw UnknownName("unknown gate '" + id + "'");
        }
        out.push_back(*idx);
    }
    return out;
}

bool stage_closed(const Precedence &p, const std::vector<char> &member) {
    for (std::size_t j = 0; j < member.size(); ++j) {
        if (!member[j]) {
            continue;
        }
        for (std::size_t i = 0; i < member.size(); ++i) {
            if (!member[i] && p.precedes(i, j)) {
                return false;
            }
        }
    }
    return true;
}

std::vector<char> membership(const QuantumCircuit &c, const GateSet &s) {
    std::vector<char> member(c.gates.size(), 0);
    for (std::size_t i : resolve(c, s)) {
        member[i] = 1;
    }
    return member;
}

}  // namespace

GateSet prerequisites(const QuantumCircuit &c, const GateId &g) {
    auto idx = c.index_of(g);
    if (!idx) {
        throw UnknownName("unknown gate '" + g + "'");
    }
    Precedence p(c);
    GateSet out;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (p.precedes(i, *idx)) {
            out.insert(c.gates[i].id);
        }
    }
    return out;
}

bool is_stage(const QuantumCircuit &c, const GateSet &s) {
    auto member = membership(c, s);
    return stage_closed(Precedence(c), member);
}

GateSet ready_gates(const QuantumCircuit &c, const GateSet &s) {
    auto member = membership(c, s);
    Precedence p(c);
    GateSet out;
    for (std::size_t j = 0; j < c.gates.size(); ++j) {
        if (member[j]) {
            continue;
        }
        bool ready = true;
        for (std::size_t i = 0; i < c.gates.size() && ready; ++i) {
            ready = !(p.precedes(i, j) && !member[i]);
        }
        if (ready) {
            out.insert(c.gates[j].id);
        }
    }
    return out;
}

std::vector<Producer> stage_exits(const QuantumCircuit &c, const GateSet &s) {
    auto member = membership(c, s);
    if (!stage_closed(Precedence(c), member)) {
        throw InvalidArgument("gate set is not a stage");
    }
    // Producers per register in sequence: input node, then each gate exit.
    // Bind maps each producer to the next consumer on the same register.
    std::size_t n = c.n_registers();
    std::vector<Producer> exits;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::size_t> chain;
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
            const auto &regs = c.gates[i].registers;
            if (std::find(regs.begin(), regs.end(), r) != regs.end()) {
                chain.push_back(i);
            }
        }
        for (std::size_t pos = 0; pos <= chain.size(); ++pos) {
            // pos == 0 is the input node; otherwise the exit of chain[pos-1].
            bool producer_inside = pos == 0 || member[chain[pos - 1]];
            bool consumer_outside = pos == chain.size() || !member[chain[pos]];
            if (producer_inside && consumer_outside) {
                Producer p{r, std::nullopt};
                if (pos > 0) {
                    p.gate = c.gates[chain[pos - 1]].id;
                }
                exits.push_back(std::move(p));
            }
        }
    }
    if (exits.size() != n) {
        throw Error("stage has " + std::to_string(exits.size()) + " exits, expected " + std::to_string(n));
    }
    return exits;
}

QuantumCircuit truncate(const QuantumCircuit &c, const GateSet &s) {
    auto member = membership(c, s);
    if (!stage_closed(Precedence(c), member)) {
        throw InvalidArgument("gate set is not a stage");
    }
    QuantumCircuit out;
    out.register_names = c.register_names;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (member[i]) {
            out.gates.push_back(c.gates[i]);
        }
    }
    return out;
}

}  // namespace qcirc
