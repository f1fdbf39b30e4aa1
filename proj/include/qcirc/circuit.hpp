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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcirc/linalg.hpp"

namespace qcirc {

using GateId = std::string;
using OutcomeLabel = std::string;
using GateSet = std::set<GateId>;
/// One outcome label per classical source, in the gate's `controls` order.
using SelectorKey = std::vector<OutcomeLabel>;

/// Indexed family {A_i} with sum_i A_i^dagger A_i = I.
struct Measurement {
    std::string id;
    std::map<OutcomeLabel, ComplexMatrix> outcomes;

    friend bool operator==(const Measurement &, const Measurement &) = default;
};

struct UnitaryOp {
    std::string id;
    ComplexMatrix matrix;

    friend bool operator==(const UnitaryOp &, const UnitaryOp &) = default;
};

enum class GateKind { unitary, measure };

/// A gate bound to an ordered list of registers. A unitary gate carries one
/// or more unitaries, a measurement gate one or more measurements; the
/// selector picks one of them from the outcomes of the classical sources.
struct Gate {
    GateId id;
    std::vector<std::size_t> registers;
    GateKind kind = GateKind::unitary;
    std::map<std::string, UnitaryOp> unitaries;
    std::map<std::string, Measurement> measurements;
    std::vector<GateId> controls;
    std::map<SelectorKey, std::string> selector;

    bool is_measurement() const { return kind == GateKind::measure; }
    bool is_classically_controlled() const { return !controls.empty(); }
    std::size_t arity() const { return registers.size(); }
    /// O(G): union of the outcome labels of every assigned measurement.
    std::set<OutcomeLabel> outcomes() const;
    /// The measurement owning `label`, or nullptr.
    const Measurement *measurement_with_outcome(const OutcomeLabel &label) const;

    /// Non-CC unitary gate with a single op named "u".
    static Gate unitary(GateId id, std::vector<std::size_t> registers, ComplexMatrix matrix);
    /// Non-CC measurement gate.
    static Gate measure(GateId id, std::vector<std::size_t> registers, Measurement m);
    /// CC unitary gate: `when_set` is applied when every source reports
    /// `set_label`, identity otherwise.
    static Gate controlled_unitary(GateId id, std::vector<std::size_t> registers, ComplexMatrix when_set,
                                   std::vector<GateId> controls, const OutcomeLabel &set_label = "1");

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// Register-based syntactic circuit with its measurement/unitary assignments.
/// Gate order in `gates` fixes the quantum source relation: a gate's source on
/// register r is the previous gate touching r.
struct QuantumCircuit {
    std::vector<std::string> register_names;
    std::vector<Gate> gates;

    std::size_t n_registers() const { return register_names.size(); }
    std::optional<std::size_t> index_of(const GateId &id) const;
    /// Throws UnknownName.
    const Gate &gate(const GateId &id) const;
    Gate &gate(const GateId &id);

    friend bool operator==(const QuantumCircuit &, const QuantumCircuit &) = default;
};

/// Standard measurement on k registers with bit-string labels ("0", "01", ...).
Measurement standard_measurement(std::string id, std::size_t k);

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    std::string location;
    std::string message;

    friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

/// Every diagnostic code the library can emit.
const std::vector<std::string> &diagnostic_codes();

/// Empty iff the circuit satisfies every structural and semantic invariant.
std::vector<Diagnostic> validate_circuit(const QuantumCircuit &c, double tol = kDefaultTolerance);

/// Source relation and its transitive closure over gate sequence indices.
/// Requires resolvable classical sources and an acyclic relation; throws
/// InvalidArgument otherwise.
class Precedence {
   public:
    explicit Precedence(const QuantumCircuit &c);

    std::size_t size() const { return direct_.size(); }
    /// Direct sources (quantum or classical) of gate i.
    const std::vector<std::size_t> &sources(std::size_t i) const { return direct_[i]; }
    /// i is a prerequisite of j.
    bool precedes(std::size_t i, std::size_t j) const { return closure_[j][i] != 0; }
    bool comparable(std::size_t i, std::size_t j) const { return precedes(i, j) || precedes(j, i); }
    /// Kahn's order, ties broken by sequence index.
    const std::vector<std::size_t> &topological_order() const { return topo_; }

   private:
    std::vector<std::vector<std::size_t>> direct_;
    std::vector<std::vector<char>> closure_;
    std::vector<std::size_t> topo_;
};

/// Input node (gate empty) or the exit of `gate` on `register_index`.
struct Producer {
    std::size_t register_index = 0;
    std::optional<GateId> gate;

    friend auto operator<=>(const Producer &, const Producer &) = default;
};

GateSet prerequisites(const QuantumCircuit &c, const GateId &g);
bool is_stage(const QuantumCircuit &c, const GateSet &s);
GateSet ready_gates(const QuantumCircuit &c, const GateSet &s);
/// The n producers feeding consumers outside the stage.
std::vector<Producer> stage_exits(const QuantumCircuit &c, const GateSet &s);
/// The circuit restricted to a stage, gates kept in order.
QuantumCircuit truncate(const QuantumCircuit &c, const GateSet &s);

}  // namespace qcirc
