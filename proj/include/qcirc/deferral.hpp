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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcirc/circuit.hpp"
#include "qcirc/error.hpp"
#include "qcirc/semantics.hpp"

namespace qcirc {

struct MeasurementClass {
    bool projective = false;
    bool complete = false;
    bool standard = false;

    friend bool operator==(const MeasurementClass &, const MeasurementClass &) = default;
};

MeasurementClass classify_measurement(const Measurement &m, double tol = kDefaultTolerance);

/// Unitary gates with a measurement gate among their prerequisites.
GateSet red_gates(const QuantumCircuit &c);

/// Diagnostics (code "cc-measurement") for every classically controlled
/// measurement gate. Deferral only handles circuits where this is empty.
std::vector<Diagnostic> deferral_constraint_violations(const QuantumCircuit &c);

/// Thrown by the deferral pass when its input is outside the class it handles.
class DeferralRejected : public Error {
   public:
    explicit DeferralRejected(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic> &diagnostics() const { return diagnostics_; }

   private:
    std::vector<Diagnostic> diagnostics_;
};

/// One-to-one map from measurement gates of one circuit to measurement gates
/// of another whose outcome sets contain the originals'.
struct Commensuration {
    std::map<GateId, GateId> zeta;

    friend bool operator==(const Commensuration &, const Commensuration &) = default;
};

/// Identity correspondence over the circuit's measurement gates.
Commensuration identity_commensuration(const QuantumCircuit &c);

/// Empty iff `zeta` is a valid correspondence from c to d. Measurement gates
/// of c whose every measurement has a single outcome may be left unmapped
/// (they act as unitaries).
std::vector<std::string> commensuration_errors(const QuantumCircuit &c, const QuantumCircuit &d,
                                               const Commensuration &zeta);

/// U on (registers ++ ancillas) with U(|psi> (x) |0..0>) = sum_i A_i|psi> (x) |i>,
/// outcome i being the i-th label in label order and ancillas the low bits.
/// Columns outside the |0..0> ancilla slice are completed by Gram-Schmidt over
/// the computational basis in index order.
ComplexMatrix standardization_unitary(const Measurement &m, double tol = kDefaultTolerance);

struct StandardizeResult {
    QuantumCircuit circuit;
    std::size_t ancilla_count = 0;
    std::vector<std::size_t> ancilla_registers;
    /// g -> the standard measurement replacing it (absent for 1-outcome gates).
    Commensuration zeta;
    GateId unitary_gate;
    std::optional<GateId> measurement_gate;
};

/// Replaces nonstandard measurement gate g by a unitary on its registers plus
/// fresh |0> ancillas followed by a standard measurement of the ancillas.
/// Outcomes beyond the original ones get fresh labels; consumers treat them
/// like the first original label. A single-outcome gate becomes a plain
/// unitary gate and its channels are dropped.
StandardizeResult standardize_measurement(const QuantumCircuit &c, const GateId &g,
                                          double tol = kDefaultTolerance);

/// Where an original measurement gate lives after splitting.
struct SplitGroup {
    /// One single-register standard measurement gate per original register.
    std::vector<GateId> pieces;
    /// Original label -> basis bit string over the pieces.
    std::map<OutcomeLabel, std::string> bits;
};

struct SplitResult {
    QuantumCircuit circuit;
    std::map<GateId, SplitGroup> groups;
};

/// Replaces every multi-register standard measurement by one measurement per
/// register (consumers re-keyed on the bits), then deletes measurements that
/// directly repeat a standard measurement of the same register, re-sourcing
/// their channels to the first one.
SplitResult split_standard_measurements(const QuantumCircuit &c, double tol = kDefaultTolerance);

struct DeferStepResult {
    QuantumCircuit circuit;
    Commensuration zeta;
    std::vector<std::size_t> new_ancillas;
};

/// Moves the measurement prerequisites of red gate g past it. Measurements on
/// registers g does not touch are moved after the replacement gate; those on
/// g's registers are copied onto fresh ancillas by a CNOT and the ancilla is
/// measured after it. g becomes the controlled unitary
/// |j>|x> -> |j> U_sigma(j)|x> over the control registers. Requires
/// single-register standard measurements and no red prerequisites of g.
DeferStepResult defer_past_gate(const QuantumCircuit &c, const GateId &g, double tol = kDefaultTolerance);

struct DeferralResult {
    QuantumCircuit circuit;
    Commensuration zeta;
    std::vector<std::size_t> ancilla_registers;
};

/// Full pass: standardize, split, defer gate by gate until no red gates are
/// left, then measure every original measurement once at the end. Throws
/// DeferralRejected for classically controlled measurement gates and
/// InvalidArgument for circuits that do not validate.
DeferralResult defer_measurements(const QuantumCircuit &c, double tol = kDefaultTolerance);

std::vector<StateVector> basis_inputs(std::size_t n);
/// Haar-like random pure states from a seeded Gaussian (Box-Muller over
/// mt19937_64, so the draw is identical on every platform).
std::vector<StateVector> random_inputs(std::size_t n, std::size_t count, std::uint64_t seed);

struct FaithfulnessWitness {
    std::size_t input_index = 0;
    /// "probability", "output" or "stray-track".
    std::string kind;
    Track c_track;
    Track d_track;
    double expected = 0;
    double actual = 0;
};

struct FaithfulnessReport {
    bool passed = true;
    std::size_t inputs_checked = 0;
    std::size_t tracks_checked = 0;
    double max_probability_error = 0;
    double max_output_error = 0;
    double max_stray_probability = 0;
    std::optional<FaithfulnessWitness> witness;
};

/// Checks that d faithfully simulates c on every input: equal per-track
/// probabilities under zeta (ancillas of d start in |0>), equal normalized
/// outputs after tracing out the ancillas, and zero probability for every d
/// track outside zeta's image. Throws InvalidArgument when d does not extend
/// c's registers or zeta is invalid.
FaithfulnessReport check_faithful(const QuantumCircuit &c, const QuantumCircuit &d, const Commensuration &zeta,
                                  std::span<const StateVector> inputs, double tol = kDefaultTolerance);

}  // namespace qcirc
