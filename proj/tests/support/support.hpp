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
#include <random>
#include <string>
#include <vector>

#include "qcirc/circuit.hpp"
#include "qcirc/linalg.hpp"
#include "qcirc/scheduling.hpp"
#include "qcirc/semantics.hpp"

namespace qcirc::testing {

using Rng = std::mt19937_64;

ComplexMatrix hadamard();
ComplexMatrix pauli_x();
ComplexMatrix pauli_z();
ComplexMatrix cnot();

/// Three registers (psi, alice, bob): CNOT, H, M, N, X^N on bob, Z^M on bob.
QuantumCircuit teleportation();
/// psi on register 0 tensored with the Bell pair (|00> + |11>)/sqrt2.
StateVector teleportation_input(const StateVector &psi);

/// One-register circuit measuring in the computational basis.
QuantumCircuit single_standard_measurement();
/// Measurement in the |+>, |-> basis with labels "+" and "-".
Measurement plus_minus_measurement(const std::string &id = "pm");

double uniform(Rng &rng);
Complex gaussian(Rng &rng);
StateVector random_ket(std::size_t n, Rng &rng);
/// Haar-ish unitary from the QR decomposition of a Gaussian matrix.
ComplexMatrix random_unitary(std::size_t dim, Rng &rng);
/// Kraus family with `count` outcomes labelled prefix+index; sum A^dagger A = I.
Measurement random_measurement(std::size_t dim, std::size_t count, const std::string &prefix, Rng &rng);
/// Un-normalized positive semidefinite matrix with random trace.
ComplexMatrix random_density(std::size_t n, Rng &rng);

struct RandomCircuitOptions {
    std::size_t min_registers = 1;
    std::size_t max_registers = 4;
    std::size_t min_gates = 1;
    std::size_t max_gates = 6;
    std::size_t max_arity = 2;
    std::size_t max_outcomes = 3;
    double p_unitary = 0.3;
    double p_measure = 0.35;
    double p_cc_unitary = 0.25;
    double p_cc_measure = 0.1;
    /// Standard measurements only (otherwise random Kraus families too).
    bool standard_only = false;
    std::size_t max_measurements = 100;
};

QuantumCircuit random_circuit(Rng &rng, const RandomCircuitOptions &options);

/// Direct sources recomputed from the register/control definitions.
std::vector<std::vector<char>> precedence_oracle(const QuantumCircuit &c);

/// A (x) B by the index formula (r1*rB + r2, c1*cB + c2).
ComplexMatrix kron_oracle(const ComplexMatrix &a, const ComplexMatrix &b);
/// Embedding by permuting qubits of op (x) I so `registers` land in place.
ComplexMatrix embed_oracle(const ComplexMatrix &op, const std::vector<std::size_t> &registers, std::size_t n);
/// Partial trace by direct double-index summation.
ComplexMatrix partial_trace_oracle(const ComplexMatrix &m, std::size_t n, const std::vector<std::size_t> &keep);

/// Cumulative operator by multiplying full-space embedded gate operators in
/// the order of a linear schedule.
ComplexMatrix cumulative_oracle(const QuantumCircuit &c, const std::vector<GateId> &order, const Track &f);

/// Every track reachable by choosing outcomes gate by gate in sequence order.
std::vector<Track> tracks_oracle(const QuantumCircuit &c);

/// Linear extensions by filtering all permutations.
std::vector<std::vector<std::string>> linear_extensions_oracle(const Poset &p);

std::size_t inversion_count(const std::vector<std::string> &from, const std::vector<std::string> &to);

std::string read_text(const std::string &path);

}  // namespace qcirc::testing
