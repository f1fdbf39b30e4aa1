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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "qcirc/circuit.hpp"
#include "qcirc/linalg.hpp"
#include "qcirc/scheduling.hpp"

namespace qcirc {

/// Outcome of every measurement gate. Unitary gates have no outcomes and
/// never appear here.
struct Track {
    std::map<GateId, OutcomeLabel> outcomes;

    friend auto operator<=>(const Track &, const Track &) = default;
};

inline constexpr std::size_t kDefaultTrackCap = std::size_t{1} << 16;

/// What a selector picked: a unitary for unitary gates, a measurement for
/// measurement gates.
using Choice = std::variant<const UnitaryOp *, const Measurement *>;

/// sigma_G applied to the outcomes of G's classical sources (in `controls`
/// order). Throws UnknownName for an unknown gate, InvalidArgument when the
/// tuple has the wrong arity or is not a key of the selector.
Choice select_measurement(const QuantumCircuit &c, const GateId &g, const SelectorKey &source_outcomes);

/// Every measurement gate has an outcome of the measurement its selector
/// picks, and nothing else is assigned.
bool is_coherent_track(const QuantumCircuit &c, const Track &f);

/// The local operator gate `g` applies on track f.
const ComplexMatrix &gate_operator(const QuantumCircuit &c, const Gate &g, const Track &f);

/// Tensor product of the operators selected for the bout's gates, embedded
/// on the full register space.
ComplexMatrix bout_operator(const QuantumCircuit &c, const Bout &b, const Track &f);

/// Coherent tracks, depth first in topological gate order with outcomes in
/// label order. Throws Error once more than `cap` tracks exist.
std::vector<Track> enumerate_tracks(const QuantumCircuit &c, std::size_t cap = kDefaultTrackCap);

/// A_T ... A_2 A_1 for the bouts of x.
ComplexMatrix cumulative_operator(const QuantumCircuit &c, const Schedule &x, const Track &f);

struct AggregateMeasurement {
    std::vector<std::pair<Track, ComplexMatrix>> operators;

    /// max-entry distance of sum_f C_f^dagger C_f from the identity.
    double completeness_error() const;
};

/// Track-indexed cumulative operators over the greedy schedule.
AggregateMeasurement aggregate_measurement(const QuantumCircuit &c, std::size_t cap = kDefaultTrackCap);

/// C_X^f and C_Y^f agree within tol for every track.
bool schedules_equivalent(const QuantumCircuit &c, const Schedule &x, const Schedule &y,
                          double tol = kDefaultTolerance);

/// Tr(C^f rho C^f^dagger) / Tr(rho).
double track_probability(const QuantumCircuit &c, const Track &f, const DensityOperator &rho);

struct StepRecord {
    Bout bout;
    /// Outcomes drawn in this bout, one per measurement gate of the bout.
    std::vector<std::pair<GateId, OutcomeLabel>> outcomes;
    /// Conditional probability of those outcomes given the state before the bout.
    double probability = 1.0;
};

struct RunResult {
    Track track;
    /// Un-normalized C^f rho C^f^dagger.
    ComplexMatrix final_state;
    std::vector<StepRecord> steps;

    /// Product of the step probabilities.
    double probability() const;
};

/// Fires the bouts of x in order, sampling measurement outcomes. Bout t draws
/// one uniform variate from mt19937_64 seeded with
/// seed_seq{low32(seed), high32(seed), t}.
RunResult run(const QuantumCircuit &c, const Schedule &x, const DensityOperator &rho, std::uint64_t seed);

/// The computation that realizes track f. Steps after a zero-probability
/// step report probability 0.
RunResult replay(const QuantumCircuit &c, const Schedule &x, const DensityOperator &rho, const Track &f);

/// Every coherent track with its un-normalized final pure state, gates fired
/// in topological order.
std::vector<std::pair<Track, StateVector>> branch_pure(const QuantumCircuit &c, const StateVector &psi,
                                                       std::size_t cap = kDefaultTrackCap);

}  // namespace qcirc
