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
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcirc/circuit.hpp"

namespace qcirc {

/// Gates fired together. Must be a nonempty antichain of the prerequisite
/// order; element order carries no meaning.
using Bout = std::vector<GateId>;

struct Schedule {
    std::vector<Bout> bouts;

    friend bool operator==(const Schedule &, const Schedule &) = default;
};

inline constexpr std::size_t kDefaultScheduleLimit = 1000;

/// True iff every bout is a nonempty antichain, no gate fires twice, every
/// prefix union is a stage and the whole union is every gate.
/// Throws UnknownName for ids not in the circuit.
bool validate_schedule(const QuantumCircuit &c, const Schedule &x);

/// Each bout is the full set of gates ready after the previous bouts.
Schedule greedy_schedule(const QuantumCircuit &c);

/// Linear extensions of the prerequisite order as singleton-bout schedules,
/// depth first with lexicographic tie-breaking on gate id. `limit` of
/// nullopt means no cap.
std::vector<Schedule> enumerate_linear_schedules(const QuantumCircuit &c,
                                                 std::optional<std::size_t> limit = kDefaultScheduleLimit);

/// Replaces bout t by (b1; b2). Throws InvalidArgument unless bout t is the
/// disjoint union of the two nonempty bouts.
Schedule split_bout(const Schedule &x, std::size_t t, const Bout &b1, const Bout &b2);

using LinearOrder = std::vector<std::string>;

/// Finite strict partial order given by generating pairs; the transitive
/// closure is taken on construction.
class Poset {
   public:
    /// Throws InvalidArgument on duplicate elements, unknown names in pairs or
    /// a cycle (including a < a).
    Poset(std::vector<std::string> elements, std::vector<std::pair<std::string, std::string>> less_than);

    /// Elements are gate ids; generating pairs are the direct sources.
    static Poset of_circuit(const QuantumCircuit &c);

    const std::vector<std::string> &elements() const { return elements_; }
    const std::vector<std::pair<std::string, std::string>> &generators() const { return generators_; }
    std::size_t size() const { return elements_.size(); }
    /// a < b in the closure. Throws UnknownName.
    bool less(const std::string &a, const std::string &b) const;
    /// `order` is a permutation of the elements with a < b => a before b.
    bool is_coherent(const LinearOrder &order) const;

    /// Visits linear extensions depth first, smallest ready name first, until
    /// `visit` returns false.
    void for_each_linear_extension(const std::function<bool(const LinearOrder &)> &visit) const;

   private:
    std::size_t index(const std::string &name) const;

    std::vector<std::string> elements_;
    std::vector<std::pair<std::string, std::string>> generators_;
    std::vector<std::vector<char>> below_;  // below_[b][a]: a < b
};

/// Adjacent transpositions turning `from` into `to` with every intermediate
/// order coherent. The result starts with `from`, ends with `to`, and has
/// exactly one step per pair the two orders rank differently.
/// Throws InvalidArgument if either order is not coherent.
std::vector<LinearOrder> transposition_path(const Poset &p, const LinearOrder &from, const LinearOrder &to);

}  // namespace qcirc
