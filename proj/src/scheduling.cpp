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

#include "qcirc/scheduling.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qcirc/error.hpp"

namespace qcirc {

bool validate_schedule(const QuantumCircuit &c, const Schedule &x) {
    Precedence p(c);
    std::vector<char> fired(c.gates.size(), 0);
    for (const Bout &bout : x.bouts) {
        if (bout.empty()) {
            return false;
        }
        std::vector<std::size_t> members;
        for (const auto &id : bout) {
            auto idx = c.index_of(id);
            if (!idx) {
                throw UnknownName("unknown gate '" + id + "'");
            }
            members.push_back(*idx);
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            if (fired[members[a]]) {
                return false;
            }
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (members[a] == members[b] || p.comparable(members[a], members[b])) {
                    return false;
                }
            }
        }
        // Every member must be ready: all of its prerequisites already fired.
        for (std::size_t j : members) {
            for (std::size_t i = 0; i < c.gates.size(); ++i) {
                if (p.precedes(i, j) && !fired[i]) {
                    return false;
                }
            }
        }
        for (std::size_t j : members) {
            fired[j] = 1;
        }
    }
    return std::all_of(fired.begin(), fired.end(), [](char f) { return f != 0; });
}

Schedule greedy_schedule(const QuantumCircuit &c) {
    Precedence p(c);
    std::size_t count = c.gates.size();
    std::vector<char> fired(count, 0);
    std::size_t done = 0;
    Schedule x;
    while (done < count) {
        Bout bout;
        std::vector<std::size_t> next;
        for (std::size_t j = 0; j < count; ++j) {
            if (fired[j]) {
                continue;
            }
            bool ready = true;
            for (std::size_t i : p.sources(j)) {
                ready = ready && fired[i];
            }
            if (ready) {
                next.push_back(j);
                bout.push_back(c.gates[j].id);
            }
        }
        for (std::size_t j : next) {
            fired[j] = 1;
        }
        done += next.size();
        std::sort(bout.begin(), bout.end());
        x.bouts.push_back(std::move(bout));
    }
    return x;
}

std::vector<Schedule> enumerate_linear_schedules(const QuantumCircuit &c, std::optional<std::size_t> limit) {
    std::vector<Schedule> out;
    if (limit && *limit == 0) {
        return out;
    }
    Poset::of_circuit(c).for_each_linear_extension([&](const LinearOrder &order) {
        Schedule x;
        for (const auto &id : order) {
            x.bouts.push_back({id});
        }
        out.push_back(std::move(x));
        return !limit || out.size() < *limit;
    });
    return out;
}

Schedule split_bout(const Schedule &x, std::size_t t, const Bout &b1, const Bout &b2) {
    if (t >= x.bouts.size()) {
        throw InvalidArgument("bout index " + std::to_string(t) + " out of range");
    }
    if (b1.empty() || b2.empty()) {
        throw InvalidArgument("split parts must both be nonempty");
    }
    std::multiset<GateId> whole(x.bouts[t].begin(), x.bouts[t].end());
    std::multiset<GateId> parts(b1.begin(), b1.end());
    parts.insert(b2.begin(), b2.end());
    if (whole != parts) {
        throw InvalidArgument("split parts are not a disjoint cover of bout " + std::to_string(t));
    }
    Schedule y;
    y.bouts.assign(x.bouts.begin(), x.bouts.begin() + static_cast<std::ptrdiff_t>(t));
    y.bouts.push_back(b1);
    y.bouts.push_back(b2);
    y.bouts.insert(y.bouts.end(), x.bouts.begin() + static_cast<std::ptrdiff_t>(t) + 1, x.bouts.end());
    return y;
}

Poset::Poset(std::vector<std::string> elements, std::vector<std::pair<std::string, std::string>> less_than)
    : elements_(std::move(elements)), generators_(std::move(less_than)) {
    std::size_t count = elements_.size();
    {
        std::set<std::string> names(elements_.begin(), elements_.end());
        if (names.size() != count) {
            throw InvalidArgument("poset has duplicate elements");
        }
    }
    below_.assign(count, std::vector<char>(count, 0));
    for (const auto &[a, b] : generators_) {
        try {
            below_[index(b)][index(a)] = 1;
        } catch (const UnknownName &e) {
            throw InvalidArgument(e.what());
        }
    }
    // Warshall closure.
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t b = 0; b < count; ++b) {
            if (!below_[b][k]) {
                continue;
            }
            for (std::size_t a = 0; a < count; ++a) {
                below_[b][a] |= below_[k][a];
            }
        }
    }
    for (std::size_t a = 0; a < count; ++a) {
        if (below_[a][a]) {
            throw InvalidArgument("relation is not a strict partial order: cycle through '" + elements_[a] + "'");
        }
    }
}

Poset Poset::of_circuit(const QuantumCircuit &c) {
    Precedence p(c);
    std::vector<std::string> elements;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t j = 0; j < c.gates.size(); ++j) {
        elements.push_back(c.gates[j].id);
        for (std::size_t i : p.sources(j)) {
            pairs.emplace_back(c.gates[i].id, c.gates[j].id);
        }
    }
    return Poset(std::move(elements), std::move(pairs));
}

std::size_t Poset::index(const std::string &name) const {
    auto it = std::find(elements_.begin(), elements_.end(), name);
    if (it == elements_.end()) {
        throw UnknownName("unknown poset element '" + name + "'");
    }
    return static_cast<std::size_t>(it - elements_.begin());
}

bool Poset::less(const std::string &a, const std::string &b) const { return below_[index(b)][index(a)] != 0; }

bool Poset::is_coherent(const LinearOrder &order) const {
    if (order.size() != elements_.size()) {
        return false;
    }
    std::vector<std::size_t> position(elements_.size(), elements_.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        auto it = std::find(elements_.begin(), elements_.end(), order[pos]);
        if (it == elements_.end()) {
            return false;
        }
        auto i = static_cast<std::size_t>(it - elements_.begin());
        if (position[i] != elements_.size()) {
            return false;
        }
        position[i] = pos;
    }
    for (std::size_t b = 0; b < elements_.size(); ++b) {
        for (std::size_t a = 0; a < elements_.size(); ++a) {
            if (below_[b][a] && position[a] > position[b]) {
                return false;
            }
        }
    }
    return true;
}

void Poset::for_each_linear_extension(const std::function<bool(const LinearOrder &)> &visit) const {
    std::size_t count = elements_.size();
    std::vector<std::size_t> by_name(count);
    for (std::size_t i = 0; i < count; ++i) {
        by_name[i] = i;
    }
    std::sort(by_name.begin(), by_name.end(),
              [&](std::size_t a, std::size_t b) { return elements_[a] < elements_[b]; });
    std::vector<std::size_t> missing(count, 0);  // unplaced predecessors
    for (std::size_t b = 0; b < count; ++b) {
        for (std::size_t a = 0; a < count; ++a) {
            missing[b] += below_[b][a] ? 1 : 0;
        }
    }
    std::vector<char> placed(count, 0);
    LinearOrder order;
    order.reserve(count);
    std::function<bool()> extend = [&]() -> bool {
        if (order.size() == count) {
            return visit(order);
        }
        for (std::size_t i : by_name) {
            if (placed[i] || missing[i] != 0) {
                continue;
            }
            placed[i] = 1;
            order.push_back(elements_[i]);
            for (std::size_t b = 0; b < count; ++b) {
                if (below_[b][i]) {
                    --missing[b];
                }
            }
            bool keep_going = extend();
            for (std::size_t b = 0; b < count; ++b) {
                if (below_[b][i]) {
                    ++missing[b];
                }
            }
            order.pop_back();
            placed[i] = 0;
            if (!keep_going) {
                return false;
            }
        }
        return true;
    };
    extend();
}

std::vector<LinearOrder> transposition_path(const Poset &p, const LinearOrder &from, const LinearOrder &to) {
    if (!p.is_coherent(from)) {
        throw InvalidArgument("'from' order is not coherent with the poset");
    }
    if (!p.is_coherent(to)) {
        throw InvalidArgument("'to' order is not coherent with the poset");
    }
    std::map<std::string, std::size_t> target_pos;
    for (std::size_t i = 0; i < to.size(); ++i) {
        target_pos[to[i]] = i;
    }
    std::vector<LinearOrder> path{from};
    LinearOrder current = from;
    while (current != to) {
        // Some differentiating pair is adjacent whenever the orders differ;
        // take the earliest one.
        std::size_t i = 0;
        while (target_pos[current[i]] < target_pos[current[i + 1]]) {
            ++i;
        }
        std::swap(current[i], current[i + 1]);
        if (!p.is_coherent(current)) {
            throw Error("transposition produced an incoherent order");
        }
        path.push_back(current);
    }
    return path;
}

}  // namespace qcirc
