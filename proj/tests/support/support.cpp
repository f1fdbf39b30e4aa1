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

#include "support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qcirc::testing {

namespace {

ComplexMatrix naive_mul(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Complex acc = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

std::size_t bit_of(std::size_t index, std::size_t position, std::size_t n) { return (index >> (n - 1 - position)) & 1; }

ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1;
    }
    return m;
}

}  // namespace

ComplexMatrix hadamard() {
    double s = 1 / std::numbers::sqrt2;
    return ComplexMatrix{{s, s}, {s, -s}};
}

ComplexMatrix pauli_x() { return ComplexMatrix{{0, 1}, {1, 0}}; }

ComplexMatrix pauli_z() { return ComplexMatrix{{1, 0}, {0, -1}}; }

ComplexMatrix cnot() { return ComplexMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}; }

QuantumCircuit teleportation() {
    QuantumCircuit c;
    c.register_names = {"psi", "alice", "bob"};
    c.gates.push_back(Gate::unitary("CNOT", {0, 1}, cnot()));
    c.gates.push_back(Gate::unitary("H", {0}, hadamard()));
    c.gates.push_back(Gate::measure("M", {0}, standard_measurement("m", 1)));
    c.gates.push_back(Gate::measure("N", {1}, standard_measurement("m", 1)));
    c.gates.push_back(Gate::controlled_unitary("XN", {2}, pauli_x(), {"N"}));
    c.gates.push_back(Gate::controlled_unitary("ZM", {2}, pauli_z(), {"M"}));
    return c;
}

StateVector teleportation_input(const StateVector &psi) {
    StateVector out(8);
    double s = 1 / std::numbers::sqrt2;
    for (std::size_t b = 0; b < 2; ++b) {
        out[b * 4 + 0] = psi[b] * s;
        out[b * 4 + 3] = psi[b] * s;
    }
    return out;
}

QuantumCircuit single_standard_measurement() {
    QuantumCircuit c;
    c.register_names = {"q"};
    c.gates.push_back(Gate::measure("M", {0}, standard_measurement("m", 1)));
    return c;
}

Measurement plus_minus_measurement(const std::string &id) {
    Measurement m{id, {}};
    m.outcomes.emplace("+", ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}});
    m.outcomes.emplace("-", ComplexMatrix{{0.5, -0.5}, {-0.5, 0.5}});
    return m;
}

double uniform(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Complex gaussian(Rng &rng) {
    std::normal_distribution<double> normal;
    double re = normal(rng);
    double im = normal(rng);
    return {re, im};
}

StateVector random_ket(std::size_t n, Rng &rng) {
    StateVector v(std::size_t{1} << n);
    double norm = 0;
    for (auto &a : v) {
        a = gaussian(rng);
        norm += std::norm(a);
    }
    for (auto &a : v) {
        a /= std::sqrt(norm);
    }
    return v;
}

ComplexMatrix random_unitary(std::size_t dim, Rng &rng) {
    Eigen::MatrixXcd g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gaussian(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    ComplexMatrix out(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

Measurement random_measurement(std::size_t dim, std::size_t count, const std::string &prefix, Rng &rng) {
    ComplexMatrix v = random_unitary(dim * count, rng);
    Measurement m{prefix, {}};
    for (std::size_t i = 0; i < count; ++i) {
        ComplexMatrix a(dim, dim);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t col = 0; col < dim; ++col) {
                a(r, col) = v(i * dim + r, col);
            }
        }
        m.outcomes.emplace(prefix + std::to_string(i), std::move(a));
    }
    return m;
}

ComplexMatrix random_density(std::size_t n, Rng &rng) {
    std::size_t dim = std::size_t{1} << n;
    ComplexMatrix g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            g(i, j) = gaussian(rng);
        }
    }
    ComplexMatrix rho = naive_mul(g, dagger(g));
    double scale = 0.5 + 2.5 * uniform(rng);
    rho *= scale / trace(rho).real();
    // Exact Hermitian symmetry so validation sees no rounding asymmetry.
    for (std::size_t i = 0; i < dim; ++i) {
        rho(i, i) = rho(i, i).real();
        for (std::size_t j = i + 1; j < dim; ++j) {
            rho(j, i) = std::conj(rho(i, j));
        }
    }
    return rho;
}

QuantumCircuit random_circuit(Rng &rng, const RandomCircuitOptions &o) {
    auto pick = [&rng](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    };
    QuantumCircuit c;
    std::size_t n = pick(o.min_registers, o.max_registers);
    for (std::size_t r = 0; r < n; ++r) {
        c.register_names.push_back("q" + std::to_string(r));
    }
    std::size_t count = pick(o.min_gates, o.max_gates);
    std::vector<std::size_t> measurement_gates;
    for (std::size_t i = 0; i < count; ++i) {
        std::string id = "g" + std::to_string(i);
        std::size_t k = pick(1, std::min(o.max_arity, n));
        std::vector<std::size_t> regs(n);
        for (std::size_t r = 0; r < n; ++r) {
            regs[r] = r;
        }
        std::shuffle(regs.begin(), regs.end(), rng);
        regs.resize(k);
        std::size_t dim = std::size_t{1} << k;

        double total = o.p_unitary + o.p_measure + o.p_cc_unitary + o.p_cc_measure;
        double u = uniform(rng) * total;
        bool can_measure = measurement_gates.size() < o.max_measurements;
        bool has_sources = !measurement_gates.empty();
        enum { kUnitary, kMeasure, kCcUnitary, kCcMeasure } kind = kUnitary;
        if (u < o.p_unitary) {
            kind = kUnitary;
        } else if (u < o.p_unitary + o.p_measure) {
            kind = can_measure ? kMeasure : kUnitary;
        } else if (u < o.p_unitary + o.p_measure + o.p_cc_unitary) {
            kind = has_sources ? kCcUnitary : kUnitary;
        } else {
            kind = has_sources && can_measure ? kCcMeasure : kUnitary;
        }

        std::vector<GateId> controls;
        std::vector<SelectorKey> keys;
        if (kind == kCcUnitary || kind == kCcMeasure) {
            std::vector<std::size_t> pool = measurement_gates;
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(std::min<std::size_t>(pool.size(), pick(1, 2)));
            std::sort(pool.begin(), pool.end());
            keys = {SelectorKey{}};
            for (std::size_t s : pool) {
                controls.push_back(c.gates[s].id);
                std::vector<SelectorKey> next;
                for (const auto &key : keys) {
                    for (const auto &label : c.gates[s].outcomes()) {
                        SelectorKey k = key;
                        k.push_back(label);
                        next.push_back(std::move(k));
                    }
                }
                keys = std::move(next);
            }
        }

        Gate g;
        switch (kind) {
            case kUnitary:
                g = Gate::unitary(id, regs, random_unitary(dim, rng));
                break;
            case kMeasure: {
                Measurement m = o.standard_only || uniform(rng) < 0.5
                                    ? standard_measurement("m", k)
                                    : random_measurement(dim, pick(1, o.max_outcomes), "o", rng);
                m.id = "m";
                g = Gate::measure(id, regs, std::move(m));
                break;
            }
            case kCcUnitary:
                g.id = id;
                g.registers = regs;
                g.kind = GateKind::unitary;
                g.unitaries.emplace("u0", UnitaryOp{"u0", random_unitary(dim, rng)});
                g.unitaries.emplace("u1", UnitaryOp{"u1", random_unitary(dim, rng)});
                g.controls = controls;
                for (const auto &key : keys) {
                    g.selector.emplace(key, uniform(rng) < 0.5 ? "u0" : "u1");
                }
                break;
            case kCcMeasure: {
                g.id = id;
                g.registers = regs;
                g.kind = GateKind::measure;
                Measurement x = random_measurement(dim, pick(1, o.max_outcomes), "x", rng);
                Measurement y = random_measurement(dim, pick(1, o.max_outcomes), "y", rng);
                x.id = "mx";
                y.id = "my";
                g.measurements.emplace("mx", std::move(x));
                g.measurements.emplace("my", std::move(y));
                g.controls = controls;
                for (const auto &key : keys) {
                    g.selector.emplace(key, uniform(rng) < 0.5 ? "mx" : "my");
                }
                break;
            }
        }
        if (g.is_measurement()) {
            measurement_gates.push_back(c.gates.size());
        }
        c.gates.push_back(std::move(g));
    }
    return c;
}

std::vector<std::vector<char>> precedence_oracle(const QuantumCircuit &c) {
    std::size_t m = c.gates.size();
    // below[j][i]: gate i is a prerequisite of gate j.
    std::vector<std::vector<char>> below(m, std::vector<char>(m, 0));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r : c.gates[j].registers) {
            for (std::size_t i = j; i-- > 0;) {
                const auto &regs = c.gates[i].registers;
                if (std::find(regs.begin(), regs.end(), r) != regs.end()) {
                    below[j][i] = 1;
                    break;
                }
            }
        }
        for (const auto &src : c.gates[j].controls) {
            for (std::size_t i = 0; i < m; ++i) {
                if (c.gates[i].id == src) {
                    below[j][i] = 1;
                }
            }
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < m; ++i) {
                if (below[j][k] && below[k][i]) {
                    below[j][i] = 1;
                }
            }
        }
    }
    return below;
}

ComplexMatrix kron_oracle(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t r1 = 0; r1 < a.rows(); ++r1) {
        for (std::size_t c1 = 0; c1 < a.cols(); ++c1) {
            for (std::size_t r2 = 0; r2 < b.rows(); ++r2) {
                for (std::size_t c2 = 0; c2 < b.cols(); ++c2) {
                    out(r1 * b.rows() + r2, c1 * b.cols() + c2) = a(r1, c1) * b(r2, c2);
                }
            }
        }
    }
    return out;
}

ComplexMatrix embed_oracle(const ComplexMatrix &op, const std::vector<std::size_t> &registers, std::size_t n) {
    std::size_t k = registers.size();
    ComplexMatrix full = kron_oracle(op, identity(std::size_t{1} << (n - k)));
    std::vector<std::size_t> reg_of = registers;
    for (std::size_t r = 0; r < n; ++r) {
        if (std::find(registers.begin(), registers.end(), r) == registers.end()) {
            reg_of.push_back(r);
        }
    }
    std::size_t dim = std::size_t{1} << n;
    auto to_position_index = [&](std::size_t x) {
        std::size_t y = 0;
        for (std::size_t p = 0; p < n; ++p) {
            y = (y << 1) | bit_of(x, reg_of[p], n);
        }
        return y;
    };
    ComplexMatrix out(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t y = 0; y < dim; ++y) {
            out(x, y) = full(to_position_index(x), to_position_index(y));
        }
    }
    return out;
}

ComplexMatrix partial_trace_oracle(const ComplexMatrix &m, std::size_t n, const std::vector<std::size_t> &keep) {
    std::vector<std::size_t> kept = keep;
    std::sort(kept.begin(), kept.end());
    std::size_t dim = std::size_t{1} << n;
    std::size_t kdim = std::size_t{1} << kept.size();
    auto reduced = [&](std::size_t x) {
        std::size_t a = 0;
        for (std::size_t r : kept) {
            a = (a << 1) | bit_of(x, r, n);
        }
        return a;
    };
    auto traced_equal = [&](std::size_t x, std::size_t y) {
        for (std::size_t r = 0; r < n; ++r) {
            if (std::find(kept.begin(), kept.end(), r) == kept.end() && bit_of(x, r, n) != bit_of(y, r, n)) {
                return false;
            }
        }
        return true;
    };
    ComplexMatrix out(kdim, kdim);
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t y = 0; y < dim; ++y) {
            if (traced_equal(x, y)) {
                out(reduced(x), reduced(y)) += m(x, y);
            }
        }
    }
    return out;
}

ComplexMatrix cumulative_oracle(const QuantumCircuit &c, const std::vector<GateId> &order, const Track &f) {
    std::size_t n = c.n_registers();
    ComplexMatrix acc = identity(std::size_t{1} << n);
    for (const auto &id : order) {
        const Gate &g = c.gate(id);
        acc = naive_mul(embed_oracle(gate_operator(c, g, f), g.registers, n), acc);
    }
    return acc;
}

std::vector<Track> tracks_oracle(const QuantumCircuit &c) {
    std::vector<Track> out;
    std::function<void(std::size_t, Track &)> visit = [&](std::size_t i, Track &f) {
        if (i == c.gates.size()) {
            out.push_back(f);
            return;
        }
        const Gate &g = c.gates[i];
        if (!g.is_measurement()) {
            visit(i + 1, f);
            return;
        }
        SelectorKey key;
        for (const auto &src : g.controls) {
            key.push_back(f.outcomes.at(src));
        }
        const Measurement &m = g.measurements.at(g.selector.at(key));
        for (const auto &[label, op] : m.outcomes) {
            f.outcomes[g.id] = label;
            visit(i + 1, f);
        }
        f.outcomes.erase(g.id);
    };
    Track f;
    visit(0, f);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> linear_extensions_oracle(const Poset &p) {
    std::vector<std::string> perm = p.elements();
    std::sort(perm.begin(), perm.end());
    std::vector<std::vector<std::string>> out;
    do {
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            pos[perm[i]] = i;
        }
        bool ok = std::all_of(p.generators().begin(), p.generators().end(),
                              [&](const auto &ab) { return pos.at(ab.first) < pos.at(ab.second); });
        if (ok) {
            out.push_back(perm);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::size_t inversion_count(const std::vector<std::string> &from, const std::vector<std::string> &to) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < to.size(); ++i) {
        pos[to[i]] = i;
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        for (std::size_t j = i + 1; j < from.size(); ++j) {
            if (pos.at(from[i]) > pos.at(from[j])) {
                ++d;
            }
        }
    }
    return d;
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace qcirc::testing
