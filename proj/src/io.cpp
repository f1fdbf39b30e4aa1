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

#include "qcirc/io.hpp"

#include <cmath>
#include <limits>

namespace qcirc::io {

namespace {

[[noreturn]] void schema_fail(const std::string &location, const std::string &message) {
    throw SchemaError("schema", location, message);
}

const Json &require(const Json &obj, const char *key, const std::string &location) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        schema_fail(location, std::string("missing field '") + key + "'");
    }
    return *it;
}

void require_object(const Json &j, const std::string &location) {
    if (!j.is_object()) {
        schema_fail(location, "expected an object");
    }
}

void require_array(const Json &j, const std::string &location) {
    if (!j.is_array()) {
        schema_fail(location, "expected an array");
    }
}

std::string string_at(const Json &j, const std::string &location) {
    if (!j.is_string()) {
        schema_fail(location, "expected a string");
    }
    return j.get<std::string>();
}

std::size_t index_at(const Json &j, const std::string &location) {
    if (!j.is_number_unsigned()) {
        schema_fail(location, "expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

double number_at(const Json &j, const std::string &location) {
    if (!j.is_number()) {
        schema_fail(location, "expected a number");
    }
    return j.get<double>();
}

std::vector<std::string> string_list(const Json &j, const std::string &location) {
    require_array(j, location);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(string_at(j[i], location + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json &j, const std::string &location) {
    if (!j.is_array() || j.size() != 2) {
        schema_fail(location, "expected [re, im]");
    }
    return {number_at(j[0], location), number_at(j[1], location)};
}

StateVector ket_from_json(const Json &j, const std::string &location) {
    require_array(j, location);
    StateVector v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        v.push_back(complex_from_json(j[i], location + "[" + std::to_string(i) + "]"));
    }
    return v;
}

SelectorKey key_from_text(const std::string &text, bool has_controls) {
    if (!has_controls && text.empty()) {
        return {};
    }
    return split_commas(text);
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw SchemaError("json-syntax", "byte " + std::to_string(e.byte), e.what());
    } catch (const Json::out_of_range &e) {
        throw SchemaError("non-finite", "number", e.what());
    }
}

std::vector<std::string> split_commas(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string join_commas(const std::vector<std::string> &parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? "," : "") + parts[i];
    }
    return out;
}

Json matrix_to_json(const ComplexMatrix &m) {
    Json entries = Json::array();
    for (const Complex &z : m.entries()) {
        entries.push_back(complex_to_json(z));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const Json &j, const std::string &location) {
    require_object(j, location);
    std::size_t rows = index_at(require(j, "rows", location), location + "/rows");
    std::size_t cols = index_at(require(j, "cols", location), location + "/cols");
    const Json &entries = require(j, "entries", location);
    require_array(entries, location + "/entries");
    if (entries.size() != rows * cols) {
        schema_fail(location + "/entries", "expected " + std::to_string(rows * cols) + " entries, found " +
                                               std::to_string(entries.size()));
    }
    std::vector<Complex> values;
    values.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        values.push_back(complex_from_json(entries[i], location + "/entries[" + std::to_string(i) + "]"));
    }
    return ComplexMatrix(rows, cols, std::move(values));
}

Json circuit_to_json(const QuantumCircuit &c) {
    Json gates = Json::array();
    for (const Gate &g : c.gates) {
        Json gate{{"id", g.id},
                  {"registers", g.registers},
                  {"kind", g.is_measurement() ? "measure" : "unitary"},
                  {"controls", g.controls}};
        if (!g.unitaries.empty() || !g.is_measurement()) {
            Json ops = Json::object();
            for (const auto &[name, op] : g.unitaries) {
                ops[name] = matrix_to_json(op.matrix);
            }
            gate["ops"] = std::move(ops);
        }
        if (!g.measurements.empty() || g.is_measurement()) {
            Json ms = Json::object();
            for (const auto &[name, m] : g.measurements) {
                Json outcomes = Json::object();
                for (const auto &[label, op] : m.outcomes) {
                    outcomes[label] = matrix_to_json(op);
                }
                ms[name] = Json{{"outcomes", std::move(outcomes)}};
            }
            gate["measurements"] = std::move(ms);
        }
        Json selector = Json::object();
        for (const auto &[key, target] : g.selector) {
            selector[join_commas(key)] = target;
        }
        gate["selector"] = std::move(selector);
        gates.push_back(std::move(gate));
    }
    return Json{{"version", "qcirc-1"}, {"registers", c.register_names}, {"gates", std::move(gates)}};
}

QuantumCircuit circuit_from_json(const Json &j) {
    require_object(j, "circuit");
    const Json &version = require(j, "version", "circuit");
    if (!version.is_string() || version.get<std::string>() != "qcirc-1") {
        schema_fail("version", "expected \"qcirc-1\"");
    }
    QuantumCircuit c;
    c.register_names = string_list(require(j, "registers", "circuit"), "registers");
    const Json &gates = require(j, "gates", "circuit");
    require_array(gates, "gates");
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Json &gj = gates[i];
        std::string where = "gates[" + std::to_string(i) + "]";
        require_object(gj, where);
        Gate g;
        g.id = string_at(require(gj, "id", where), where + "/id");
        where = g.id.empty() ? where : g.id;
        const Json &regs = require(gj, "registers", where);
        require_array(regs, where + "/registers");
        for (std::size_t k = 0; k < regs.size(); ++k) {
            g.registers.push_back(index_at(regs[k], where + "/registers[" + std::to_string(k) + "]"));
        }
        std::string kind = string_at(require(gj, "kind", where), where + "/kind");
        if (kind == "unitary") {
            g.kind = GateKind::unitary;
        } else if (kind == "measure") {
            g.kind = GateKind::measure;
        } else {
            schema_fail(where + "/kind", "expected \"unitary\" or \"measure\"");
        }
        if (auto it = gj.find("ops"); it != gj.end()) {
            require_object(*it, where + "/ops");
            for (const auto &[name, mj] : it->items()) {
                g.unitaries.emplace(name, UnitaryOp{name, matrix_from_json(mj, where + "/ops/" + name)});
            }
        }
        if (auto it = gj.find("measurements"); it != gj.end()) {
            require_object(*it, where + "/measurements");
            for (const auto &[name, mj] : it->items()) {
                std::string mwhere = where + "/measurements/" + name;
                require_object(mj, mwhere);
                const Json &outcomes = require(mj, "outcomes", mwhere);
                require_object(outcomes, mwhere + "/outcomes");
                Measurement m{name, {}};
                for (const auto &[label, opj] : outcomes.items()) {
                    m.outcomes.emplace(label, matrix_from_json(opj, mwhere + "/" + label));
                }
                g.measurements.emplace(name, std::move(m));
            }
        }
        if (auto it = gj.find("controls"); it != gj.end()) {
            g.controls = string_list(*it, where + "/controls");
        }
        const Json &selector = require(gj, "selector", where);
        require_object(selector, where + "/selector");
        for (const auto &[key, target] : selector.items()) {
            g.selector.emplace(key_from_text(key, !g.controls.empty()),
                               string_at(target, where + "/selector/" + key));
        }
        c.gates.push_back(std::move(g));
    }
    return c;
}

ParsedCircuit parse_circuit(std::string_view text, double tol) {
    ParsedCircuit out;
    QuantumCircuit c;
    try {
        c = circuit_from_json(parse_json(text));
    } catch (const SchemaError &e) {
        out.diagnostics.push_back({Severity::error, e.code(), e.location(), e.what()});
        return out;
    } catch (const DimensionError &e) {
        out.diagnostics.push_back({Severity::error, "schema", "matrix", e.what()});
        return out;
    }
    out.diagnostics = validate_circuit(c, tol);
    if (out.diagnostics.empty()) {
        out.circuit = std::move(c);
    }
    return out;
}

std::string serialize_circuit(const QuantumCircuit &c) { return circuit_to_json(c).dump(2) + "\n"; }

Json schedule_to_json(const Schedule &x) { return Json{{"bouts", x.bouts}}; }

Schedule schedule_from_json(const Json &j) {
    require_object(j, "schedule");
    const Json &bouts = require(j, "bouts", "schedule");
    require_array(bouts, "bouts");
    Schedule x;
    for (std::size_t t = 0; t < bouts.size(); ++t) {
        x.bouts.push_back(string_list(bouts[t], "bouts[" + std::to_string(t) + "]"));
    }
    return x;
}

Json poset_to_json(const Poset &p) {
    Json pairs = Json::array();
    for (const auto &[a, b] : p.generators()) {
        pairs.push_back(Json::array({a, b}));
    }
    return Json{{"elements", p.elements()}, {"less_than", std::move(pairs)}};
}

Poset poset_from_json(const Json &j) {
    require_object(j, "poset");
    auto elements = string_list(require(j, "elements", "poset"), "elements");
    std::vector<std::pair<std::string, std::string>> pairs;
    if (auto it = j.find("less_than"); it != j.end()) {
        require_array(*it, "less_than");
        for (std::size_t i = 0; i < it->size(); ++i) {
            auto pair = string_list((*it)[i], "less_than[" + std::to_string(i) + "]");
            if (pair.size() != 2) {
                schema_fail("less_than[" + std::to_string(i) + "]", "expected a pair");
            }
            pairs.emplace_back(pair[0], pair[1]);
        }
    }
    return Poset(std::move(elements), std::move(pairs));
}

DensityOperator state_from_json(const Json &j, double tol) {
    require_object(j, "state");
    if (auto it = j.find("ket"); it != j.end()) {
        return DensityOperator::from_ket(ket_from_json(*it, "ket"));
    }
    return DensityOperator::from_matrix(matrix_from_json(j, "state"), tol);
}

Json ket_to_json(const StateVector &psi) {
    Json amps = Json::array();
    for (const Complex &z : psi) {
        amps.push_back(complex_to_json(z));
    }
    return Json{{"ket", std::move(amps)}};
}

Json track_to_json(const Track &f) {
    Json out = Json::object();
    for (const auto &[gate, label] : f.outcomes) {
        out[gate] = label;
    }
    return out;
}

Json aggregate_to_json(const AggregateMeasurement &agg, const DensityOperator *rho) {
    Json tracks = Json::array();
    for (const auto &[f, op] : agg.operators) {
        Json entry{{"outcomes", track_to_json(f)}, {"operator", matrix_to_json(op)}};
        if (rho != nullptr) {
            ComplexMatrix out = op * rho->matrix() * dagger(op);
            entry["probability_on"] = trace(out).real() / rho->trace();
        }
        tracks.push_back(std::move(entry));
    }
    return Json{{"tracks", std::move(tracks)}};
}

Json zeta_to_json(const Commensuration &zeta, const std::vector<std::size_t> &ancillas) {
    Json z = Json::object();
    for (const auto &[from, to] : zeta.zeta) {
        z[from] = to;
    }
    return Json{{"zeta", std::move(z)}, {"ancillas", ancillas}};
}

std::pair<Commensuration, std::vector<std::size_t>> zeta_from_json(const Json &j) {
    require_object(j, "sidecar");
    const Json &z = require(j, "zeta", "sidecar");
    require_object(z, "zeta");
    Commensuration zeta;
    for (const auto &[from, to] : z.items()) {
        zeta.zeta.emplace(from, string_at(to, "zeta/" + from));
    }
    std::vector<std::size_t> ancillas;
    if (auto it = j.find("ancillas"); it != j.end()) {
        require_array(*it, "ancillas");
        for (std::size_t i = 0; i < it->size(); ++i) {
            ancillas.push_back(index_at((*it)[i], "ancillas[" + std::to_string(i) + "]"));
        }
    }
    return {std::move(zeta), std::move(ancillas)};
}

Json diagnostic_to_json(const Diagnostic &d) {
    return Json{{"severity", d.severity == Severity::error ? "error" : "warning"},
                {"code", d.code},
                {"location", d.location},
                {"message", d.message}};
}

std::string diagnostic_line(const Diagnostic &d) { return diagnostic_to_json(d).dump(); }

}  // namespace qcirc::io
