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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcirc/circuit.hpp"
#include "qcirc/deferral.hpp"
#include "qcirc/error.hpp"
#include "qcirc/linalg.hpp"
#include "qcirc/scheduling.hpp"
#include "qcirc/semantics.hpp"

namespace qcirc::io {

using Json = nlohmann::json;

/// Malformed or mis-shaped JSON. `code` is "json-syntax" or "schema".
class SchemaError : public Error {
   public:
    SchemaError(std::string code, std::string location, const std::string &message)
        : Error(location + ": " + message), code_(std::move(code)), location_(std::move(location)) {}
    const std::string &code() const { return code_; }
    const std::string &location() const { return location_; }

   private:
    std::string code_;
    std::string location_;
};

/// Parses text, throwing SchemaError("json-syntax") on malformed input.
Json parse_json(std::string_view text);

Json matrix_to_json(const ComplexMatrix &m);
ComplexMatrix matrix_from_json(const Json &j, const std::string &location = "matrix");

Json circuit_to_json(const QuantumCircuit &c);
/// Schema-level decoding only; no semantic validation.
QuantumCircuit circuit_from_json(const Json &j);

struct ParsedCircuit {
    std::optional<QuantumCircuit> circuit;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return circuit.has_value(); }
};

/// Decodes and validates. `circuit` is set only when there are no errors.
ParsedCircuit parse_circuit(std::string_view text, double tol = kDefaultTolerance);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string serialize_circuit(const QuantumCircuit &c);

Json schedule_to_json(const Schedule &x);
Schedule schedule_from_json(const Json &j);

Json poset_to_json(const Poset &p);
Poset poset_from_json(const Json &j);

/// Density matrix encoding or {"ket": [...]}, expanded to |psi><psi|.
DensityOperator state_from_json(const Json &j, double tol = kDefaultTolerance);
Json ket_to_json(const StateVector &psi);

Json track_to_json(const Track &f);
Json aggregate_to_json(const AggregateMeasurement &agg, const DensityOperator *rho = nullptr);

Json zeta_to_json(const Commensuration &zeta, const std::vector<std::size_t> &ancillas);
std::pair<Commensuration, std::vector<std::size_t>> zeta_from_json(const Json &j);

Json diagnostic_to_json(const Diagnostic &d);
/// Compact single-line JSON.
std::string diagnostic_line(const Diagnostic &d);

/// Splits "a,b,c" into its comma-separated parts; "" gives one empty part.
std::vector<std::string> split_commas(std::string_view text);
std::string join_commas(const std::vector<std::string> &parts);

}  // namespace qcirc::io
