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

#include "qcirc/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "qcirc/deferral.hpp"
#include "qcirc/io.hpp"

namespace qcirc {

namespace {

using io::Json;

/// Bad arguments or unreadable input files.
struct UsageError : Error {
    using Error::Error;
};

/// A failure already reported on the error stream.
struct Reported {};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw UsageError("cannot write '" + path + "'");
    }
}

void print(std::ostream &out, const Json &j) { out << j.dump(2) << '\n'; }

void report_error(std::ostream &err, const std::string &message) {
    err << Json{{"severity", "error"}, {"message", message}}.dump() << '\n';
}

void report(std::ostream &err, const std::vector<Diagnostic> &diagnostics) {
    for (const auto &d : diagnostics) {
        err << io::diagnostic_line(d) << '\n';
    }
}

QuantumCircuit load_circuit(const std::string &path, std::ostream &err, double tol = kDefaultTolerance) {
    auto parsed = io::parse_circuit(read_file(path), tol);
    if (!parsed.ok()) {
        report(err, parsed.diagnostics);
        throw Reported{};
    }
    return std::move(*parsed.circuit);
}

DensityOperator load_state(const std::string &path, const QuantumCircuit &c) {
    DensityOperator rho = io::state_from_json(io::parse_json(read_file(path)));
    if (rho.n_qubits() != c.n_registers()) {
        throw InvalidArgument("state has " + std::to_string(rho.n_qubits()) + " qubits, circuit has " +
                              std::to_string(c.n_registers()) + " registers");
    }
    return rho;
}

Json steps_to_json(const std::vector<StepRecord> &steps) {
    Json out = Json::array();
    for (const auto &s : steps) {
        Json outcomes = Json::object();
        for (const auto &[gate, label] : s.outcomes) {
            outcomes[gate] = label;
        }
        out.push_back(Json{{"bout", s.bout}, {"outcomes", std::move(outcomes)}, {"probability", s.probability}});
    }
    return out;
}

Json witness_to_json(const FaithfulnessWitness &w) {
    return Json{{"input_index", w.input_index}, {"kind", w.kind},
                {"c_track", io::track_to_json(w.c_track)}, {"d_track", io::track_to_json(w.d_track)},
                {"expected", w.expected}, {"actual", w.actual}};
}

std::vector<StateVector> faithfulness_inputs(const std::string &list, std::size_t n, std::uint64_t seed) {
    std::vector<StateVector> out;
    for (const auto &part : io::split_commas(list)) {
        if (part == "basis") {
            auto basis = basis_inputs(n);
            out.insert(out.end(), basis.begin(), basis.end());
        } else if (part.starts_with("random:")) {
            std::size_t count = 0;
            try {
                std::size_t used = 0;
                count = std::stoul(part.substr(7), &used);
                if (used != part.size() - 7) {
                    throw std::invalid_argument(part);
                }
            } catch (const std::exception &) {
                throw UsageError("bad input count in '" + part + "'");
            }
            auto random = random_inputs(n, count, seed);
            out.insert(out.end(), random.begin(), random.end());
        } else {
            throw UsageError("--inputs expects basis or random:K, got '" + part + "'");
        }
    }
    return out;
}

struct Options {
    std::string circuit;
    std::string other;
    std::string input;
    std::string schedule = "greedy";
    std::string output;
    std::string zeta;
    std::string inputs = "basis";
    std::string from;
    std::string to;
    std::uint64_t seed = 0;
    std::size_t shots = 1;
    std::size_t limit = kDefaultScheduleLimit;
    bool enumerate = false;
    double tol = kDefaultTolerance;
};

int cmd_validate(const Options &o, std::ostream &out, std::ostream &err) {
    auto parsed = io::parse_circuit(read_file(o.circuit), o.tol);
    report(err, parsed.diagnostics);
    Json result{{"valid", parsed.ok()}, {"diagnostics", parsed.diagnostics.size()}};
    if (parsed.ok()) {
        result["registers"] = parsed.circuit->n_registers();
        result["gates"] = parsed.circuit->gates.size();
    }
    print(out, result);
    return parsed.ok() ? kExitOk : kExitFailure;
}

int cmd_aggregate(const Options &o, std::ostream &out, std::ostream &err) {
    QuantumCircuit c = load_circuit(o.circuit, err, o.tol);
    std::optional<DensityOperator> rho;
    if (!o.input.empty()) {
        rho = load_state(o.input, c);
    }
    AggregateMeasurement agg = aggregate_measurement(c);
    Json result = io::aggregate_to_json(agg, rho ? &*rho : nullptr);
    result["completeness_error"] = agg.completeness_error();
    print(out, result);
    return kExitOk;
}

int cmd_run(const Options &o, std::ostream &out, std::ostream &err) {
    QuantumCircuit c = load_circuit(o.circuit, err, o.tol);
    DensityOperator rho = load_state(o.input, c);
    Schedule x = o.schedule == "greedy" ? greedy_schedule(c)
                                        : io::schedule_from_json(io::parse_json(read_file(o.schedule)));
    if (!validate_schedule(c, x)) {
        report_error(err, "'" + o.schedule + "' is not a schedule of the circuit");
        return kExitFailure;
    }
    if (o.shots == 0) {
        throw UsageError("--shots must be positive");
    }
    Json result{{"seed", o.seed}, {"schedule", io::schedule_to_json(x)}};
    if (o.shots == 1) {
        RunResult r = run(c, x, rho, o.seed);
        ComplexMatrix normalized = r.final_state;
        double tr = trace(normalized).real();
        if (tr > 0) {
            normalized *= 1.0 / tr;
        }
        result["track"] = io::track_to_json(r.track);
        result["probability"] = r.probability();
        result["steps"] = steps_to_json(r.steps);
        result["final_state"] = Json{{"raw", io::matrix_to_json(r.final_state)},
                                     {"normalized", io::matrix_to_json(normalized)}};
    } else {
        std::map<Track, std::size_t> counts;
        for (std::size_t i = 0; i < o.shots; ++i) {
            ++counts[run(c, x, rho, shot_seed(o.seed, i)).track];
        }
        Json rows = Json::array();
        for (const auto &[f, k] : counts) {
            rows.push_back(Json{{"outcomes", io::track_to_json(f)},
                                {"count", k},
                                {"frequency", static_cast<double>(k) / static_cast<double>(o.shots)}});
        }
        result["shots"] = o.shots;
        result["counts"] = std::move(rows);
    }
    print(out, result);
    return kExitOk;
}

int cmd_schedules(const Options &o, std::ostream &out, std::ostream &err) {
    QuantumCircuit c = load_circuit(o.circuit, err, o.tol);
    Json result{{"greedy", io::schedule_to_json(greedy_schedule(c))}};
    if (o.enumerate) {
        auto all = enumerate_linear_schedules(c, o.limit + 1);
        bool truncated = all.size() > o.limit;
        if (truncated) {
            all.resize(o.limit);
            report(err, {{Severity::warning, "enumeration-truncated", "schedules",
                          "stopped after " + std::to_string(o.limit) + " linear schedules"}});
        }
        Json list = Json::array();
        for (const auto &x : all) {
            list.push_back(io::schedule_to_json(x));
        }
        result["linear"] = std::move(list);
        result["truncated"] = truncated;
    }
    print(out, result);
    return kExitOk;
}

int cmd_defer(const Options &o, std::ostream &out, std::ostream &err) {
    QuantumCircuit c = load_circuit(o.circuit, err, o.tol);
    DeferralResult d;
    try {
        d = defer_measurements(c, o.tol);
    } catch (const DeferralRejected &e) {
        report(err, e.diagnostics());
        return kExitFailure;
    }
    std::string zeta_path = o.zeta;
    if (zeta_path.empty()) {
        zeta_path = std::filesystem::path(o.output).replace_extension(".zeta.json").string();
    }
    Json sidecar = io::zeta_to_json(d.zeta, d.ancilla_registers);
    write_file(o.output, io::serialize_circuit(d.circuit));
    write_file(zeta_path, sidecar.dump(2) + "\n");
    Json result{{"output", o.output}, {"zeta_path", zeta_path}, {"gates", d.circuit.gates.size()},
                {"registers", d.circuit.n_registers()}};
    result.update(sidecar);
    print(out, result);
    return kExitOk;
}

int cmd_check_faithful(const Options &o, std::ostream &out, std::ostream &err) {
    QuantumCircuit c = load_circuit(o.circuit, err, o.tol);
    QuantumCircuit d = load_circuit(o.other, err, o.tol);
    auto [zeta, ancillas] = io::zeta_from_json(io::parse_json(read_file(o.zeta)));
    auto inputs = faithfulness_inputs(o.inputs, c.n_registers(), o.seed);
    FaithfulnessReport rep = check_faithful(c, d, zeta, inputs, o.tol);
    Json result{{"passed", rep.passed},
                {"inputs_checked", rep.inputs_checked},
                {"tracks_checked", rep.tracks_checked},
                {"max_probability_error", rep.max_probability_error},
                {"max_output_error", rep.max_output_error},
                {"max_stray_probability", rep.max_stray_probability},
                {"witness", rep.witness ? witness_to_json(*rep.witness) : Json(nullptr)}};
    print(out, result);
    return rep.passed ? kExitOk : kExitFailure;
}

int cmd_transpose_path(const Options &o, std::ostream &out, std::ostream &) {
    Poset p = io::poset_from_json(io::parse_json(read_file(o.circuit)));
    auto path = transposition_path(p, io::split_commas(o.from), io::split_commas(o.to));
    print(out, Json{{"path", path}, {"steps", path.size() - 1}});
    return kExitOk;
}

}  // namespace

std::uint64_t shot_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the shot's position in the seed's stream.
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum circuits with measurement gates and classical channels"};
    app.require_subcommand(1);
    Options o;

    auto *validate = app.add_subcommand("validate", "Parse and validate a circuit");
    validate->add_option("circuit", o.circuit, "Circuit JSON")->required();

    auto *aggregate = app.add_subcommand("aggregate", "Print the aggregate measurement");
    aggregate->add_option("circuit", o.circuit, "Circuit JSON")->required();
    aggregate->add_option("--input", o.input, "State JSON for per-track probabilities");

    auto *runc = app.add_subcommand("run", "Execute the circuit on a state");
    runc->add_option("circuit", o.circuit, "Circuit JSON")->required();
    runc->add_option("--input", o.input, "State JSON")->required();
    runc->add_option("--seed", o.seed, "Random seed")->required();
    runc->add_option("--shots", o.shots, "Number of runs");
    runc->add_option("--schedule", o.schedule, "greedy or a schedule JSON file");

    auto *schedules = app.add_subcommand("schedules", "Print the greedy and linear schedules");
    schedules->add_option("circuit", o.circuit, "Circuit JSON")->required();
    schedules->add_flag("--enumerate", o.enumerate, "Enumerate linear schedules");
    schedules->add_option("--limit", o.limit, "Enumeration cap");

    auto *defer = app.add_subcommand("defer", "Move every measurement after every unitary");
    defer->add_option("circuit", o.circuit, "Circuit JSON")->required();
    defer->add_option("-o,--output", o.output, "Output circuit JSON")->required();
    defer->add_option("--zeta", o.zeta, "Sidecar path (default: <output stem>.zeta.json)");

    auto *check = app.add_subcommand("check-faithful", "Check that one circuit faithfully simulates another");
    check->add_option("simulated", o.circuit, "Simulated circuit JSON")->required();
    check->add_option("simulating", o.other, "Simulating circuit JSON")->required();
    check->add_option("--zeta", o.zeta, "Sidecar JSON")->required();
    check->add_option("--inputs", o.inputs, "basis, random:K, or a comma list of both");
    check->add_option("--tol", o.tol, "Tolerance");
    check->add_option("--seed", o.seed, "Seed for random inputs");

    auto *transpose = app.add_subcommand("transpose-path", "Adjacent transpositions between two linear orders");
    transpose->add_option("poset", o.circuit, "Poset JSON")->required();
    transpose->add_option("--from", o.from, "Comma-separated linear order")->required();
    transpose->add_option("--to", o.to, "Comma-separated linear order")->required();

    for (auto *sub : {validate, aggregate, schedules, defer}) {
        sub->add_option("--tol", o.tol, "Tolerance");
    }

    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(o, out, err);
        }
        if (aggregate->parsed()) {
            return cmd_aggregate(o, out, err);
        }
        if (runc->parsed()) {
            return cmd_run(o, out, err);
        }
        if (schedules->parsed()) {
            return cmd_schedules(o, out, err);
        }
        if (defer->parsed()) {
            return cmd_defer(o, out, err);
        }
        if (check->parsed()) {
            return cmd_check_faithful(o, out, err);
        }
        return cmd_transpose_path(o, out, err);
    } catch (const UsageError &e) {
        report_error(err, e.what());
        return kExitUsage;
    } catch (const Reported &) {
        return kExitFailure;
    } catch (const io::SchemaError &e) {
        report(err, {{Severity::error, e.code(), e.location(), e.what()}});
        return kExitFailure;
    } catch (const std::exception &e) {
        report_error(err, e.what());
        return kExitFailure;
    }
}

}  // namespace qcirc
