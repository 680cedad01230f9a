// Copyright 2026 The dynqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.


#include "dynqubo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt9(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.9g}", x);
}

}  // namespace

// ---------------------------------------------------------------- metrics

double error_per_timestep(const std::vector<double> &candidate, const std::vector<double> &reference) {
    if (candidate.size() != reference.size())
        throw LengthMismatchError(fmt::format("error_per_timestep: candidate has {} steps, reference has {}",
                                              candidate.size(), reference.size()));
    if (candidate.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < candidate.size(); ++i) sum += std::abs(candidate[i] - reference[i]);
    return sum / static_cast<double>(candidate.size());
}

double gap_at_time(const std::vector<TracePoint> &trace, double reference_energy, double t) {
    double best = inf;
    for (const auto &p : trace)
        if (p.seconds <= t) best = std::min(best, p.energy);
    if (std::isinf(best)) return inf;
    return (best - reference_energy) / std::max(std::abs(reference_energy), gap_epsilon);
}

// ---------------------------------------------------------------- solver specs

std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::brute: return "brute";
        case SolverKind::sa: return "sa";
        case SolverKind::tabu: return "tabu";
        case SolverKind::hybrid: return "hybrid";
        case SolverKind::virtual_qpu: return "virtual_qpu";
    }
    return "?";
}

SolverKind parse_solver_kind(const std::string &s) {
    for (auto k : {SolverKind::brute, SolverKind::sa, SolverKind::tabu, SolverKind::hybrid, SolverKind::virtual_qpu})
        if (to_string(k) == s) return k;
    throw ParseError("unknown solver kind '" + s + "' (expected brute, sa, tabu, hybrid or virtual_qpu)");
}

SolverRun run_solver(const SolverSpec &spec, const CompiledProblem &compiled, std::uint64_t seed,
                     EmbeddingCache *cache) {
    const Qubo &q = compiled.qubo;
    SolverRun out;
    switch (spec.kind) {
        case SolverKind::brute: out.samples = brute_force(q); break;
        case SolverKind::sa: out.samples = simulated_annealing(q, spec.sa, seed); break;
        case SolverKind::tabu: out.samples = tabu_search(q, spec.tabu, seed); break;
        case SolverKind::hybrid: out.samples = kerberos_run(q, spec.hybrid, seed).samples; break;
        case SolverKind::virtual_qpu: {
            EmbeddingCache local;
            EmbeddingCache &c = cache ? *cache : local;
            auto hw_it = c.graphs.find(spec.pegasus_m);
            if (hw_it == c.graphs.end())
                hw_it = c.graphs.emplace(spec.pegasus_m, HardwareGraph::pegasus(spec.pegasus_m)).first;
            const HardwareGraph &hw = hw_it->second;

            const auto key = std::make_pair(spec.pegasus_m, q.n_vars());
            double embed_time = 0.0;
            auto e_it = c.embeddings.find(key);
            if (e_it == c.embeddings.end()) {
                const auto t0 = Clock::now();
                const auto g = LogicalGraph::from_qubo(q);
                Embedding e;
                if (auto chains = pegasus_clique_chains(hw, q.n_vars())) {
                    e = std::move(*chains);
                    trim_chains(g, e, hw);
                } else {
                    e = find_embedding(g, hw, seed);
                }
                embed_time = seconds_since(t0);
                e_it = c.embeddings.emplace(key, std::move(e)).first;
            }
            const double cs = spec.chain_strength.value_or(default_chain_strength(q));
            auto r = virtual_qpu_solve(q, e_it->second, hw, cs, spec.sa, seed, spec.unembed);
            r.report.embedding_wall_time = embed_time;
            out.samples = std::move(r.logical);
            out.embedding = std::move(r.report);
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------- configuration

void ExperimentConfig::validate() const {
    if (bits.empty()) throw Error("experiment: bits grid is empty");
    for (int b : bits)
        if (b < 1) throw Error(fmt::format("experiment: bits per input must be at least 1, got {}", b));
    if (solvers.empty()) throw Error("experiment: solver grid is empty");
    if (seeds.empty()) throw Error("experiment: seed list is empty");
    if (repetitions < 1) throw Error("experiment: repetitions must be at least 1");
    for (const auto &s : solvers)
        if (s.label.find_first_of(",\n\"") != std::string::npos)
            throw Error("experiment: solver label '" + s.label + "' contains a comma, quote or newline");
}

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
    std::vector<std::uint64_t> out;
    for (auto s : seeds)
        for (int k = 0; k < repetitions; ++k) out.push_back(k == 0 ? s : mix_seed(mix_seed(s) ^ static_cast<std::uint64_t>(k)));
    return out;
}

namespace {

template <typename T>
std::vector<T> scalar_or_list(const YAML::Node &n) {
    std::vector<T> out;
    if (n.IsSequence())
        for (const auto &x : n) out.push_back(x.as<T>());
    else
        out.push_back(n.as<T>());
    return out;
}

void apply_param(SolverSpec &s, const std::string &key, const YAML::Node &v) {
    auto unknown = [&] {
        return ParseError("solver '" + to_string(s.kind) + "': unknown parameter '" + key + "'");
    };
    const bool annealer = s.kind == SolverKind::sa || s.kind == SolverKind::virtual_qpu;
    if (annealer) {
        if (key == "num_reads") return void(s.sa.num_reads = v.as<int>());
        if (key == "sweeps") return void(s.sa.sweeps_per_read = v.as<int>());
        if (key == "beta_start") return void(s.sa.beta_start = v.as<double>());
        if (key == "beta_end") return void(s.sa.beta_end = v.as<double>());
        if (key == "schedule") {
            const auto k = v.as<std::string>();
            if (k == "geometric") return void(s.sa.kind = BetaSchedule::geometric);
            if (k == "linear") return void(s.sa.kind = BetaSchedule::linear);
            throw ParseError("unknown beta schedule '" + k + "' (expected geometric or linear)");
        }
    }
    switch (s.kind) {
        case SolverKind::brute: throw unknown();
        case SolverKind::sa: throw unknown();
        case SolverKind::virtual_qpu:
            if (key == "pegasus_m") return void(s.pegasus_m = v.as<int>());
            if (key == "chain_strength") return void(s.chain_strength = v.as<double>());
            if (key == "unembed") return void(s.unembed = parse_unembed_strategy(v.as<std::string>()));
            throw unknown();
        case SolverKind::tabu:
            if (key == "max_iterations") return void(s.tabu.max_iterations = v.as<long long>());
            if (key == "tenure") return void(s.tabu.tenure = v.as<int>());
            if (key == "restarts") return void(s.tabu.restarts = v.as<int>());
            if (key == "time_limit") return void(s.tabu.time_limit = v.as<double>());
            throw unknown();
        case SolverKind::hybrid: {
            auto &h = s.hybrid;
            if (key == "max_iterations") return void(h.max_iterations = v.as<int>());
            if (key == "patience") return void(h.convergence_patience = v.as<int>());
            if (key == "subproblem_size") return void(h.subproblem_size = v.as<int>());
            if (key == "sub_solver") return void(h.sub_solver = parse_sub_solver(v.as<std::string>()));
            if (key == "branch_time_limit") return void(h.branch_time_limit = v.as<double>());
            if (key == "tabu_iterations") return void(h.tabu_iterations = v.as<long long>());
            if (key == "sa_reads") return void(h.sa_reads = v.as<int>());
            if (key == "sa_sweeps") return void(h.sa_sweeps = v.as<int>());
            if (key == "qpu_reads") return void(h.qpu_reads = v.as<int>());
            if (key == "qpu_sweeps") return void(h.qpu_sweeps = v.as<int>());
            if (key == "pegasus_m") return void(h.pegasus_m = v.as<int>());
            if (key == "chain_strength") return void(h.chain_strength = v.as<double>());
            throw unknown();
        }
    }
}

//! One solver entry, expanded over every list-valued parameter.
std::vector<SolverSpec> expand_solver(const YAML::Node &node) {
    if (!node.IsMap() || !node["kind"]) throw ParseError("solver entry needs a 'kind'");
    SolverSpec base;
    base.kind = parse_solver_kind(node["kind"].as<std::string>());
    const std::string label = node["label"] ? node["label"].as<std::string>() : to_string(base.kind);

    std::vector<std::pair<std::string, std::vector<YAML::Node>>> axes;
    if (auto params = node["params"]) {
        if (!params.IsMap()) throw ParseError("solver params must be a mapping");
        for (const auto &kv : params) {
            std::vector<YAML::Node> values;
            if (kv.second.IsSequence()) {
                if (kv.second.size() == 0)
                    throw ParseError("solver parameter '" + kv.first.as<std::string>() + "' has an empty list");
                for (const auto &x : kv.second) values.push_back(x);
            } else {
                values.push_back(kv.second);
            }
            axes.emplace_back(kv.first.as<std::string>(), std::move(values));
        }
    }

    std::vector<SolverSpec> out;
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        SolverSpec s = base;
        std::string suffix;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto &v = axes[a].second[idx[a]];
            apply_param(s, axes[a].first, v);
            if (axes[a].second.size() > 1)
                suffix += (suffix.empty() ? "" : ";") + axes[a].first + "=" + v.as<std::string>();
        }
        s.label = suffix.empty() ? label : label + "[" + suffix + "]";
        out.push_back(std::move(s));

        std::size_t a = 0;
        while (a < axes.size() && ++idx[a] == axes[a].second.size()) idx[a++] = 0;
        if (a == axes.size()) break;
    }
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string &yaml_text, const std::string &base_dir) {
    ExperimentConfig cfg;
    try {
        YAML::Node root = YAML::Load(yaml_text);
        if (!root.IsMap()) throw ParseError("experiment config must be a mapping");
        if (root["name"]) cfg.name = root["name"].as<std::string>();
        if (auto p = root["problem"]) {
            if (p.IsScalar()) {
                cfg.problem = preset_problem(p.as<std::string>());
            } else if (p["file"]) {
                fs::path path = p["file"].as<std::string>();
                if (path.is_relative()) path = fs::path(base_dir) / path;
                cfg.problem = load_problem_file(path.string());
            } else {
                cfg.problem = parse_problem_definition(YAML::Dump(p));
            }
        }
        cfg.bits = root["bits"] ? scalar_or_list<int>(root["bits"]) : std::vector<int>{cfg.problem.bits_per_input};
        cfg.seeds = root["seeds"] ? scalar_or_list<std::uint64_t>(root["seeds"]) : std::vector<std::uint64_t>{0};
        if (root["repetitions"]) cfg.repetitions = root["repetitions"].as<int>();
        if (root["reference"]) {
            const auto r = root["reference"].as<std::string>();
            if (r == "pgd")
                cfg.reference = ErrorReference::pgd;
            else if (r == "brute")
                cfg.reference = ErrorReference::brute;
            else
                throw ParseError("unknown reference '" + r + "' (expected pgd or brute)");
        }
        if (root["output_dir"]) {
            fs::path out = root["output_dir"].as<std::string>();
            if (out.is_relative()) out = fs::path(base_dir) / out;
            cfg.output_dir = out.string();
        }
        if (auto s = root["solvers"]) {
            if (!s.IsSequence()) throw ParseError("'solvers' must be a list");
            for (const auto &entry : s)
                for (auto &spec : expand_solver(entry)) cfg.solvers.push_back(std::move(spec));
        }
    } catch (const YAML::Exception &e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    try {
        cfg.validate();
    } catch (const ParseError &) {
        throw;
    } catch (const Error &e) {
        throw ParseError(e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open experiment config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str(), fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------- sweep

double round_sig9(double x) {
    if (!std::isfinite(x)) return x;
    return std::stod(fmt::format("{:.9g}", x));
}

std::vector<CellAggregate> Report::aggregates() const {
    std::vector<CellAggregate> out;
    for (const auto &row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CellAggregate &c) {
            return c.instance == row.instance && c.solver == row.solver && c.bits == row.bits;
        });
        const std::array<double, 6> v = {row.energy, row.error_per_step, row.wall_ms, row.gap[0], row.gap[1], row.gap[2]};
        if (it == out.end()) {
            CellAggregate c{row.instance, row.solver, row.bits, 0, {}};
            for (auto &s : c.stats) s = {0.0, inf, -inf};
            out.push_back(c);
            it = std::prev(out.end());
        }
        ++it->runs;
        for (std::size_t k = 0; k < v.size(); ++k) {
            it->stats[k][0] += v[k];
            it->stats[k][1] = std::min(it->stats[k][1], v[k]);
            it->stats[k][2] = std::max(it->stats[k][2], v[k]);
        }
    }
    for (auto &c : out)
        for (auto &s : c.stats) s[0] /= c.runs;
    return out;
}

namespace {

struct BitsContext {
    CompiledProblem compiled;
    std::vector<double> reference_inputs;
    double gap_reference = 0.0;
};

//! Relative agreement used when re-validating reported energies.
bool energies_agree(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

Report sweep(const ExperimentConfig &cfg) {
    cfg.validate();
    Report report;
    const fs::path out_dir = cfg.output_dir;
    if (!cfg.output_dir.empty() && fs::exists(out_dir / "runs.csv")) report.rows = load_report(cfg.output_dir).rows;

    const std::string instance = cfg.problem.name;
    const auto has_row = [&](const std::string &solver, int bits, std::uint64_t seed) {
        return std::any_of(report.rows.begin(), report.rows.end(), [&](const RunRow &r) {
            return r.instance == instance && r.solver == solver && r.bits == bits && r.seed == seed;
        });
    };
    const auto seeds = cfg.run_seeds();

    std::shared_ptr<const DynamicOptProblem> problem;
    std::optional<PgdResult> pgd;  // shared by every bits column
    EmbeddingCache embeddings;

    for (int bits : cfg.bits) {
        std::optional<BitsContext> ctx;
        std::optional<std::string> ctx_error;
        for (const auto &spec : cfg.solvers) {
            for (auto seed : seeds) {
                if (has_row(spec.label, bits, seed)) continue;
                auto fail = [&](const std::string &msg) {
                    report.failures.push_back({instance, spec.label, bits, seed, msg});
                };
                if (!ctx && !ctx_error) {
                    try {
                        if (!problem) problem = std::make_shared<const DynamicOptProblem>(cfg.problem.build());
                        BitsContext c{compile(*problem, bits), {}, 0.0};
                        if (!pgd) pgd = projected_gradient(c.compiled.box);
                        std::optional<SampleSet> ground;
                        if (c.compiled.qubo.n_vars() <= 30) ground = brute_force(c.compiled.qubo, 1);
                        if (cfg.reference == ErrorReference::brute) {
                            if (!ground)
                                throw TooLargeError(fmt::format("brute-force reference needs at most 30 variables, got {}",
                                                                c.compiled.qubo.n_vars()));
                            c.reference_inputs = decode(ground->best().bits, c.compiled).values;
                        } else {
                            c.reference_inputs = pgd->inputs;
                        }
                        c.gap_reference = ground ? ground->best().energy : pgd->objective;
                        ctx = std::move(c);
                    } catch (const std::exception &e) {
                        ctx_error = e.what();
                    }
                }
                if (ctx_error) {
                    fail(*ctx_error);
                    continue;
                }
                try {
                    ++report.solver_calls;
                    auto run = run_solver(spec, ctx->compiled, seed, &embeddings);
                    if (run.samples.empty()) throw Error("solver returned no samples");
                    const auto &best = run.samples.best();
                    auto decoded = decode(best.bits, ctx->compiled);
                    const double objective = decoded.trajectory.objective_value;
                    if (!energies_agree(best.energy, objective))
                        throw Error(fmt::format("energy {:.17g} does not match simulated objective {:.17g}", best.energy,
                                                objective));
                    RunRow row{instance, spec.label, bits, seed, round_sig9(objective), 0.0, 0.0, {}};
                    row.error_per_step = round_sig9(error_per_timestep(decoded.values, ctx->reference_inputs));
                    row.wall_ms = round_sig9(1e3 * run.samples.wall_time);
                    for (std::size_t k = 0; k < gap_timeslots.size(); ++k)
                        row.gap[k] = round_sig9(gap_at_time(run.samples.trace, ctx->gap_reference, gap_timeslots[k]));
                    report.details[report.rows.size()] =
                        RunDetail{decoded.values, std::move(decoded.trajectory), run.samples.trace, run.embedding};
                    report.rows.push_back(row);
                } catch (const std::exception &e) {
                    fail(e.what());
                }
            }
        }
    }

    if (!cfg.output_dir.empty()) {
        report_export(report, ReportFormat::csv, cfg.output_dir);
        report_export(report, ReportFormat::structured_text, cfg.output_dir);
    }
    return report;
}

// ---------------------------------------------------------------- export

namespace {

constexpr const char *runs_header =
    "instance,solver,bits,seed,energy,error_K_per_step,wall_ms,gap_at_100ms,gap_at_500ms,gap_at_1000ms";

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string &s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
}

std::ofstream open_output(const fs::path &path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_runs_csv(std::ostream &os, const Report &r) {
    os << runs_header << '\n';
    for (const auto &row : r.rows) {
        os << fmt::format("{},{},{},{},{},{},{}", row.instance, row.solver, row.bits, row.seed, fmt9(row.energy),
                          fmt9(row.error_per_step), fmt9(row.wall_ms));
        for (double g : row.gap) os << ',' << fmt9(g);
        os << '\n';
    }
}

Report read_runs_csv(std::istream &is) {
    Report r;
    std::string line;
    if (!std::getline(is, line)) return r;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != runs_header) throw ParseError("runs.csv: unexpected header '" + line + "'");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 10) throw ParseError(fmt::format("runs.csv line {}: expected 10 fields, got {}", lineno, f.size()));
        try {
            RunRow row;
            row.instance = f[0];
            row.solver = f[1];
            row.bits = std::stoi(f[2]);
            row.seed = std::stoull(f[3]);
            row.energy = parse_number(f[4]);
            row.error_per_step = parse_number(f[5]);
            row.wall_ms = parse_number(f[6]);
            for (std::size_t k = 0; k < 3; ++k) row.gap[k] = parse_number(f[7 + k]);
            r.rows.push_back(row);
        } catch (const std::logic_error &) {
            throw ParseError(fmt::format("runs.csv line {}: malformed number", lineno));
        }
    }
    return r;
}

void write_aggregates_csv(std::ostream &os, const std::vector<CellAggregate> &a) {
    static constexpr const char *metrics[] = {"energy",       "error_K_per_step", "wall_ms",
                                              "gap_at_100ms", "gap_at_500ms",     "gap_at_1000ms"};
    os << "instance,solver,bits,runs";
    for (const char *m : metrics) os << fmt::format(",{0}_mean,{0}_min,{0}_max", m);
    os << '\n';
    for (const auto &c : a) {
        os << fmt::format("{},{},{},{}", c.instance, c.solver, c.bits, c.runs);
        for (const auto &s : c.stats) os << ',' << fmt9(s[0]) << ',' << fmt9(s[1]) << ',' << fmt9(s[2]);
        os << '\n';
    }
}

void write_failures_csv(std::ostream &os, const Report &r) {
    os << "instance,solver,bits,seed,message\n";
    for (const auto &f : r.failures) {
        std::string msg = f.message;
        std::replace_if(msg.begin(), msg.end(), [](char c) { return c == ',' || c == '\n'; }, ';');
        os << fmt::format("{},{},{},{},{}\n", f.instance, f.solver, f.bits, f.seed, msg);
    }
}

void write_structured_report(std::ostream &os, const Report &r) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "runs" << YAML::Value << r.rows.size();
    out << YAML::Key << "failures" << YAML::Value << r.failures.size();
    out << YAML::Key << "cells" << YAML::Value << YAML::BeginSeq;
    static constexpr const char *metrics[] = {"energy",       "error_K_per_step", "wall_ms",
                                              "gap_at_100ms", "gap_at_500ms",     "gap_at_1000ms"};
    for (const auto &c : r.aggregates()) {
        out << YAML::BeginMap;
        out << YAML::Key << "instance" << YAML::Value << c.instance;
        out << YAML::Key << "solver" << YAML::Value << c.solver;
        out << YAML::Key << "bits" << YAML::Value << c.bits;
        out << YAML::Key << "runs" << YAML::Value << c.runs;
        for (std::size_t k = 0; k < c.stats.size(); ++k) {
            out << YAML::Key << metrics[k] << YAML::Value << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "mean" << YAML::Value << fmt9(c.stats[k][0]);
            out << YAML::Key << "min" << YAML::Value << fmt9(c.stats[k][1]);
            out << YAML::Key << "max" << YAML::Value << fmt9(c.stats[k][2]);
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    if (!r.failures.empty()) {
        out << YAML::Key << "failed_runs" << YAML::Value << YAML::BeginSeq;
        for (const auto &f : r.failures) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "solver" << YAML::Value << f.solver << YAML::Key
                << "bits" << YAML::Value << f.bits << YAML::Key << "seed" << YAML::Value << f.seed << YAML::Key
                << "message" << YAML::Value << f.message << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    os << out.c_str() << '\n';
}

void report_export(const Report &r, ReportFormat format, const std::string &dir) {
    const fs::path base = dir;
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    if (format == ReportFormat::csv) {
        {
            auto out = open_output(base / "runs.csv");
            write_runs_csv(out, r);
        }
        {
            auto out = open_output(base / "aggregates.csv");
            write_aggregates_csv(out, r.aggregates());
        }
        auto out = open_output(base / "failures.csv");
        write_failures_csv(out, r);
    } else {
        auto out = open_output(base / "summary.txt");
        write_structured_report(out, r);
    }
}

Report load_report(const std::string &dir) {
    const fs::path path = fs::path(dir) / "runs.csv";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return read_runs_csv(in);
    } catch (const ParseError &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace dynqubo
