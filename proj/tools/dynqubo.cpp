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


//! dynqubo command line: compile, solve, embed, hybrid, sweep, report.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dynqubo/embedding.hpp"
#include "dynqubo/errors.hpp"
#include "dynqubo/harness.hpp"
#include "dynqubo/hybrid.hpp"
#include "dynqubo/model.hpp"
#include "dynqubo/qubo.hpp"
#include "dynqubo/solvers.hpp"
#include "dynqubo/transform.hpp"

namespace fs = std::filesystem;
using namespace dynqubo;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string problem_file;
    std::string preset;
};

ProblemDefinition problem_of(const Globals &g) {
    if (!g.problem_file.empty()) return load_problem_file(g.problem_file);
    return preset_problem(g.preset.empty() ? "cstr" : g.preset);
}

//! Opens `name` inside the output directory, or returns nullopt without one.
std::optional<std::ofstream> artifact(const Globals &g, const std::string &name) {
    if (g.out_dir.empty()) return std::nullopt;
    std::error_code ec;
    fs::create_directories(g.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + g.out_dir + "': " + ec.message());
    const auto path = fs::path(g.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void print_inputs(std::ostream &os, const std::vector<double> &inputs) {
    os << "step,input\n";
    for (std::size_t k = 0; k < inputs.size(); ++k) os << fmt::format("{},{:.9g}\n", k, inputs[k]);
}

// ------------------------------------------------------------------ verbs

struct CompileArgs {
    int bits = 0;
};

int run_compile(const Globals &g, const CompileArgs &a) {
    const auto def = problem_of(g);
    const int bits = a.bits > 0 ? a.bits : def.bits_per_input;
    const auto c = compile(def.build(), bits);
    fmt::print("problem      {} (N={}, dt={})\n", def.name, def.horizon, def.dt);
    fmt::print("bits/input   {}\n", bits);
    fmt::print("resolution   {:.9g}\n", c.scheme.entries().front().resolution());
    fmt::print("variables    {} ({} auxiliary)\n", c.qubo.n_vars(), c.quadratized.auxiliaries.size());
    fmt::print("terms        {}\n", c.qubo.n_terms());
    fmt::print("offset       {:.17g}\n", c.qubo.offset());
    fmt::print("max |Q_ij|   {:.9g}\n", c.qubo.max_abs_coefficient());
    if (auto out = artifact(g, "qubo.txt")) write_qubo(*out, c.qubo);
    return 0;
}

struct SolveArgs {
    std::string solver = "sa";
    int bits = 0;
    int reads = 1000;
    int sweeps = 1000;
    long long tabu_iterations = 10000;
    int pegasus_m = 16;
    std::optional<double> chain_strength;
};

int run_solve(const Globals &g, const SolveArgs &a) {
    const auto def = problem_of(g);
    const int bits = a.bits > 0 ? a.bits : def.bits_per_input;
    const auto c = compile(def.build(), bits);

    SolverSpec spec;
    spec.kind = parse_solver_kind(a.solver);
    spec.sa = {.num_reads = a.reads, .sweeps_per_read = a.sweeps};
    spec.tabu.max_iterations = a.tabu_iterations;
    spec.pegasus_m = a.pegasus_m;
    spec.chain_strength = a.chain_strength;
    auto run = run_solver(spec, c, g.seed);
    if (run.samples.empty()) throw Error("solver returned no samples");

    const auto &best = run.samples.best();
    const auto decoded = decode(best.bits, c);
    const auto pgd = projected_gradient(c.box);
    fmt::print("solver       {}\n", to_string(spec.kind));
    fmt::print("energy       {:.12g}\n", best.energy);
    fmt::print("objective    {:.12g}\n", decoded.trajectory.objective_value);
    fmt::print("baseline     {:.12g}\n", pgd.objective);
    fmt::print("error/step   {:.9g}\n", error_per_timestep(decoded.values, pgd.inputs));
    fmt::print("wall time    {:.3f} ms\n", 1e3 * run.samples.wall_time);
    if (run.embedding) write_embedding_report(std::cout, *run.embedding);
    if (auto out = artifact(g, "samples.txt")) write_sampleset(*out, run.samples);
    if (auto out = artifact(g, "inputs.csv")) print_inputs(*out, decoded.values);
    return 0;
}

struct EmbedArgs {
    std::string topology = "pegasus:16";
    int bits = 0;
    std::optional<double> chain_strength;
    bool dot = false;
    int reads = 0;
    int sweeps = 1000;
    double time_limit = 60.0;
};

int run_embed(const Globals &g, const EmbedArgs &a) {
    const auto def = problem_of(g);
    const int bits = a.bits > 0 ? a.bits : def.bits_per_input;
    const auto c = compile(def.build(), bits);
    const auto hw = HardwareGraph::from_description(a.topology);
    const auto logical = LogicalGraph::from_qubo(c.qubo);

    EmbeddingOptions opts;
    opts.time_limit = a.time_limit;
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = find_embedding(logical, hw, g.seed, opts);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    EmbeddingReport report{c.qubo.n_vars(), e.qubit_count(), e.max_chain_length(), elapsed,
                           a.chain_strength.value_or(default_chain_strength(c.qubo)), {}};
    if (a.reads > 0) {
        auto r = virtual_qpu_solve(c.qubo, e, hw, report.chain_strength, {.num_reads = a.reads, .sweeps_per_read = a.sweeps},
                                   g.seed);
        report.chain_break_fraction = r.report.chain_break_fraction;
        if (!r.logical.empty()) fmt::print("best energy  {:.12g}\n", r.logical.best().energy);
    }
    fmt::print("topology     {} ({} qubits, {} couplers)\n", hw.describe(), hw.size(), hw.edge_count());
    write_embedding_report(std::cout, report);
    if (auto out = artifact(g, "embedding.txt")) write_embedding(*out, e, hw, c.qubo.labels());
    if (auto out = artifact(g, "embedding_report.txt")) write_embedding_report(*out, report);
    if (a.dot) {
        if (auto out = artifact(g, "embedding.dot"))
            write_embedding_dot(*out, e, hw);
        else
            write_embedding_dot(std::cout, e, hw);
    }
    return 0;
}

struct HybridArgs {
    int bits = 0;
    int subsize = 40;
    int iters = 10;
    std::string sub_solver = "virtual_qpu";
};

int run_hybrid(const Globals &g, const HybridArgs &a) {
    const auto def = problem_of(g);
    const int bits = a.bits > 0 ? a.bits : def.bits_per_input;
    const auto c = compile(def.build(), bits);
    HybridConfig cfg;
    cfg.subproblem_size = a.subsize;
    cfg.max_iterations = a.iters;
    cfg.sub_solver = parse_sub_solver(a.sub_solver);
    const auto r = kerberos_run(c.qubo, cfg, g.seed);
    const auto decoded = decode(r.samples.best().bits, c);
    fmt::print("iterations   {}\n", r.iterations);
    fmt::print("energy       {:.12g}\n", r.samples.best().energy);
    fmt::print("objective    {:.12g}\n", decoded.trajectory.objective_value);
    if (r.embedded_qubits > 0) fmt::print("qubits       {}\n", r.embedded_qubits);
    fmt::print("wall time    {:.3f} ms\n", 1e3 * r.samples.wall_time);
    if (auto out = artifact(g, "hybrid_trace.csv")) write_hybrid_trace_csv(*out, r.trace);
    if (auto out = artifact(g, "inputs.csv")) print_inputs(*out, decoded.values);
    return 0;
}

int run_sweep(const Globals &g, const std::string &config_path) {
    auto cfg = load_experiment_config(config_path);
    if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
    if (!g.problem_file.empty() || !g.preset.empty()) cfg.problem = problem_of(g);
    const auto r = sweep(cfg);
    write_aggregates_csv(std::cout, r.aggregates());
    fmt::print(stderr, "{} runs ({} computed), {} failed\n", r.rows.size(), r.solver_calls, r.failures.size());
    for (const auto &f : r.failures)
        fmt::print(stderr, "  failed: {} bits={} seed={}: {}\n", f.solver, f.bits, f.seed, f.message);
    return r.failures.empty() ? 0 : 1;
}

int run_report(const Globals &g, const std::string &dir, const std::string &format) {
    const auto r = load_report(dir);
    if (format == "csv")
        write_aggregates_csv(std::cout, r.aggregates());
    else
        write_structured_report(std::cout, r);
    if (!g.out_dir.empty()) {
        report_export(r, ReportFormat::csv, g.out_dir);
        report_export(r, ReportFormat::structured_text, g.out_dir);
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Dynamic optimization as QUBO: compile, solve, embed and benchmark"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for output artifacts");
    auto *problem = app.add_option("--problem", g.problem_file, "Problem definition file (YAML)")->check(CLI::ExistingFile);
    auto *preset = app.add_option("--preset", g.preset, "Built-in problem: cstr or cstr-small");
    problem->excludes(preset);

    CompileArgs ca;
    auto *compile_cmd = app.add_subcommand("compile", "Build the QUBO and print its structure");
    compile_cmd->add_option("--bits", ca.bits, "Bits per input (default: from the problem)");

    SolveArgs sa;
    auto *solve_cmd = app.add_subcommand("solve", "Compile and solve with one solver");
    solve_cmd->add_option("--solver", sa.solver, "brute, sa, tabu, hybrid or virtual_qpu")->capture_default_str();
    solve_cmd->add_option("--bits", sa.bits, "Bits per input");
    solve_cmd->add_option("--reads", sa.reads, "Annealing reads")->capture_default_str();
    solve_cmd->add_option("--sweeps", sa.sweeps, "Sweeps per read")->capture_default_str();
    solve_cmd->add_option("--tabu-iterations", sa.tabu_iterations, "Tabu iteration budget")->capture_default_str();
    solve_cmd->add_option("--pegasus", sa.pegasus_m, "Pegasus size for virtual_qpu")->capture_default_str();
    solve_cmd->add_option("--chain-strength", sa.chain_strength, "Chain strength for virtual_qpu");

    EmbedArgs ea;
    auto *embed_cmd = app.add_subcommand("embed", "Minor-embed the QUBO into a hardware graph");
    embed_cmd->add_option("--topology", ea.topology, "pegasus:M or grid:RxC")->capture_default_str();
    embed_cmd->add_option("--bits", ea.bits, "Bits per input");
    embed_cmd->add_option("--chain-strength", ea.chain_strength, "Chain strength (default 1.414 max|Q|)");
    embed_cmd->add_flag("--dot", ea.dot, "Also emit a Graphviz view of the chains");
    embed_cmd->add_option("--reads", ea.reads, "Virtual QPU reads to measure chain breaks")->capture_default_str();
    embed_cmd->add_option("--sweeps", ea.sweeps, "Sweeps per virtual QPU read")->capture_default_str();
    embed_cmd->add_option("--time-limit", ea.time_limit, "Embedding time limit in seconds")->capture_default_str();

    HybridArgs ha;
    auto *hybrid_cmd = app.add_subcommand("hybrid", "Run the decompose/race hybrid sampler");
    hybrid_cmd->add_option("--bits", ha.bits, "Bits per input");
    hybrid_cmd->add_option("--subsize", ha.subsize, "Subproblem size")->capture_default_str();
    hybrid_cmd->add_option("--iters", ha.iters, "Maximum iterations")->capture_default_str();
    hybrid_cmd->add_option("--sub-solver", ha.sub_solver, "virtual_qpu, sa or brute_force")->capture_default_str();

    std::string config_path;
    auto *sweep_cmd = app.add_subcommand("sweep", "Run an experiment grid from a config file");
    sweep_cmd->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);

    std::string report_dir, report_format = "text";
    auto *report_cmd = app.add_subcommand("report", "Summarize the runs.csv of a sweep directory");
    report_cmd->add_option("dir", report_dir, "Sweep output directory")->required();
    report_cmd->add_option("--format", report_format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compile_cmd) return run_compile(g, ca);
        if (*solve_cmd) return run_solve(g, sa);
        if (*embed_cmd) return run_embed(g, ea);
        if (*hybrid_cmd) return run_hybrid(g, ha);
        if (*sweep_cmd) return run_sweep(g, config_path);
        if (*report_cmd) return run_report(g, report_dir, report_format);
    } catch (const EmbeddingNotFoundError &e) {
        fmt::print(stderr, "error: {} (attempts: {}, best overlap: {})\n", e.what(), e.attempts(), e.best_overlap());
        return 1;
    } catch (const Error &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
