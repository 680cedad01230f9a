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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gtest/gtest.h"

#include "dynqubo/errors.hpp"
#include "dynqubo/harness.hpp"

using namespace dynqubo;
namespace fs = std::filesystem;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

fs::path fresh_dir(const std::string &name) {
    fs::path p = fs::path(testing::TempDir()) / ("dynqubo_harness_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig small_config(const std::string &solvers_yaml, const std::string &extra = "") {
    return parse_experiment_config("problem: cstr-small\n" + extra + "solvers:\n" + solvers_yaml);
}

}  // namespace

TEST(ErrorPerTimestep, IdenticalSequencesGiveZero) {
    std::vector<double> u{300.0, 310.5, 329.0};
    EXPECT_EQ(error_per_timestep(u, u), 0.0);
}

TEST(ErrorPerTimestep, ConstantOffsetIsTheOffset) {
    std::vector<double> ref{300.0, 310.0, 320.0, 330.0};
    std::vector<double> cand{300.5, 309.5, 320.5, 329.5};
    EXPECT_DOUBLE_EQ(error_per_timestep(cand, ref), 0.5);
}

TEST(ErrorPerTimestep, LengthMismatchThrows) {
    EXPECT_THROW(error_per_timestep({1.0, 2.0}, {1.0}), LengthMismatchError);
}

TEST(GapAtTime, MatchingReferenceIsZero) {
    std::vector<TracePoint> trace{{0.01, 120.0}, {0.02, 100.0}};
    EXPECT_EQ(gap_at_time(trace, 100.0, 0.05), 0.0);
}

TEST(GapAtTime, TenPercentAbove) {
    std::vector<TracePoint> trace{{0.01, 110.0}};
    EXPECT_NEAR(gap_at_time(trace, 100.0, 1.0), 0.10, 1e-15);
}

TEST(GapAtTime, UsesBestPointUpToTimeAndSentinelBefore) {
    std::vector<TracePoint> trace{{0.2, 150.0}, {0.4, 120.0}, {0.9, 100.0}};
    EXPECT_EQ(gap_at_time(trace, 100.0, 0.1), inf);
    EXPECT_NEAR(gap_at_time(trace, 100.0, 0.5), 0.2, 1e-15);
    EXPECT_EQ(gap_at_time(trace, 100.0, 1.0), 0.0);
}

TEST(GapAtTime, ZeroReferenceUsesEpsilon) {
    std::vector<TracePoint> trace{{0.0, 1e-12}};
    EXPECT_NEAR(gap_at_time(trace, 0.0, 1.0), 1.0, 1e-12);
}

TEST(GapAtTime, SaReachesBruteForceOptimumOnSmallInstance) {
    auto compiled = compile(preset_problem("cstr-small").build(), 4);
    ASSERT_EQ(compiled.qubo.n_vars(), 12);
    const double ground = brute_force(compiled.qubo).best().energy;
    auto sa = simulated_annealing(compiled.qubo, {.num_reads = 200, .sweeps_per_read = 100}, 5);
    ASSERT_FALSE(sa.trace.empty());
    const double t_end = sa.trace.back().seconds;
    EXPECT_NEAR(gap_at_time(sa.trace, ground, t_end), 0.0, 1e-12);
}

TEST(ExperimentConfig, ParsesGridsAndExpandsListParameters) {
    auto cfg = parse_experiment_config(R"(
name: demo
problem: {preset: cstr-small, horizon: 2}
bits: [2, 3]
seeds: [1, 2]
repetitions: 3
reference: brute
solvers:
  - kind: sa
    params: {num_reads: [10, 20], sweeps: 50}
  - kind: tabu
    label: tb
    params: {max_iterations: 300}
)");
    EXPECT_EQ(cfg.name, "demo");
    EXPECT_EQ(cfg.problem.horizon, 2);
    EXPECT_EQ(cfg.bits, (std::vector<int>{2, 3}));
    EXPECT_EQ(cfg.reference, ErrorReference::brute);
    ASSERT_EQ(cfg.solvers.size(), 3u);
    EXPECT_EQ(cfg.solvers[0].label, "sa[num_reads=10]");
    EXPECT_EQ(cfg.solvers[1].label, "sa[num_reads=20]");
    EXPECT_EQ(cfg.solvers[1].sa.num_reads, 20);
    EXPECT_EQ(cfg.solvers[1].sa.sweeps_per_read, 50);
    EXPECT_EQ(cfg.solvers[2].label, "tb");
    EXPECT_EQ(cfg.solvers[2].tabu.max_iterations, 300);

    auto seeds = cfg.run_seeds();
    ASSERT_EQ(seeds.size(), 6u);
    EXPECT_EQ(seeds[0], 1u);
    EXPECT_EQ(seeds[3], 2u);
    EXPECT_EQ(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size(), 6u);
}

TEST(ExperimentConfig, RejectsInvalidInput) {
    EXPECT_THROW(parse_experiment_config("problem: cstr-small\nsolvers: []\n"), ParseError);
    EXPECT_THROW(parse_experiment_config("problem: cstr-small\nbits: []\nsolvers: [{kind: sa}]\n"), ParseError);
    EXPECT_THROW(parse_experiment_config("problem: cstr-small\nrepetitions: 0\nsolvers: [{kind: sa}]\n"), ParseError);
    EXPECT_THROW(parse_experiment_config("solvers: [{kind: annealer}]\n"), ParseError);
    EXPECT_THROW(parse_experiment_config("solvers: [{kind: tabu, params: {num_reads: 3}}]\n"), ParseError);
    EXPECT_THROW(parse_experiment_config("solvers: [{kind: sa}]\nreference: exact\n"), ParseError);
}

TEST(ExperimentConfig, ProblemFileResolvesAgainstConfigDirectory) {
    auto dir = fresh_dir("problem_file");
    fs::create_directories(dir);
    std::ofstream(dir / "plant.yaml") << "preset: cstr-small\nname: plant\nhorizon: 2\n";
    std::ofstream(dir / "exp.yaml") << "problem: {file: plant.yaml}\nsolvers: [{kind: brute}]\noutput_dir: out\n";
    auto cfg = load_experiment_config((dir / "exp.yaml").string());
    EXPECT_EQ(cfg.problem.name, "plant");
    EXPECT_EQ(cfg.problem.horizon, 2);
    EXPECT_EQ(fs::path(cfg.output_dir), dir / "out");
    EXPECT_THROW(load_experiment_config((dir / "missing.yaml").string()), IoError);
}

TEST(Sweep, BruteForceAgainstItselfHasZeroError) {
    auto cfg = small_config("  - {kind: brute}\n", "bits: [4]\nreference: brute\n");
    auto r = sweep(cfg);
    ASSERT_TRUE(r.failures.empty());
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].error_per_step, 0.0);
    EXPECT_EQ(r.rows[0].bits, 4);
    EXPECT_EQ(r.rows[0].solver, "brute");
    EXPECT_EQ(r.solver_calls, 1);
}

TEST(Sweep, ReportedEnergiesMatchSimulation) {
    auto cfg = small_config("  - {kind: sa, params: {num_reads: 20, sweeps: 50}}\n  - {kind: tabu}\n",
                            "bits: [3]\nseeds: [1, 2]\n");
    auto r = sweep(cfg);
    ASSERT_TRUE(r.failures.empty());
    ASSERT_EQ(r.rows.size(), 4u);
    ASSERT_EQ(r.details.size(), 4u);
    for (const auto &[i, d] : r.details) {
        EXPECT_EQ(r.rows[i].energy, round_sig9(d.trajectory.objective_value));
        auto again = simulate(cfg.problem.build(), d.inputs);
        EXPECT_NEAR(again.objective_value, d.trajectory.objective_value,
                    1e-9 * std::abs(d.trajectory.objective_value));
        EXPECT_TRUE(std::isfinite(r.rows[i].error_per_step));
    }
}

TEST(Sweep, ErrorNonIncreasingInBitsForBestCell) {
    auto cfg = small_config("  - {kind: sa, params: {num_reads: 200, sweeps: 100}}\n",
                            "bits: [2, 4, 6]\nseeds: [1, 2, 3]\n");
    auto r = sweep(cfg);
    ASSERT_TRUE(r.failures.empty());
    auto cells = r.aggregates();
    ASSERT_EQ(cells.size(), 3u);

    // brute force on each grid gives the best error attainable at that resolution
    const auto problem = cfg.problem.build();
    const auto reference = projected_gradient(compile(problem, 2).box).inputs;
    double previous = inf;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        auto compiled = compile(problem, cfg.bits[k]);
        const double exact = error_per_timestep(decode(brute_force(compiled.qubo).best().bits, compiled).values, reference);
        EXPECT_NEAR(cells[k].stats[1][1], exact, 1e-9);
        EXPECT_LE(exact, previous + 1e-12);
        EXPECT_LE(cells[k].stats[1][1], previous + 1e-9);
        previous = cells[k].stats[1][1];
    }
}

TEST(Sweep, RepetitionsGiveDistinctDeterministicRows) {
    auto cfg = small_config("  - {kind: sa, params: {num_reads: 5, sweeps: 20}}\n",
                            "bits: [4]\nseeds: [7]\nrepetitions: 5\n");
    auto a = sweep(cfg);
    auto b = sweep(cfg);
    ASSERT_EQ(a.rows.size(), 5u);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        seeds.insert(a.rows[i].seed);
        EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
        EXPECT_EQ(a.rows[i].energy, b.rows[i].energy);
        EXPECT_EQ(a.rows[i].error_per_step, b.rows[i].error_per_step);
    }
    EXPECT_EQ(seeds.size(), 5u);
}

TEST(Sweep, RerunningCompletedSweepMakesNoSolverCalls) {
    auto dir = fresh_dir("resume");
    auto cfg = small_config("  - {kind: tabu, params: {max_iterations: 500}}\n  - {kind: brute}\n",
                            "bits: [2, 3]\nseeds: [1, 2]\n");
    cfg.output_dir = dir.string();
    auto first = sweep(cfg);
    EXPECT_EQ(first.solver_calls, 8);
    EXPECT_TRUE(fs::exists(dir / "runs.csv"));
    EXPECT_TRUE(fs::exists(dir / "aggregates.csv"));
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));

    auto second = sweep(cfg);
    EXPECT_EQ(second.solver_calls, 0);
    EXPECT_EQ(second.rows.size(), 8u);

    cfg.seeds.push_back(3);
    auto third = sweep(cfg);
    EXPECT_EQ(third.solver_calls, 4);
    EXPECT_EQ(third.rows.size(), 12u);
}

TEST(Sweep, FailingCellIsRecordedAndSweepContinues) {
    // brute force refuses 3 stages x 12 bits = 36 variables
    auto cfg = small_config("  - {kind: brute}\n  - {kind: tabu, params: {max_iterations: 500}}\n", "bits: [12]\n");
    auto r = sweep(cfg);
    ASSERT_EQ(r.failures.size(), 1u);
    EXPECT_EQ(r.failures[0].solver, "brute");
    EXPECT_FALSE(r.failures[0].message.empty());
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].solver, "tabu");
}

TEST(ReportExport, EmptyReportIsHeaderOnly) {
    std::ostringstream os;
    write_runs_csv(os, Report{});
    EXPECT_EQ(os.str(),
              "instance,solver,bits,seed,energy,error_K_per_step,wall_ms,gap_at_100ms,gap_at_500ms,gap_at_1000ms\n");
    std::istringstream is(os.str());
    EXPECT_TRUE(read_runs_csv(is).rows.empty());
}

TEST(ReportExport, RoundTripReproducesAggregatesBitExactly) {
    auto dir = fresh_dir("roundtrip");
    auto cfg = small_config("  - {kind: sa, params: {num_reads: [5, 10], sweeps: 30}}\n  - {kind: tabu}\n",
                            "bits: [3]\nseeds: [1, 2, 3]\n");
    auto r = sweep(cfg);
    auto cells = r.aggregates();
    EXPECT_EQ(cells.size(), 3u);
    report_export(r, ReportFormat::csv, dir.string());
    auto back = load_report(dir.string()).aggregates();
    ASSERT_EQ(back.size(), cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        EXPECT_EQ(back[k].solver, cells[k].solver);
        EXPECT_EQ(back[k].runs, cells[k].runs);
        for (std::size_t m = 0; m < 6; ++m)
            for (std::size_t s = 0; s < 3; ++s) {
                const double x = cells[k].stats[m][s], y = back[k].stats[m][s];
                EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y))) << k << ' ' << m << ' ' << s;
            }
    }
    std::ostringstream a, b;
    write_aggregates_csv(a, cells);
    write_aggregates_csv(b, back);
    EXPECT_EQ(a.str(), b.str());
}

TEST(ReportExport, InfiniteGapSerializesAsInf) {
    Report r;
    r.rows.push_back({"cstr", "sa", 4, 1, 893.4, 0.0, 2.5, {inf, 0.5, 0.0}});
    std::ostringstream os;
    write_runs_csv(os, r);
    EXPECT_NE(os.str().find(",inf,0.5,0\n"), std::string::npos);
    std::istringstream is(os.str());
    EXPECT_EQ(read_runs_csv(is).rows[0].gap[0], inf);
}

TEST(ReportExport, UnwritableDirectoryNamesThePath) {
    auto dir = fresh_dir("blocked");
    fs::create_directories(dir.parent_path());
    std::ofstream(dir) << "not a directory";
    try {
        report_export(Report{}, ReportFormat::csv, (dir / "sub").string());
        FAIL() << "expected IoError";
    } catch (const IoError &e) {
        EXPECT_NE(std::string(e.what()).find("blocked"), std::string::npos);
    }
    fs::remove(dir);
}

TEST(ReportExport, MalformedCsvIsAParseError) {
    std::istringstream bad_header("a,b,c\n");
    EXPECT_THROW(read_runs_csv(bad_header), ParseError);
    std::istringstream bad_row(
        "instance,solver,bits,seed,energy,error_K_per_step,wall_ms,gap_at_100ms,gap_at_500ms,gap_at_1000ms\n"
        "cstr,sa,4,1,x,0,0,0,0,0\n");
    EXPECT_THROW(read_runs_csv(bad_row), ParseError);
}

TEST(RunSolver, VirtualQpuReportsEmbedding) {
    auto compiled = compile(preset_problem("cstr-small").build(), 4);
    SolverSpec spec;
    spec.kind = SolverKind::virtual_qpu;
    spec.pegasus_m = 6;
    spec.sa = {.num_reads = 50, .sweeps_per_read = 200};
    EmbeddingCache cache;
    auto r = run_solver(spec, compiled, 3, &cache);
    ASSERT_TRUE(r.embedding);
    EXPECT_EQ(r.embedding->logical_vars, 12);
    EXPECT_GE(r.embedding->physical_qubit_count, 12);
    EXPECT_GE(r.embedding->embedding_wall_time, 0.0);
    EXPECT_EQ(cache.embeddings.size(), 1u);
    ASSERT_FALSE(r.samples.empty());
    EXPECT_NEAR(r.samples.best().energy, brute_force(compiled.qubo).best().energy, 1e-9);

    auto again = run_solver(spec, compiled, 3, &cache);
    EXPECT_EQ(again.embedding->embedding_wall_time, 0.0);
    EXPECT_EQ(again.samples.best().bits, r.samples.best().bits);
}
