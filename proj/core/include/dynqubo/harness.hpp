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


#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynqubo/embedding.hpp"
#include "dynqubo/hybrid.hpp"
#include "dynqubo/model.hpp"
#include "dynqubo/solvers.hpp"
#include "dynqubo/transform.hpp"

namespace dynqubo {

// ---------------------------------------------------------------- metrics

//! Mean absolute deviation between two input sequences. Throws
//! LengthMismatchError for different lengths.
double error_per_timestep(const std::vector<double> &candidate, const std::vector<double> &reference);

inline constexpr double gap_epsilon = 1e-12;
inline constexpr std::array<double, 3> gap_timeslots = {0.1, 0.5, 1.0};

//! (E(t) - E*) / max(|E*|, 1e-12), where E(t) is the best trace energy at
//! wall time <= t seconds; +infinity before the first trace point.
double gap_at_time(const std::vector<TracePoint> &trace, double reference_energy, double t);

// ---------------------------------------------------------------- solver specs

enum class SolverKind { brute, sa, tabu, hybrid, virtual_qpu };
std::string to_string(SolverKind k);
SolverKind parse_solver_kind(const std::string &s);

//! One concrete solver configuration of an experiment grid.
struct SolverSpec {
    std::string label;
    SolverKind kind = SolverKind::sa;
    SaSchedule sa;
    TabuConfig tabu;
    HybridConfig hybrid;
    // virtual QPU
    int pegasus_m = 16;
    std::optional<double> chain_strength;
    UnembedStrategy unembed = UnembedStrategy::majority_vote;
};

//! Embeddings reused across runs of the same instance, keyed by n_vars.
struct EmbeddingCache {
    std::map<std::pair<int, int>, Embedding> embeddings;  // (pegasus m, n_vars)
    std::map<int, HardwareGraph> graphs;
};

struct SolverRun {
    SampleSet samples;
    std::optional<EmbeddingReport> embedding;
};

//! Runs one solver on a compiled problem. Virtual-QPU runs embed the QUBO
//! with native clique chains (trimmed to its coupling graph).
SolverRun run_solver(const SolverSpec &spec, const CompiledProblem &compiled, std::uint64_t seed,
                     EmbeddingCache *cache = nullptr);

// ---------------------------------------------------------------- experiments

enum class ErrorReference { pgd, brute };

struct ExperimentConfig {
    std::string name = "sweep";
    ProblemDefinition problem = preset_problem("cstr-small");
    std::vector<int> bits;
    std::vector<SolverSpec> solvers;
    std::vector<std::uint64_t> seeds;
    int repetitions = 1;
    ErrorReference reference = ErrorReference::pgd;
    std::string output_dir;

    void validate() const;
    //! seeds of every run in a cell: each listed seed, followed by derived
    //! seeds for the extra repetitions
    std::vector<std::uint64_t> run_seeds() const;
};

//! Parses the YAML experiment file. Solver entries expand list-valued
//! parameters into a grid. A relative `problem.file` resolves against
//! `base_dir`.
ExperimentConfig parse_experiment_config(const std::string &yaml_text, const std::string &base_dir = ".");
ExperimentConfig load_experiment_config(const std::string &path);

//! One row per run, numbers already rounded to 9 significant digits.
struct RunRow {
    std::string instance;
    std::string solver;
    int bits = 0;
    std::uint64_t seed = 0;
    double energy = 0.0;
    double error_per_step = 0.0;
    double wall_ms = 0.0;
    std::array<double, 3> gap{};  // at gap_timeslots
};

struct FailedRun {
    std::string instance;
    std::string solver;
    int bits = 0;
    std::uint64_t seed = 0;
    std::string message;
};

//! Full-precision details of a run performed in this process.
struct RunDetail {
    std::vector<double> inputs;
    Trajectory trajectory;
    std::vector<TracePoint> trace;
    std::optional<EmbeddingReport> embedding;
};

struct CellAggregate {
    std::string instance;
    std::string solver;
    int bits = 0;
    int runs = 0;
    //! mean, min, max of energy, error, wall_ms, gap@100ms, gap@500ms, gap@1000ms
    std::array<std::array<double, 3>, 6> stats{};
};

struct Report {
    std::vector<RunRow> rows;
    std::vector<FailedRun> failures;
    //! details for rows produced by this process, keyed by row index
    std::map<std::size_t, RunDetail> details;
    //! solver invocations made by the sweep that built this report
    int solver_calls = 0;

    std::vector<CellAggregate> aggregates() const;
};

//! Rounds to 9 significant digits exactly as the CSV writer prints.
double round_sig9(double x);

//! Runs the solver x bits x seed grid. When `cfg.output_dir` is set, rows
//! already in its runs.csv are kept and not recomputed, and the report is
//! written there after the sweep. Failures are recorded, not thrown.
Report sweep(const ExperimentConfig &cfg);

enum class ReportFormat { csv, structured_text };

//! CSV header: instance,solver,bits,seed,energy,error_K_per_step,wall_ms,
//! gap_at_100ms,gap_at_500ms,gap_at_1000ms
void write_runs_csv(std::ostream &os, const Report &r);
Report read_runs_csv(std::istream &is);
void write_aggregates_csv(std::ostream &os, const std::vector<CellAggregate> &a);
void write_failures_csv(std::ostream &os, const Report &r);
void write_structured_report(std::ostream &os, const Report &r);

//! Writes runs.csv, aggregates.csv and failures.csv (csv) or summary.txt
//! (structured text) into `dir`. Throws IoError naming the path.
void report_export(const Report &r, ReportFormat format, const std::string &dir);
Report load_report(const std::string &dir);

}  // namespace dynqubo
