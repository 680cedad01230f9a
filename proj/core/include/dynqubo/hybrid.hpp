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

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dynqubo/embedding.hpp"
#include "dynqubo/qubo.hpp"
#include "dynqubo/solvers.hpp"

namespace dynqubo {

//! Sub-problem over `variables` (indices into the full QUBO, ascending) with
//! the frozen variables folded in at their incumbent values.
struct Decomposition {
    Qubo sub;
    std::vector<int> variables;
};

//! Selects the `size` variables with the largest single-flip energy change
//! at the incumbent (ties to the lower index). Boundary couplings become
//! linear terms and the frozen energy becomes the offset, so
//! sub.energy(s) == q.energy(compose(s, variables, incumbent)).
Decomposition energy_impact_decompose(const Qubo &q, std::span<const std::uint8_t> incumbent, int size);

//! Writes sub-sample values into a copy of the incumbent. Throws
//! ShapeMismatchError if the sample and map sizes differ or an index is out
//! of range.
Bits compose(std::span<const std::uint8_t> sub_sample, const std::vector<int> &variables,
             std::span<const std::uint8_t> incumbent);

enum class SubSolver { virtual_qpu, sa, brute_force };
std::string to_string(SubSolver s);
SubSolver parse_sub_solver(const std::string &s);

struct HybridConfig {
    int max_iterations = 10;
    //! stop after this many iterations without improvement
    int convergence_patience = 3;
    int subproblem_size = 40;
    SubSolver sub_solver = SubSolver::virtual_qpu;

    bool enable_tabu = true;
    bool enable_sa = true;
    bool enable_decomposition = true;
    //! run the branches of an iteration on separate threads
    bool parallel_branches = false;

    //! per-branch wall-time budget per iteration, seconds
    double branch_time_limit = 1.0;
    long long tabu_iterations = 2000;
    int sa_reads = 10;
    int sa_sweeps = 100;
    int qpu_reads = 50;
    int qpu_sweeps = 100;
    //! Pegasus size of the virtual QPU
    int pegasus_m = 16;
    //! unset: default_chain_strength of each sub-problem
    std::optional<double> chain_strength;

    //! all-zeros unless set, then a random state drawn from this seed
    std::optional<std::uint64_t> random_initial_seed;

    void validate() const;
};

struct BranchResult {
    std::string branch_name;
    Bits bits;
    double energy = 0.0;
    double wall_time = 0.0;
};

struct HybridTraceRow {
    int iteration = 0;
    //! tabu, sa, decomposition, or incumbent
    std::string branch;
    double energy = 0.0;
    double cumulative_ms = 0.0;
};

struct HybridResult {
    //! final incumbent plus the last round's branch results
    SampleSet samples;
    std::vector<HybridTraceRow> trace;
    //! incumbent energy before the first and after every iteration
    std::vector<double> incumbent_energies;
    int iterations = 0;
    //! physical qubits of the cached virtual-QPU embedding, 0 if unused
    int embedded_qubits = 0;
};

//! Budgeted-synchronous Kerberos loop: every iteration runs the enabled
//! branches from the same frozen incumbent and keeps the lowest (energy,
//! bits) among their results and the previous incumbent.
HybridResult kerberos_run(const Qubo &q, const HybridConfig &cfg, std::uint64_t seed);

//! CSV with header `iteration,branch,energy,cumulative_ms`
void write_hybrid_trace_csv(std::ostream &os, const std::vector<HybridTraceRow> &trace);

}  // namespace dynqubo
