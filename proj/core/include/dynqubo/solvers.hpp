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

#include "dynqubo/model.hpp"
#include "dynqubo/qubo.hpp"
#include "dynqubo/transform.hpp"

namespace dynqubo {

struct Sample {
    Bits bits;
    double energy = 0.0;
    int occurrences = 1;
};

//! best-so-far energy after `seconds` of wall time
struct TracePoint {
    double seconds = 0.0;
    double energy = 0.0;
};

//! Solver output: distinct samples sorted by energy, ties broken by the
//! lexicographically smallest bit vector.
struct SampleSet {
    std::vector<Sample> samples;
    std::string solver_name;
    double wall_time = 0.0;
    std::uint64_t rng_seed = 0;
    //! incumbent energy over time, non-increasing
    std::vector<TracePoint> trace;

    bool empty() const { return samples.empty(); }
    const Sample &best() const;
    int total_occurrences() const;

    //! Scores every read against q, merges duplicates and sorts.
    static SampleSet from_reads(const Qubo &q, std::vector<Bits> reads);
};

//! One sample per line (`energy occurrences bitstring`), then a summary block.
void write_sampleset(std::ostream &os, const SampleSet &set);

//! 64-bit mixer used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t x);

// ---------------------------------------------------------------- brute force

inline constexpr int brute_force_max_vars = 30;

//! Exhaustive minimization (Gray-code enumeration). Returns every ground
//! state, up to `max_ground_states` of them. Throws TooLargeError above
//! brute_force_max_vars variables.
SampleSet brute_force(const Qubo &q, int max_ground_states = 1024);

// -------------------------------------------------------- simulated annealing

enum class BetaSchedule { geometric, linear };

struct SaSchedule {
    int num_reads = 100;
    int sweeps_per_read = 1000;
    //! unset values come from default_beta_range()
    std::optional<double> beta_start;
    std::optional<double> beta_end;
    BetaSchedule kind = BetaSchedule::geometric;
};

struct SaOptions {
    int num_threads = 1;
    //! seconds; reads not started before the limit are skipped
    double time_limit = std::numeric_limits<double>::infinity();
    //! optional starting state shared by every read instead of a random one
    std::optional<Bits> initial_state;
};

//! (0.1, 50) divided by the mean |single-flip energy change| over 100 random probes.
std::pair<double, double> default_beta_range(const Qubo &q, std::uint64_t seed);

//! Single-flip Metropolis annealing. Read r uses the seed mix_seed(seed ^ r),
//! so results do not depend on the thread count.
SampleSet simulated_annealing(const Qubo &q, const SaSchedule &sched, std::uint64_t seed, const SaOptions &opts = {});

// --------------------------------------------------------------- tabu search

struct TabuConfig {
    //! 0 selects max(1, min(20, n/4)); always clamped below n
    int tenure = 0;
    long long max_iterations = 10000;
    double time_limit = std::numeric_limits<double>::infinity();
    int restarts = 0;
};

//! Single-flip tabu search with aspiration. The iteration budget is split
//! evenly across 1 + restarts descents; restarts begin at random states.
//! Interruptible: returns the best state found when the time limit expires.
SampleSet tabu_search(const Qubo &q, const TabuConfig &cfg, std::uint64_t seed,
                      const std::optional<Bits> &initial = std::nullopt);

// ------------------------------------------------------- projected gradient

struct PgdResult {
    std::vector<double> inputs;  // ordered like BoxProblem::inputs
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    //! objective after every accepted step, starting with the initial point
    std::vector<double> history;
};

//! Projected-gradient descent with Armijo backtracking on the box. Stops
//! once the projected-gradient step max |P(x - g) - x| drops below `tol`;
//! otherwise returns the last iterate with converged = false.
PgdResult projected_gradient(const BoxProblem &box, double tol = 1e-8, int max_iter = 100000,
                             std::optional<std::vector<double>> start = std::nullopt);

// -------------------------------------------------------------- decoding

struct DecodedSolution {
    std::vector<double> values;               // per scheme entry
    std::vector<std::vector<double>> inputs;  // per stage, per input component
    Trajectory trajectory;
};

//! Maps a bit vector laid out as scheme.bit_vars() to inputs and simulates.
DecodedSolution decode(std::span<const std::uint8_t> sample, const BinarizationScheme &scheme,
                       const DynamicOptProblem &problem);

//! Decodes the scheme bits of a sample of the compiled QUBO (auxiliaries ignored).
DecodedSolution decode(std::span<const std::uint8_t> qubo_sample, const CompiledProblem &compiled);

}  // namespace dynqubo
