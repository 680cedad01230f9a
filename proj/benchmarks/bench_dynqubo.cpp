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


#include <random>

#include <benchmark/benchmark.h>

#include "dynqubo/embedding.hpp"
#include "dynqubo/hybrid.hpp"
#include "dynqubo/model.hpp"
#include "dynqubo/solvers.hpp"
#include "dynqubo/transform.hpp"

using namespace dynqubo;

namespace {

const CompiledProblem &full_cstr() {
    static const CompiledProblem c = compile(cstr_problem(), 10);
    return c;
}

}  // namespace

static void BM_CompileCstr(benchmark::State &state) {
    const auto problem = cstr_problem();
    for (auto _ : state) benchmark::DoNotOptimize(compile(problem, static_cast<int>(state.range(0))));
    state.SetLabel(std::to_string(20 * state.range(0)) + " vars");
}
BENCHMARK(BM_CompileCstr)->Arg(2)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_EliminateStates(benchmark::State &state) {
    const auto problem = cstr_problem(ReactorParams{}, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(eliminate_states(problem));
}
BENCHMARK(BM_EliminateStates)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

//! One read of `range(0)` sweeps on the dense 200-variable instance.
static void BM_SaSweeps(benchmark::State &state) {
    const auto &q = full_cstr().qubo;
    const SaSchedule sched{.num_reads = 1, .sweeps_per_read = static_cast<int>(state.range(0)),
                           .beta_start = 0.01, .beta_end = 10.0};
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulated_annealing(q, sched, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0) * q.n_vars());
}
BENCHMARK(BM_SaSweeps)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_TabuSearch(benchmark::State &state) {
    const auto &q = full_cstr().qubo;
    TabuConfig cfg;
    cfg.max_iterations = state.range(0);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(tabu_search(q, cfg, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TabuSearch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ProjectedGradient(benchmark::State &state) {
    const auto &box = full_cstr().box;
    for (auto _ : state) benchmark::DoNotOptimize(projected_gradient(box));
}
BENCHMARK(BM_ProjectedGradient)->Unit(benchmark::kMillisecond);

static void BM_PegasusBuild(benchmark::State &state) {
    for (auto _ : state) benchmark::DoNotOptimize(HardwareGraph::pegasus(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PegasusBuild)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_CliqueChains(benchmark::State &state) {
    const auto hw = HardwareGraph::pegasus(16);
    const int n = static_cast<int>(state.range(0));
    const auto g = LogicalGraph::complete(n);
    int qubits = 0;
    for (auto _ : state) {
        auto e = pegasus_clique_chains(hw, n);
        trim_chains(g, *e, hw);
        qubits = e->qubit_count();
    }
    state.counters["qubits"] = qubits;
}
BENCHMARK(BM_CliqueChains)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_HeuristicEmbedding(benchmark::State &state) {
    const auto hw = HardwareGraph::pegasus(4);
    std::mt19937_64 rng(11);
    std::bernoulli_distribution coin(0.5);
    LogicalGraph g{static_cast<int>(state.range(0)), {}};
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (coin(rng)) g.edges.emplace_back(i, j);
    EmbeddingOptions opts;
    opts.tries = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(find_embedding(g, hw, ++seed, opts));
}
BENCHMARK(BM_HeuristicEmbedding)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_KerberosIteration(benchmark::State &state) {
    const auto &q = full_cstr().qubo;
    HybridConfig cfg;
    cfg.max_iterations = 1;
    cfg.sub_solver = SubSolver::sa;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(kerberos_run(q, cfg, ++seed));
}
BENCHMARK(BM_KerberosIteration)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
