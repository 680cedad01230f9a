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


#include "dynqubo/hybrid.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

Decomposition energy_impact_decompose(const Qubo &q, std::span<const std::uint8_t> incumbent, int size) {
    const int n = q.n_vars();
    if (static_cast<int>(incumbent.size()) != n) {
        throw ShapeMismatchError(fmt::format("incumbent has {} bits for {} variables", incumbent.size(), n));
    }
    if (size < 1 || size > n) throw Error(fmt::format("subproblem size {} outside [1, {}]", size, n));

    const QuboAdjacency adj(q);
    std::vector<double> fields;
    adj.compute_fields(incumbent, fields);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(fields[a]) > std::abs(fields[b]); });

    Decomposition d;
    d.variables.assign(order.begin(), order.begin() + size);
    std::sort(d.variables.begin(), d.variables.end());
    std::vector<int> local(n, -1);
    for (int k = 0; k < size; ++k) local[d.variables[k]] = k;

    d.sub = Qubo(size, q.offset());
    for (const auto &[key, v] : q.coefficients()) {
        const auto [i, j] = key;
        const int li = local[i], lj = local[j];
        if (li >= 0 && lj >= 0) {
            d.sub.add(li, lj, v);
        } else if (li >= 0) {
            if (incumbent[j]) d.sub.add(li, li, v);
        } else if (lj >= 0) {
            if (incumbent[i]) d.sub.add(lj, lj, v);
        } else if (incumbent[i] && incumbent[j]) {
            d.sub.add_offset(v);
        }
    }
    if (!q.labels().empty()) {
        std::vector<VarId> labels;
        for (int v : d.variables) labels.push_back(q.labels().at(v));
        d.sub.set_labels(std::move(labels));
    }
    return d;
}

Bits compose(std::span<const std::uint8_t> sub_sample, const std::vector<int> &variables,
             std::span<const std::uint8_t> incumbent) {
    if (sub_sample.size() != variables.size()) {
        throw ShapeMismatchError(
                fmt::format("sub-sample has {} bits for {} mapped variables", sub_sample.size(), variables.size()));
    }
    Bits out(incumbent.begin(), incumbent.end());
    for (std::size_t k = 0; k < variables.size(); ++k) {
        if (variables[k] < 0 || variables[k] >= static_cast<int>(out.size())) {
            throw ShapeMismatchError(fmt::format("mapped variable {} outside the incumbent", variables[k]));
        }
        out[variables[k]] = sub_sample[k];
    }
    return out;
}

std::string to_string(SubSolver s) {
    switch (s) {
    case SubSolver::virtual_qpu: return "virtual_qpu";
    case SubSolver::sa: return "sa";
    case SubSolver::brute_force: return "brute_force";
    }
    return "?";
}

SubSolver parse_sub_solver(const std::string &s) {
    if (s == "virtual_qpu" || s == "qpu") return SubSolver::virtual_qpu;
    if (s == "sa") return SubSolver::sa;
    if (s == "brute_force" || s == "brute") return SubSolver::brute_force;
    throw ParseError("unknown sub-solver '" + s + "'");
}

void HybridConfig::validate() const {
    if (max_iterations < 0) throw Error("max_iterations must be non-negative");
    if (convergence_patience < 1) throw Error("convergence_patience must be at least 1");
    if (subproblem_size < 1) throw Error("subproblem_size must be at least 1");
    if (!(branch_time_limit > 0.0)) throw Error("branch budgets must be positive");
    if (tabu_iterations < 1 || sa_reads < 1 || sa_sweeps < 1 || qpu_reads < 1 || qpu_sweeps < 1) {
        throw Error("branch iteration budgets must be positive");
    }
    if (pegasus_m < 2) throw Error("pegasus_m must be at least 2");
    if (chain_strength && !(*chain_strength > 0.0)) throw Error("chain strength must be positive");
}

namespace {

//! Virtual QPU with one clique embedding reused for every sub-problem.
class CachedQpu {
  public:
    CachedQpu(int m, int size) : hw_(HardwareGraph::pegasus(m)) {
        const auto clique = LogicalGraph::complete(size);
        if (auto chains = pegasus_clique_chains(hw_, size)) {
            trim_chains(clique, *chains, hw_);
            embedding_ = std::move(*chains);
        } else {
            embedding_ = find_embedding(clique, hw_, 0);
        }
    }

    int qubits() const { return embedding_.qubit_count(); }

    Bits solve(const Qubo &sub, const HybridConfig &cfg, std::uint64_t seed) const {
        const double cs = cfg.chain_strength.value_or(default_chain_strength(sub));
        auto r = virtual_qpu_solve(sub, embedding_, hw_, cs, {.num_reads = cfg.qpu_reads, .sweeps_per_read = cfg.qpu_sweeps},
                                   seed);
        return r.logical.empty() ? Bits(sub.n_vars(), 0) : r.logical.best().bits;
    }

  private:
    HardwareGraph hw_;
    Embedding embedding_;
};

bool preferred(const BranchResult &a, const BranchResult &b) {
    return a.energy != b.energy ? a.energy < b.energy : a.bits < b.bits;
}

}  // namespace

HybridResult kerberos_run(const Qubo &q, const HybridConfig &cfg, std::uint64_t seed) {
    cfg.validate();
    const auto t0 = Clock::now();
    const int n = q.n_vars();

    BranchResult incumbent{"incumbent", Bits(n, 0), 0.0, 0.0};
    if (cfg.random_initial_seed) {
        std::mt19937_64 rng(mix_seed(*cfg.random_initial_seed));
        for (auto &b : incumbent.bits) b = rng() & 1;
    }
    incumbent.energy = q.energy(incumbent.bits);

    HybridResult out;
    out.incumbent_energies.push_back(incumbent.energy);
    out.trace.push_back({0, "incumbent", incumbent.energy, 1e3 * seconds_since(t0)});

    const int size = std::min(cfg.subproblem_size, n);
    std::optional<CachedQpu> qpu;
    if (cfg.enable_decomposition && cfg.sub_solver == SubSolver::virtual_qpu && cfg.max_iterations > 0 && n > 0) {
        qpu.emplace(cfg.pegasus_m, size);
        out.embedded_qubits = qpu->qubits();
    }

    std::vector<BranchResult> last_round;
    int stall = 0;
    for (int it = 1; it <= cfg.max_iterations && n > 0; ++it) {
        const Bits frozen = incumbent.bits;
        auto branch_seed = [&](std::uint64_t branch) {
            return mix_seed(seed ^ (static_cast<std::uint64_t>(it) << 8 | branch));
        };

        std::vector<std::function<BranchResult()>> tasks;
        if (cfg.enable_tabu) {
            tasks.emplace_back([&, s = branch_seed(1)] {
                const auto b0 = Clock::now();
                auto r = tabu_search(q, {.max_iterations = cfg.tabu_iterations, .time_limit = cfg.branch_time_limit}, s,
                                     frozen);
                return BranchResult{"tabu", r.best().bits, r.best().energy, seconds_since(b0)};
            });
        }
        if (cfg.enable_sa) {
            tasks.emplace_back([&, s = branch_seed(2)] {
                const auto b0 = Clock::now();
                auto r = simulated_annealing(q, {.num_reads = cfg.sa_reads, .sweeps_per_read = cfg.sa_sweeps}, s,
                                             {.time_limit = cfg.branch_time_limit});
                return BranchResult{"sa", r.best().bits, r.best().energy, seconds_since(b0)};
            });
        }
        if (cfg.enable_decomposition) {
            tasks.emplace_back([&, s = branch_seed(3)] {
                const auto b0 = Clock::now();
                auto d = energy_impact_decompose(q, frozen, size);
                Bits sub_best;
                switch (cfg.sub_solver) {
                case SubSolver::brute_force: sub_best = brute_force(d.sub, 1).best().bits; break;
                case SubSolver::sa:
                    sub_best = simulated_annealing(d.sub, {.num_reads = cfg.qpu_reads, .sweeps_per_read = cfg.qpu_sweeps},
                                                   s, {.time_limit = cfg.branch_time_limit})
                                       .best()
                                       .bits;
                    break;
                case SubSolver::virtual_qpu: sub_best = qpu->solve(d.sub, cfg, s); break;
                }
                Bits full = compose(sub_best, d.variables, frozen);
                const double e = q.energy(full);
                return BranchResult{"decomposition", std::move(full), e, seconds_since(b0)};
            });
        }

        std::vector<BranchResult> results(tasks.size());
        if (cfg.parallel_branches && tasks.size() > 1) {
            std::vector<std::exception_ptr> errors(tasks.size());
            {
                std::vector<std::jthread> pool;
                for (std::size_t k = 0; k < tasks.size(); ++k) {
                    pool.emplace_back([&, k] {
                        try {
                            results[k] = tasks[k]();
                        } catch (...) {
                            errors[k] = std::current_exception();
                        }
                    });
                }
            }
            for (auto &e : errors)
                if (e) std::rethrow_exception(e);
        } else {
            for (std::size_t k = 0; k < tasks.size(); ++k) results[k] = tasks[k]();
        }

        const double elapsed_ms = 1e3 * seconds_since(t0);
        BranchResult next = incumbent;
        for (const auto &r : results) {
            out.trace.push_back({it, r.branch_name, r.energy, elapsed_ms});
            if (preferred(r, next)) next = r;
        }
        const bool improved = next.energy < incumbent.energy;
        incumbent = BranchResult{"incumbent", next.bits, next.energy, 0.0};
        out.trace.push_back({it, "incumbent", incumbent.energy, elapsed_ms});
        out.incumbent_energies.push_back(incumbent.energy);
        out.samples.trace.push_back({elapsed_ms / 1e3, incumbent.energy});
        out.iterations = it;
        last_round = std::move(results);
        stall = improved ? 0 : stall + 1;
        if (stall >= cfg.convergence_patience) break;
    }

    std::vector<Bits> reads{incumbent.bits};
    for (const auto &r : last_round) reads.push_back(r.bits);
    auto trace = std::move(out.samples.trace);
    out.samples = SampleSet::from_reads(q, std::move(reads));
    out.samples.trace = std::move(trace);
    if (out.samples.trace.empty()) out.samples.trace.push_back({seconds_since(t0), incumbent.energy});
    out.samples.solver_name = "hybrid";
    out.samples.rng_seed = seed;
    out.samples.wall_time = seconds_since(t0);
    return out;
}

void write_hybrid_trace_csv(std::ostream &os, const std::vector<HybridTraceRow> &trace) {
    os << "iteration,branch,energy,cumulative_ms\n";
    for (const auto &r : trace) os << fmt::format("{},{},{:.17g},{:.3f}\n", r.iteration, r.branch, r.energy, r.cumulative_ms);
}

}  // namespace dynqubo
