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

#include <limits>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "dynqubo/errors.hpp"
#include "dynqubo/hybrid.hpp"
#include "dynqubo/model.hpp"
#include "dynqubo/transform.hpp"
#include "support/oracles.hpp"

using namespace dynqubo;

namespace {

const Qubo &small_cstr_qubo() {
    static const Qubo q = compile(cstr_problem(ReactorParams{}, 3), 4).qubo;
    return q;
}

Bits random_bits(std::mt19937_64 &rng, int n) {
    Bits b(n);
    for (auto &x : b) x = rng() & 1;
    return b;
}

void expect_non_increasing(const HybridResult &r) {
    for (std::size_t k = 1; k < r.incumbent_energies.size(); ++k) {
        EXPECT_LE(r.incumbent_energies[k], r.incumbent_energies[k - 1]);
    }
}

}  // namespace

TEST(Decompose, FullSizeIsTheWholeProblem) {
    std::mt19937_64 rng(1);
    Qubo q = oracle::random_qubo(8, 0.5, rng);
    q.set_offset(2.5);
    auto d = energy_impact_decompose(q, Bits(8, 0), 8);
    EXPECT_EQ(d.variables, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
    EXPECT_EQ(d.sub.coefficients(), q.coefficients());
    EXPECT_EQ(d.sub.offset(), q.offset());

    Bits inc = random_bits(rng, 8);
    auto d2 = energy_impact_decompose(q, inc, 8);
    EXPECT_EQ(d2.sub.coefficients(), q.coefficients());
}

TEST(Decompose, PicksLargestFlipImpact) {
    Qubo q(2);
    q.add(0, 0, -1.0);
    q.add(1, 1, 100.0 * std::numeric_limits<double>::epsilon());
    auto d = energy_impact_decompose(q, Bits{0, 0}, 1);
    EXPECT_EQ(d.variables, std::vector<int>{0});
    EXPECT_THROW(energy_impact_decompose(q, Bits{0, 0}, 3), Error);
    EXPECT_THROW(energy_impact_decompose(q, Bits{0}, 1), ShapeMismatchError);
}

TEST(Decompose, ComposedEnergyIdentity) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        Qubo q = oracle::random_qubo(10, 0.6, rng);
        q.set_offset(0.25 * trial);
        Bits inc = random_bits(rng, 10);
        auto d = energy_impact_decompose(q, inc, 4);
        ASSERT_EQ(d.sub.n_vars(), 4);
        for (int k = 0; k < 16; ++k) {
            Bits s{static_cast<std::uint8_t>(k & 1), static_cast<std::uint8_t>((k >> 1) & 1),
                   static_cast<std::uint8_t>((k >> 2) & 1), static_cast<std::uint8_t>((k >> 3) & 1)};
            EXPECT_TRUE(oracle::rel_close(d.sub.energy(s), q.energy(compose(s, d.variables, inc)), 1e-12));
        }
    }
}

TEST(Compose, Examples) {
    Bits inc{1, 0, 1};
    EXPECT_EQ(compose(Bits{}, {}, inc), inc);
    EXPECT_EQ(compose(Bits{0, 1, 0}, {0, 1, 2}, inc), (Bits{0, 1, 0}));
    EXPECT_EQ(compose(Bits{0}, {2}, inc), (Bits{1, 0, 0}));
    EXPECT_THROW(compose(Bits{0, 1}, {0}, inc), ShapeMismatchError);
    EXPECT_THROW(compose(Bits{0}, {3}, inc), ShapeMismatchError);
}

TEST(Compose, BruteForceSubSolveNeverWorsens) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Qubo q = oracle::random_qubo(12, 0.5, rng);
        Bits inc = random_bits(rng, 12);
        auto d = energy_impact_decompose(q, inc, 5);
        Bits full = compose(brute_force(d.sub).best().bits, d.variables, inc);
        EXPECT_LE(q.energy(full), q.energy(inc) + 1e-12 * std::abs(q.energy(inc)));
    }
}

TEST(Kerberos, ZeroIterationsReturnsScoredInitialState) {
    const Qubo &q = small_cstr_qubo();
    HybridConfig cfg;
    cfg.max_iterations = 0;
    auto r = kerberos_run(q, cfg, 1);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.samples.best().bits, Bits(12, 0));
    EXPECT_DOUBLE_EQ(r.samples.best().energy, q.energy(Bits(12, 0)));

    cfg.random_initial_seed = 42;
    auto rr = kerberos_run(q, cfg, 1);
    EXPECT_TRUE(oracle::rel_close(rr.samples.best().energy, q.energy(rr.samples.best().bits), 1e-12));
    EXPECT_EQ(rr.samples.samples.size(), 1u);
}

TEST(Kerberos, BruteForceSubSolverReachesGroundState) {
    const Qubo &q = small_cstr_qubo();
    const double ground = brute_force(q).best().energy;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        HybridConfig cfg;
        cfg.max_iterations = 3;
        cfg.sub_solver = SubSolver::brute_force;
        auto r = kerberos_run(q, cfg, seed);
        EXPECT_TRUE(oracle::rel_close(r.samples.best().energy, ground, 1e-12)) << "seed " << seed;
        expect_non_increasing(r);
    }
}

TEST(Kerberos, BranchIsolationAndDeterminism) {
    std::mt19937_64 rng(4);
    Qubo q = oracle::random_qubo(30, 0.3, rng);
    HybridConfig base;
    base.max_iterations = 4;
    base.subproblem_size = 10;
    base.sub_solver = SubSolver::sa;
    for (int disabled = 0; disabled < 3; ++disabled) {
        HybridConfig cfg = base;
        cfg.enable_tabu = disabled != 0;
        cfg.enable_sa = disabled != 1;
        cfg.enable_decomposition = disabled != 2;
        auto a = kerberos_run(q, cfg, 9);
        auto b = kerberos_run(q, cfg, 9);
        cfg.parallel_branches = true;
        auto c = kerberos_run(q, cfg, 9);
        EXPECT_EQ(a.incumbent_energies, b.incumbent_energies);
        EXPECT_EQ(a.incumbent_energies, c.incumbent_energies);
        EXPECT_EQ(a.samples.best().bits, c.samples.best().bits);
        EXPECT_TRUE(oracle::rel_close(a.samples.best().energy, q.energy(a.samples.best().bits), 1e-12));
        expect_non_increasing(a);
        for (const auto &row : a.trace) {
            if (disabled == 0) EXPECT_NE(row.branch, "tabu");
            if (disabled == 1) EXPECT_NE(row.branch, "sa");
            if (disabled == 2) EXPECT_NE(row.branch, "decomposition");
        }
    }
}

TEST(Kerberos, VirtualQpuSubSolver) {
    const Qubo &q = small_cstr_qubo();
    HybridConfig cfg;
    cfg.max_iterations = 2;
    cfg.enable_tabu = false;
    cfg.enable_sa = false;
    cfg.pegasus_m = 4;
    auto r = kerberos_run(q, cfg, 3);
    EXPECT_GT(r.embedded_qubits, 0);
    expect_non_increasing(r);
    EXPECT_LE(r.samples.best().energy, q.energy(Bits(12, 0)));
}

TEST(Kerberos, PatienceStopsEarly) {
    HybridConfig cfg;
    cfg.max_iterations = 50;
    cfg.convergence_patience = 2;
    cfg.sub_solver = SubSolver::brute_force;
    auto r = kerberos_run(small_cstr_qubo(), cfg, 0);
    EXPECT_LE(r.iterations, 3);
}

TEST(Kerberos, TraceCsvAndValidation) {
    HybridConfig cfg;
    cfg.max_iterations = 1;
    cfg.sub_solver = SubSolver::brute_force;
    auto r = kerberos_run(small_cstr_qubo(), cfg, 0);
    std::ostringstream os;
    write_hybrid_trace_csv(os, r.trace);
    EXPECT_EQ(os.str().rfind("iteration,branch,energy,cumulative_ms\n0,incumbent,", 0), 0u);
    EXPECT_EQ(r.trace.size(), 5u);

    HybridConfig bad;
    bad.branch_time_limit = 0.0;
    EXPECT_THROW(kerberos_run(small_cstr_qubo(), bad, 0), Error);
    EXPECT_EQ(parse_sub_solver("brute_force"), SubSolver::brute_force);
    EXPECT_THROW(parse_sub_solver("gpu"), ParseError);
}
