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

#include <algorithm>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "dynqubo/embedding.hpp"
#include "dynqubo/errors.hpp"
#include "dynqubo/model.hpp"
#include "dynqubo/transform.hpp"
#include "support/oracles.hpp"

using namespace dynqubo;

namespace {

HardwareGraph four_cycle() { return HardwareGraph::custom({{1, 2}, {2, 3}, {3, 4}, {4, 1}}); }

std::vector<int> idx(const HardwareGraph &hw, std::initializer_list<int> ids) {
    std::vector<int> out;
    for (int id : ids) out.push_back(hw.index_of(id));
    return out;
}

//! physical assignment with every chain set to its logical value
Bits expand(const EmbeddedQubo &eq, const Bits &logical) {
    Bits phys(eq.qubits.size());
    for (std::size_t p = 0; p < phys.size(); ++p) phys[p] = logical[eq.chain_of[p]];
    return phys;
}

Bits logical_bits(int n, std::uint64_t k) {
    Bits b(n);
    for (int i = 0; i < n; ++i) b[i] = (k >> i) & 1;
    return b;
}

}  // namespace

TEST(Pegasus, SixteenMatchesHardwareCounts) {
    auto hw = HardwareGraph::pegasus(16);
    EXPECT_EQ(hw.size(), 5640);
    EXPECT_EQ(hw.edge_count(), 40484u);
    EXPECT_GT(hw.size(), 5000);
    EXPECT_GT(hw.edge_count(), 35000u);
    EXPECT_EQ(hw.max_degree(), 15);
    int full = 0;
    for (int i = 0; i < hw.size(); ++i) full += hw.degree(i) == 15;
    EXPECT_GT(full, hw.size() / 2);
    EXPECT_TRUE(hw.connected());
}

TEST(Pegasus, SmallestGraphIsConnected) {
    auto hw = HardwareGraph::pegasus(2);
    EXPECT_TRUE(hw.connected());
    EXPECT_LE(hw.max_degree(), 15);
    EXPECT_GT(hw.size(), 0);
    EXPECT_THROW(HardwareGraph::pegasus(1), Error);
}

TEST(Pegasus, CoordinatesRoundTrip) {
    const int m = 5;
    auto hw = HardwareGraph::pegasus(m);
    for (int i = 0; i < hw.size(); ++i) {
        auto [u, w, k, z] = hw.pegasus_coordinates(i);
        EXPECT_EQ(((u * m + w) * 12 + k) * (m - 1) + z, hw.id(i));
        EXPECT_LT(z, m - 1);
    }
    EXPECT_EQ(hw.describe(), "pegasus:5");
}

TEST(HardwareGraphs, GridAndCustom) {
    auto g = HardwareGraph::grid(3, 4);
    EXPECT_EQ(g.size(), 12);
    EXPECT_EQ(g.edge_count(), 17u);
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_FALSE(g.has_edge(3, 4));
    auto c = four_cycle();
    EXPECT_EQ(c.size(), 4);
    EXPECT_EQ(c.id(0), 1);
    EXPECT_EQ(c.index_of(7), -1);
    auto isolated = HardwareGraph::custom({{0, 1}}, {5});
    EXPECT_EQ(isolated.size(), 3);
    EXPECT_FALSE(isolated.connected());
}

TEST(EmbeddingValidity, TriangleOnFourCycle) {
    auto hw = four_cycle();
    auto k3 = LogicalGraph::complete(3);
    Embedding good{{idx(hw, {1}), idx(hw, {2}), idx(hw, {3, 4})}};
    EXPECT_EQ(check_embedding(k3, good, hw), std::nullopt);

    Embedding shared{{idx(hw, {1}), idx(hw, {1, 2}), idx(hw, {3, 4})}};
    EXPECT_TRUE(check_embedding(k3, shared, hw).has_value());
    Embedding broken{{idx(hw, {2}), idx(hw, {4}), idx(hw, {1, 3})}};
    EXPECT_TRUE(check_embedding(k3, broken, hw).has_value());
    Embedding uncovered{{idx(hw, {1}), idx(hw, {2}), idx(hw, {3})}};
    EXPECT_TRUE(check_embedding(k3, uncovered, hw).has_value());
    Embedding empty_chain{{idx(hw, {1}), {}, idx(hw, {3, 4})}};
    EXPECT_TRUE(check_embedding(k3, empty_chain, hw).has_value());

    auto found = find_embedding(k3, hw, 4);
    EXPECT_TRUE(is_valid_embedding(k3, found, hw));
    EXPECT_EQ(found.qubit_count(), 4);
}

TEST(FindEmbedding, EdgelessGraphUsesSingleQubits) {
    LogicalGraph g{5, {}};
    auto e = find_embedding(g, HardwareGraph::pegasus(2), 1);
    for (const auto &c : e.chains) EXPECT_EQ(c.size(), 1u);
    EXPECT_TRUE(is_valid_embedding(g, e, HardwareGraph::pegasus(2)));
}

TEST(FindEmbedding, PathIsASubgraphOfPegasus) {
    LogicalGraph path{3, {{0, 1}, {1, 2}}};
    auto hw = HardwareGraph::pegasus(2);
    auto e = find_embedding(path, hw, 2);
    for (const auto &c : e.chains) EXPECT_EQ(c.size(), 1u);
}

TEST(FindEmbedding, RandomGraphsOnPegasusFour) {
    auto hw = HardwareGraph::pegasus(4);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 15; ++trial) {
        Qubo q = oracle::random_qubo(4 + trial % 9, 0.6, rng);
        auto g = LogicalGraph::from_qubo(q);
        auto e = find_embedding(g, hw, trial);
        EXPECT_EQ(check_embedding(g, e, hw), std::nullopt);
        EXPECT_EQ(e.qubit_count(), static_cast<int>([&] {
                      std::size_t s = 0;
                      for (const auto &c : e.chains) s += c.size();
                      return s;
                  }()));
    }
}

TEST(FindEmbedding, DeterministicForSeed) {
    auto hw = HardwareGraph::pegasus(3);
    auto g = LogicalGraph::complete(6);
    auto a = find_embedding(g, hw, 11);
    auto b = find_embedding(g, hw, 11);
    EXPECT_EQ(a.chains, b.chains);
}

TEST(FindEmbedding, ReportsFailureDiagnostics) {
    auto hw = four_cycle();
    EmbeddingOptions opts;
    opts.tries = 3;
    opts.max_rounds = 5;
    try {
        find_embedding(LogicalGraph::complete(4), hw, 1, opts);
        FAIL() << "K4 has no minor embedding in a 4-cycle";
    } catch (const EmbeddingNotFoundError &err) {
        EXPECT_EQ(err.attempts(), 3);
        EXPECT_GT(err.best_overlap(), 0);
    }
    EXPECT_THROW(find_embedding(LogicalGraph::complete(5), hw, 1), EmbeddingNotFoundError);
}

TEST(FindEmbedding, DenseGraphsFallBackToCliqueChains) {
    auto hw = HardwareGraph::pegasus(4);
    auto g = LogicalGraph::complete(20);
    EmbeddingOptions opts;
    opts.tries = 1;
    opts.max_rounds = 5;
    auto e = find_embedding(g, hw, 3, opts);
    EXPECT_TRUE(is_valid_embedding(g, e, hw));
}

TEST(CliqueChains, ValidAndGrowing) {
    auto hw = HardwareGraph::pegasus(6);
    int previous = 0;
    for (int n : {1, 4, 12, 30, 52}) {
        auto e = pegasus_clique_chains(hw, n);
        ASSERT_TRUE(e.has_value()) << n;
        auto g = LogicalGraph::complete(n);
        EXPECT_EQ(check_embedding(g, *e, hw), std::nullopt) << n;
        trim_chains(g, *e, hw);
        EXPECT_EQ(check_embedding(g, *e, hw), std::nullopt) << n;
        EXPECT_GT(e->qubit_count(), previous);
        previous = e->qubit_count();
    }
    EXPECT_FALSE(pegasus_clique_chains(hw, 12 * 5 - 7).has_value());
    EXPECT_FALSE(pegasus_clique_chains(HardwareGraph::grid(3, 3), 2).has_value());
}

TEST(EmbedQubo, IdentityEmbeddingReproducesQubo) {
    Qubo q(3, 0.5);
    q.add(0, 0, -1.0);
    q.add(1, 1, 2.0);
    q.add(0, 1, 3.0);
    q.add(1, 2, -4.0);
    auto hw = HardwareGraph::custom({{0, 1}, {1, 2}});
    Embedding e{{{0}, {1}, {2}}};
    auto eq = embed_qubo(q, e, hw, 10.0);
    EXPECT_EQ(eq.physical, q);
}

TEST(EmbedQubo, ChainPenaltyPerDisagreement) {
    auto bare = embed_qubo(Qubo(1), Embedding{{{0, 1}}}, HardwareGraph::custom({{0, 1}}), 7.0);
    EXPECT_EQ(bare.physical.energy(Bits{1, 0}), 7.0);
    EXPECT_EQ(bare.physical.energy(Bits{0, 1}), 7.0);
    EXPECT_EQ(bare.physical.energy(Bits{0, 0}), 0.0);
    EXPECT_EQ(bare.physical.energy(Bits{1, 1}), 0.0);

    Qubo q(1);
    q.add(0, 0, -2.0);
    auto hw = HardwareGraph::custom({{0, 1}});
    auto eq = embed_qubo(q, Embedding{{{0, 1}}}, hw, 7.0);
    const double zeros = eq.physical.energy(Bits{0, 0}), ones = eq.physical.energy(Bits{1, 1});
    EXPECT_DOUBLE_EQ(zeros, 0.0);
    EXPECT_DOUBLE_EQ(ones, -2.0);
    EXPECT_DOUBLE_EQ(eq.physical.energy(Bits{1, 0}), zeros + 7.0 - 1.0);
    EXPECT_DOUBLE_EQ(eq.physical.energy(Bits{1, 0}) - eq.physical.energy(Bits{0, 0}), 6.0);
    // the disagreement costs exactly cs above the consistent assignment with the same linear share
    EXPECT_DOUBLE_EQ(eq.physical.energy(Bits{1, 0}), 7.0 + 0.5 * (zeros + ones));
}

TEST(EmbedQubo, RejectsInvalidEmbedding) {
    Qubo q(2);
    q.add(0, 1, 1.0);
    auto hw = HardwareGraph::custom({{0, 1}, {1, 2}});
    EXPECT_THROW(embed_qubo(q, Embedding{{{0}, {2}}}, hw, 1.0), InvalidEmbeddingError);
    EXPECT_THROW(embed_qubo(q, Embedding{{{0}, {1}}}, hw, 0.0), Error);
}

TEST(EmbedQubo, ChainConsistentEnergiesMatchLogical) {
    auto hw = HardwareGraph::pegasus(4);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Qubo q = oracle::random_qubo(3 + trial % 8, 0.7, rng);
        auto e = find_embedding(LogicalGraph::from_qubo(q), hw, trial);
        for (bool split : {false, true}) {
            auto eq = embed_qubo(q, e, hw, default_chain_strength(q), {.split_couplings = split});
            for (std::uint64_t k = 0; k < (1u << q.n_vars()); ++k) {
                Bits b = logical_bits(q.n_vars(), k);
                EXPECT_TRUE(oracle::rel_close(eq.physical.energy(expand(eq, b)), q.energy(b), 1e-12));
            }
        }
    }
}

TEST(EmbedQubo, DominantChainStrengthKeepsMinimaConsistent) {
    auto hw = HardwareGraph::grid(4, 4);
    std::mt19937_64 rng(9);
    int checked = 0;
    for (int trial = 0; trial < 8; ++trial) {
        Qubo q = oracle::random_qubo(4, 1.0, rng);
        auto e = find_embedding(LogicalGraph::from_qubo(q), hw, trial);
        double bound = 0.0;
        for (int v = 0; v < q.n_vars(); ++v) {
            double s = 0.0;
            for (const auto &[key, val] : q.coefficients())
                if (key.first == v || key.second == v) s += std::abs(val);
            bound = std::max(bound, 1.0 + s);
        }
        auto eq = embed_qubo(q, e, hw, bound);
        ASSERT_LE(eq.physical.n_vars(), 16);
        auto ground = brute_force(eq.physical);
        for (const auto &s : ground.samples) {
            auto u = unembed(s.bits, eq, q, UnembedStrategy::discard);
            EXPECT_EQ(u.broken_chains, 0);
            EXPECT_TRUE(oracle::rel_close(q.energy(u.logical), brute_force(q).best().energy, 1e-12));
        }
        checked += e.max_chain_length() > 1;
    }
    EXPECT_GT(checked, 0);
}

TEST(EmbedQubo, VirtualQpuOnSmallCstr) {
    auto compiled = compile(cstr_problem(ReactorParams{}, 3), 4);
    const Qubo &q = compiled.qubo;
    auto hw = HardwareGraph::pegasus(4);
    auto e = find_embedding(LogicalGraph::from_qubo(q), hw, 1);
    const double ground = brute_force(q).best().energy;
    auto r = virtual_qpu_solve(q, e, hw, 2.0 * q.max_abs_coefficient(), {.num_reads = 300, .sweeps_per_read = 300}, 5);
    ASSERT_FALSE(r.logical.empty());
    EXPECT_GE(r.logical.best().energy, ground - 1e-9 * std::abs(ground));
    EXPECT_TRUE(oracle::rel_close(r.logical.best().energy, ground, 1e-12));
    EXPECT_EQ(r.report.physical_qubit_count, e.qubit_count());
    ASSERT_EQ(r.report.chain_break_fraction.size(), 1u);
    EXPECT_GE(r.report.chain_break_fraction[0], 0.0);
}

TEST(Unembed, Strategies) {
    // one logical variable on three qubits
    Qubo one(1);
    one.add(0, 0, 1.0);
    auto path = HardwareGraph::custom({{0, 1}, {1, 2}});
    auto eq = embed_qubo(one, Embedding{{{0, 1, 2}}}, path, 2.0);
    auto maj = unembed(Bits{1, 1, 0}, eq, one, UnembedStrategy::majority_vote);
    EXPECT_EQ(maj.logical, Bits{1});
    EXPECT_EQ(maj.broken_chains, 1);
    EXPECT_DOUBLE_EQ(maj.chain_break_fraction, 1.0);
    EXPECT_TRUE(unembed(Bits{1, 1, 0}, eq, one, UnembedStrategy::discard).discarded);

    // even chain, tie resolves to 1
    auto pair = HardwareGraph::custom({{0, 1}});
    auto eq2 = embed_qubo(one, Embedding{{{0, 1}}}, pair, 2.0);
    EXPECT_EQ(unembed(Bits{0, 1}, eq2, one, UnembedStrategy::majority_vote).logical, Bits{1});

    // consistent chains: every strategy agrees and nothing is broken
    for (auto s : {UnembedStrategy::majority_vote, UnembedStrategy::discard, UnembedStrategy::energy_min}) {
        auto u = unembed(Bits{0, 0, 0}, eq, one, s);
        EXPECT_EQ(u.logical, Bits{0});
        EXPECT_EQ(u.chain_break_fraction, 0.0);
        EXPECT_FALSE(u.discarded);
    }
    EXPECT_THROW(unembed(Bits{0, 0}, eq, one, UnembedStrategy::discard), LengthMismatchError);
}

TEST(Unembed, EnergyMinPicksTheCheaperCompletion) {
    Qubo q(2);
    q.add(0, 0, 1.0);
    q.add(1, 1, -1.0);
    q.add(0, 1, -3.0);
    // chain 0 = {0, 1}, chain 1 = {2}
    auto hw = HardwareGraph::custom({{0, 1}, {1, 2}});
    auto eq = embed_qubo(q, Embedding{{{0, 1}, {2}}}, hw, 5.0);
    for (std::uint8_t other : {0, 1}) {
        Bits phys{1, 0, other};
        auto u = unembed(phys, eq, q, UnembedStrategy::energy_min);
        Bits with0{0, other}, with1{1, other};
        const Bits expected = q.energy(with1) < q.energy(with0) ? with1 : with0;
        EXPECT_EQ(u.logical, expected);
        EXPECT_EQ(u.broken_chains, 1);
        EXPECT_DOUBLE_EQ(u.chain_break_fraction, 0.5);
    }
}

TEST(EmbeddingIo, TextRoundTripAndDot) {
    auto compiled = compile(cstr_problem(ReactorParams{}, 2), 2);
    const Qubo &q = compiled.qubo;
    auto hw = HardwareGraph::pegasus(3);
    auto e = find_embedding(LogicalGraph::from_qubo(q), hw, 1);
    for (bool labeled : {false, true}) {
        const std::vector<VarId> labels = labeled ? q.labels() : std::vector<VarId>{};
        std::stringstream ss;
        write_embedding(ss, e, hw, labels);
        auto back = read_embedding(ss, hw, labels);
        EXPECT_EQ(back.chains, e.chains);
    }
    std::istringstream bad("0: 999999\n");
    EXPECT_THROW(read_embedding(bad, hw), ParseError);
    std::istringstream nameless("x 1 2\n");
    EXPECT_THROW(read_embedding(nameless, hw), ParseError);

    std::ostringstream dot;
    write_embedding_dot(dot, e, hw);
    EXPECT_EQ(dot.str().rfind("graph embedding {", 0), 0u);

    EmbeddingReport r{q.n_vars(), e.qubit_count(), e.max_chain_length(), 0.1, 2.0, {0.0, 0.25}};
    std::ostringstream rep;
    write_embedding_report(rep, r);
    EXPECT_NE(rep.str().find("physical_qubit_count: " + std::to_string(e.qubit_count())), std::string::npos);
}

TEST(HardwareGraph, FromDescriptionRoundTrips) {
    auto p = HardwareGraph::from_description("pegasus:4");
    EXPECT_EQ(p.topology(), Topology::pegasus);
    EXPECT_EQ(p.size(), HardwareGraph::pegasus(4).size());
    EXPECT_EQ(HardwareGraph::from_description(p.describe()).edge_count(), p.edge_count());
    auto g = HardwareGraph::from_description("grid:3x5");
    EXPECT_EQ(g.size(), 15);
    EXPECT_EQ(g.describe(), "grid:3x5");
    for (const char *bad : {"pegasus", "pegasus:x", "pegasus:1", "grid:3", "grid:0x2", "chimera:4", "grid:3x4y"})
        EXPECT_THROW(HardwareGraph::from_description(bad), ParseError) << bad;
}
