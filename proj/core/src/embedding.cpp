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


#include "dynqubo/embedding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Pegasus offsets of the vertical and horizontal qubit families
constexpr std::array<int, 12> kVerticalOffsets = {2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6};
constexpr std::array<int, 12> kHorizontalOffsets = {6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10};

int pegasus_linear(int m, int u, int w, int k, int z) { return ((u * m + w) * 12 + k) * (m - 1) + z; }

}  // namespace

// ---------------------------------------------------------------- HardwareGraph

void HardwareGraph::finish(std::vector<Edge> edges) {
    std::vector<int> ids = ids_;
    for (auto &[a, b] : edges) {
        if (a == b) throw Error(fmt::format("self loop on qubit {}", a));
        if (a > b) std::swap(a, b);
        ids.push_back(a);
        ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ids_ = std::move(ids);
    adj_.assign(ids_.size(), {});
    edges_.clear();
    edges_.reserve(edges.size());
    for (const auto &[a, b] : edges) edges_.emplace_back(index_of(a), index_of(b));
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto &[a, b] : edges_) {
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }
    for (auto &row : adj_) std::sort(row.begin(), row.end());
}

HardwareGraph HardwareGraph::custom(const std::vector<Edge> &edges_by_id, std::vector<int> ids) {
    HardwareGraph g;
    g.ids_ = std::move(ids);
    g.finish(edges_by_id);
    return g;
}

HardwareGraph HardwareGraph::grid(int rows, int cols) {
    if (rows < 1 || cols < 1) throw Error("grid dimensions must be positive");
    HardwareGraph g;
    g.topology_ = Topology::grid;
    g.shape_ = rows;
    g.ids_.resize(static_cast<std::size_t>(rows) * cols);
    std::iota(g.ids_.begin(), g.ids_.end(), 0);
    std::vector<Edge> edges;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.emplace_back(r * cols + c, r * cols + c + 1);
            if (r + 1 < rows) edges.emplace_back(r * cols + c, (r + 1) * cols + c);
        }
    g.finish(std::move(edges));
    return g;
}

HardwareGraph HardwareGraph::pegasus(int m) {
    if (m < 2) throw Error("pegasus requires m >= 2");
    std::vector<Edge> edges;
    auto id = [m](int u, int w, int k, int z) { return pegasus_linear(m, u, w, k, z); };
    // internal couplers between crossing vertical and horizontal qubits
    for (int w = 0; w < m; ++w)
        for (int kk = 0; kk < 12; ++kk) {
            const int k_lo = w > 0 ? 0 : kHorizontalOffsets[kk];
            const int k_hi = w < m - 1 ? 12 : kHorizontalOffsets[kk];
            for (int k = k_lo; k < k_hi; ++k)
                for (int z = 0; z < m - 1; ++z)
                    edges.emplace_back(id(0, w, k, z), id(1, z + (kk < kVerticalOffsets[k]), kk,
                                                         w - (k < kHorizontalOffsets[kk])));
        }
    for (int u = 0; u < 2; ++u)
        for (int w = 0; w < m; ++w) {
            const int k_lo = w == 0 ? 2 : 0;
            const int k_hi = w == m - 1 ? 10 : 12;
            for (int k = k_lo; k < k_hi; ++k) {
                // external couplers along a line
                for (int z = 0; z + 1 < m - 1; ++z) edges.emplace_back(id(u, w, k, z), id(u, w, k, z + 1));
                // odd couplers between paired parallel qubits
                if (k % 2 == 0)
                    for (int z = 0; z < m - 1; ++z) edges.emplace_back(id(u, w, k, z), id(u, w, k + 1, z));
            }
        }
    HardwareGraph g;
    g.topology_ = Topology::pegasus;
    g.shape_ = m;
    g.finish(std::move(edges));
    return g;
}

std::string HardwareGraph::describe() const {
    switch (topology_) {
    case Topology::pegasus: return fmt::format("pegasus:{}", shape_);
    case Topology::grid: return fmt::format("grid:{}x{}", shape_, size() / std::max(shape_, 1));
    case Topology::custom: break;
    }
    return fmt::format("custom:{}", size());
}

HardwareGraph HardwareGraph::from_description(const std::string &text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string shape = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto number = [&](const std::string &s) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(s, &pos);
        } catch (const std::logic_error &) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size() || v < 1) throw ParseError("bad topology shape in '" + text + "'");
        return v;
    };
    if (kind == "pegasus") {
        const int m = number(shape);
        if (m < 2) throw ParseError("pegasus needs m >= 2, got '" + text + "'");
        return pegasus(m);
    }
    if (kind == "grid") {
        const auto x = shape.find('x');
        if (x == std::string::npos) throw ParseError("grid topology needs RxC, got '" + text + "'");
        return grid(number(shape.substr(0, x)), number(shape.substr(x + 1)));
    }
    throw ParseError("unknown topology '" + text + "' (expected pegasus:M or grid:RxC)");
}

int HardwareGraph::max_degree() const {
    int d = 0;
    for (const auto &row : adj_) d = std::max(d, static_cast<int>(row.size()));
    return d;
}

bool HardwareGraph::has_edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= size() || b >= size()) return false;
    const auto &row = adj_[a];
    return std::binary_search(row.begin(), row.end(), b);
}

bool HardwareGraph::connected() const {
    if (ids_.empty()) return true;
    std::vector<char> seen(ids_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int a = stack.back();
        stack.pop_back();
        for (int b : adj_[a])
            if (!seen[b]) {
                seen[b] = 1;
                ++count;
                stack.push_back(b);
            }
    }
    return count == size();
}

int HardwareGraph::index_of(int id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    return (it != ids_.end() && *it == id) ? static_cast<int>(it - ids_.begin()) : -1;
}

std::array<int, 4> HardwareGraph::pegasus_coordinates(int i) const {
    if (topology_ != Topology::pegasus) throw Error("not a pegasus graph");
    const int m = shape_;
    int q = ids_.at(i);
    const int z = q % (m - 1);
    q /= m - 1;
    const int k = q % 12;
    q /= 12;
    const int w = q % m;
    const int u = q / m;
    return {u, w, k, z};
}

// ---------------------------------------------------------------- logical graphs

LogicalGraph LogicalGraph::from_qubo(const Qubo &q) {
    LogicalGraph g;
    g.n = q.n_vars();
    for (const auto &[key, v] : q.coefficients())
        if (key.first != key.second) g.edges.push_back(key);
    return g;
}

LogicalGraph LogicalGraph::complete(int n) {
    LogicalGraph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
}

std::vector<std::vector<int>> LogicalGraph::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (const auto &[a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto &row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

int Embedding::qubit_count() const {
    int total = 0;
    for (const auto &c : chains) total += static_cast<int>(c.size());
    return total;
}

int Embedding::max_chain_length() const {
    std::size_t best = 0;
    for (const auto &c : chains) best = std::max(best, c.size());
    return static_cast<int>(best);
}

// ---------------------------------------------------------------- validity

std::optional<std::string> check_embedding(const LogicalGraph &g, const Embedding &e, const HardwareGraph &hw) {
    if (e.n_vars() != g.n) return fmt::format("embedding has {} chains for {} variables", e.n_vars(), g.n);
    std::map<int, int> owner;
    for (int v = 0; v < g.n; ++v) {
        const auto &chain = e.chains[v];
        if (chain.empty()) return fmt::format("chain {} is empty", v);
        for (int q : chain) {
            if (q < 0 || q >= hw.size()) return fmt::format("chain {} uses unknown qubit index {}", v, q);
            auto [it, inserted] = owner.emplace(q, v);
            if (!inserted) return fmt::format("qubit {} is shared by chains {} and {}", hw.id(q), it->second, v);
        }
        // breadth-first search restricted to the chain
        std::set<int> members(chain.begin(), chain.end());
        std::set<int> reached{chain.front()};
        std::queue<int> frontier;
        frontier.push(chain.front());
        while (!frontier.empty()) {
            int a = frontier.front();
            frontier.pop();
            for (int b : members)
                if (!reached.count(b) && hw.has_edge(a, b)) {
                    reached.insert(b);
                    frontier.push(b);
                }
        }
        if (reached.size() != members.size()) return fmt::format("chain {} is not connected", v);
    }
    for (const auto &[a, b] : g.edges) {
        bool covered = false;
        for (int p : e.chains[a]) {
            for (int q : e.chains[b])
                if (hw.has_edge(p, q)) {
                    covered = true;
                    break;
                }
            if (covered) break;
        }
        if (!covered) return fmt::format("no coupler between chains {} and {}", a, b);
    }
    return std::nullopt;
}

bool is_valid_embedding(const LogicalGraph &g, const Embedding &e, const HardwareGraph &hw) {
    return !check_embedding(g, e, hw).has_value();
}

// ---------------------------------------------------------------- chain trimming

void trim_chains(const LogicalGraph &g, Embedding &e, const HardwareGraph &hw) {
    const auto ladj = g.adjacency();
    std::vector<int> owner(hw.size(), -1);
    for (int v = 0; v < e.n_vars(); ++v)
        for (int q : e.chains[v]) owner[q] = v;

    std::vector<int> links(g.n, 0);  // edges from the current chain into each other chain
    for (int v = 0; v < g.n; ++v) {
        auto &chain = e.chains[v];
        std::fill(links.begin(), links.end(), 0);
        for (int q : chain)
            for (int r : hw.neighbors(q))
                if (owner[r] >= 0 && owner[r] != v) ++links[owner[r]];
        bool changed = true;
        while (changed && chain.size() > 1) {
            changed = false;
            for (std::size_t idx = 0; idx < chain.size() && chain.size() > 1; ++idx) {
                const int q = chain[idx];
                int inner = 0;
                for (int r : hw.neighbors(q)) inner += owner[r] == v;
                if (inner > 1) continue;  // only leaves keep the chain connected when removed
                bool needed = false;
                for (int u : ladj[v]) {
                    int lost = 0;
                    for (int r : hw.neighbors(q)) lost += owner[r] == u;
                    if (lost > 0 && lost == links[u]) {
                        needed = true;
                        break;
                    }
                }
                if (needed) continue;
                for (int r : hw.neighbors(q))
                    if (owner[r] >= 0 && owner[r] != v) --links[owner[r]];
                owner[q] = -1;
                chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(idx));
                changed = true;
                --idx;
            }
        }
        std::sort(chain.begin(), chain.end());
    }
}

// ---------------------------------------------------------------- native clique seed

std::optional<Embedding> pegasus_clique_chains(const HardwareGraph &hw, int n) {
    if (hw.topology() != Topology::pegasus || n < 1) return std::nullopt;
    const int m = hw.shape();
    // A line spans z in [a, a + s) and is usable when all its qubits and
    // external couplers exist.
    auto line = [&](int u, int w, int k, int a, int s) -> std::optional<std::vector<int>> {
        std::vector<int> nodes;
        for (int z = a; z < a + s; ++z) {
            int idx = hw.index_of(pegasus_linear(m, u, w, k, z));
            if (idx < 0) return std::nullopt;
            if (!nodes.empty() && !hw.has_edge(nodes.back(), idx)) return std::nullopt;
            nodes.push_back(idx);
        }
        return nodes;
    };
    for (int s = 1; s <= m - 1; ++s) {
        for (int a = 0; a + s <= m - 1; ++a) {
            // every line over [a, a + s) covers the coordinate window [lo, hi)
            const int lo = 12 * a + 10, hi = 12 * (a + s) + 2;
            std::vector<std::vector<int>> vertical, horizontal;
            for (int x = lo; x < hi; ++x) {
                const int w = x / 12, k = x % 12;
                if (w >= m) break;
                if (auto l = line(0, w, k, a, s)) vertical.push_back(std::move(*l));
                if (auto l = line(1, w, k, a, s)) horizontal.push_back(std::move(*l));
            }
            if (static_cast<int>(std::min(vertical.size(), horizontal.size())) < n) continue;
            Embedding e;
            e.chains.resize(n);
            for (int i = 0; i < n; ++i) {
                auto &c = e.chains[i];
                c = vertical[i];
                c.insert(c.end(), horizontal[i].begin(), horizontal[i].end());
                std::sort(c.begin(), c.end());
            }
            return e;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- heuristic embedding

namespace {

class Embedder {
  public:
    Embedder(const LogicalGraph &g, const HardwareGraph &hw, std::mt19937_64 &rng)
            : g_(g), hw_(hw), ladj_(g.adjacency()), rng_(rng), usage_(hw.size(), 0), chains_(g.n) {}

    void set_chains(const Embedding &e) {
        std::fill(usage_.begin(), usage_.end(), 0);
        for (int v = 0; v < g_.n; ++v) {
            chains_[v] = v < e.n_vars() ? e.chains[v] : std::vector<int>{};
            for (int q : chains_[v]) ++usage_[q];
        }
    }

    void place_missing(double base) {
        base_ = base;
        // breadth-first order from a random variable keeps placements local
        std::vector<int> order;
        std::vector<char> seen(g_.n, 0);
        std::vector<int> starts(g_.n);
        std::iota(starts.begin(), starts.end(), 0);
        std::shuffle(starts.begin(), starts.end(), rng_);
        for (int s : starts) {
            if (seen[s]) continue;
            std::queue<int> bfs;
            bfs.push(s);
            seen[s] = 1;
            while (!bfs.empty()) {
                int v = bfs.front();
                bfs.pop();
                order.push_back(v);
                for (int u : ladj_[v])
                    if (!seen[u]) {
                        seen[u] = 1;
                        bfs.push(u);
                    }
            }
        }
        for (int v : order)
            if (chains_[v].empty()) place(v);
    }

    void round(double base) {
        base_ = base;
        std::vector<int> order(g_.n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng_);
        for (int v : order) {
            for (int q : chains_[v]) --usage_[q];
            chains_[v].clear();
            place(v);
        }
    }

    int overlap() const {
        int c = 0;
        for (int u : usage_) c += u > 1;
        return c;
    }

    Embedding embedding() const {
        Embedding e{chains_};
        for (auto &c : e.chains) std::sort(c.begin(), c.end());
        return e;
    }

  private:
    double weight(int q) const { return usage_[q] == 0 ? 1.0 : std::pow(base_, usage_[q]); }

    //! Dijkstra from chain `u` with node entry costs; fills dist and parent.
    void distances(int u, std::vector<double> &dist, std::vector<int> &parent) const {
        const double inf = std::numeric_limits<double>::infinity();
        dist.assign(hw_.size(), inf);
        parent.assign(hw_.size(), -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (int q : chains_[u]) {
            dist[q] = 0.0;
            heap.emplace(0.0, q);
        }
        while (!heap.empty()) {
            auto [d, a] = heap.top();
            heap.pop();
            if (d > dist[a]) continue;
            for (int b : hw_.neighbors(a)) {
                double nd = d + weight(b);
                if (nd < dist[b]) {
                    dist[b] = nd;
                    parent[b] = a;
                    heap.emplace(nd, b);
                }
            }
        }
    }

    void place(int v) {
        std::vector<int> placed;
        for (int u : ladj_[v])
            if (!chains_[u].empty()) placed.push_back(u);
        std::vector<int> chain;
        if (placed.empty()) {
            // least used qubit, ties at random
            int best_usage = *std::min_element(usage_.begin(), usage_.end());
            std::vector<int> free;
            for (int q = 0; q < hw_.size(); ++q)
                if (usage_[q] == best_usage) free.push_back(q);
            chain.push_back(free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng_)]);
        } else {
            const std::size_t k = placed.size();
            if (dist_.size() < k) {
                dist_.resize(k);
                parent_.resize(k);
            }
            for (std::size_t i = 0; i < k; ++i) distances(placed[i], dist_[i], parent_[i]);
            std::vector<double> cost(hw_.size());
            double best = std::numeric_limits<double>::infinity();
            for (int q = 0; q < hw_.size(); ++q) {
                const double wq = weight(q);
                double c = wq;
                for (std::size_t i = 0; i < k; ++i) c += std::max(0.0, dist_[i][q] - wq);
                cost[q] = c;
                best = std::min(best, c);
            }
            if (!std::isfinite(best)) {
                throw EmbeddingNotFoundError("hardware graph is disconnected from a neighbor chain", 0, 0);
            }
            std::vector<int> roots;
            for (int q = 0; q < hw_.size(); ++q)
                if (cost[q] <= best * (1.0 + 1e-12)) roots.push_back(q);
            const int root = roots[std::uniform_int_distribution<std::size_t>(0, roots.size() - 1)(rng_)];
            std::set<int> members{root};
            for (std::size_t i = 0; i < k; ++i) {
                for (int q = parent_[i][root]; q >= 0 && parent_[i][q] >= 0; q = parent_[i][q]) members.insert(q);
                // a root inside the neighbor chain needs no path
            }
            chain.assign(members.begin(), members.end());
        }
        for (int q : chain) ++usage_[q];
        chains_[v] = std::move(chain);
    }

    const LogicalGraph &g_;
    const HardwareGraph &hw_;
    std::vector<std::vector<int>> ladj_;
    std::mt19937_64 &rng_;
    std::vector<int> usage_;
    std::vector<std::vector<int>> chains_;
    double base_ = 2.0;
    std::vector<std::vector<double>> dist_;
    std::vector<std::vector<int>> parent_;
};

double base_schedule(int r) { return std::min(1e6, 2.0 * std::pow(1.6, r)); }

bool better(const Embedding &a, const Embedding &b) {
    if (a.qubit_count() != b.qubit_count()) return a.qubit_count() < b.qubit_count();
    return a.max_chain_length() < b.max_chain_length();
}

}  // namespace

Embedding find_embedding(const LogicalGraph &g, const HardwareGraph &hw, std::uint64_t seed,
                         const EmbeddingOptions &opts) {
    if (g.n == 0) return {};
    if (g.n > hw.size()) {
        throw EmbeddingNotFoundError(fmt::format("{} variables exceed {} qubits", g.n, hw.size()), 0, g.n - hw.size());
    }
    const auto t0 = Clock::now();
    int best_overlap = std::numeric_limits<int>::max();
    int attempts = 0;
    for (int attempt = 0; attempt < std::max(1, opts.tries); ++attempt) {
        if (attempt > 0 && seconds_since(t0) > opts.time_limit) break;
        ++attempts;
        std::mt19937_64 rng(mix_seed(seed + static_cast<std::uint64_t>(attempt)));
        Embedder emb(g, hw, rng);
        if (opts.initial_chains) emb.set_chains(*opts.initial_chains);
        emb.place_missing(static_cast<double>(hw.size()));

        auto trimmed = [&] {
            Embedding e = emb.embedding();
            trim_chains(g, e, hw);
            return e;
        };
        std::optional<Embedding> best;
        int attempt_overlap = emb.overlap();
        if (attempt_overlap == 0) best = trimmed();
        int stall = 0;
        for (int r = 0; r < opts.max_rounds && stall < opts.patience; ++r) {
            if (seconds_since(t0) > opts.time_limit) break;
            // weights escalate while qubits are shared; once legal, reuse is
            // effectively forbidden and rounds only shorten chains
            const double base = best ? static_cast<double>(hw.size()) : base_schedule(r);
            emb.round(base);
            const int ov = emb.overlap();
            if (ov == 0) {
                Embedding cand = trimmed();
                if (!best || better(cand, *best)) {
                    best = std::move(cand);
                    stall = 0;
                } else {
                    ++stall;
                }
            } else if (ov < attempt_overlap) {
                attempt_overlap = ov;
                stall = 0;
            } else {
                ++stall;
            }
        }
        best_overlap = std::min(best_overlap, best ? 0 : attempt_overlap);
        if (best) {
            if (auto problem = check_embedding(g, *best, hw)) {
                throw Error("internal embedding error: " + *problem);
            }
            return *best;
        }
    }
    if (!opts.initial_chains && hw.topology() == Topology::pegasus) {
        if (auto seed_chains = pegasus_clique_chains(hw, g.n)) {
            trim_chains(g, *seed_chains, hw);
            if (is_valid_embedding(g, *seed_chains, hw)) return *seed_chains;
        }
    }
    throw EmbeddingNotFoundError(
            fmt::format("no embedding of {} variables into {} after {} attempts (best overlap {} qubits)", g.n,
                        hw.describe(), attempts, best_overlap),
            attempts, best_overlap);
}

// ---------------------------------------------------------------- embedding a QUBO

double default_chain_strength(const Qubo &q) {
    double m = q.max_abs_coefficient();
    return default_chain_strength_factor * (m > 0.0 ? m : 1.0);
}

EmbeddedQubo embed_qubo(const Qubo &q, const Embedding &e, const HardwareGraph &hw, double chain_strength,
                        const EmbedQuboOptions &opts) {
    if (!(chain_strength > 0.0)) throw Error("chain strength must be positive");
    const auto logical = LogicalGraph::from_qubo(q);
    if (auto problem = check_embedding(logical, e, hw)) throw InvalidEmbeddingError(*problem);

    EmbeddedQubo out;
    out.chain_strength = chain_strength;
    out.members.resize(q.n_vars());
    std::vector<int> phys_of(hw.size(), -1);
    for (int v = 0; v < q.n_vars(); ++v) {
        std::vector<int> chain = e.chains[v];
        std::sort(chain.begin(), chain.end());
        for (int qubit : chain) {
            phys_of[qubit] = static_cast<int>(out.qubits.size());
            out.members[v].push_back(phys_of[qubit]);
            out.qubits.push_back(qubit);
            out.chain_of.push_back(v);
        }
    }
    Qubo &P = out.physical;
    P = Qubo(static_cast<int>(out.qubits.size()), q.offset());

    for (const auto &[key, value] : q.coefficients()) {
        const auto [i, j] = key;
        if (i == j) {
            const double share = value / static_cast<double>(out.members[i].size());
            for (int p : out.members[i]) P.add(p, p, share);
            continue;
        }
        std::vector<std::pair<int, int>> links;  // hardware index pairs, sorted
        for (int a : e.chains[i])
            for (int b : hw.neighbors(a))
                if (phys_of[b] >= 0 && out.chain_of[phys_of[b]] == j) links.emplace_back(std::min(a, b), std::max(a, b));
        std::sort(links.begin(), links.end());
        if (opts.split_couplings) {
            const double share = value / static_cast<double>(links.size());
            for (const auto &[a, b] : links) P.add(phys_of[a], phys_of[b], share);
        } else {
            P.add(phys_of[links.front().first], phys_of[links.front().second], value);
        }
    }
    for (int v = 0; v < q.n_vars(); ++v)
        for (int a : e.chains[v])
            for (int b : hw.neighbors(a))
                if (a < b && phys_of[b] >= 0 && out.chain_of[phys_of[b]] == v) {
                    P.add(phys_of[a], phys_of[a], chain_strength);
                    P.add(phys_of[b], phys_of[b], chain_strength);
                    P.add(phys_of[a], phys_of[b], -2.0 * chain_strength);
                }
    return out;
}

// ---------------------------------------------------------------- unembedding

namespace {

UnembedResult unembed_with(std::span<const std::uint8_t> physical, const EmbeddedQubo &eq, const QuboAdjacency &adj,
                           UnembedStrategy strategy) {
    if (physical.size() != eq.qubits.size()) {
        throw LengthMismatchError(fmt::format("physical sample has {} bits, embedding uses {} qubits", physical.size(),
                                              eq.qubits.size()));
    }
    const int n = static_cast<int>(eq.members.size());
    UnembedResult out;
    out.logical.assign(n, 0);
    std::vector<int> broken;
    for (int v = 0; v < n; ++v) {
        int ones = 0;
        for (int p : eq.members[v]) ones += physical[p];
        const int size = static_cast<int>(eq.members[v].size());
        out.logical[v] = 2 * ones >= size ? 1 : 0;
        if (ones != 0 && ones != size) broken.push_back(v);
    }
    out.broken_chains = static_cast<int>(broken.size());
    out.chain_break_fraction = n ? static_cast<double>(broken.size()) / n : 0.0;
    if (strategy == UnembedStrategy::discard) {
        out.discarded = !broken.empty();
    } else if (strategy == UnembedStrategy::energy_min) {
        for (int v : broken) {
            // E(v=1) - E(v=0) with every other variable held fixed
            double delta = adj.linear[v];
            for (int k = adj.row_start[v]; k < adj.row_start[v + 1]; ++k) delta += adj.weight[k] * out.logical[adj.neighbor[k]];
            out.logical[v] = delta <= 0.0 ? 1 : 0;
        }
    }
    return out;
}

}  // namespace

UnembedResult unembed(std::span<const std::uint8_t> physical, const EmbeddedQubo &eq, const Qubo &logical,
                      UnembedStrategy strategy) {
    return unembed_with(physical, eq, QuboAdjacency(logical), strategy);
}

std::string to_string(UnembedStrategy s) {
    switch (s) {
    case UnembedStrategy::majority_vote: return "majority_vote";
    case UnembedStrategy::discard: return "discard";
    case UnembedStrategy::energy_min: return "energy_min";
    }
    return "?";
}

UnembedStrategy parse_unembed_strategy(const std::string &s) {
    if (s == "majority_vote" || s == "majority") return UnembedStrategy::majority_vote;
    if (s == "discard") return UnembedStrategy::discard;
    if (s == "energy_min") return UnembedStrategy::energy_min;
    throw ParseError("unknown unembedding strategy '" + s + "'");
}

// ---------------------------------------------------------------- reporting and I/O

void write_embedding_report(std::ostream &os, const EmbeddingReport &r) {
    os << fmt::format("logical_vars: {}\n", r.logical_vars);
    os << fmt::format("physical_qubit_count: {}\n", r.physical_qubit_count);
    os << fmt::format("max_chain_length: {}\n", r.max_chain_length);
    os << fmt::format("embedding_wall_time: {:.6f}\n", r.embedding_wall_time);
    os << fmt::format("chain_strength: {:.17g}\n", r.chain_strength);
    os << "chain_break_fraction:";
    for (double f : r.chain_break_fraction) os << fmt::format(" {:.6g}", f);
    os << '\n';
}

void write_embedding(std::ostream &os, const Embedding &e, const HardwareGraph &hw, const std::vector<VarId> &labels) {
    for (int v = 0; v < e.n_vars(); ++v) {
        os << (labels.empty() ? std::to_string(v) : to_string(labels.at(v))) << ':';
        for (int q : e.chains[v]) os << ' ' << hw.id(q);
        os << '\n';
    }
}

Embedding read_embedding(std::istream &is, const HardwareGraph &hw, const std::vector<VarId> &labels) {
    std::map<int, std::vector<int>> chains;
    std::string line;
    while (std::getline(is, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        // labels contain ':' themselves, so split at the last colon
        auto colon = line.rfind(':');
        if (colon == std::string::npos) throw ParseError("embedding line without ':' : '" + line + "'");
        std::string name = line.substr(first, colon - first);
        name.erase(name.find_last_not_of(" \t") + 1);
        int v = -1;
        if (labels.empty()) {
            try {
                std::size_t used = 0;
                v = std::stoi(name, &used);
                if (used != name.size()) v = -1;
            } catch (const std::exception &) {
                v = -1;
            }
        } else {
            auto it = std::find(labels.begin(), labels.end(), parse_var_id(name));
            if (it != labels.end()) v = static_cast<int>(it - labels.begin());
        }
        if (v < 0) throw ParseError("unknown variable '" + name + "' in embedding");
        std::istringstream ls(line.substr(colon + 1));
        std::string tok;
        auto &chain = chains[v];
        while (ls >> tok) {
            int id = 0;
            try {
                id = std::stoi(tok);
            } catch (const std::exception &) {
                throw ParseError("bad qubit id '" + tok + "'");
            }
            int idx = hw.index_of(id);
            if (idx < 0) throw ParseError(fmt::format("qubit {} is not in {}", id, hw.describe()));
            chain.push_back(idx);
        }
    }
    Embedding e;
    const int n = chains.empty() ? 0 : chains.rbegin()->first + 1;
    e.chains.resize(std::max<int>(n, static_cast<int>(labels.size())));
    for (auto &[v, c] : chains) e.chains[v] = std::move(c);
    return e;
}

void write_embedding_dot(std::ostream &os, const Embedding &e, const HardwareGraph &hw) {
    std::map<int, int> owner;
    for (int v = 0; v < e.n_vars(); ++v)
        for (int q : e.chains[v]) owner[q] = v;
    os << "graph embedding {\n  node [style=filled, colorscheme=set312];\n";
    for (const auto &[q, v] : owner) {
        os << fmt::format("  q{} [label=\"{}\\nv{}\", fillcolor={}];\n", hw.id(q), hw.id(q), v, v % 12 + 1);
    }
    for (const auto &[a, b] : hw.edges()) {
        auto ia = owner.find(a), ib = owner.find(b);
        if (ia == owner.end() || ib == owner.end()) continue;
        const bool inner = ia->second == ib->second;
        os << fmt::format("  q{} -- q{}{};\n", hw.id(a), hw.id(b), inner ? " [penwidth=3]" : " [style=dotted]");
    }
    os << "}\n";
}

// ---------------------------------------------------------------- virtual QPU

VirtualQpuResult virtual_qpu_solve(const Qubo &q, const Embedding &e, const HardwareGraph &hw, double chain_strength,
                                   const SaSchedule &sched, std::uint64_t seed, UnembedStrategy strategy) {
    const auto t0 = Clock::now();
    EmbeddedQubo eq = embed_qubo(q, e, hw, chain_strength);
    SampleSet phys = simulated_annealing(eq.physical, sched, seed);
    const QuboAdjacency adj(q);
    std::vector<Bits> reads;
    double breaks = 0.0;
    int total = 0;
    for (const auto &s : phys.samples) {
        UnembedResult u = unembed_with(s.bits, eq, adj, strategy);
        breaks += u.chain_break_fraction * s.occurrences;
        total += s.occurrences;
        if (u.discarded) continue;
        for (int k = 0; k < s.occurrences; ++k) reads.push_back(u.logical);
    }
    VirtualQpuResult out;
    out.logical = SampleSet::from_reads(q, std::move(reads));
    out.logical.solver_name = "virtual_qpu";
    out.logical.rng_seed = seed;
    out.logical.wall_time = seconds_since(t0);
    if (!out.logical.empty()) out.logical.trace.push_back({out.logical.wall_time, out.logical.best().energy});
    out.report.logical_vars = q.n_vars();
    out.report.physical_qubit_count = e.qubit_count();
    out.report.max_chain_length = e.max_chain_length();
    out.report.chain_strength = chain_strength;
    out.report.chain_break_fraction.push_back(total ? breaks / total : 0.0);
    return out;
}

}  // namespace dynqubo
