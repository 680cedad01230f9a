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
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynqubo/qubo.hpp"
#include "dynqubo/solvers.hpp"

namespace dynqubo {

enum class Topology { pegasus, grid, custom };

//! Undirected hardware graph. Qubits are addressed by dense indices
//! 0..size()-1; `id(i)` is the external qubit id used in files and reports.
class HardwareGraph {
  public:
    using Edge = std::pair<int, int>;

    HardwareGraph() = default;
    //! Builds a custom graph over arbitrary external ids. Nodes that appear
    //! only in `ids` are kept as isolated qubits.
    static HardwareGraph custom(const std::vector<Edge> &edges_by_id, std::vector<int> ids = {});
    //! rows x cols lattice with nearest-neighbor couplers, ids row-major
    static HardwareGraph grid(int rows, int cols);
    //! Pegasus P_m restricted to the fabric (qubits with at least one coupler)
    static HardwareGraph pegasus(int m);
    //! Parses the `describe()` form: "pegasus:M" or "grid:RxC". Throws ParseError.
    static HardwareGraph from_description(const std::string &text);

    Topology topology() const { return topology_; }
    //! Pegasus m or grid rows; 0 for custom graphs
    int shape() const { return shape_; }
    std::string describe() const;

    int size() const { return static_cast<int>(ids_.size()); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge> &edges() const { return edges_; }
    const std::vector<int> &neighbors(int i) const { return adj_[i]; }
    int degree(int i) const { return static_cast<int>(adj_[i].size()); }
    int max_degree() const;
    bool has_edge(int a, int b) const;
    bool connected() const;

    int id(int i) const { return ids_[i]; }
    //! -1 if unknown
    int index_of(int id) const;

    //! Pegasus (u, w, k, z) coordinates of qubit i; only valid for Pegasus graphs
    std::array<int, 4> pegasus_coordinates(int i) const;

  private:
    void finish(std::vector<Edge> edges);

    Topology topology_ = Topology::custom;
    int shape_ = 0;
    std::vector<int> ids_;
    std::vector<Edge> edges_;  // sorted, a < b
    std::vector<std::vector<int>> adj_;
};

//! Logical problem graph: nodes 0..n-1, undirected edges with i < j.
struct LogicalGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    static LogicalGraph from_qubo(const Qubo &q);
    static LogicalGraph complete(int n);
    std::vector<std::vector<int>> adjacency() const;
};

//! chains[v] lists the hardware indices representing logical variable v
struct Embedding {
    std::vector<std::vector<int>> chains;

    int n_vars() const { return static_cast<int>(chains.size()); }
    int qubit_count() const;
    int max_chain_length() const;
};

//! Independent check of disjointness, chain connectivity and edge coverage.
//! Returns a description of the first violation, or nullopt if valid.
std::optional<std::string> check_embedding(const LogicalGraph &g, const Embedding &e, const HardwareGraph &hw);
bool is_valid_embedding(const LogicalGraph &g, const Embedding &e, const HardwareGraph &hw);

struct EmbeddingOptions {
    int tries = 10;
    //! improvement rounds per try after the initial placement
    int max_rounds = 50;
    //! rounds without progress before an attempt gives up or stops shrinking
    int patience = 8;
    double time_limit = std::numeric_limits<double>::infinity();
    //! optional starting chains; may overlap, missing chains are placed greedily
    std::optional<Embedding> initial_chains;
};

//! Heuristic minor embedding in the style of Cai, Macready and Roy: each
//! variable is placed at the root minimizing the summed weighted distance to
//! its embedded neighbors and connected to them by shortest paths, with node
//! weights growing exponentially in their usage. Rounds re-place every
//! variable until no qubit is shared, then continue while chains shrink.
//! On Pegasus targets without initial chains, failed attempts fall back to
//! trimmed native clique chains. Throws EmbeddingNotFoundError otherwise.
Embedding find_embedding(const LogicalGraph &g, const HardwareGraph &hw, std::uint64_t seed,
                         const EmbeddingOptions &opts = {});

//! Native clique chains on a Pegasus graph: variable i gets one vertical and
//! one horizontal line of qubits spanning a common square window, so every
//! pair of chains crosses. Uses the smallest window that fits n variables.
std::optional<Embedding> pegasus_clique_chains(const HardwareGraph &hw, int n);

//! Removes chain qubits that are not needed for connectivity or coverage.
void trim_chains(const LogicalGraph &g, Embedding &e, const HardwareGraph &hw);

// ---------------------------------------------------------------- embedding a QUBO

inline constexpr double default_chain_strength_factor = 1.414;
double default_chain_strength(const Qubo &q);

struct EmbedQuboOptions {
    //! spread each logical coupling evenly over every inter-chain edge
    bool split_couplings = false;
};

//! Physical problem over the qubits used by an embedding. Physical variable
//! p sits on hardware qubit `qubits[p]` and belongs to chain `chain_of[p]`.
struct EmbeddedQubo {
    Qubo physical;
    std::vector<int> qubits;
    std::vector<int> chain_of;
    //! physical variable indices per logical variable
    std::vector<std::vector<int>> members;
    double chain_strength = 0.0;
};

//! Spreads linear terms uniformly over chains, places couplings on inter-chain
//! edges and binds chain members with cs (b_p + b_q - 2 b_p b_q) per internal
//! edge. Throws InvalidEmbeddingError if e is not valid for q.
EmbeddedQubo embed_qubo(const Qubo &q, const Embedding &e, const HardwareGraph &hw, double chain_strength,
                        const EmbedQuboOptions &opts = {});

enum class UnembedStrategy { majority_vote, discard, energy_min };

struct UnembedResult {
    Bits logical;
    int broken_chains = 0;
    double chain_break_fraction = 0.0;
    //! set by the discard strategy when any chain is broken
    bool discarded = false;
};

//! Maps a physical sample back to logical variables. Majority ties resolve
//! to 1; energy_min settles broken chains one at a time in variable order by
//! the lower logical energy with the other variables held fixed.
UnembedResult unembed(std::span<const std::uint8_t> physical, const EmbeddedQubo &eq, const Qubo &logical,
                      UnembedStrategy strategy);

std::string to_string(UnembedStrategy s);
UnembedStrategy parse_unembed_strategy(const std::string &s);

// ---------------------------------------------------------------- reporting and I/O

struct EmbeddingReport {
    int logical_vars = 0;
    int physical_qubit_count = 0;
    int max_chain_length = 0;
    double embedding_wall_time = 0.0;
    double chain_strength = 0.0;
    //! one entry per virtual solve
    std::vector<double> chain_break_fraction;
};

void write_embedding_report(std::ostream &os, const EmbeddingReport &r);

//! `var: q1 q2 ...` per line with external qubit ids; variables are named by
//! their labels when `labels` is given, else by index.
void write_embedding(std::ostream &os, const Embedding &e, const HardwareGraph &hw,
                     const std::vector<VarId> &labels = {});
Embedding read_embedding(std::istream &is, const HardwareGraph &hw, const std::vector<VarId> &labels = {});

//! Graphviz dump of the used qubits, colored by chain.
void write_embedding_dot(std::ostream &os, const Embedding &e, const HardwareGraph &hw);

// ---------------------------------------------------------------- virtual QPU

struct VirtualQpuResult {
    SampleSet logical;  // unembedded, rescored and merged
    EmbeddingReport report;
};

//! Simulated annealing on the embedded problem followed by unembedding.
//! Discarded reads are dropped; if every read is discarded the set is empty.
VirtualQpuResult virtual_qpu_solve(const Qubo &q, const Embedding &e, const HardwareGraph &hw, double chain_strength,
                                   const SaSchedule &sched, std::uint64_t seed,
                                   UnembedStrategy strategy = UnembedStrategy::majority_vote);

}  // namespace dynqubo
