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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynqubo/polynomial.hpp"

namespace dynqubo {

using Bits = std::vector<std::uint8_t>;

//! Quadratic unconstrained binary objective
//!     E(b) = offset + sum_i Q_ii b_i + sum_{i<j} Q_ij b_i b_j
//! stored as an upper-triangular map without zero entries.
class Qubo {
  public:
    using Key = std::pair<int, int>;

    Qubo() = default;
    explicit Qubo(int n_vars, double offset = 0.0);

    int n_vars() const { return n_vars_; }
    double offset() const { return offset_; }
    void set_offset(double offset) { offset_ = offset; }
    void add_offset(double delta) { offset_ += delta; }

    //! Accumulates v into Q_ij (indices may be given in either order).
    void add(int i, int j, double v);
    double get(int i, int j) const;
    const std::map<Key, double> &coefficients() const { return coeffs_; }
    std::size_t n_terms() const { return coeffs_.size(); }
    double max_abs_coefficient() const;

    //! Optional variable labels; empty for unlabeled (e.g. physical) problems.
    const std::vector<VarId> &labels() const { return labels_; }
    void set_labels(std::vector<VarId> labels);
    //! -1 if absent
    int index_of(const VarId &v) const;

    double energy(std::span<const std::uint8_t> bits) const;
    //! neighbor lists of the coupling graph (i != j, Q_ij != 0)
    std::vector<std::vector<int>> adjacency() const;

    friend bool operator==(const Qubo &a, const Qubo &b) {
        return a.n_vars_ == b.n_vars_ && a.offset_ == b.offset_ && a.coeffs_ == b.coeffs_ && a.labels_ == b.labels_;
    }

  private:
    void check_index(int i) const;

    int n_vars_ = 0;
    double offset_ = 0.0;
    std::map<Key, double> coeffs_;
    std::vector<VarId> labels_;
};

//! Compressed adjacency used by the local-search solvers. The local field
//! f_i = Q_ii + sum_j Q_ij b_j gives the flip cost (1 - 2 b_i) f_i.
struct QuboAdjacency {
    explicit QuboAdjacency(const Qubo &q);

    int n = 0;
    double offset = 0.0;
    std::vector<double> linear;
    std::vector<int> row_start;
    std::vector<int> neighbor;
    std::vector<double> weight;

    double energy(std::span<const std::uint8_t> bits) const;
    void compute_fields(std::span<const std::uint8_t> bits, std::vector<double> &fields) const;
    //! flips bit i and updates fields of its neighbors
    void flip(int i, std::vector<std::uint8_t> &bits, std::vector<double> &fields) const;
    double flip_delta(int i, std::span<const std::uint8_t> bits, std::span<const double> fields) const {
        return bits[i] ? -fields[i] : fields[i];
    }
};

//! Text format: a header `qubo <n_vars> <n_terms> <offset>` followed by one
//! `i j value` line per nonzero coefficient (i <= j, zero-based, sorted).
//! Lines starting with '#' are comments; `# label <i> <varid>` comments carry
//! variable labels.
void write_qubo(std::ostream &os, const Qubo &q);
Qubo read_qubo(std::istream &is);
void save_qubo(const std::string &path, const Qubo &q);
Qubo load_qubo(const std::string &path);

std::string bits_to_string(std::span<const std::uint8_t> bits);
Bits bits_from_string(const std::string &s);

}  // namespace dynqubo
