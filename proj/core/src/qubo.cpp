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

#include "dynqubo/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

Qubo::Qubo(int n_vars, double offset) : n_vars_(n_vars), offset_(offset) {
    if (n_vars < 0) throw Error("negative variable count");
}

void Qubo::check_index(int i) const {
    if (i < 0 || i >= n_vars_) throw Error(fmt::format("qubo index {} outside [0, {})", i, n_vars_));
}

void Qubo::add(int i, int j, double v) {
    check_index(i);
    check_index(j);
    if (i > j) std::swap(i, j);
    if (v == 0.0) return;
    auto [it, inserted] = coeffs_.try_emplace({i, j}, v);
    if (!inserted) {
        it->second += v;
        if (it->second == 0.0) coeffs_.erase(it);
    }
}

double Qubo::get(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = coeffs_.find({i, j});
    return it == coeffs_.end() ? 0.0 : it->second;
}

double Qubo::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto &[k, v] : coeffs_) m = std::max(m, std::abs(v));
    return m;
}

void Qubo::set_labels(std::vector<VarId> labels) {
    if (!labels.empty() && static_cast<int>(labels.size()) != n_vars_) throw Error("label count differs from n_vars");
    labels_ = std::move(labels);
}

int Qubo::index_of(const VarId &v) const {
    auto it = std::find(labels_.begin(), labels_.end(), v);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

double Qubo::energy(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != n_vars_) {
        throw LengthMismatchError(fmt::format("assignment has {} bits, qubo has {} variables", bits.size(), n_vars_));
    }
    double e = offset_;
    for (const auto &[k, v] : coeffs_) {
        if (bits[k.first] && bits[k.second]) e += v;
    }
    return e;
}

std::vector<std::vector<int>> Qubo::adjacency() const {
    std::vector<std::vector<int>> adj(n_vars_);
    for (const auto &[k, v] : coeffs_) {
        if (k.first == k.second) continue;
        adj[k.first].push_back(k.second);
        adj[k.second].push_back(k.first);
    }
    for (auto &a : adj) std::sort(a.begin(), a.end());
    return adj;
}

QuboAdjacency::QuboAdjacency(const Qubo &q) : n(q.n_vars()), offset(q.offset()), linear(q.n_vars(), 0.0) {
    std::vector<int> degree(n, 0);
    for (const auto &[k, v] : q.coefficients()) {
        if (k.first == k.second) {
            linear[k.first] = v;
        } else {
            ++degree[k.first];
            ++degree[k.second];
        }
    }
    row_start.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) row_start[i + 1] = row_start[i] + degree[i];
    neighbor.resize(row_start[n]);
    weight.resize(row_start[n]);
    std::vector<int> fill(row_start.begin(), row_start.end() - 1);
    for (const auto &[k, v] : q.coefficients()) {
        if (k.first == k.second) continue;
        neighbor[fill[k.first]] = k.second;
        weight[fill[k.first]++] = v;
        neighbor[fill[k.second]] = k.first;
        weight[fill[k.second]++] = v;
    }
}

double QuboAdjacency::energy(std::span<const std::uint8_t> bits) const {
    double e = offset;
    for (int i = 0; i < n; ++i) {
        if (!bits[i]) continue;
        e += linear[i];
        for (int p = row_start[i]; p < row_start[i + 1]; ++p) {
            if (neighbor[p] > i && bits[neighbor[p]]) e += weight[p];
        }
    }
    return e;
}

void QuboAdjacency::compute_fields(std::span<const std::uint8_t> bits, std::vector<double> &fields) const {
    fields.assign(linear.begin(), linear.end());
    for (int i = 0; i < n; ++i) {
        for (int p = row_start[i]; p < row_start[i + 1]; ++p) {
            if (bits[neighbor[p]]) fields[i] += weight[p];
        }
    }
}

void QuboAdjacency::flip(int i, std::vector<std::uint8_t> &bits, std::vector<double> &fields) const {
    const double sign = bits[i] ? -1.0 : 1.0;
    bits[i] ^= 1;
    for (int p = row_start[i]; p < row_start[i + 1]; ++p) fields[neighbor[p]] += sign * weight[p];
}

void write_qubo(std::ostream &os, const Qubo &q) {
    for (int i = 0; i < static_cast<int>(q.labels().size()); ++i) {
        os << "# label " << i << ' ' << to_string(q.labels()[i]) << '\n';
    }
    os << fmt::format("qubo {} {} {:.17g}\n", q.n_vars(), q.n_terms(), q.offset());
    for (const auto &[k, v] : q.coefficients()) os << fmt::format("{} {} {:.17g}\n", k.first, k.second, v);
}

Qubo read_qubo(std::istream &is) {
    std::string line;
    std::vector<std::pair<int, VarId>> labels;
    bool have_header = false;
    int n_vars = 0;
    std::size_t n_terms = 0;
    double offset = 0.0;
    Qubo q;
    std::size_t seen = 0;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::istringstream ls(line.substr(first));
        if (line[first] == '#') {
            std::string hash, word;
            ls >> hash >> word;
            if (word == "label") {
                int idx = -1;
                std::string id;
                if (!(ls >> idx >> id)) throw ParseError(fmt::format("line {}: malformed label comment", line_no));
                labels.emplace_back(idx, parse_var_id(id));
            }
            continue;
        }
        if (!have_header) {
            std::string tag;
            if (!(ls >> tag >> n_vars >> n_terms >> offset) || tag != "qubo" || n_vars < 0) {
                throw ParseError(fmt::format("line {}: expected 'qubo <n_vars> <n_terms> <offset>'", line_no));
            }
            q = Qubo(n_vars, offset);
            have_header = true;
            continue;
        }
        int i = 0, j = 0;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) throw ParseError(fmt::format("line {}: expected 'i j value'", line_no));
        if (i > j || i < 0 || j >= n_vars) {
            throw ParseError(fmt::format("line {}: index pair ({}, {}) invalid for {} variables", line_no, i, j, n_vars));
        }
        q.add(i, j, v);
        ++seen;
    }
    if (!have_header) throw ParseError("missing qubo header");
    if (seen != n_terms) throw ParseError(fmt::format("header announces {} terms, found {}", n_terms, seen));
    if (!labels.empty()) {
        std::vector<VarId> ordered(n_vars);
        std::vector<bool> set(n_vars, false);
        for (const auto &[idx, v] : labels) {
            if (idx < 0 || idx >= n_vars) throw ParseError(fmt::format("label index {} out of range", idx));
            ordered[idx] = v;
            set[idx] = true;
        }
        if (std::find(set.begin(), set.end(), false) != set.end()) throw ParseError("incomplete variable labels");
        q.set_labels(std::move(ordered));
    }
    return q;
}

void save_qubo(const std::string &path, const Qubo &q) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write qubo file '" + path + "'");
    write_qubo(out, q);
    if (!out) throw IoError("error while writing '" + path + "'");
}

Qubo load_qubo(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open qubo file '" + path + "'");
    try {
        return read_qubo(in);
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
    return s;
}

Bits bits_from_string(const std::string &s) {
    Bits b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') throw ParseError("bitstring contains '" + std::string(1, s[i]) + "'");
        b[i] = s[i] == '1';
    }
    return b;
}

}  // namespace dynqubo
