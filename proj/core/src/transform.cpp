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

#include "dynqubo/transform.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

int BoxProblem::index_of(const VarId &v) const {
    auto it = std::find(inputs.begin(), inputs.end(), v);
    return it == inputs.end() ? -1 : static_cast<int>(it - inputs.begin());
}

BoxProblem eliminate_states(const DynamicOptProblem &problem) {
    problem.validate();
    const int N = problem.horizon;

    // state_expr[t] maps stage-t states to polynomials in the inputs
    std::vector<std::map<VarId, Polynomial>> state_expr(N + 1);
    for (int j = 0; j < problem.state_dim; ++j) {
        state_expr[0][VarId::state(0, j)] = Polynomial(problem.initial_state[j]);
    }
    for (int t = 0; t < N; ++t) {
        std::map<VarId, Polynomial> known;
        for (int j = 0; j < problem.state_dim; ++j) {
            for (const auto &v : problem.dynamics[t][j].variables()) {
                if (v.kind == VarKind::state && v.stage > t) {
                    throw NonExplicitDynamicsError(fmt::format("step map of stage {} references {}", t, to_string(v)));
                }
                if (v.kind == VarKind::state) known[v] = state_expr.at(v.stage).at(v);
                if (v.kind != VarKind::state && v.kind != VarKind::input) {
                    throw NonExplicitDynamicsError(fmt::format("step map of stage {} references non-model variable {}",
                                                               t, to_string(v)));
                }
            }
        }
        for (int j = 0; j < problem.state_dim; ++j) {
            state_expr[t + 1][VarId::state(t + 1, j)] = substitute(problem.dynamics[t][j], known);
        }
    }

    BoxProblem box;
    for (int i = 0; i <= N; ++i) {
        box.objective += substitute(shift_stage(problem.stage_cost, i), state_expr[i]);
    }
    if (!problem.equality_penalties.empty()) {
        std::map<VarId, Polynomial> all;
        for (const auto &stage : state_expr) all.insert(stage.begin(), stage.end());
        for (const auto &pen : problem.equality_penalties) {
            Polynomial r = substitute(pen.residual, all);
            Polynomial term = r * r;
            term *= problem.penalty_weight(pen);
            box.objective += term;
        }
    }
    for (const auto &v : box.objective.variables()) {
        if (v.kind != VarKind::input) {
            throw NonExplicitDynamicsError("objective still references " + to_string(v) + " after elimination");
        }
    }

    box.inputs = problem.decision_inputs();
    for (const auto &v : box.inputs) {
        box.lower.push_back(problem.input_lower.at(v.slot));
        box.upper.push_back(problem.input_upper.at(v.slot));
    }
    box.source = std::make_shared<const DynamicOptProblem>(problem);
    return box;
}

// ------------------------------------------------------------ binarization

double InputEncoding::resolution() const { return (upper - lower) / (std::ldexp(1.0, n_bits) - 1.0); }

double InputEncoding::decode(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != n_bits) throw LengthMismatchError("encoding bit count mismatch");
    double level = 0.0;
    for (int i = 0; i < n_bits; ++i) {
        if (bits[i]) level += std::ldexp(1.0, i);
    }
    return lower + (upper - lower) * (level / (std::ldexp(1.0, n_bits) - 1.0));
}

BinarizationScheme::BinarizationScheme(std::vector<InputEncoding> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const auto &a, const auto &b) { return a.input < b.input; });
    std::map<int, int> next_slot;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const auto &enc = entries_[e];
        if (e > 0 && entries_[e - 1].input == enc.input) throw Error("duplicate input in binarization scheme");
        if (enc.n_bits < 1 || enc.n_bits > 52) throw Error(fmt::format("bit count {} outside [1, 52]", enc.n_bits));
        if (!(enc.lower < enc.upper)) throw Error("binarization bounds must satisfy lower < upper");
        first_slot_.push_back(next_slot[enc.input.stage]);
        next_slot[enc.input.stage] += enc.n_bits;
        total_bits_ += enc.n_bits;
    }
}

BinarizationScheme BinarizationScheme::uniform(const BoxProblem &box, int n_bits) {
    std::vector<InputEncoding> entries;
    for (int i = 0; i < box.size(); ++i) entries.push_back({box.inputs[i], n_bits, box.lower[i], box.upper[i]});
    return BinarizationScheme(std::move(entries));
}

int BinarizationScheme::find(const VarId &input) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), input,
                               [](const InputEncoding &e, const VarId &v) { return e.input < v; });
    return (it != entries_.end() && it->input == input) ? static_cast<int>(it - entries_.begin()) : -1;
}

VarId BinarizationScheme::bit_var(std::size_t entry, int bit) const {
    return VarId::binary(entries_.at(entry).input.stage, first_slot_.at(entry) + bit);
}

std::vector<VarId> BinarizationScheme::bit_vars() const {
    std::vector<VarId> out;
    out.reserve(total_bits_);
    for (std::size_t e = 0; e < entries_.size(); ++e)
        for (int b = 0; b < entries_[e].n_bits; ++b) out.push_back(bit_var(e, b));
    return out;
}

Polynomial BinarizationScheme::encoding(std::size_t entry) const {
    const auto &enc = entries_.at(entry);
    const double scale = (enc.upper - enc.lower) / (std::ldexp(1.0, enc.n_bits) - 1.0);
    Polynomial::TermMap terms;
    terms[Monomial{}] = enc.lower;
    for (int b = 0; b < enc.n_bits; ++b) terms[Monomial(bit_var(entry, b))] = scale * std::ldexp(1.0, b);
    return Polynomial(std::move(terms));
}

std::vector<double> BinarizationScheme::decode(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != total_bits_) {
        throw LengthMismatchError(fmt::format("sample has {} bits, scheme needs {}", bits.size(), total_bits_));
    }
    std::vector<double> values;
    values.reserve(entries_.size());
    std::size_t pos = 0;
    for (const auto &enc : entries_) {
        values.push_back(enc.decode(bits.subspan(pos, enc.n_bits)));
        pos += enc.n_bits;
    }
    return values;
}

Polynomial binarize(const BoxProblem &box, const BinarizationScheme &scheme) {
    std::map<VarId, Polynomial> replacements;
    for (const auto &v : box.inputs) {
        int e = scheme.find(v);
        if (e < 0) throw MissingSchemeError("no binarization entry for " + to_string(v));
        replacements.emplace(v, scheme.encoding(e));
    }
    for (const auto &v : box.objective.variables()) {
        if (!replacements.count(v)) throw MissingSchemeError("objective variable " + to_string(v) + " not in box inputs");
    }
    return substitute(box.objective, replacements);
}

// ----------------------------------------------------------- quadratization

double default_quadratization_penalty(const Polynomial &p) { return 10.0 * p.max_abs_coefficient(); }

Quadratization quadratize(const Polynomial &p, std::optional<double> penalty) {
    int next_aux = 0;
    for (const auto &[m, c] : p.terms()) {
        for (const auto &[v, e] : m.factors()) {
            if (!is_boolean(v.kind)) throw NotMultilinearError("quadratize needs boolean variables, got " + to_string(v));
            if (e != 1) throw NotMultilinearError("exponent above one on " + to_string(v));
            if (v.kind == VarKind::auxiliary) next_aux = std::max(next_aux, v.slot + 1);
        }
    }
    Quadratization out;
    out.penalty = penalty.value_or(default_quadratization_penalty(p));
    if (!(out.penalty > 0.0) && total_degree(p) > 2) throw Error("quadratization penalty must be positive");

    Polynomial::TermMap terms = p.terms();
    while (true) {
        std::map<std::pair<VarId, VarId>, int> pair_count;
        for (const auto &[m, c] : terms) {
            if (m.degree() <= 2) continue;
            const auto &f = m.factors();
            for (std::size_t a = 0; a < f.size(); ++a)
                for (std::size_t b = a + 1; b < f.size(); ++b) ++pair_count[{f[a].first, f[b].first}];
        }
        if (pair_count.empty()) break;
        auto best = pair_count.begin();
        for (auto it = pair_count.begin(); it != pair_count.end(); ++it) {
            if (it->second > best->second) best = it;
        }
        const auto [x, y] = best->first;
        const VarId aux = VarId::auxiliary(next_aux++);
        out.auxiliaries.push_back({aux, x, y});

        TermAccumulator next;
        for (const auto &[m, c] : terms) {
            if (m.degree() > 2 && m.contains(x) && m.contains(y)) {
                next.add(m.without(x).without(y) * Monomial(aux), c);
            } else {
                next.add(m, c);
            }
        }
        const double M = out.penalty;
        next.add(Monomial({{x, 1}, {y, 1}}), M);
        next.add(Monomial({{x, 1}, {aux, 1}}), -2.0 * M);
        next.add(Monomial({{y, 1}, {aux, 1}}), -2.0 * M);
        next.add(Monomial(aux), 3.0 * M);
        terms = std::move(next).finish().terms();
    }
    out.polynomial = Polynomial(std::move(terms));
    return out;
}

Qubo assemble_qubo(const Polynomial &p, const std::vector<VarId> &order) {
    if (total_degree(p) > 2) throw DegreeTooHighError(fmt::format("degree {} polynomial is not quadratic", total_degree(p)));
    std::vector<VarId> labels = order;
    std::set<VarId> listed(order.begin(), order.end());
    if (listed.size() != order.size()) throw Error("duplicate variable in qubo order");
    for (const auto &v : p.variables()) {
        if (!listed.count(v)) labels.push_back(v);
    }
    std::map<VarId, int> index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!is_boolean(labels[i].kind)) throw Error("qubo variable " + to_string(labels[i]) + " is not boolean");
        index[labels[i]] = static_cast<int>(i);
    }
    Qubo q(static_cast<int>(labels.size()));
    for (const auto &[m, c] : p.terms()) {
        const auto &f = m.factors();
        if (f.empty()) {
            q.add_offset(c);
        } else if (f.size() == 1) {
            int i = index.at(f[0].first);
            q.add(i, i, c);
        } else {
            q.add(index.at(f[0].first), index.at(f[1].first), c);
        }
    }
    q.set_labels(std::move(labels));
    return q;
}

CompiledProblem compile(const DynamicOptProblem &problem, int bits_per_input) {
    CompiledProblem out;
    out.box = eliminate_states(problem);
    out.problem = out.box.source;
    out.scheme = BinarizationScheme::uniform(out.box, bits_per_input);
    out.binary_objective = binarize(out.box, out.scheme);
    out.quadratized = quadratize(out.binary_objective);
    out.qubo = assemble_qubo(out.quadratized.polynomial, out.scheme.bit_vars());
    return out;
}

}  // namespace dynqubo
