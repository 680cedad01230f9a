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

#include "dynqubo/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

namespace {

char kind_char(VarKind k) {
    switch (k) {
        case VarKind::state: return 's';
        case VarKind::input: return 'u';
        case VarKind::binary: return 'b';
        case VarKind::auxiliary: return 'a';
    }
    return '?';
}

}  // namespace

std::string to_string(const VarId &v) { return fmt::format("{}:{}:{}", kind_char(v.kind), v.stage, v.slot); }

std::ostream &operator<<(std::ostream &os, const VarId &v) { return os << to_string(v); }

VarId parse_var_id(const std::string &text) {
    VarId v;
    if (text.size() < 5 || text[1] != ':') throw ParseError("malformed variable id '" + text + "'");
    switch (text[0]) {
        case 's': v.kind = VarKind::state; break;
        case 'u': v.kind = VarKind::input; break;
        case 'b': v.kind = VarKind::binary; break;
        case 'a': v.kind = VarKind::auxiliary; break;
        default: throw ParseError("unknown variable namespace in '" + text + "'");
    }
    auto colon = text.find(':', 2);
    if (colon == std::string::npos) throw ParseError("malformed variable id '" + text + "'");
    try {
        std::size_t used = 0;
        v.stage = std::stoi(text.substr(2, colon - 2), &used);
        if (used != colon - 2) throw ParseError("malformed stage in '" + text + "'");
        v.slot = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw ParseError("malformed slot in '" + text + "'");
    } catch (const std::logic_error &) {
        throw ParseError("malformed variable id '" + text + "'");
    }
    if (v.stage < 0 || v.slot < 0) throw ParseError("negative index in '" + text + "'");
    return v;
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(const VarId &v, int exponent) {
    if (exponent < 0) throw Error("negative exponent");
    if (exponent == 0) return;
    if (is_boolean(v.kind)) exponent = 1;
    factors_.emplace_back(v, exponent);
    degree_ = exponent;
}

Monomial::Monomial(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end(), [](const Factor &a, const Factor &b) { return a.first < b.first; });
    for (auto &[v, e] : factors) {
        if (e < 0) throw Error("negative exponent");
        if (e == 0) continue;
        if (!factors_.empty() && factors_.back().first == v) {
            factors_.back().second += e;
        } else {
            factors_.emplace_back(v, e);
        }
    }
    for (auto &[v, e] : factors_) {
        if (is_boolean(v.kind)) e = 1;
        degree_ += e;
    }
}

int Monomial::exponent(const VarId &v) const {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                               [](const Factor &f, const VarId &x) { return f.first < x; });
    return (it != factors_.end() && it->first == v) ? it->second : 0;
}

Monomial Monomial::without(const VarId &v) const {
    Monomial out;
    for (const auto &f : factors_) {
        if (f.first == v) continue;
        out.factors_.push_back(f);
        out.degree_ += f.second;
    }
    return out;
}

Monomial operator*(const Monomial &a, const Monomial &b) {
    Monomial out;
    out.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() || j != b.factors_.end()) {
        if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
            out.factors_.push_back(*i++);
        } else if (i == a.factors_.end() || j->first < i->first) {
            out.factors_.push_back(*j++);
        } else {
            int e = is_boolean(i->first.kind) ? 1 : i->second + j->second;
            out.factors_.emplace_back(i->first, e);
            ++i;
            ++j;
        }
    }
    for (const auto &f : out.factors_) out.degree_ += f.second;
    return out;
}

bool MonomialOrder::operator()(const Monomial &a, const Monomial &b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.factors() < b.factors();
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(double constant) {
    if (constant != 0.0) terms_.emplace(Monomial{}, constant);
}

Polynomial::Polynomial(const VarId &v) { terms_.emplace(Monomial(v), 1.0); }

Polynomial::Polynomial(std::initializer_list<std::pair<Monomial, double>> terms) {
    TermAccumulator acc;
    for (const auto &[m, c] : terms) acc.add(m, c);
    *this = std::move(acc).finish();
}

Polynomial::Polynomial(TermMap terms) : terms_(std::move(terms)) { canonicalize(); }

void Polynomial::canonicalize() { std::erase_if(terms_, [](const auto &t) { return t.second == 0.0; }); }

void TermAccumulator::add(const Monomial &m, double c) {
    Slot &s = slots_[m];
    s.sum += c;
    s.largest = std::max(s.largest, std::abs(c));
}

void TermAccumulator::add(const Polynomial &p, double scale) {
    for (const auto &[m, c] : p.terms()) add(m, scale * c);
}

Polynomial TermAccumulator::finish() && {
    Polynomial out;
    for (auto &[m, s] : slots_) {
        if (s.sum == 0.0 || std::abs(s.sum) < Polynomial::drop_tolerance * s.largest) continue;
        out.terms_.emplace_hint(out.terms_.end(), m, s.sum);
    }
    slots_.clear();
    return out;
}

double Polynomial::coefficient(const Monomial &m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto &[mono, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

std::vector<VarId> Polynomial::variables() const {
    std::set<VarId> vars;
    for (const auto &[m, c] : terms_)
        for (const auto &f : m.factors()) vars.insert(f.first);
    return {vars.begin(), vars.end()};
}

bool Polynomial::contains(const VarId &v) const {
    return std::any_of(terms_.begin(), terms_.end(), [&](const auto &t) { return t.first.contains(v); });
}

Polynomial &Polynomial::operator+=(const Polynomial &q) {
    TermAccumulator acc;
    acc.add(*this);
    acc.add(q);
    return *this = std::move(acc).finish();
}

Polynomial &Polynomial::operator-=(const Polynomial &q) {
    TermAccumulator acc;
    acc.add(*this);
    acc.add(q, -1.0);
    return *this = std::move(acc).finish();
}

Polynomial &Polynomial::operator*=(const Polynomial &q) {
    TermAccumulator acc;
    for (const auto &[ma, ca] : terms_)
        for (const auto &[mb, cb] : q.terms_) acc.add(ma * mb, ca * cb);
    return *this = std::move(acc).finish();
}

Polynomial &Polynomial::operator*=(double s) {
    for (auto &[m, c] : terms_) c *= s;
    canonicalize();
    return *this;
}

Polynomial add(const Polynomial &p, const Polynomial &q) {
    Polynomial r = p;
    r += q;
    return r;
}

Polynomial mul(const Polynomial &p, const Polynomial &q) {
    Polynomial r = p;
    r *= q;
    return r;
}

Polynomial operator+(const Polynomial &p, const Polynomial &q) { return add(p, q); }
Polynomial operator-(const Polynomial &p, const Polynomial &q) {
    Polynomial r = p;
    r -= q;
    return r;
}
Polynomial operator-(const Polynomial &p) {
    Polynomial r = p;
    r *= -1.0;
    return r;
}
Polynomial operator*(const Polynomial &p, const Polynomial &q) { return mul(p, q); }

Polynomial pow(const Polynomial &p, int exponent) {
    if (exponent < 0) throw Error("negative polynomial power");
    Polynomial result(1.0);
    Polynomial base = p;
    while (exponent > 0) {
        if (exponent & 1) result *= base;
        exponent >>= 1;
        if (exponent > 0) base *= base;
    }
    return result;
}

Polynomial substitute(const Polynomial &p, const VarId &target, const Polynomial &replacement) {
    return substitute(p, std::map<VarId, Polynomial>{{target, replacement}});
}

Polynomial substitute(const Polynomial &p, const std::map<VarId, Polynomial> &replacements) {
    for (const auto &[target, r] : replacements) {
        for (const auto &[other, unused] : replacements) {
            if (r.contains(other)) {
                throw SelfReferenceError("replacement for " + to_string(target) + " mentions substituted variable " +
                                         to_string(other));
            }
        }
    }
    std::map<std::pair<VarId, int>, Polynomial> powers;
    auto power_of = [&](const VarId &v, int e) -> const Polynomial & {
        auto key = std::make_pair(v, e);
        auto it = powers.find(key);
        if (it == powers.end()) it = powers.emplace(key, pow(replacements.at(v), e)).first;
        return it->second;
    };

    TermAccumulator out;
    for (const auto &[m, c] : p.terms()) {
        std::vector<Monomial::Factor> kept;
        std::vector<const Polynomial *> expanded;
        for (const auto &[v, e] : m.factors()) {
            if (replacements.count(v)) {
                expanded.push_back(&power_of(v, e));
            } else {
                kept.emplace_back(v, e);
            }
        }
        if (expanded.empty()) {
            out.add(m, c);
            continue;
        }
        Polynomial::TermMap partial{{Monomial(std::move(kept)), c}};
        for (const Polynomial *factor : expanded) {
            Polynomial::TermMap next;
            for (const auto &[ma, ca] : partial)
                for (const auto &[mb, cb] : factor->terms()) next[ma * mb] += ca * cb;
            partial = std::move(next);
        }
        for (const auto &[mm, cc] : partial) out.add(mm, cc);
    }
    return std::move(out).finish();
}

Polynomial map_variables(const Polynomial &p, const std::function<VarId(const VarId &)> &rename) {
    TermAccumulator out;
    for (const auto &[m, c] : p.terms()) {
        std::vector<Monomial::Factor> factors;
        factors.reserve(m.factors().size());
        for (const auto &[v, e] : m.factors()) factors.emplace_back(rename(v), e);
        out.add(Monomial(std::move(factors)), c);
    }
    return std::move(out).finish();
}

double evaluate(const Polynomial &p, const Assignment &assignment) {
    std::set<VarId> missing;
    double total = 0.0;
    for (const auto &[m, c] : p.terms()) {
        double term = c;
        for (const auto &[v, e] : m.factors()) {
            auto it = assignment.find(v);
            if (it == assignment.end()) {
                missing.insert(v);
                continue;
            }
            double x = it->second;
            double xe = x;
            for (int k = 1; k < e; ++k) xe *= x;
            term *= xe;
        }
        total += term;
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto &v : missing) names += (names.empty() ? "" : ", ") + to_string(v);
        throw UnboundVariableError("unbound variables: " + names);
    }
    return total;
}

int total_degree(const Polynomial &p) {
    int d = 0;
    for (const auto &[m, c] : p.terms()) d = std::max(d, m.degree());
    return d;
}

Polynomial derivative(const Polynomial &p, const VarId &v) {
    Polynomial::TermMap out;
    for (const auto &[m, c] : p.terms()) {
        int e = m.exponent(v);
        if (e == 0) continue;
        Monomial rest = m.without(v) * Monomial(v, e - 1);
        out[rest] += c * e;
    }
    return Polynomial(std::move(out));
}

void write_polynomial(std::ostream &os, const Polynomial &p) {
    for (const auto &[m, c] : p.terms()) {
        os << fmt::format("{:.17g}", c);
        for (const auto &[v, e] : m.factors()) os << ' ' << to_string(v) << '^' << e;
        os << '\n';
    }
}

Polynomial read_polynomial(std::istream &is) {
    Polynomial::TermMap terms;
    std::string line;
    while (std::getline(is, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double c = 0.0;
        if (!(ls >> c)) throw ParseError("bad coefficient in line '" + line + "'");
        std::vector<Monomial::Factor> factors;
        std::string tok;
        while (ls >> tok) {
            auto caret = tok.find('^');
            int e = 1;
            if (caret != std::string::npos) {
                try {
                    e = std::stoi(tok.substr(caret + 1));
                } catch (const std::logic_error &) {
                    throw ParseError("bad exponent in '" + tok + "'");
                }
                if (e < 1) throw ParseError("non-positive exponent in '" + tok + "'");
            }
            factors.emplace_back(parse_var_id(tok.substr(0, caret)), e);
        }
        terms[Monomial(std::move(factors))] += c;
    }
    return Polynomial(std::move(terms));
}

std::ostream &operator<<(std::ostream &os, const Polynomial &p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (const auto &[m, c] : p.terms()) {
        os << (first ? "" : " + ") << c;
        for (const auto &[v, e] : m.factors()) os << '*' << to_string(v) << (e > 1 ? fmt::format("^{}", e) : "");
        first = false;
    }
    return os;
}

std::string to_string(const Polynomial &p) {
    std::ostringstream os;
    write_polynomial(os, p);
    return os.str();
}

}  // namespace dynqubo
