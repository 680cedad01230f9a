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

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dynqubo {

enum class VarKind : std::uint8_t { state = 0, input = 1, binary = 2, auxiliary = 3 };

//! binary and auxiliary variables take values in {0, 1}
constexpr bool is_boolean(VarKind k) { return k == VarKind::binary || k == VarKind::auxiliary; }

//! Identifies a scalar variable by namespace, time index and component index.
struct VarId {
    VarKind kind = VarKind::state;
    int stage = 0;
    int slot = 0;

    auto operator<=>(const VarId &) const = default;

    static VarId state(int stage, int slot) { return {VarKind::state, stage, slot}; }
    static VarId input(int stage, int slot) { return {VarKind::input, stage, slot}; }
    static VarId binary(int stage, int slot) { return {VarKind::binary, stage, slot}; }
    static VarId auxiliary(int slot) { return {VarKind::auxiliary, 0, slot}; }
};

//! Text form `x:stage:slot` with x in {s, u, b, a}.
std::string to_string(const VarId &v);
VarId parse_var_id(const std::string &text);
std::ostream &operator<<(std::ostream &os, const VarId &v);

//! A product of variables with positive integer exponents.
//!
//! Factors are kept sorted by VarId; boolean variables always carry exponent 1
//! since b*b = b on {0, 1}.
class Monomial {
  public:
    using Factor = std::pair<VarId, int>;

    Monomial() = default;
    explicit Monomial(const VarId &v, int exponent = 1);
    explicit Monomial(std::vector<Factor> factors);

    const std::vector<Factor> &factors() const { return factors_; }
    int degree() const { return degree_; }
    bool is_unit() const { return factors_.empty(); }
    //! exponent of v, 0 if absent
    int exponent(const VarId &v) const;
    bool contains(const VarId &v) const { return exponent(v) > 0; }
    //! the monomial with v removed
    Monomial without(const VarId &v) const;

    friend Monomial operator*(const Monomial &a, const Monomial &b);
    friend bool operator==(const Monomial &a, const Monomial &b) { return a.factors_ == b.factors_; }

  private:
    std::vector<Factor> factors_;
    int degree_ = 0;
};

//! Orders monomials by total degree, then lexicographically by factors.
struct MonomialOrder {
    bool operator()(const Monomial &a, const Monomial &b) const;
};

using Assignment = std::map<VarId, double>;

//! Sparse multivariate polynomial with real coefficients in canonical form.
//!
//! Canonical form: no exactly-zero coefficients and no cancellation residue.
//! A coefficient formed by summing contributions is dropped when its magnitude
//! falls below 1e-15 times the largest contribution. Every operation returns a
//! canonical polynomial.
class Polynomial {
  public:
    using TermMap = std::map<Monomial, double, MonomialOrder>;

    static constexpr double drop_tolerance = 1e-15;

    Polynomial() = default;
    Polynomial(double constant);  // NOLINT(google-explicit-constructor)
    explicit Polynomial(const VarId &v);
    Polynomial(std::initializer_list<std::pair<Monomial, double>> terms);
    explicit Polynomial(TermMap terms);

    const TermMap &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    //! coefficient of m, 0 if absent
    double coefficient(const Monomial &m) const;
    double constant_term() const { return coefficient(Monomial{}); }
    double max_abs_coefficient() const;
    std::vector<VarId> variables() const;
    bool contains(const VarId &v) const;

    Polynomial &operator+=(const Polynomial &q);
    Polynomial &operator-=(const Polynomial &q);
    Polynomial &operator*=(const Polynomial &q);
    Polynomial &operator*=(double s);

    friend bool operator==(const Polynomial &a, const Polynomial &b) { return a.terms_ == b.terms_; }

  private:
    friend class TermAccumulator;
    void canonicalize();
    TermMap terms_;
};

//! Sums contributions per monomial and drops cancellation residue on finish().
class TermAccumulator {
  public:
    void add(const Monomial &m, double c);
    void add(const Polynomial &p, double scale = 1.0);
    Polynomial finish() &&;

  private:
    struct Slot {
        double sum = 0.0;
        double largest = 0.0;
    };
    std::map<Monomial, Slot, MonomialOrder> slots_;
};

Polynomial add(const Polynomial &p, const Polynomial &q);
Polynomial mul(const Polynomial &p, const Polynomial &q);
Polynomial operator+(const Polynomial &p, const Polynomial &q);
Polynomial operator-(const Polynomial &p, const Polynomial &q);
Polynomial operator-(const Polynomial &p);
Polynomial operator*(const Polynomial &p, const Polynomial &q);
Polynomial pow(const Polynomial &p, int exponent);

//! Replaces every occurrence of `target` with `replacement`.
//! Throws SelfReferenceError if `replacement` mentions `target`.
Polynomial substitute(const Polynomial &p, const VarId &target, const Polynomial &replacement);

//! Simultaneous substitution of several variables. No replacement may mention
//! any of the targets.
Polynomial substitute(const Polynomial &p, const std::map<VarId, Polynomial> &replacements);

//! Renames variables; `rename` must be injective on the variables of p.
Polynomial map_variables(const Polynomial &p, const std::function<VarId(const VarId &)> &rename);

//! Throws UnboundVariableError naming every missing variable.
double evaluate(const Polynomial &p, const Assignment &assignment);

int total_degree(const Polynomial &p);

Polynomial derivative(const Polynomial &p, const VarId &v);

//! Serializes one term per line as `coefficient var^exp ...`, in canonical order.
void write_polynomial(std::ostream &os, const Polynomial &p);
Polynomial read_polynomial(std::istream &is);
std::string to_string(const Polynomial &p);
std::ostream &operator<<(std::ostream &os, const Polynomial &p);

}  // namespace dynqubo
