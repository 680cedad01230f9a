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

#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "dynqubo/errors.hpp"
#include "dynqubo/polynomial.hpp"
#include "support/oracles.hpp"

using namespace dynqubo;

namespace {

const VarId X = VarId::state(0, 0);
const VarId Y = VarId::state(0, 1);
const VarId Z = VarId::input(0, 0);
const VarId W = VarId::input(1, 0);
const VarId B0 = VarId::binary(0, 0);
const VarId B1 = VarId::binary(0, 1);
const VarId B2 = VarId::binary(0, 2);

Polynomial v(const VarId &id) { return Polynomial(id); }

Polynomial random_poly(std::mt19937_64 &rng, const std::vector<VarId> &vars, int max_terms, int max_exp) {
    std::uniform_int_distribution<int> nterms(0, max_terms), exp(0, max_exp);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    Polynomial::TermMap terms;
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        std::vector<Monomial::Factor> f;
        for (const auto &x : vars) f.emplace_back(x, exp(rng));
        terms[Monomial(f)] += coef(rng);
    }
    return Polynomial(std::move(terms));
}

Assignment random_assignment(std::mt19937_64 &rng, const std::vector<VarId> &vars) {
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    Assignment a;
    for (const auto &x : vars) a[x] = is_boolean(x.kind) ? double(rng() & 1) : val(rng);
    return a;
}

}  // namespace

TEST(Polynomial, AddCancellationAndIdentity) {
    EXPECT_EQ(add(v(X) + 1.0, -v(X)), Polynomial(1.0));
    Polynomial p = v(X) * v(Y) + 2.0;
    EXPECT_EQ(add(p, Polynomial()), p);
    // (2x^2 + y) + (x^2 - y) = 3x^2
    Polynomial lhs = Polynomial(2.0) * v(X) * v(X) + v(Y);
    Polynomial rhs = v(X) * v(X) - v(Y);
    Polynomial sum = add(lhs, rhs);
    ASSERT_EQ(sum.size(), 1u);
    EXPECT_DOUBLE_EQ(sum.coefficient(Monomial(X, 2)), 3.0);
}

TEST(Polynomial, MulDifferenceOfSquaresAndIdempotence) {
    Polynomial prod = mul(v(X) + 1.0, v(X) - 1.0);
    EXPECT_EQ(prod, Polynomial({{Monomial(X, 2), 1.0}, {Monomial{}, -1.0}}));
    EXPECT_EQ(mul(v(B0), v(B0)), v(B0));
    Polynomial sq = pow(v(B0) + v(B1), 2);
    EXPECT_EQ(sq, Polynomial({{Monomial(B0), 1.0}, {Monomial(B1), 1.0}, {Monomial({{B0, 1}, {B1, 1}}), 2.0}}));
}

TEST(Polynomial, SubstituteExamples) {
    Polynomial r = substitute(v(X) * v(X), X, v(Y) + 1.0);
    EXPECT_EQ(r, Polynomial({{Monomial(Y, 2), 1.0}, {Monomial(Y), 2.0}, {Monomial{}, 1.0}}));

    Polynomial p = v(Y) * v(Z) + 4.0;
    EXPECT_EQ(substitute(p, X, v(W)), p);

    // 3xz + z with z := 2w -> 6xw + 2w
    Polynomial q = Polynomial(3.0) * v(X) * v(Z) + v(Z);
    Polynomial s = substitute(q, Z, Polynomial(2.0) * v(W));
    EXPECT_EQ(s, Polynomial({{Monomial({{X, 1}, {W, 1}}), 6.0}, {Monomial(W), 2.0}}));
    EXPECT_FALSE(s.contains(Z));
}

TEST(Polynomial, SubstituteRejectsSelfReference) {
    EXPECT_THROW(substitute(v(X), X, v(X) + 1.0), SelfReferenceError);
}

TEST(Polynomial, EvaluateExamples) {
    EXPECT_DOUBLE_EQ(evaluate(v(X) * v(X) + 1.0, {{X, 0.0}}), 1.0);
    EXPECT_DOUBLE_EQ(evaluate(v(X) * v(Y), {{X, 2.0}, {Y, 3.0}}), 6.0);
    // one affine concentration step with rounded coefficients
    double c1 = evaluate(Polynomial(0.73823) * v(X) + 0.165922, {{X, 877.0}});
    EXPECT_NEAR(c1, 0.73823 * 877.0 + 0.165922, 1e-12);
    EXPECT_NEAR(c1, 647.59, 5e-3);
}

TEST(Polynomial, EvaluateListsEveryMissingVariable) {
    try {
        evaluate(v(X) * v(Y) + v(Z), {{X, 1.0}});
        FAIL() << "expected UnboundVariableError";
    } catch (const UnboundVariableError &e) {
        std::string what = e.what();
        EXPECT_NE(what.find("s:0:1"), std::string::npos);
        EXPECT_NE(what.find("u:0:0"), std::string::npos);
        EXPECT_EQ(what.find("s:0:0"), std::string::npos);
    }
}

TEST(Polynomial, TotalDegree) {
    EXPECT_EQ(total_degree(v(X) * v(X) * v(Y)), 3);
    EXPECT_EQ(total_degree(Polynomial(7.0)), 0);
    EXPECT_EQ(total_degree(Polynomial()), 0);
    EXPECT_EQ(total_degree(v(B0) * v(B1) + v(B2)), 2);
}

TEST(Polynomial, DropsCancellationResidue) {
    Polynomial p({{Monomial(X), 1.0}, {Monomial(Y), 1.0 + 1e-16}, {Monomial(Y), -1.0}});
    EXPECT_EQ(p.size(), 1u);
    EXPECT_EQ((v(X) + 0.1 + 0.2 - 0.3 - v(X)).size(), 0u);
    // genuinely small coefficients survive next to large ones
    Polynomial q({{Monomial(X), 1e6}, {Monomial(Y), 1e-14}});
    EXPECT_EQ(q.size(), 2u);
    Polynomial r = (v(X) * 1e-9 + 1e5) * (v(X) * 1e-9 + 1e5);
    EXPECT_EQ(r.size(), 3u);
}

TEST(Polynomial, DerivativeOfQuadratic) {
    Polynomial p = Polynomial(3.0) * v(X) * v(X) * v(Y) + v(Y);
    EXPECT_EQ(derivative(p, X), Polynomial({{Monomial({{X, 1}, {Y, 1}}), 6.0}}));
    EXPECT_EQ(derivative(p, Z), Polynomial());
}

TEST(PolynomialProperties, CanonicalFormIsIdempotent) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        Polynomial p = random_poly(rng, {X, Y, B0, B1}, 8, 3);
        EXPECT_EQ(Polynomial(p.terms()), p);
        for (const auto &[m, c] : p.terms()) EXPECT_NE(c, 0.0);
    }
}

TEST(PolynomialProperties, SubstitutionHomomorphism) {
    std::mt19937_64 rng(2024);
    const std::vector<VarId> vars{X, Y, Z};
    for (int trial = 0; trial < 1000; ++trial) {
        Polynomial p = random_poly(rng, vars, 6, 3);
        Polynomial r = random_poly(rng, {Y, Z, W}, 3, 2);
        Polynomial s = substitute(p, X, r);
        ASSERT_FALSE(s.contains(X));
        Assignment a = random_assignment(rng, {Y, Z, W});
        Assignment ext = a;
        ext[X] = evaluate(r, a);
        double lhs = evaluate(s, a);
        double rhs = evaluate(p, ext);
        ASSERT_TRUE(oracle::rel_close(lhs, rhs, 1e-9)) << lhs << " vs " << rhs;
    }
}

TEST(PolynomialProperties, RingLaws) {
    std::mt19937_64 rng(5);
    const std::vector<VarId> vars{X, Y, B0};
    for (int trial = 0; trial < 200; ++trial) {
        Polynomial p = random_poly(rng, vars, 4, 2);
        Polynomial q = random_poly(rng, vars, 4, 2);
        Polynomial r = random_poly(rng, vars, 4, 2);
        Assignment a = random_assignment(rng, vars);
        EXPECT_EQ(p + q, q + p);
        EXPECT_TRUE(oracle::structurally_equal(p * q, q * p)) << p * q << "\n" << q * p;
        EXPECT_TRUE(oracle::structurally_equal((p * q) * r, p * (q * r), 1e-10));
        EXPECT_TRUE(oracle::structurally_equal(p * (q + r), p * q + p * r, 1e-10));
        EXPECT_TRUE(oracle::rel_close(evaluate((p + q) + r, a), evaluate(p + (q + r), a), 1e-12));
        EXPECT_TRUE(oracle::rel_close(evaluate((p * q) * r, a), evaluate(p * (q * r), a), 1e-9));
        EXPECT_TRUE(oracle::rel_close(evaluate(p * (q + r), a), evaluate(p * q + p * r, a), 1e-9));
        EXPECT_TRUE(oracle::rel_close(evaluate(p * q, a), evaluate(p, a) * evaluate(q, a), 1e-9));
        EXPECT_TRUE(oracle::rel_close(evaluate(p + q, a), evaluate(p, a) + evaluate(q, a), 1e-12));
    }
}

TEST(PolynomialProperties, BooleanPolynomialsAreMultilinear) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        Polynomial p = random_poly(rng, {B0, B1, B2, VarId::auxiliary(0)}, 5, 3);
        Polynomial q = pow(p, 2);
        for (const auto &[m, c] : q.terms())
            for (const auto &[var, e] : m.factors()) EXPECT_EQ(e, 1);
    }
}

TEST(PolynomialProperties, TextRoundTrip) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial p = random_poly(rng, {X, Y, Z, B0, VarId::auxiliary(3)}, 6, 3);
        std::stringstream ss;
        write_polynomial(ss, p);
        EXPECT_EQ(read_polynomial(ss), p);
    }
}

TEST(Polynomial, TextFormat) {
    Polynomial p = Polynomial(2.5) * v(X) * v(X) * v(Z) - 1.0;
    EXPECT_EQ(to_string(p), "-1\n2.5 s:0:0^2 u:0:0^1\n");
    std::istringstream in("# comment\n3 b:0:1\n1 b:0:1^1\n");
    EXPECT_EQ(read_polynomial(in), Polynomial({{Monomial(B1), 4.0}}));
    EXPECT_THROW(parse_var_id("q:0:0"), ParseError);
}
