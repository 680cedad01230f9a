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

#include <memory>
#include <optional>
#include <vector>

#include "dynqubo/model.hpp"
#include "dynqubo/polynomial.hpp"
#include "dynqubo/qubo.hpp"

namespace dynqubo {

//! Input-only problem left after eliminating the states: minimize the
//! objective over the box [lower, upper].
struct BoxProblem {
    Polynomial objective;
    std::vector<VarId> inputs;
    std::vector<double> lower;
    std::vector<double> upper;
    std::shared_ptr<const DynamicOptProblem> source;

    int size() const { return static_cast<int>(inputs.size()); }
    //! position of v in `inputs`, -1 if absent
    int index_of(const VarId &v) const;
};

//! Substitutes the step map recursively into the objective so that only the
//! inputs remain. Throws NonExplicitDynamicsError if a stage-t step map
//! references states of a later stage.
BoxProblem eliminate_states(const DynamicOptProblem &problem);

//! Fixed-point encoding of one scalar input with n bits:
//!     u = lower + (upper - lower) * sum_i 2^i b_i / (2^n - 1)
struct InputEncoding {
    VarId input;
    int n_bits = 1;
    double lower = 0.0;
    double upper = 1.0;

    double resolution() const;
    double decode(std::span<const std::uint8_t> bits) const;
};

class BinarizationScheme {
  public:
    BinarizationScheme() = default;
    explicit BinarizationScheme(std::vector<InputEncoding> entries);

    //! same bit count and the box bounds for every input of `box`
    static BinarizationScheme uniform(const BoxProblem &box, int n_bits);

    const std::vector<InputEncoding> &entries() const { return entries_; }
    int total_bits() const { return total_bits_; }
    //! index into entries(), -1 if the input is not covered
    int find(const VarId &input) const;
    //! binary variable carrying bit `bit` of entry `entry`
    VarId bit_var(std::size_t entry, int bit) const;
    //! all binary variables, entry-major then bit order (ascending VarId)
    std::vector<VarId> bit_vars() const;
    //! the affine replacement for entry `entry` in its bit variables
    Polynomial encoding(std::size_t entry) const;
    //! decodes a bit vector laid out as bit_vars()
    std::vector<double> decode(std::span<const std::uint8_t> bits) const;

  private:
    std::vector<InputEncoding> entries_;
    std::vector<int> first_slot_;
    int total_bits_ = 0;
};

//! Replaces every input of `box` with its encoding. Throws MissingSchemeError
//! if an input is not covered.
Polynomial binarize(const BoxProblem &box, const BinarizationScheme &scheme);

//! aux == left * right at every minimum of the quadratized polynomial
struct AuxiliaryDefinition {
    VarId aux;
    VarId left;
    VarId right;
};

struct Quadratization {
    Polynomial polynomial;
    std::vector<AuxiliaryDefinition> auxiliaries;
    double penalty = 0.0;
};

//! Default penalty weight: 10 * max |coefficient of p|.
double default_quadratization_penalty(const Polynomial &p);

//! Rosenberg reduction. Repeatedly picks the most frequent variable pair in
//! terms of degree > 2 (ties to the smallest pair), replaces it by a new
//! auxiliary a and adds M (x y - 2 x a - 2 y a + 3 a). Throws
//! NotMultilinearError if some exponent exceeds one.
Quadratization quadratize(const Polynomial &p, std::optional<double> penalty = std::nullopt);

//! Builds the QUBO of a polynomial of degree <= 2 in boolean variables.
//! Variables listed in `order` get the first indices (even if p does not
//! mention them); the remaining variables of p follow in VarId order.
//! Throws DegreeTooHighError or Error for non-boolean variables.
Qubo assemble_qubo(const Polynomial &p, const std::vector<VarId> &order = {});

//! Every artifact of the problem-to-QUBO pipeline.
struct CompiledProblem {
    std::shared_ptr<const DynamicOptProblem> problem;
    BoxProblem box;
    BinarizationScheme scheme;
    Polynomial binary_objective;
    Quadratization quadratized;
    Qubo qubo;
};

//! eliminate_states -> binarize (uniform bit count) -> quadratize -> assemble_qubo.
//! QUBO indices 0..scheme.total_bits()-1 are the scheme's bits in order.
CompiledProblem compile(const DynamicOptProblem &problem, int bits_per_input);

}  // namespace dynqubo
