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

#include <optional>
#include <string>
#include <vector>

#include "dynqubo/polynomial.hpp"

namespace dynqubo {

//! Physical parameters of the stirred tank reactor. Defaults are the
//! published case-study values.
struct ReactorParams {
    double F0 = 0.1;          // m^3/min
    double T0_feed = 350.0;   // K
    double c0_feed = 1.0;     // kmol/m^3
    double k0 = 7.2e10;       // 1/min
    double r = 0.219;         // m
    double E_over_R = 8750.0; // K
    double U = 54.94;         // kJ/(min m^2 K)
    double rho = 1000.0;      // kg/m^3
    double Cp = 0.239;        // kJ/(kg K)
    double dH = -5e-4;        // kJ/kmol
    double h = 0.8;           // m
    double T_fix = 340.0;     // K, Arrhenius linearization point and tracking target

    //! Throws Error unless every strictly positive quantity is positive.
    void validate() const;
};

//! Selects how the tank height enters the temperature balance.
//!
//! `area_only` divides the feed term by pi r^2 and uses 2U/(r rho Cp) for
//! cooling; `height_scaled` divides by pi r^2 h and multiplies the cooling
//! coefficient by h.
enum class ThermalForm { area_only, height_scaled };

//! Constant-folded rate coefficients of the reactor ODE (all in 1/min).
struct ReactorCoefficients {
    double dilution_c;     // F0 / (pi r^2 h)
    double rate_constant;  // k0 exp(-E/(R T_fix))
    double dilution_T;     // F0 / (pi r^2) or F0 / (pi r^2 h)
    double heat_release;   // -dH / (rho Cp) * rate_constant, K m^3/(kmol min)
    double cooling;        // 2U/(r rho Cp), optionally times h
};

ReactorCoefficients reactor_coefficients(const ReactorParams &p, ThermalForm form = ThermalForm::area_only);

//! Continuous-time right-hand side dx/dt = rhs(x, u) in stage-0 variables.
struct PolynomialODE {
    int state_dim = 0;
    int input_dim = 0;
    std::vector<Polynomial> rhs;

    void validate() const;
};

//! A squared residual added to the objective with the given weight. The
//! residual may reference state and input variables of any stage.
struct EqualityPenalty {
    Polynomial residual;
    std::optional<double> weight;
};

//! Discrete-time optimal control problem with polynomial step map and box
//! bounds on the inputs.
struct DynamicOptProblem {
    int horizon = 1;
    double dt = 1.0;
    int state_dim = 0;
    int input_dim = 0;
    //! dynamics[t][j] is x_{t+1, j} as a polynomial in stage-t variables
    std::vector<std::vector<Polynomial>> dynamics;
    std::vector<double> initial_state;
    std::vector<double> input_lower;
    std::vector<double> input_upper;
    //! per-stage cost written in stage-0 variables, summed over stages 0..N
    Polynomial stage_cost;
    std::vector<EqualityPenalty> equality_penalties;

    void validate() const;
    //! weight of a penalty; unset weights default to 1e3 * max |stage cost coefficient|
    double penalty_weight(const EqualityPenalty &pen) const;
    //! inputs that can influence the objective, ordered by VarId
    std::vector<VarId> decision_inputs() const;
};

//! Moves every state and input variable of p forward by `stages` time steps.
Polynomial shift_stage(const Polynomial &p, int stages);

//! Explicit Euler: x_{t+1} = x_t + dt * rhs(x_t, u_t) for t = 0..N-1.
std::vector<std::vector<Polynomial>> euler_discretize(const PolynomialODE &ode, double dt, int horizon);

namespace cstr {
inline constexpr int concentration = 0;
inline constexpr int temperature = 1;
inline constexpr int coolant = 0;

inline constexpr double initial_concentration = 877.0;
inline constexpr double initial_temperature = 324.5;
inline constexpr double coolant_lower = 295.0;
inline constexpr double coolant_upper = 330.0;
inline constexpr int horizon = 20;
inline constexpr double dt = 0.2;
}  // namespace cstr

PolynomialODE cstr_ode(const ReactorParams &params, ThermalForm form = ThermalForm::area_only);

//! The reactor tracking problem: minimize sum_i (T_i - T_fix)^2 subject to the
//! Euler-discretized dynamics with the Arrhenius factor frozen at T_fix.
DynamicOptProblem cstr_problem(const ReactorParams &params = {}, int horizon = cstr::horizon, double dt = cstr::dt,
                               ThermalForm form = ThermalForm::area_only);

struct Trajectory {
    std::vector<std::vector<double>> states;  // (N+1) x state_dim
    std::vector<std::vector<double>> inputs;  // (N+1) x input_dim
    double objective_value = 0.0;
    int bound_violations = 0;
};

//! Forward recursion of the step map. `inputs` must hold at least N rows
//! (N+1 if the cost depends on the last input). Out-of-bound inputs are
//! counted, not rejected. With `stages` set, only the first `stages` steps
//! are applied and costs are summed over stages 0..stages.
Trajectory simulate(const DynamicOptProblem &problem, const std::vector<std::vector<double>> &inputs,
                    std::optional<int> stages = std::nullopt);

//! Convenience overload for single-input problems.
Trajectory simulate(const DynamicOptProblem &problem, const std::vector<double> &scalar_inputs,
                    std::optional<int> stages = std::nullopt);

//! Reactor problem definition as read from a problem file.
struct ProblemDefinition {
    std::string name = "cstr";
    ReactorParams params;
    ThermalForm form = ThermalForm::area_only;
    int horizon = cstr::horizon;
    double dt = cstr::dt;
    double initial_concentration = cstr::initial_concentration;
    double initial_temperature = cstr::initial_temperature;
    double input_lower = cstr::coolant_lower;
    double input_upper = cstr::coolant_upper;
    int bits_per_input = 10;

    DynamicOptProblem build() const;
};

ProblemDefinition preset_problem(const std::string &preset);
ProblemDefinition parse_problem_definition(const std::string &yaml_text);
ProblemDefinition load_problem_file(const std::string &path);
std::string to_yaml(const ProblemDefinition &def);

}  // namespace dynqubo
