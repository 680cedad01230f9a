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

#include "dynqubo/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

void ReactorParams::validate() const {
    const std::pair<const char *, double> positive[] = {{"F0", F0},   {"k0", k0}, {"r", r},   {"E_over_R", E_over_R},
                                                        {"U", U},     {"rho", rho}, {"Cp", Cp}, {"h", h}};
    for (const auto &[name, value] : positive) {
        if (!(value > 0.0)) throw Error(fmt::format("reactor parameter {} must be positive, got {}", name, value));
    }
    if (!(T_fix > 0.0)) throw Error("T_fix must be positive");
}

ReactorCoefficients reactor_coefficients(const ReactorParams &p, ThermalForm form) {
    p.validate();
    const double area = std::numbers::pi * p.r * p.r;
    ReactorCoefficients c{};
    c.dilution_c = p.F0 / (area * p.h);
    c.rate_constant = p.k0 * std::exp(-p.E_over_R / p.T_fix);
    c.dilution_T = form == ThermalForm::area_only ? p.F0 / area : p.F0 / (area * p.h);
    c.heat_release = -p.dH / (p.rho * p.Cp) * c.rate_constant;
    c.cooling = 2.0 * p.U / (p.r * p.rho * p.Cp);
    if (form == ThermalForm::height_scaled) c.cooling *= p.h;
    return c;
}

void PolynomialODE::validate() const {
    if (state_dim < 1 || input_dim < 0) throw Error("ODE dimensions must be positive");
    if (static_cast<int>(rhs.size()) != state_dim) throw Error("ODE rhs length differs from state dimension");
    for (const auto &p : rhs) {
        for (const auto &v : p.variables()) {
            bool ok = v.stage == 0 && ((v.kind == VarKind::state && v.slot < state_dim) ||
                                       (v.kind == VarKind::input && v.slot < input_dim));
            if (!ok) throw Error("ODE rhs references " + to_string(v) + ", expected stage-0 state/input variables");
        }
    }
}

void DynamicOptProblem::validate() const {
    if (horizon < 1) throw Error("horizon must be at least 1");
    if (!(dt > 0.0)) throw Error("dt must be positive");
    if (static_cast<int>(dynamics.size()) != horizon) throw Error("dynamics must hold one step map per stage");
    for (const auto &step : dynamics) {
        if (static_cast<int>(step.size()) != state_dim) throw Error("step map width differs from state dimension");
    }
    if (static_cast<int>(initial_state.size()) != state_dim) throw Error("initial state has wrong dimension");
    if (static_cast<int>(input_lower.size()) != input_dim || static_cast<int>(input_upper.size()) != input_dim) {
        throw Error("input bounds have wrong dimension");
    }
    for (int j = 0; j < input_dim; ++j) {
        if (!(input_lower[j] < input_upper[j])) {
            throw Error(fmt::format("input {} bounds must satisfy lower < upper", j));
        }
    }
}

double DynamicOptProblem::penalty_weight(const EqualityPenalty &pen) const {
    if (pen.weight) return *pen.weight;
    return 1e3 * stage_cost.max_abs_coefficient();
}

std::vector<VarId> DynamicOptProblem::decision_inputs() const {
    std::set<VarId> inputs;
    for (int t = 0; t < horizon; ++t)
        for (int j = 0; j < input_dim; ++j) inputs.insert(VarId::input(t, j));
    for (const auto &v : stage_cost.variables()) {
        if (v.kind == VarKind::input) inputs.insert(VarId::input(horizon, v.slot));
    }
    for (const auto &pen : equality_penalties) {
        for (const auto &v : pen.residual.variables()) {
            if (v.kind == VarKind::input) inputs.insert(v);
        }
    }
    return {inputs.begin(), inputs.end()};
}

Polynomial shift_stage(const Polynomial &p, int stages) {
    if (stages == 0) return p;
    return map_variables(p, [stages](const VarId &v) {
        if (v.kind == VarKind::state || v.kind == VarKind::input) return VarId{v.kind, v.stage + stages, v.slot};
        return v;
    });
}

std::vector<std::vector<Polynomial>> euler_discretize(const PolynomialODE &ode, double dt, int horizon) {
    ode.validate();
    if (!(dt > 0.0)) throw Error("dt must be positive");
    if (horizon < 1) throw Error("horizon must be at least 1");
    std::vector<Polynomial> step(ode.state_dim);
    for (int j = 0; j < ode.state_dim; ++j) {
        Polynomial inc = ode.rhs[j];
        inc *= dt;
        step[j] = Polynomial(VarId::state(0, j)) + inc;
    }
    std::vector<std::vector<Polynomial>> out;
    out.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
        std::vector<Polynomial> shifted;
        shifted.reserve(step.size());
        for (const auto &p : step) shifted.push_back(shift_stage(p, t));
        out.push_back(std::move(shifted));
    }
    return out;
}

PolynomialODE cstr_ode(const ReactorParams &params, ThermalForm form) {
    const auto k = reactor_coefficients(params, form);
    const Polynomial c(VarId::state(0, cstr::concentration));
    const Polynomial T(VarId::state(0, cstr::temperature));
    const Polynomial Tc(VarId::input(0, cstr::coolant));

    PolynomialODE ode;
    ode.state_dim = 2;
    ode.input_dim = 1;
    ode.rhs.resize(2);
    ode.rhs[cstr::concentration] = Polynomial(k.dilution_c) * (Polynomial(params.c0_feed) - c) -
                                   Polynomial(k.rate_constant) * c;
    ode.rhs[cstr::temperature] = Polynomial(k.dilution_T) * (Polynomial(params.T0_feed) - T) +
                                 Polynomial(k.heat_release) * c + Polynomial(k.cooling) * (Tc - T);
    return ode;
}

DynamicOptProblem cstr_problem(const ReactorParams &params, int horizon, double dt, ThermalForm form) {
    DynamicOptProblem prob;
    prob.horizon = horizon;
    prob.dt = dt;
    prob.state_dim = 2;
    prob.input_dim = 1;
    prob.dynamics = euler_discretize(cstr_ode(params, form), dt, horizon);
    prob.initial_state = {cstr::initial_concentration, cstr::initial_temperature};
    prob.input_lower = {cstr::coolant_lower};
    prob.input_upper = {cstr::coolant_upper};
    const Polynomial dev = Polynomial(VarId::state(0, cstr::temperature)) - Polynomial(params.T_fix);
    prob.stage_cost = dev * dev;
    prob.validate();
    return prob;
}

Trajectory simulate(const DynamicOptProblem &problem, const std::vector<std::vector<double>> &inputs,
                    std::optional<int> stages) {
    problem.validate();
    const int N = stages.value_or(problem.horizon);
    if (N < 0 || N > problem.horizon) throw Error("simulated stage count outside the horizon");

    bool cost_uses_last_input = false;
    for (const auto &v : problem.stage_cost.variables()) cost_uses_last_input |= v.kind == VarKind::input;
    const std::size_t needed = static_cast<std::size_t>(N) + (cost_uses_last_input ? 1 : 0);
    if (inputs.size() < needed) {
        throw LengthMismatchError(fmt::format("simulate needs {} input rows, got {}", needed, inputs.size()));
    }
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        if (static_cast<int>(inputs[t].size()) != problem.input_dim) {
            throw LengthMismatchError(fmt::format("input row {} has {} entries, expected {}", t, inputs[t].size(),
                                                  problem.input_dim));
        }
    }

    Trajectory traj;
    traj.states.assign(N + 1, std::vector<double>(problem.state_dim, 0.0));
    traj.inputs.assign(N + 1, std::vector<double>(problem.input_dim, 0.0));
    traj.states[0] = problem.initial_state;
    for (int t = 0; t <= N; ++t) {
        if (static_cast<std::size_t>(t) < inputs.size()) {
            traj.inputs[t] = inputs[t];
        } else if (t > 0) {
            traj.inputs[t] = traj.inputs[t - 1];
        }
    }
    for (int t = 0; t < static_cast<int>(std::min<std::size_t>(inputs.size(), N + 1)); ++t) {
        for (int j = 0; j < problem.input_dim; ++j) {
            double u = inputs[t][j];
            if (u < problem.input_lower[j] || u > problem.input_upper[j]) ++traj.bound_violations;
        }
    }

    Assignment stage_vals;
    for (int t = 0; t <= N; ++t) {
        stage_vals.clear();
        for (int j = 0; j < problem.state_dim; ++j) stage_vals[VarId::state(0, j)] = traj.states[t][j];
        for (int j = 0; j < problem.input_dim; ++j) stage_vals[VarId::input(0, j)] = traj.inputs[t][j];
        traj.objective_value += evaluate(problem.stage_cost, stage_vals);
        if (t == N) break;
        Assignment here;
        for (int j = 0; j < problem.state_dim; ++j) here[VarId::state(t, j)] = traj.states[t][j];
        for (int j = 0; j < problem.input_dim; ++j) here[VarId::input(t, j)] = traj.inputs[t][j];
        for (int j = 0; j < problem.state_dim; ++j) traj.states[t + 1][j] = evaluate(problem.dynamics[t][j], here);
    }

    if (!problem.equality_penalties.empty()) {
        Assignment all;
        for (int t = 0; t <= N; ++t) {
            for (int j = 0; j < problem.state_dim; ++j) all[VarId::state(t, j)] = traj.states[t][j];
            for (int j = 0; j < problem.input_dim; ++j) all[VarId::input(t, j)] = traj.inputs[t][j];
        }
        for (const auto &pen : problem.equality_penalties) {
            double r = evaluate(pen.residual, all);
            traj.objective_value += problem.penalty_weight(pen) * r * r;
        }
    }
    return traj;
}

Trajectory simulate(const DynamicOptProblem &problem, const std::vector<double> &scalar_inputs,
                    std::optional<int> stages) {
    std::vector<std::vector<double>> rows;
    rows.reserve(scalar_inputs.size());
    for (double u : scalar_inputs) rows.push_back({u});
    return simulate(problem, rows, stages);
}

// ---------------------------------------------------------- problem files

DynamicOptProblem ProblemDefinition::build() const {
    DynamicOptProblem prob = cstr_problem(params, horizon, dt, form);
    prob.initial_state = {initial_concentration, initial_temperature};
    prob.input_lower = {input_lower};
    prob.input_upper = {input_upper};
    prob.validate();
    return prob;
}

ProblemDefinition preset_problem(const std::string &preset) {
    ProblemDefinition def;
    if (preset == "cstr") return def;
    if (preset == "cstr-small") {
        def.name = "cstr-small";
        def.horizon = 3;
        def.bits_per_input = 4;
        return def;
    }
    throw Error("unknown problem preset '" + preset + "' (known: cstr, cstr-small)");
}

namespace {

template <typename T>
void read_if(const YAML::Node &node, const char *key, T &out) {
    if (node[key]) out = node[key].as<T>();
}

ThermalForm parse_form(const std::string &s) {
    if (s == "area_only") return ThermalForm::area_only;
    if (s == "height_scaled") return ThermalForm::height_scaled;
    throw ParseError("unknown thermal_form '" + s + "' (expected area_only or height_scaled)");
}

}  // namespace

ProblemDefinition parse_problem_definition(const std::string &yaml_text) {
    ProblemDefinition def;
    try {
        YAML::Node root = YAML::Load(yaml_text);
        if (!root.IsMap()) throw ParseError("problem definition must be a mapping");
        if (root["preset"]) def = preset_problem(root["preset"].as<std::string>());
        read_if(root, "name", def.name);
        read_if(root, "horizon", def.horizon);
        read_if(root, "dt", def.dt);
        read_if(root, "bits_per_input", def.bits_per_input);
        if (root["thermal_form"]) def.form = parse_form(root["thermal_form"].as<std::string>());
        if (auto init = root["initial_state"]) {
            read_if(init, "concentration", def.initial_concentration);
            read_if(init, "temperature", def.initial_temperature);
        }
        if (auto b = root["bounds"]) {
            read_if(b, "lower", def.input_lower);
            read_if(b, "upper", def.input_upper);
        }
        if (auto p = root["params"]) {
            auto &q = def.params;
            read_if(p, "F0", q.F0);
            read_if(p, "T0_feed", q.T0_feed);
            read_if(p, "c0_feed", q.c0_feed);
            read_if(p, "k0", q.k0);
            read_if(p, "r", q.r);
            read_if(p, "E_over_R", q.E_over_R);
            read_if(p, "U", q.U);
            read_if(p, "rho", q.rho);
            read_if(p, "Cp", q.Cp);
            read_if(p, "dH", q.dH);
            read_if(p, "h", q.h);
            read_if(p, "T_fix", q.T_fix);
        }
    } catch (const YAML::Exception &e) {
        throw ParseError(std::string("problem definition: ") + e.what());
    }
    def.params.validate();
    if (def.horizon < 1) throw ParseError("horizon must be at least 1");
    if (!(def.dt > 0.0)) throw ParseError("dt must be positive");
    if (def.bits_per_input < 1) throw ParseError("bits_per_input must be at least 1");
    if (!(def.input_lower < def.input_upper)) throw ParseError("bounds must satisfy lower < upper");
    return def;
}

ProblemDefinition load_problem_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_definition(ss.str());
}

std::string to_yaml(const ProblemDefinition &def) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << def.name;
    out << YAML::Key << "horizon" << YAML::Value << def.horizon;
    out << YAML::Key << "dt" << YAML::Value << def.dt;
    out << YAML::Key << "thermal_form" << YAML::Value
        << (def.form == ThermalForm::area_only ? "area_only" : "height_scaled");
    out << YAML::Key << "bits_per_input" << YAML::Value << def.bits_per_input;
    out << YAML::Key << "initial_state" << YAML::Value << YAML::BeginMap << YAML::Key << "concentration"
        << YAML::Value << def.initial_concentration << YAML::Key << "temperature" << YAML::Value
        << def.initial_temperature << YAML::EndMap;
    out << YAML::Key << "bounds" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "lower"
        << YAML::Value << def.input_lower << YAML::Key << "upper" << YAML::Value << def.input_upper << YAML::EndMap;
    const auto &p = def.params;
    out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
    const std::pair<const char *, double> fields[] = {
            {"F0", p.F0}, {"T0_feed", p.T0_feed}, {"c0_feed", p.c0_feed}, {"k0", p.k0}, {"r", p.r},
            {"E_over_R", p.E_over_R}, {"U", p.U}, {"rho", p.rho}, {"Cp", p.Cp}, {"dH", p.dH}, {"h", p.h},
            {"T_fix", p.T_fix}};
    for (const auto &[k, v] : fields) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace dynqubo
