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

#include "dynqubo/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "dynqubo/errors.hpp"

namespace dynqubo {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

bool sample_less(const Sample &a, const Sample &b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.bits < b.bits;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

const Sample &SampleSet::best() const {
    if (samples.empty()) throw Error("empty sample set");
    return samples.front();
}

int SampleSet::total_occurrences() const {
    int total = 0;
    for (const auto &s : samples) total += s.occurrences;
    return total;
}

SampleSet SampleSet::from_reads(const Qubo &q, std::vector<Bits> reads) {
    std::sort(reads.begin(), reads.end());
    SampleSet set;
    const QuboAdjacency adj(q);
    for (std::size_t i = 0; i < reads.size();) {
        std::size_t j = i;
        while (j < reads.size() && reads[j] == reads[i]) ++j;
        if (static_cast<int>(reads[i].size()) != q.n_vars()) throw LengthMismatchError("read length differs from qubo");
        set.samples.push_back({reads[i], adj.energy(reads[i]), static_cast<int>(j - i)});
        i = j;
    }
    std::sort(set.samples.begin(), set.samples.end(), sample_less);
    return set;
}

void write_sampleset(std::ostream &os, const SampleSet &set) {
    for (const auto &s : set.samples) {
        os << fmt::format("{:.17g} {} {}\n", s.energy, s.occurrences, bits_to_string(s.bits));
    }
    os << "---\n";
    os << "solver: " << set.solver_name << '\n';
    os << "seed: " << set.rng_seed << '\n';
    os << "distinct_samples: " << set.samples.size() << '\n';
    os << "total_occurrences: " << set.total_occurrences() << '\n';
    if (!set.samples.empty()) os << fmt::format("best_energy: {:.17g}\n", set.best().energy);
    os << fmt::format("wall_time_s: {:.9g}\n", set.wall_time);
}

// ---------------------------------------------------------------- brute force

SampleSet brute_force(const Qubo &q, int max_ground_states) {
    const int n = q.n_vars();
    if (n > brute_force_max_vars) {
        throw TooLargeError(fmt::format("brute force limited to {} variables, got {}", brute_force_max_vars, n));
    }
    const auto start = clock_type::now();
    const QuboAdjacency adj(q);
    double scale = std::abs(q.offset());
    for (const auto &[k, v] : q.coefficients()) scale += std::abs(v);
    const double loose = 1e-9 * std::max(1.0, scale);
    const double tight = 1e-12 * std::max(1.0, scale);
    const std::size_t cap = static_cast<std::size_t>(std::max(1, max_ground_states));

    Bits bits(n, 0);
    std::vector<double> fields;
    adj.compute_fields(bits, fields);
    double energy = adj.offset;
    double best = energy;
    std::vector<Bits> candidates{bits};

    auto prune = [&]() {
        std::vector<Sample> scored;
        scored.reserve(candidates.size());
        for (auto &c : candidates) scored.push_back({c, adj.energy(c), 1});
        std::sort(scored.begin(), scored.end(), sample_less);
        candidates.clear();
        for (const auto &s : scored) {
            if (candidates.size() >= cap || s.energy > scored.front().energy + tight) break;
            candidates.push_back(s.bits);
        }
    };

    const std::uint64_t total = n == 0 ? 1 : (std::uint64_t{1} << n);
    for (std::uint64_t k = 1; k < total; ++k) {
        const int i = std::countr_zero(k);
        energy += adj.flip_delta(i, bits, fields);
        adj.flip(i, bits, fields);
        if (energy < best - loose) {
            best = energy;
            candidates.clear();
            candidates.push_back(bits);
        } else if (energy <= best + loose) {
            best = std::min(best, energy);
            candidates.push_back(bits);
            if (candidates.size() > 4 * cap) prune();
        }
    }
    prune();

    SampleSet set;
    for (auto &c : candidates) {
        double e = adj.energy(c);
        set.samples.push_back({std::move(c), e, 1});
    }
    std::sort(set.samples.begin(), set.samples.end(), sample_less);
    set.solver_name = "brute";
    set.wall_time = seconds_since(start);
    set.trace.push_back({set.wall_time, set.samples.front().energy});
    return set;
}

// -------------------------------------------------------- simulated annealing

std::pair<double, double> default_beta_range(const Qubo &q, std::uint64_t seed) {
    const QuboAdjacency adj(q);
    if (adj.n == 0) return {0.1, 50.0};
    std::mt19937_64 rng(mix_seed(seed ^ 0x5a5a5a5aULL));
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> pick(0, adj.n - 1);
    Bits bits(adj.n);
    std::vector<double> fields;
    double sum = 0.0;
    constexpr int probes = 100;
    for (int p = 0; p < probes; ++p) {
        for (auto &b : bits) b = coin(rng);
        adj.compute_fields(bits, fields);
        sum += std::abs(adj.flip_delta(pick(rng), bits, fields));
    }
    double mean = sum / probes;
    if (!(mean > 0.0)) mean = 1.0;
    return {0.1 / mean, 50.0 / mean};
}

namespace {

double beta_at(BetaSchedule kind, double b0, double b1, int sweep, int sweeps) {
    if (sweeps <= 1) return b1;
    const double frac = static_cast<double>(sweep) / (sweeps - 1);
    if (kind == BetaSchedule::linear) return b0 + (b1 - b0) * frac;
    return b0 * std::pow(b1 / b0, frac);
}

Bits anneal_one(const QuboAdjacency &adj, const std::vector<double> &betas, std::uint64_t read_seed,
                const std::optional<Bits> &initial) {
    std::mt19937_64 rng(read_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = adj.n;
    Bits bits(n);
    if (initial) {
        bits = *initial;
    } else {
        std::bernoulli_distribution coin(0.5);
        for (auto &b : bits) b = coin(rng);
    }
    std::vector<double> fields;
    adj.compute_fields(bits, fields);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (double beta : betas) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int i : order) {
            const double delta = adj.flip_delta(i, bits, fields);
            if (delta <= 0.0) {
                adj.flip(i, bits, fields);
            } else {
                const double x = beta * delta;
                if (x < 40.0 && unit(rng) < std::exp(-x)) adj.flip(i, bits, fields);
            }
        }
    }
    return bits;
}

}  // namespace

SampleSet simulated_annealing(const Qubo &q, const SaSchedule &sched, std::uint64_t seed, const SaOptions &opts) {
    if (sched.num_reads < 1) throw Error("num_reads must be at least 1");
    if (sched.sweeps_per_read < 1) throw Error("sweeps_per_read must be at least 1");
    auto [b0, b1] = default_beta_range(q, seed);
    if (sched.beta_start) b0 = *sched.beta_start;
    if (sched.beta_end) b1 = *sched.beta_end;
    if (!(b0 > 0.0) || !(b1 > b0)) throw Error(fmt::format("invalid beta range [{}, {}]", b0, b1));
    if (opts.initial_state && static_cast<int>(opts.initial_state->size()) != q.n_vars()) {
        throw LengthMismatchError("initial state length differs from qubo");
    }

    const auto start = clock_type::now();
    const QuboAdjacency adj(q);
    std::vector<double> betas(sched.sweeps_per_read);
    for (int s = 0; s < sched.sweeps_per_read; ++s) betas[s] = beta_at(sched.kind, b0, b1, s, sched.sweeps_per_read);

    const int reads = sched.num_reads;
    std::vector<Bits> results(reads);
    std::vector<double> finished_at(reads, -1.0);
    auto worker = [&](int w, int stride) {
        for (int r = w; r < reads; r += stride) {
            if (seconds_since(start) >= opts.time_limit) break;
            results[r] = anneal_one(adj, betas, mix_seed(seed ^ static_cast<std::uint64_t>(r)), opts.initial_state);
            finished_at[r] = seconds_since(start);
        }
    };
    const int threads = std::clamp(opts.num_threads, 1, reads);
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w, threads);
    }

    std::vector<Bits> done;
    std::vector<TracePoint> trace;
    double best = std::numeric_limits<double>::infinity();
    double latest = 0.0;
    for (int r = 0; r < reads; ++r) {
        if (finished_at[r] < 0.0) continue;
        latest = std::max(latest, finished_at[r]);
        double e = adj.energy(results[r]);
        if (e < best) {
            best = e;
            trace.push_back({latest, e});
        }
        done.push_back(std::move(results[r]));
    }
    if (done.empty()) {
        // time limit hit before the first read: score the starting point
        Bits b = opts.initial_state.value_or(Bits(q.n_vars(), 0));
        trace.push_back({seconds_since(start), adj.energy(b)});
        done.push_back(std::move(b));
    }
    SampleSet set = SampleSet::from_reads(q, std::move(done));
    set.solver_name = "sa";
    set.rng_seed = seed;
    set.wall_time = seconds_since(start);
    set.trace = std::move(trace);
    return set;
}

// --------------------------------------------------------------- tabu search

SampleSet tabu_search(const Qubo &q, const TabuConfig &cfg, std::uint64_t seed, const std::optional<Bits> &initial) {
    const auto start = clock_type::now();
    const int n = q.n_vars();
    if (cfg.tenure < 0) throw Error("tabu tenure must be non-negative");
    if (cfg.restarts < 0) throw Error("tabu restarts must be non-negative");
    if (initial && static_cast<int>(initial->size()) != n) throw LengthMismatchError("initial state length differs from qubo");

    int tenure = cfg.tenure > 0 ? cfg.tenure : std::max(1, std::min(20, n / 4));
    tenure = std::max(0, std::min(tenure, n - 1));

    std::mt19937_64 rng(mix_seed(seed));
    std::bernoulli_distribution coin(0.5);
    const QuboAdjacency adj(q);

    Bits bits(n, 0);
    if (initial) {
        bits = *initial;
    } else {
        for (auto &b : bits) b = coin(rng);
    }
    Bits best_bits = bits;
    double best = adj.energy(bits);
    std::vector<TracePoint> trace{{seconds_since(start), best}};

    const int segments = cfg.restarts + 1;
    const long long per_segment = cfg.max_iterations / segments;
    std::vector<double> fields;
    std::vector<long long> tabu_until(n, 0);
    bool stop = !(cfg.time_limit > 0.0) || n == 0;
    long long iter = 0;

    for (int seg = 0; seg < segments && !stop; ++seg) {
        if (seg > 0) {
            for (auto &b : bits) b = coin(rng);
        }
        adj.compute_fields(bits, fields);
        double energy = adj.energy(bits);
        std::fill(tabu_until.begin(), tabu_until.end(), 0);
        const long long budget = seg + 1 == segments ? cfg.max_iterations - per_segment * seg : per_segment;
        for (long long k = 0; k < budget; ++k, ++iter) {
            if (seconds_since(start) >= cfg.time_limit) {
                stop = true;
                break;
            }
            int chosen = -1;
            double chosen_delta = std::numeric_limits<double>::infinity();
            int ties = 0;
            for (int i = 0; i < n; ++i) {
                const double d = adj.flip_delta(i, bits, fields);
                const bool allowed = tabu_until[i] <= iter || energy + d < best - 1e-12 * std::abs(best);
                if (!allowed) continue;
                if (d < chosen_delta) {
                    chosen = i;
                    chosen_delta = d;
                    ties = 1;
                } else if (d == chosen_delta && std::uniform_int_distribution<int>(0, ties++)(rng) == 0) {
                    chosen = i;
                }
            }
            if (chosen < 0) continue;  // everything tabu; wait for tenures to expire
            energy += chosen_delta;
            adj.flip(chosen, bits, fields);
            tabu_until[chosen] = iter + tenure + 1;
            if (energy < best) {
                const double exact = adj.energy(bits);
                energy = exact;
                if (exact < best) {
                    best = exact;
                    best_bits = bits;
                    trace.push_back({seconds_since(start), best});
                }
            }
        }
    }

    SampleSet set = SampleSet::from_reads(q, {best_bits});
    set.solver_name = "tabu";
    set.rng_seed = seed;
    set.wall_time = seconds_since(start);
    set.trace = std::move(trace);
    return set;
}

// ------------------------------------------------------- projected gradient

namespace {

//! Index-based polynomial for repeated evaluation.
struct DensePolynomial {
    struct Term {
        double coefficient;
        std::vector<std::pair<int, int>> factors;  // (index, exponent)
    };
    std::vector<Term> terms;

    DensePolynomial(const Polynomial &p, const std::vector<VarId> &vars) {
        for (const auto &[m, c] : p.terms()) {
            Term t{c, {}};
            for (const auto &[v, e] : m.factors()) {
                auto it = std::find(vars.begin(), vars.end(), v);
                if (it == vars.end()) throw UnboundVariableError("box objective references " + to_string(v));
                t.factors.emplace_back(static_cast<int>(it - vars.begin()), e);
            }
            terms.push_back(std::move(t));
        }
    }

    double operator()(const std::vector<double> &x) const {
        double total = 0.0;
        for (const auto &t : terms) {
            double v = t.coefficient;
            for (const auto &[i, e] : t.factors) {
                for (int k = 0; k < e; ++k) v *= x[i];
            }
            total += v;
        }
        return total;
    }
};

}  // namespace

PgdResult projected_gradient(const BoxProblem &box, double tol, int max_iter, std::optional<std::vector<double>> start) {
    const int n = box.size();
    const DensePolynomial f(box.objective, box.inputs);
    std::vector<DensePolynomial> grad;
    grad.reserve(n);
    for (const auto &v : box.inputs) grad.emplace_back(derivative(box.objective, v), box.inputs);

    auto project = [&](std::vector<double> &x) {
        for (int i = 0; i < n; ++i) x[i] = std::clamp(x[i], box.lower[i], box.upper[i]);
    };

    PgdResult res;
    if (start) {
        if (static_cast<int>(start->size()) != n) throw LengthMismatchError("start point has wrong dimension");
        res.inputs = *start;
    } else {
        res.inputs.resize(n);
        for (int i = 0; i < n; ++i) res.inputs[i] = 0.5 * (box.lower[i] + box.upper[i]);
    }
    project(res.inputs);
    std::vector<double> &x = res.inputs;
    double fx = f(x);
    res.history.push_back(fx);

    std::vector<double> g(n), trial(n);
    double step = 1.0;
    constexpr double armijo = 1e-4;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        for (int i = 0; i < n; ++i) g[i] = grad[i](x);
        double pg = 0.0;
        for (int i = 0; i < n; ++i) pg = std::max(pg, std::abs(std::clamp(x[i] - g[i], box.lower[i], box.upper[i]) - x[i]));
        if (pg < tol) {
            res.converged = true;
            break;
        }
        bool accepted = false;
        step = std::min(step * 4.0, 1e12);
        for (int bt = 0; bt < 200; ++bt, step *= 0.5) {
            for (int i = 0; i < n; ++i) trial[i] = x[i] - step * g[i];
            project(trial);
            double decrease = 0.0;
            for (int i = 0; i < n; ++i) decrease += g[i] * (trial[i] - x[i]);
            const double ft = f(trial);
            if (ft <= fx + armijo * decrease) {
                if (ft <= fx) {
                    x = trial;
                    fx = ft;
                    res.history.push_back(fx);
                    accepted = true;
                }
                break;
            }
        }
        if (!accepted) {
            // no representable descent left along the projected arc
            res.converged = pg < std::max(tol, 1e-6 * (1.0 + std::abs(fx)));
            break;
        }
    }
    res.objective = fx;
    return res;
}

// -------------------------------------------------------------- decoding

DecodedSolution decode(std::span<const std::uint8_t> sample, const BinarizationScheme &scheme,
                       const DynamicOptProblem &problem) {
    DecodedSolution out;
    out.values = scheme.decode(sample);
    int stages = 0;
    for (const auto &e : scheme.entries()) stages = std::max(stages, e.input.stage + 1);
    std::vector<std::vector<double>> rows(stages, std::vector<double>(problem.input_dim, 0.0));
    std::vector<std::vector<bool>> covered(stages, std::vector<bool>(problem.input_dim, false));
    for (std::size_t e = 0; e < scheme.entries().size(); ++e) {
        const VarId &v = scheme.entries()[e].input;
        if (v.slot >= problem.input_dim) throw Error("scheme input " + to_string(v) + " outside problem inputs");
        rows[v.stage][v.slot] = out.values[e];
        covered[v.stage][v.slot] = true;
    }
    for (int t = 0; t < stages; ++t)
        for (int j = 0; j < problem.input_dim; ++j)
            if (!covered[t][j]) throw MissingSchemeError(fmt::format("no encoding for input u:{}:{}", t, j));
    out.inputs = rows;
    out.trajectory = simulate(problem, rows);
    return out;
}

DecodedSolution decode(std::span<const std::uint8_t> qubo_sample, const CompiledProblem &compiled) {
    const auto bits = static_cast<std::size_t>(compiled.scheme.total_bits());
    if (qubo_sample.size() < bits) throw LengthMismatchError("sample shorter than the binarization scheme");
    return decode(qubo_sample.subspan(0, bits), compiled.scheme, *compiled.problem);
}

}  // namespace dynqubo
