// Copyright 2026 The cimbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cimbench/cim.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "cimbench/error.hpp"
#include "cimbench/instance_io.hpp"
#include "cimbench/parallel.hpp"
#include "cimbench/rng.hpp"
#include "cimbench/solvers.hpp"

namespace cimbench::cim {

namespace {

constexpr double kHalfVariance = 0.7071067811865476;  // sqrt(1/2)
constexpr int kStepsPerTrip = 7;

struct Optics {
    double cm, sm, c1, s1, c2, s2, cf, sf, c3, s3;

    explicit Optics(const CimParams& p)
        : cm(std::cos(p.theta_m)), sm(std::sin(p.theta_m)), c1(std::cos(p.theta_L1)), s1(std::sin(p.theta_L1)),
          c2(std::cos(p.theta_L2)), s2(std::sin(p.theta_L2)), cf(std::cos(p.theta_f)), sf(std::sin(p.theta_f)),
          c3(std::cos(p.theta_L3)), s3(std::sin(p.theta_L3)) {}
};

// Owns the scratch buffers so a trial allocates once.
class Simulator {
  public:
    Simulator(const IsingProblem& problem, const CimParams& params)
        : problem_(problem), params_(params), optics_(params), b_(problem.n()), y_(problem.n()),
          dense_(4 * problem.edge_count() > static_cast<std::size_t>(problem.n()) * problem.n() / 2) {}

    void step(std::vector<double>& a, long t, const NoiseSource& noise) {
        const int n = problem_.n();
        const Optics& o = optics_;
        const bool noisy = noise.enabled();
        auto w = [&](int stage, int i) { return noisy ? noise.draw(t, stage, i) : 0.0; };

        for (int i = 0; i < n; ++i) {
            const double w1 = w(1, i);
            const double ai = a[i];
            a[i] = ai * o.cm + w1 * o.sm;
            b_[i] = ai * o.sm - w1 * o.cm;
            a[i] = a[i] * o.c1 + w(2, i) * o.s1;
            b_[i] = b_[i] * o.c2 + w(3, i) * o.s2;
        }
        const double f = pump_schedule(t, params_);
        const double sign = params_.feedback_sign;
        if (dense_) {
            // J is symmetric, so accumulating rows scaled by b_j gives J b without a reduction chain.
            std::fill(y_.begin(), y_.end(), 0.0);
            for (int j = 0; j < n; ++j) {
                const auto row = problem_.row(j);
                const double bj = b_[j];
                for (int i = 0; i < n; ++i) y_[i] += row[i] * bj;
            }
            for (int i = 0; i < n; ++i) y_[i] *= sign;
        } else {
            for (int i = 0; i < n; ++i) {
                double sum = 0.0;
                for (const auto& c : problem_.neighbors(i)) sum += c.value * b_[c.j];
                y_[i] = sign * sum;
            }
        }
        for (int i = 0; i < n; ++i) {
            const double injected = clamp(f * y_[i], params_.y_max) + w(4, i);
            double ai = a[i] * o.cf + injected * o.sf;
            ai = ai * o.c3 + w(5, i) * o.s3;
            ai = psa_gain(ai, params_.pump + w(6, i), params_.eps_L);
            if (!std::isfinite(ai)) {
                std::ostringstream msg;
                msg << "pulse " << i << " reached " << ai;
                throw DivergenceError(t, msg.str());
            }
            a[i] = ai;
        }
    }

  private:
    const IsingProblem& problem_;
    const CimParams& params_;
    Optics optics_;
    std::vector<double> b_;
    std::vector<double> y_;
    bool dense_;  // more than a quarter of all pairs coupled
};

void check_angle(double theta, const char* name) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2))
        throw ConfigError(std::string("angle ") + name + " must lie in [0, pi/2]");
}

}  // namespace

void validate(const CimParams& params) {
    check_angle(params.theta_m, "theta_m");
    check_angle(params.theta_f, "theta_f");
    check_angle(params.theta_L1, "theta_L1");
    check_angle(params.theta_L2, "theta_L2");
    check_angle(params.theta_L3, "theta_L3");
    if (!(params.y_max > 0.0)) throw ConfigError("y_max must be positive");
    if (!(params.f_max >= 0.0) || !std::isfinite(params.f_max)) throw ConfigError("F_max must be finite and >= 0");
    if (params.round_trips < 1) throw ConfigError("T_ann must be at least one round trip");
    if (!(params.pump > 0.0) || !(params.eps_L > 0.0)) throw ConfigError("pump and eps_L must be positive");
    if (!(params.initial_variance >= 0.0)) throw ConfigError("initial variance must be >= 0");
}

double pump_schedule(long t, const CimParams& params) {
    return params.f_max * static_cast<double>(t) / static_cast<double>(params.round_trips);
}

double psa_gain(double a, double pump_i, double eps_L) {
    const double ratio = a * a / (2.0 * pump_i * pump_i);
    const double gain = eps_L * std::sqrt(pump_i * pump_i + 0.5 * a * a);
    // 1 - (1 + r)^{-1/2} written to stay accurate as r -> 0.
    const double root = std::sqrt(1.0 + ratio);
    const double depletion = ratio / (root * (1.0 + root));
    // Exact solution of da/dz = eps p a, dp/dz = -eps a^2 / 2 (p^2 + a^2/2 conserved):
    // the depletion term divides the unsaturated gain e^B.
    return std::exp(gain) * a / (1.0 + 0.5 * std::expm1(2.0 * gain) * depletion);
}

double small_signal_multiplier(const CimParams& params) {
    return std::exp(params.eps_L * params.pump) * std::cos(params.theta_m) * std::cos(params.theta_L1) *
           std::cos(params.theta_f) * std::cos(params.theta_L3);
}

double NoiseSource::draw(long t, int step, int pulse) const {
    if (!enabled_) return 0.0;
    const auto counter = (static_cast<std::uint64_t>(t) * kStepsPerTrip + static_cast<std::uint64_t>(step)) *
                             static_cast<std::uint64_t>(n_) +
                         static_cast<std::uint64_t>(pulse);
    const double z = rng::normal_from_word(rng::splitmix_at(key_, counter));
    const double w = kHalfVariance * z;
    return (mirror_ && step != 6) ? -w : w;
}

CimState round_trip(CimState state, const IsingProblem& problem, const CimParams& params, const NoiseSource& noise) {
    if (state.a.size() != static_cast<std::size_t>(problem.n()))
        throw ConfigError("CIM state has " + std::to_string(state.a.size()) + " pulses, problem has " +
                          std::to_string(problem.n()));
    Simulator sim(problem, params);
    sim.step(state.a, state.t + 1, noise);
    ++state.t;
    return state;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) { return rng::derive(base_seed, index); }

TrialResult run_trial(const IsingProblem& problem, const CimParams& params, std::uint64_t seed, bool record) {
    validate(params);
    const int n = problem.n();
    const NoiseSource noise(seed, n, params.noise_on, params.mirror_noise);
    std::vector<double> a(static_cast<std::size_t>(n), 0.0);
    if (params.initial_variance > 0.0 && noise.enabled()) {
        // draw() has variance 1/2; rescale to the requested variance.
        const double scale = std::sqrt(2.0 * params.initial_variance);
        for (int i = 0; i < n; ++i) a[i] = scale * noise.draw(0, 0, i);
    }

    TrialResult result;
    if (record) {
        result.trajectory.emplace();
        result.trajectory->amplitudes.reserve(static_cast<std::size_t>(params.round_trips) + 1);
        result.trajectory->amplitudes.push_back(a);
        result.trajectory->energies.push_back(ising::energy(problem, ising::signs_of(a)));
    }
    Simulator sim(problem, params);
    for (long t = 1; t <= params.round_trips; ++t) {
        sim.step(a, t, noise);
        if (record) {
            result.trajectory->amplitudes.push_back(a);
            result.trajectory->energies.push_back(ising::energy(problem, ising::signs_of(a)));
        }
    }
    result.spins = ising::signs_of(a);
    result.energy = ising::energy(problem, result.spins);
    result.final_amplitudes = std::move(a);
    return result;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    std::ostringstream out;
    out.precision(17);
    const std::size_t n = trajectory.amplitudes.empty() ? 0 : trajectory.amplitudes.front().size();
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",a_" << i;
    out << ",energy\n";
    for (std::size_t t = 0; t < trajectory.amplitudes.size(); ++t) {
        out << t;
        for (double v : trajectory.amplitudes[t]) out << ',' << v;
        out << ',' << trajectory.energies[t] << '\n';
    }
    io::write_text(path, out.str());
}

double optimal_fmax(ising::ProblemClass problem_class, int n, std::optional<int> degree) {
    if (n < 1) throw ConfigError("optimal F_max needs n >= 1");
    switch (problem_class) {
        case ising::ProblemClass::sk:
        case ising::ProblemClass::dense_maxcut: return 3.0 / std::sqrt(static_cast<double>(n));
        case ising::ProblemClass::mobius: return 0.35;
        case ising::ProblemClass::regular_maxcut:
            if (degree && *degree == 3) return 0.35;
            break;
        default: break;
    }
    throw ConfigError("no F_max rule for class " + std::string(ising::to_string(problem_class)) +
                      "; supply F_max explicitly");
}

double optimal_fmax(const IsingProblem& problem) {
    return optimal_fmax(problem.meta().problem_class, problem.n(), problem.meta().degree);
}

analysis::Estimate success_probability(const IsingProblem& problem, const CimParams& params, int trials,
                                       double ground_energy, std::uint64_t base_seed, unsigned jobs) {
    if (trials < 1) throw ConfigError("success probability needs trials >= 1");
    validate(params);
    std::vector<char> hit(static_cast<std::size_t>(trials), 0);
    parallel_for(hit.size(), jobs, [&](std::size_t k) {
        const TrialResult r = run_trial(problem, params, trial_seed(base_seed, k));
        hit[k] = solvers::same_energy(problem, r.energy, ground_energy) ? 1 : 0;
    });
    std::uint64_t successes = 0;
    for (char h : hit) successes += static_cast<std::uint64_t>(h);
    return analysis::wilson_interval(successes, static_cast<std::uint64_t>(trials));
}

std::vector<SweepRow> fmax_sweep(const IsingProblem& problem, const CimParams& params,
                                 std::span<const double> fmax_grid, int trials, double ground_energy,
                                 std::uint64_t base_seed, unsigned jobs) {
    if (fmax_grid.empty()) throw ConfigError("F_max sweep needs a nonempty grid");
    if (trials < 1) throw ConfigError("F_max sweep needs trials >= 1 per grid point");
    std::vector<SweepRow> rows;
    rows.reserve(fmax_grid.size());
    for (double f : fmax_grid) {
        CimParams p = params;
        p.f_max = f;
        rows.push_back({f, success_probability(problem, p, trials, ground_energy, base_seed, jobs)});
    }
    return rows;
}

}  // namespace cimbench::cim
