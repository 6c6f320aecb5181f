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

#pragma once

// Discrete-time truncated-Wigner model of the measurement-feedback coherent
// Ising machine. Only the in-phase quadrature of each pulse is tracked. One
// round trip is seven optical steps:
//
//   1. measurement beamsplitter  a <- a cos(tm) + w1 sin(tm),  b <- a sin(tm) - w1 cos(tm)
//   2. cavity loss               a <- a cos(tL1) + w2 sin(tL1)
//   3. pick-off loss             b <- b cos(tL2) + w3 sin(tL2)
//   4. homodyne, FPGA, DAC       x <- b,  y_i = s_fb sum_j J_ij x_j,  b <- C(F(t) y_i; y_max) + w4
//   5. feedback beamsplitter     a <- a cos(tf) + b sin(tf)
//   6. cavity loss               a <- a cos(tL3) + w5 sin(tL3)
//   7. PSA gain                  p_i = p + w6,  B_i = eps_L sqrt(p_i^2 + a_i^2 / 2),
//                                a <- e^B a / (1 + (e^2B - 1)(1 - (1 + a^2 / 2p_i^2)^-1/2) / 2)
//
// with every w ~ N(0, 1/2), independently per pulse and step.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cimbench/analysis.hpp"
#include "cimbench/ising.hpp"

namespace cimbench::cim {

using ising::IsingProblem;
using ising::SpinConfig;

struct CimParams {
    double eps_L = 3.6e-4;
    double pump = 2.8e3;
    double theta_m = std::asin(std::sqrt(0.1));
    double theta_f = std::asin(std::sqrt(0.1));
    double theta_L1 = std::asin(std::sqrt(0.6));
    double theta_L2 = std::asin(std::sqrt(0.5));
    double theta_L3 = std::asin(std::sqrt(0.6));
    /// DAC clamp; infinity disables clamping.
    double y_max = std::numeric_limits<double>::infinity();
    double f_max = 0.35;
    long round_trips = 1000;
    bool noise_on = true;
    /// -1 injects -sum_j J_ij x_j, which drives the network toward low H.
    double feedback_sign = -1.0;
    /// Variance of the in-phase quadrature before the first round trip.
    double initial_variance = 0.0;
    /// Negates the signal-path vacuum draws (w1..w5 and the initial state).
    /// Pump noise enters step 7 through p_i only and is left as is.
    bool mirror_noise = false;
};

/// Throws ConfigError on out-of-range angles, y_max <= 0, F_max < 0, round_trips < 1.
void validate(const CimParams& params);

struct CimState {
    std::vector<double> a;
    long t = 0;  // completed round trips
};

struct Trajectory {
    std::vector<std::vector<double>> amplitudes;  // one snapshot per round trip, t = 0..T
    std::vector<double> energies;                 // energy(problem, sign(a)) per snapshot
};

/// CSV with header t,a_1..a_n,energy.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// Linear injection ramp F(t) = F_max t / T_ann.
double pump_schedule(long t, const CimParams& params);

/// max(min(z, z0), -z0).
inline double clamp(double z, double z0) { return std::max(std::min(z, z0), -z0); }

/// Step 7 for one pulse with pump amplitude p_i.
double psa_gain(double a, double pump_i, double eps_L);

/// e^{eps_L p} cos(tm) cos(tL1) cos(tf) cos(tL3): the noiseless round-trip
/// gain near a = 0 with feedback off.
double small_signal_multiplier(const CimParams& params);

/// Counter-addressed vacuum noise for one trial. Draw (t, step, pulse) is
/// computed from the trial key alone, so no draw depends on what else was sampled.
class NoiseSource {
  public:
    NoiseSource(std::uint64_t trial_key, int n, bool enabled, bool mirror = false)
        : key_(trial_key), n_(n), enabled_(enabled), mirror_(mirror) {}

    /// N(0, 1/2) sample. step 0 is the initial state, steps 1..6 are w1..w6.
    double draw(long t, int step, int pulse) const;
    bool enabled() const noexcept { return enabled_; }

  private:
    std::uint64_t key_;
    int n_;
    bool enabled_;
    bool mirror_;
};

/// Applies round trip state.t + 1 with F = pump_schedule(state.t + 1).
/// Throws DivergenceError if any amplitude becomes non-finite.
CimState round_trip(CimState state, const IsingProblem& problem, const CimParams& params, const NoiseSource& noise);

struct TrialResult {
    SpinConfig spins;
    double energy = 0.0;
    std::optional<Trajectory> trajectory;
    std::vector<double> final_amplitudes;
};

/// Starts from a = 0 (plus the optional initial variance), runs round trips
/// 1..T_ann and reads out sign(a).
TrialResult run_trial(const IsingProblem& problem, const CimParams& params, std::uint64_t seed, bool record = false);

/// Seed of trial `index` within a campaign seeded by `base_seed`.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index);

/// Empirical peak feedback scale: 3.0/sqrt(N) for SK and dense MAX-CUT, 0.35 for
/// cubic graphs (3-regular MAX-CUT and the Mobius ladder). ConfigError otherwise.
double optimal_fmax(ising::ProblemClass problem_class, int n, std::optional<int> degree = std::nullopt);
double optimal_fmax(const IsingProblem& problem);

/// Runs `trials` seeded trials and counts exact ground-energy hits.
analysis::Estimate success_probability(const IsingProblem& problem, const CimParams& params, int trials,
                                       double ground_energy, std::uint64_t base_seed, unsigned jobs = 1);

struct SweepRow {
    double f_max;
    analysis::Estimate estimate;
};

std::vector<SweepRow> fmax_sweep(const IsingProblem& problem, const CimParams& params,
                                 std::span<const double> fmax_grid, int trials, double ground_energy,
                                 std::uint64_t base_seed, unsigned jobs = 1);

}  // namespace cimbench::cim
