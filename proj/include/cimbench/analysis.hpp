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

// Benchmark analytics. Everything here is a pure function of its arguments.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cimbench/ising.hpp"

namespace cimbench::analysis {

struct Estimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double p_hat = 0.0;
    double lo = 0.0;  // 95% Wilson interval
    double hi = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

Estimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

/// Probability used for fits and TTS: the raw ratio, or the Wilson midpoint
/// when no trial succeeded.
double point_probability(std::uint64_t successes, std::uint64_t trials);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// T_ann * ceil(log(0.01) / log(1 - p)); t_ann for p >= 0.99, infinity for p = 0.
double time_to_solution(double p, double t_ann);

struct Point {
    double n;
    double p;
};

struct FitResult {
    std::string model;  // "square-exp", "logistic", "n0-log", "sqrt-exp", "log-linear"
    // square-exp: n0. logistic, n0-log: alpha and beta. sqrt-exp, log-linear: a and b.
    double n0 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double residual_norm = 0.0;
    double r_squared = 0.0;
    double n_min = 0.0;
    double n_max = 0.0;
    std::size_t points_used = 0;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// P = exp(-(n / N0)^2): least squares of sqrt(-ln p) on n through the origin.
/// Points with p = 0 are dropped with a warning.
FitResult fit_square_exp(std::span<const Point> points);

/// P = alpha / ((alpha - 1) + e^{beta n}), alpha > 1, beta > 0. Levenberg-Marquardt
/// on log residuals ln P(n) - ln p.
FitResult fit_logistic(std::span<const Point> points, int max_iterations = 500);
double logistic_model(double n, double alpha, double beta);

/// Ordinary least squares y = intercept + slope x, reported as alpha = intercept,
/// beta = slope, with r_squared.
FitResult fit_linear(std::span<const double> x, std::span<const double> y);

/// ln p linear in n; alpha = intercept, beta = slope.
FitResult fit_log_linear(std::span<const Point> points);

/// T = A e^{B sqrt(n)} from (n, T) pairs; alpha = A, beta = B. Finite T only.
FitResult fit_sqrt_exp(std::span<const Point> points);

/// N0 = alpha + beta log10(T_ann / us) from (t_ann_us, N0) pairs.
FitResult fit_n0_log(std::span<const Point> points);

/// Tabulated N0 = alpha + beta log10(T_ann / us) for sk, dense-maxcut and cubic
/// (regular-maxcut / mobius). Warns via `warning` outside [1, 2000] us.
double n0_model(ising::ProblemClass problem_class, double t_ann_us, std::string* warning = nullptr);

struct CurvePoint {
    double n;
    double t_soln;
};

struct Curve {
    double t_ann;
    std::vector<CurvePoint> points;
};

struct EnvelopePoint {
    double n;
    double t_soln;
    double t_ann;  // argmin, smaller t_ann on ties
};

/// Pointwise minimum over fixed-T_ann curves at every n present in any curve.
std::vector<EnvelopePoint> optimal_envelope(std::span<const Curve> curves);

enum class Machine { ntt_parallel, ntt_serial, stanford };
Machine parse_machine(std::string_view tag);
std::string_view to_string(Machine machine);

/// Anneal wall-clock in seconds: 2.5 n ns per round trip (NTT, parallelised),
/// 5 us (NTT, one problem per 1-km cavity) or 1.6 us (Stanford).
double cim_wallclock(int n, long round_trips, Machine machine);

struct Quartiles {
    double median;
    double q25;
    double q75;
};

/// Order statistics with linear interpolation between ranks.
Quartiles median_iqr(std::span<const double> values);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace cimbench::analysis
