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

#include <cmath>
#include <random>

#include "cimbench/analysis.hpp"
#include "cimbench/error.hpp"
#include "doctest.h"

using namespace cimbench;
using analysis::Point;

namespace {

std::pair<double, double> wilson_reference(double k, double n, double z) {
    const double p = k / n, z2 = z * z;
    const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {center - half, center + half};
}

std::vector<Point> square_exp_points(double n0, double noise, std::mt19937_64& gen) {
    std::normal_distribution<double> g(0, 1);
    std::vector<Point> pts;
    for (int n = 10; n <= 60; n += 5) pts.push_back({double(n), std::exp(-std::pow(n / n0, 2)) * (1 + noise * g(gen))});
    return pts;
}

std::vector<Point> logistic_points(double alpha, double beta, double noise, std::mt19937_64& gen) {
    std::normal_distribution<double> g(0, 1);
    std::vector<Point> pts;
    for (int n = 1; n <= 100; ++n) {
        const double p = alpha / ((alpha - 1) + std::exp(beta * n));
        pts.push_back({double(n), std::min(1.0, p * (1 + noise * g(gen)))});
    }
    return pts;
}

}  // namespace

TEST_CASE("Wilson interval") {
    for (auto [k, n] : {std::pair{3, 10}, {50, 100}, {1, 200}, {199, 200}}) {
        const auto e = analysis::wilson_interval(k, n);
        const auto [lo, hi] = wilson_reference(k, n, 1.959963984540054);
        CHECK(e.lo == doctest::Approx(lo).epsilon(1e-12));
        CHECK(e.hi == doctest::Approx(hi).epsilon(1e-12));
        CHECK(e.p_hat == double(k) / n);
    }
    const auto none = analysis::wilson_interval(0, 100);
    CHECK(none.p_hat == 0.0);
    CHECK(none.lo == 0.0);
    const auto all = analysis::wilson_interval(100, 100);
    CHECK(all.p_hat == 1.0);
    CHECK(all.hi == 1.0);
    CHECK_THROWS_AS(analysis::wilson_interval(1, 0), ConfigError);
    CHECK_THROWS_AS(analysis::wilson_interval(5, 4), ConfigError);
    const auto mid = wilson_reference(0, 100, 1.959963984540054);
    CHECK(analysis::point_probability(0, 100) == doctest::Approx((mid.first + mid.second) / 2));
    CHECK(analysis::point_probability(30, 100) == 0.3);
}

TEST_CASE("time to solution") {
    CHECK(analysis::time_to_solution(0.5, 1.0) == 7.0);
    CHECK(analysis::time_to_solution(0.99, 5e-6) == 5e-6);
    CHECK(std::isinf(analysis::time_to_solution(0.0, 1.0)));
    // ceil(ln 0.01 / ln 0.9) = ceil(43.7) = 44
    CHECK(analysis::time_to_solution(0.1, 2.0) == 88.0);
    // Exactly integral ratio: p = 0.9 gives ln 0.01 / ln 0.1 = 2.
    CHECK(analysis::time_to_solution(0.9, 1.0) == 2.0);
    double last = analysis::kInfinity;
    for (double p = 0.001; p < 1.0; p += 0.001) {
        const double t = analysis::time_to_solution(p, 1.0);
        CHECK(t <= last);
        CHECK(analysis::time_to_solution(p, 3.0) == doctest::Approx(3 * t));
        last = t;
    }
    CHECK_THROWS_AS(analysis::time_to_solution(1.5, 1.0), ConfigError);
    CHECK_THROWS_AS(analysis::time_to_solution(0.5, 0.0), ConfigError);
}

TEST_CASE("square-exponential fit") {
    std::mt19937_64 gen(1);
    const auto exact = analysis::fit_square_exp(square_exp_points(20, 0, gen));
    CHECK(exact.n0 == doctest::Approx(20).epsilon(1e-9));
    CHECK(exact.residual_norm < 1e-8);
    CHECK(exact.model == "square-exp");
    int good = 0;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 g(seed);
        good += std::abs(analysis::fit_square_exp(square_exp_points(20, 0.05, g)).n0 / 20 - 1) < 0.05;
    }
    CHECK(good >= 19);
    std::vector<Point> with_zero = {{10, 0.78}, {20, 0.37}, {40, 0.0}};
    const auto dropped = analysis::fit_square_exp(with_zero);
    CHECK(dropped.points_used == 2);
    CHECK_FALSE(dropped.warnings.empty());
    std::vector<Point> zeros = {{10, 0}, {20, 0}};
    CHECK_THROWS_AS(analysis::fit_square_exp(zeros), ConfigError);
    std::vector<Point> above = {{10, 1.2}, {20, 0.5}};
    CHECK_THROWS_AS(analysis::fit_square_exp(above), ConfigError);
}

TEST_CASE("logistic fit") {
    std::mt19937_64 gen(2);
    const auto exact = analysis::fit_logistic(logistic_points(2.0, 0.1, 0, gen));
    CHECK(exact.alpha == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(exact.beta == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(exact.residual_norm < 1e-8);
    CHECK(analysis::logistic_model(0, 2.0, 0.1) == 1.0);
    int good = 0;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 g(seed);
        const auto f = analysis::fit_logistic(logistic_points(2.0, 0.1, 0.05, g));
        good += std::abs(f.alpha / 2.0 - 1) < 0.05 && std::abs(f.beta / 0.1 - 1) < 0.05;
    }
    CHECK(good >= 19);
    std::vector<Point> two = {{10, 0.5}, {20, 0.2}};
    CHECK_THROWS_AS(analysis::fit_logistic(two), ConfigError);
}

TEST_CASE("linear fits") {
    const std::vector<double> x = {1, 2, 3, 4}, y = {3, 5, 7, 9};
    const auto f = analysis::fit_linear(x, y);
    CHECK(f.alpha == doctest::Approx(1));
    CHECK(f.beta == doctest::Approx(2));
    CHECK(f.r_squared == doctest::Approx(1));
    std::vector<Point> pts;
    for (int n = 10; n <= 40; n += 10) pts.push_back({double(n), std::exp(0.5 - 0.07 * n)});
    const auto g = analysis::fit_log_linear(pts);
    CHECK(g.alpha == doctest::Approx(0.5));
    CHECK(g.beta == doctest::Approx(-0.07));
    std::vector<Point> env;
    for (int n = 16; n <= 64; n += 16) env.push_back({double(n), 2e-6 * std::exp(0.8 * std::sqrt(double(n)))});
    const auto h = analysis::fit_sqrt_exp(env);
    CHECK(h.alpha == doctest::Approx(2e-6));
    CHECK(h.beta == doctest::Approx(0.8));
    std::vector<Point> n0;
    for (double t : {1.0, 10.0, 100.0, 1000.0}) n0.push_back({t, 15.24 + 2.81 * std::log10(t)});
    const auto k = analysis::fit_n0_log(n0);
    CHECK(k.alpha == doctest::Approx(15.24));
    CHECK(k.beta == doctest::Approx(2.81));
}

TEST_CASE("N0 model") {
    using ising::ProblemClass;
    CHECK(analysis::n0_model(ProblemClass::sk, 100) == doctest::Approx(20.86).epsilon(1e-12));
    CHECK(analysis::n0_model(ProblemClass::dense_maxcut, 1) == doctest::Approx(10.05).epsilon(1e-12));
    CHECK(analysis::n0_model(ProblemClass::regular_maxcut, 1000) == doctest::Approx(119.90).epsilon(1e-12));
    std::string warning;
    analysis::n0_model(ProblemClass::sk, 5000, &warning);
    CHECK_FALSE(warning.empty());
    warning.clear();
    analysis::n0_model(ProblemClass::sk, 500, &warning);
    CHECK(warning.empty());
    CHECK_THROWS_AS(analysis::n0_model(ProblemClass::custom, 10), ConfigError);
}

TEST_CASE("optimal envelope") {
    analysis::Curve a{10, {{10, 100}, {20, 1000}, {30, 10000}}};
    analysis::Curve b{100, {{10, 300}, {20, 900}, {30, 2700}}};
    const std::vector<analysis::Curve> single = {a};
    const auto same = analysis::optimal_envelope(single);
    REQUIRE(same.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(same[k].t_soln == a.points[k].t_soln);
        CHECK(same[k].t_ann == 10);
    }
    const std::vector<analysis::Curve> both = {a, b};
    const auto env = analysis::optimal_envelope(both);
    CHECK(env[0].t_ann == 10);
    CHECK(env[1].t_ann == 100);
    CHECK(env[2].t_ann == 100);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(env[k].t_soln <= a.points[k].t_soln);
        CHECK(env[k].t_soln <= b.points[k].t_soln);
    }
    analysis::Curve tie{5, {{10, 100}}};
    const std::vector<analysis::Curve> tied = {a, tie};
    CHECK(analysis::optimal_envelope(tied)[0].t_ann == 5);
    CHECK_THROWS_AS(analysis::optimal_envelope(std::vector<analysis::Curve>{}), ConfigError);
}

TEST_CASE("CIM wall clock") {
    using analysis::Machine;
    CHECK(analysis::cim_wallclock(50, 1000, Machine::ntt_parallel) == doctest::Approx(125e-6).epsilon(1e-12));
    CHECK(analysis::cim_wallclock(7, 1000, Machine::stanford) == doctest::Approx(1.6e-3).epsilon(1e-12));
    CHECK(analysis::cim_wallclock(2000, 1000, Machine::ntt_serial) == doctest::Approx(5e-3).epsilon(1e-12));
    CHECK(analysis::parse_machine("ntt-serial") == Machine::ntt_serial);
    CHECK(analysis::to_string(Machine::stanford) == "stanford");
    CHECK_THROWS_AS(analysis::parse_machine("dw2q"), ConfigError);
}

TEST_CASE("quartiles") {
    const std::vector<double> three = {3, 1, 2};
    const auto q = analysis::median_iqr(three);
    CHECK(q.median == 2);
    CHECK(q.q25 == 1.5);
    CHECK(q.q75 == 2.5);
    const std::vector<double> one = {5};
    const auto r = analysis::median_iqr(one);
    CHECK((r.median == 5 && r.q25 == 5 && r.q75 == 5));
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> many(10000);
    for (auto& v : many) v = u(gen);
    const auto m = analysis::median_iqr(many);
    CHECK(std::abs(m.q25 - 0.25) < 0.02);
    CHECK(std::abs(m.median - 0.5) < 0.02);
    CHECK(std::abs(m.q75 - 0.75) < 0.02);
    CHECK_THROWS_AS(analysis::median_iqr(std::vector<double>{}), ConfigError);
}

TEST_CASE("rank correlation") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> down = {9, 7, 7, 2, 1};
    const std::vector<double> up = {1, 4, 9, 16, 25};
    CHECK(analysis::spearman(x, up) == doctest::Approx(1.0));
    // Ranks of down: 5, 3.5, 3.5, 2, 1 -> Pearson against 1..5.
    const double r = analysis::spearman(x, down);
    const std::vector<double> rx = {1, 2, 3, 4, 5}, ry = {5, 3.5, 3.5, 2, 1};
    double mx = 3, my = 3, sxy = 0, sxx = 0, syy = 0;
    for (int k = 0; k < 5; ++k) {
        sxy += (rx[k] - mx) * (ry[k] - my);
        sxx += (rx[k] - mx) * (rx[k] - mx);
        syy += (ry[k] - my) * (ry[k] - my);
    }
    CHECK(r == doctest::Approx(sxy / std::sqrt(sxx * syy)));
}
