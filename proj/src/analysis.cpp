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

#include "cimbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "cimbench/error.hpp"

namespace cimbench::analysis {

Estimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw ConfigError("success estimate needs at least one trial");
    if (successes > trials) throw ConfigError("more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    Estimate e;
    e.trials = trials;
    e.successes = successes;
    e.p_hat = p;
    e.lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    e.hi = successes == trials ? 1.0 : std::min(1.0, center + half);
    return e;
}

double point_probability(std::uint64_t successes, std::uint64_t trials) {
    const Estimate e = wilson_interval(successes, trials);
    return successes == 0 ? 0.5 * (e.lo + e.hi) : e.p_hat;
}

double time_to_solution(double p, double t_ann) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("success probability must lie in [0, 1]");
    if (!(t_ann > 0.0)) throw ConfigError("annealing time must be positive");
    if (p == 0.0) return kInfinity;
    if (p >= 0.99) return t_ann;
    // The 1e-9 slack keeps exact ratios such as p = 0.9 (ratio 2) from rounding up.
    const double runs = std::ceil(std::log(0.01) / std::log1p(-p) - 1e-9);
    return t_ann * std::max(1.0, runs);
}

namespace {

void check_probabilities(std::span<const Point> points) {
    for (const auto& pt : points)
        if (!(pt.p >= 0.0 && pt.p <= 1.0) || !std::isfinite(pt.n))
            throw ConfigError("fit points need finite n and p in [0, 1]");
}

void set_range(FitResult& fit, std::span<const Point> used) {
    fit.points_used = used.size();
    if (used.empty()) return;
    auto [lo, hi] = std::minmax_element(used.begin(), used.end(),
                                        [](const Point& a, const Point& b) { return a.n < b.n; });
    fit.n_min = lo->n;
    fit.n_max = hi->n;
}

std::vector<Point> drop_zeros(std::span<const Point> points, FitResult& fit) {
    std::vector<Point> kept;
    for (const auto& pt : points) {
        if (pt.p > 0.0) {
            kept.push_back(pt);
        } else {
            std::ostringstream msg;
            msg << "dropped point n = " << pt.n << " with p = 0";
            fit.warnings.push_back(msg.str());
        }
    }
    return kept;
}

}  // namespace

FitResult fit_square_exp(std::span<const Point> points) {
    check_probabilities(points);
    FitResult fit;
    fit.model = "square-exp";
    const auto kept = drop_zeros(points, fit);
    if (kept.size() < 2) throw ConfigError("square-exponential fit needs at least 2 points with p > 0");
    double sxy = 0.0, sxx = 0.0;
    for (const auto& pt : kept) {
        const double y = std::sqrt(-std::log(pt.p));
        sxy += pt.n * y;
        sxx += pt.n * pt.n;
    }
    if (!(sxy > 0.0)) throw ConfigError("square-exponential fit needs some p < 1 at n > 0");
    const double slope = sxy / sxx;
    fit.n0 = 1.0 / slope;
    double rss = 0.0;
    for (const auto& pt : kept) {
        const double r = std::sqrt(-std::log(pt.p)) - slope * pt.n;
        rss += r * r;
    }
    fit.residual_norm = std::sqrt(rss);
    set_range(fit, kept);
    return fit;
}

double logistic_model(double n, double alpha, double beta) { return alpha / ((alpha - 1.0) + std::exp(beta * n)); }

namespace {

// ln P(n) = ln(alpha) - ln(alpha - 1 + e^{beta n}), evaluated without overflow.
struct LogisticTerms {
    double log_p;
    double d_alpha;
    double d_beta;
};

LogisticTerms logistic_terms(double n, double alpha, double beta) {
    const double bn = beta * n;
    double log_den, inv_den_times_exp, inv_den;
    if (bn > 0.0) {
        const double r = (alpha - 1.0) * std::exp(-bn);  // (alpha-1)/e^{bn}
        log_den = bn + std::log1p(r);
        inv_den_times_exp = 1.0 / (1.0 + r);
        inv_den = std::exp(-bn) / (1.0 + r);
    } else {
        const double den = (alpha - 1.0) + std::exp(bn);
        log_den = std::log(den);
        inv_den_times_exp = std::exp(bn) / den;
        inv_den = 1.0 / den;
    }
    return {std::log(alpha) - log_den, 1.0 / alpha - inv_den, -n * inv_den_times_exp};
}

double logistic_rss(std::span<const Point> pts, double alpha, double beta) {
    double rss = 0.0;
    for (const auto& pt : pts) {
        const double r = logistic_terms(pt.n, alpha, beta).log_p - std::log(pt.p);
        rss += r * r;
    }
    return rss;
}

}  // namespace

FitResult fit_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear fit needs at least 2 paired samples");
    const double m = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) throw ConfigError("linear fit needs at least two distinct abscissae");
    FitResult fit;
    fit.model = "linear";
    fit.beta = sxy / sxx;
    fit.alpha = my - fit.beta * mx;
    double rss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.alpha + fit.beta * x[k]);
        rss += r * r;
    }
    fit.residual_norm = std::sqrt(rss);
    fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    fit.points_used = x.size();
    fit.n_min = *std::min_element(x.begin(), x.end());
    fit.n_max = *std::max_element(x.begin(), x.end());
    return fit;
}

FitResult fit_log_linear(std::span<const Point> points) {
    check_probabilities(points);
    std::vector<double> x, y;
    for (const auto& pt : points) {
        if (pt.p <= 0.0) throw ConfigError("log-linear fit needs p > 0 everywhere");
        x.push_back(pt.n);
        y.push_back(std::log(pt.p));
    }
    FitResult fit = fit_linear(x, y);
    fit.model = "log-linear";
    return fit;
}

FitResult fit_logistic(std::span<const Point> points, int max_iterations) {
    check_probabilities(points);
    FitResult fit;
    fit.model = "logistic";
    const auto pts = drop_zeros(points, fit);
    if (pts.size() < 3) throw ConfigError("logistic fit needs at least 3 points with p > 0");

    // Start from the large-n asymptote ln P ~ ln(alpha) - beta n.
    std::vector<double> x, y;
    for (const auto& pt : pts) {
        x.push_back(pt.n);
        y.push_back(std::log(pt.p));
    }
    const FitResult line = fit_linear(x, y);
    double alpha = std::max(1.05, std::exp(line.alpha));
    double beta = std::max(1e-6, -line.beta);

    double rss = logistic_rss(pts, alpha, beta);
    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        double a11 = 0.0, a12 = 0.0, a22 = 0.0, g1 = 0.0, g2 = 0.0;
        for (const auto& pt : pts) {
            const auto t = logistic_terms(pt.n, alpha, beta);
            const double r = t.log_p - std::log(pt.p);
            a11 += t.d_alpha * t.d_alpha;
            a12 += t.d_alpha * t.d_beta;
            a22 += t.d_beta * t.d_beta;
            g1 += t.d_alpha * r;
            g2 += t.d_beta * r;
        }
        if (std::max(std::abs(g1), std::abs(g2)) < 1e-15) {
            converged = true;
            break;
        }
        bool improved = false;
        for (int inner = 0; inner < 60 && !improved; ++inner) {
            const double b11 = a11 * (1.0 + lambda), b22 = a22 * (1.0 + lambda);
            const double det = b11 * b22 - a12 * a12;
            if (det == 0.0 || !std::isfinite(det)) {
                lambda *= 10.0;
                continue;
            }
            const double da = -(b22 * g1 - a12 * g2) / det;
            const double db = -(-a12 * g1 + b11 * g2) / det;
            double na = alpha + da, nb = beta + db;
            if (na <= 1.0) na = 1.0 + 0.5 * (alpha - 1.0);
            if (nb <= 0.0) nb = 0.5 * beta;
            const double nrss = logistic_rss(pts, na, nb);
            if (nrss <= rss) {
                const double step = std::max(std::abs(na - alpha) / alpha, std::abs(nb - beta) / beta);
                alpha = na;
                beta = nb;
                const double gain = rss - nrss;
                rss = nrss;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (step < 1e-13 || gain <= 1e-30 * std::max(1.0, rss)) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) converged = true;  // no descent direction left: stationary to precision
        if (converged) break;
    }
    fit.iterations = iter;
    fit.alpha = alpha;
    fit.beta = beta;
    fit.residual_norm = std::sqrt(rss);
    set_range(fit, pts);
    if (!converged || !std::isfinite(alpha) || !std::isfinite(beta) || alpha <= 1.0 || beta <= 0.0) {
        std::ostringstream msg;
        msg << "logistic fit did not converge after " << iter << " iterations (alpha = " << alpha
            << ", beta = " << beta << ", residual norm = " << fit.residual_norm << ")";
        throw SolverError(msg.str());
    }
    return fit;
}

FitResult fit_sqrt_exp(std::span<const Point> points) {
    std::vector<double> x, y;
    for (const auto& pt : points) {
        if (!std::isfinite(pt.p) || pt.p <= 0.0 || pt.n < 0.0) continue;
        x.push_back(std::sqrt(pt.n));
        y.push_back(std::log(pt.p));
    }
    FitResult line = fit_linear(x, y);
    FitResult fit = line;
    fit.model = "sqrt-exp";
    fit.alpha = std::exp(line.alpha);
    fit.beta = line.beta;
    fit.n_min = line.n_min * line.n_min;
    fit.n_max = line.n_max * line.n_max;
    return fit;
}

FitResult fit_n0_log(std::span<const Point> points) {
    std::vector<double> x, y;
    for (const auto& pt : points) {
        if (!(pt.n > 0.0)) throw ConfigError("annealing times must be positive");
        x.push_back(std::log10(pt.n));
        y.push_back(pt.p);
    }
    FitResult fit = fit_linear(x, y);
    fit.model = "n0-log";
    fit.n_min = std::min_element(points.begin(), points.end(), [](auto& a, auto& b) { return a.n < b.n; })->n;
    fit.n_max = std::max_element(points.begin(), points.end(), [](auto& a, auto& b) { return a.n < b.n; })->n;
    return fit;
}

double n0_model(ising::ProblemClass problem_class, double t_ann_us, std::string* warning) {
    double alpha, beta;
    switch (problem_class) {
        case ising::ProblemClass::sk: alpha = 15.24, beta = 2.81; break;
        case ising::ProblemClass::dense_maxcut: alpha = 10.05, beta = 1.39; break;
        case ising::ProblemClass::regular_maxcut:
        case ising::ProblemClass::mobius: alpha = 53.45, beta = 22.15; break;
        default: throw ConfigError("no N0 model for class " + std::string(ising::to_string(problem_class)));
    }
    if (!(t_ann_us > 0.0)) throw ConfigError("annealing time must be positive");
    if (warning) {
        warning->clear();
        if (t_ann_us < 1.0 || t_ann_us > 2000.0)
            *warning = "annealing time " + std::to_string(t_ann_us) + " us outside the fitted range [1, 2000] us";
    }
    return alpha + beta * std::log10(t_ann_us);
}

std::vector<EnvelopePoint> optimal_envelope(std::span<const Curve> curves) {
    if (curves.empty()) throw ConfigError("envelope needs at least one annealing-time group");
    std::map<double, EnvelopePoint> best;
    for (const auto& curve : curves) {
        for (const auto& pt : curve.points) {
            auto [it, fresh] = best.try_emplace(pt.n, EnvelopePoint{pt.n, pt.t_soln, curve.t_ann});
            if (fresh) continue;
            EnvelopePoint& cur = it->second;
            if (pt.t_soln < cur.t_soln || (pt.t_soln == cur.t_soln && curve.t_ann < cur.t_ann)) {
                cur.t_soln = pt.t_soln;
                cur.t_ann = curve.t_ann;
            }
        }
    }
    std::vector<EnvelopePoint> out;
    out.reserve(best.size());
    for (auto& [n, pt] : best) out.push_back(pt);
    return out;
}

Machine parse_machine(std::string_view tag) {
    if (tag == "ntt-parallel") return Machine::ntt_parallel;
    if (tag == "ntt-serial") return Machine::ntt_serial;
    if (tag == "stanford") return Machine::stanford;
    throw ConfigError("unknown machine '" + std::string(tag) + "'");
}

std::string_view to_string(Machine machine) {
    switch (machine) {
        case Machine::ntt_parallel: return "ntt-parallel";
        case Machine::ntt_serial: return "ntt-serial";
        case Machine::stanford: return "stanford";
    }
    return "ntt-parallel";
}

double cim_wallclock(int n, long round_trips, Machine machine) {
    if (n < 1 || round_trips < 1) throw ConfigError("wall-clock model needs n >= 1 and round_trips >= 1");
    const double trips = static_cast<double>(round_trips);
    switch (machine) {
        case Machine::ntt_parallel: return 2.5e-9 * n * trips;
        case Machine::ntt_serial: return 5.0e-6 * trips;
        case Machine::stanford: return 1.6e-6 * trips;
    }
    throw ConfigError("unknown machine");
}

Quartiles median_iqr(std::span<const double> values) {
    if (values.empty()) throw ConfigError("quartiles of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] + (v[hi] - v[lo]) * frac;
    };
    return {quantile(0.5), quantile(0.25), quantile(0.75)};
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("rank correlation needs at least 2 paired samples");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double m = static_cast<double>(x.size());
    const double mean = (m + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        sxy += (rx[k] - mean) * (ry[k] - mean);
        sxx += (rx[k] - mean) * (rx[k] - mean);
        syy += (ry[k] - mean) * (ry[k] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace cimbench::analysis
