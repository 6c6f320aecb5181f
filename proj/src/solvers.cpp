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

#include "cimbench/solvers.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cimbench/error.hpp"

namespace cimbench::solvers {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

SpinConfig random_spins(int n, rng::Stream& stream) {
    SpinConfig s(static_cast<std::size_t>(n));
    for (auto& v : s) v = static_cast<std::int8_t>(stream.spin());
    return s;
}

double tolerance_for(const IsingProblem& problem, double reference) {
    return problem.integral() ? 0.0 : 1e-9 * std::max(1.0, std::abs(reference));
}

}  // namespace

bool same_energy(const IsingProblem& problem, double a, double b) {
    return std::abs(a - b) <= tolerance_for(problem, std::max(std::abs(a), std::abs(b)));
}

SolveResult brute_force(const IsingProblem& problem, int max_n) {
    const int n = problem.n();
    if (n > max_n)
        throw ConfigError("brute force capped at n = " + std::to_string(max_n) + ", got " + std::to_string(n));
    const auto start = Clock::now();

    // Without fields H(s) = H(-s): pin the last spin and double the count.
    const bool symmetric = !problem.has_fields();
    const int free = symmetric ? n - 1 : n;
    const std::uint64_t total = std::uint64_t{1} << free;

    SpinConfig spins(static_cast<std::size_t>(n), 1);
    std::vector<double> local(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (double v : problem.row(i)) local[i] += v;
    double e = ising::energy(problem, spins);

    double best = e;
    std::uint64_t count = 1;
    SpinConfig best_config = spins;
    const auto h = problem.fields();
    for (std::uint64_t k = 1; k < total; ++k) {
        const int b = std::countr_zero(k);
        e += ising::flip_delta(spins[b], local[b], h[b]);
        spins[b] = static_cast<std::int8_t>(-spins[b]);
        const double twice = 2.0 * spins[b];
        const auto row = problem.row(b);
        for (int j = 0; j < n; ++j) local[j] += twice * row[j];

        const double tol = tolerance_for(problem, best);
        if (e < best - tol) {
            best = e;
            count = 1;
            best_config = spins;
        } else if (e <= best + tol) {
            ++count;
        }
    }

    SolveResult result;
    result.best_config = std::move(best_config);
    result.best_energy = ising::energy(problem, result.best_config);
    result.proven_optimal = true;
    result.energy_evaluations = total;
    result.degeneracy = symmetric ? 2 * count : count;
    result.wall_time = seconds_since(start);
    return result;
}

SolveResult enumerate_plain(const IsingProblem& problem) {
    const int n = problem.n();
    if (n > 20) throw ConfigError("plain enumeration capped at n = 20");
    const auto start = Clock::now();
    const std::uint64_t total = std::uint64_t{1} << n;
    SpinConfig spins(static_cast<std::size_t>(n));
    SolveResult result;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int i = 0; i < n; ++i) spins[i] = static_cast<std::int8_t>((mask >> i) & 1 ? -1 : 1);
        const double e = ising::energy(problem, spins);
        if (mask == 0 || e < result.best_energy - tolerance_for(problem, result.best_energy)) {
            result.best_energy = e;
            result.best_config = spins;
            count = 1;
        } else if (same_energy(problem, e, result.best_energy)) {
            ++count;
        }
    }
    result.proven_optimal = true;
    result.energy_evaluations = total;
    result.degeneracy = count;
    result.wall_time = seconds_since(start);
    return result;
}

MetropolisChain::MetropolisChain(const IsingProblem& problem, SpinConfig initial)
    : problem_(&problem), spins_(std::move(initial)) {
    ising::check_spins(problem, spins_);
    local_.assign(spins_.size(), 0.0);
    for (int i = 0; i < problem.n(); ++i)
        for (const auto& c : problem.neighbors(i)) local_[i] += c.value * spins_[c.j];
    energy_ = ising::energy(problem, spins_);
}

bool MetropolisChain::try_flip(int i, double beta, rng::Stream& stream) {
    const double delta = ising::flip_delta(spins_[i], local_[i], problem_->field(i));
    if (delta > 0.0 && stream.uniform() >= std::exp(-beta * delta)) return false;
    spins_[i] = static_cast<std::int8_t>(-spins_[i]);
    energy_ += delta;
    const double twice = 2.0 * spins_[i];
    for (const auto& c : problem_->neighbors(i)) local_[c.j] += twice * c.value;
    return true;
}

int MetropolisChain::sweep(double beta, rng::Stream& stream) {
    int accepted = 0;
    const int n = static_cast<int>(spins_.size());
    for (int i = 0; i < n; ++i) accepted += try_flip(i, beta, stream) ? 1 : 0;
    return accepted;
}

void MetropolisChain::audit() const {
    const double full = ising::energy(*problem_, spins_);
    if (!same_energy(*problem_, full, energy_))
        throw std::logic_error("incremental energy " + std::to_string(energy_) + " disagrees with full evaluation " +
                               std::to_string(full));
}

SolveResult simulated_annealing(const IsingProblem& problem, const SaOptions& options) {
    if (options.sweeps < 1) throw ConfigError("simulated annealing needs sweeps >= 1");
    if (!(options.beta_start >= 0.0) || !(options.beta_end >= 0.0))
        throw ConfigError("inverse temperatures must be nonnegative");
    const auto start = Clock::now();
    rng::Stream stream(options.seed);
    MetropolisChain chain(problem, random_spins(problem.n(), stream));
    const bool audit = options.audit_energy && problem.n() <= 32;

    SolveResult result;
    result.best_energy = chain.energy();
    result.best_config = chain.spins();
    auto keep = [&](double, const SpinConfig& s) { result.best_config = s; };
    for (int k = 0; k < options.sweeps; ++k) {
        const double frac = options.sweeps > 1 ? static_cast<double>(k) / (options.sweeps - 1) : 0.0;
        const double beta = options.beta_start + (options.beta_end - options.beta_start) * frac;
        chain.sweep(beta, stream, result.best_energy, keep);
        if (audit) chain.audit();
    }
    result.best_energy = ising::energy(problem, result.best_config);
    result.energy_evaluations = static_cast<std::uint64_t>(options.sweeps) * problem.n();
    result.wall_time = seconds_since(start);
    return result;
}

void validate(const PtConfig& cfg) {
    if (cfg.replicas < 2) throw ConfigError("parallel tempering needs at least 2 replicas");
    if (!(cfg.beta_min > 0.0) || !(cfg.beta_min < cfg.beta_max))
        throw ConfigError("parallel tempering needs 0 < beta_min < beta_max");
    if (cfg.sweeps < 1) throw ConfigError("parallel tempering needs sweeps >= 1");
    if (cfg.swap_interval < 1) throw ConfigError("swap interval must be >= 1");
}

std::vector<double> beta_ladder(const PtConfig& cfg) {
    validate(cfg);
    std::vector<double> betas(static_cast<std::size_t>(cfg.replicas));
    const double ratio = cfg.beta_max / cfg.beta_min;
    for (int k = 0; k < cfg.replicas; ++k)
        betas[k] = cfg.beta_min * std::pow(ratio, static_cast<double>(k) / (cfg.replicas - 1));
    betas.back() = cfg.beta_max;
    return betas;
}

double swap_probability(double beta_i, double energy_i, double beta_j, double energy_j) {
    const double exponent = (beta_i - beta_j) * (energy_i - energy_j);
    return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

SolveResult parallel_tempering(const IsingProblem& problem, const PtConfig& cfg) {
    const auto betas = beta_ladder(cfg);
    const auto start = Clock::now();
    const int r = cfg.replicas;
    const bool audit = cfg.audit_energy && problem.n() <= 32;

    // Streams belong to temperature slots; chains move between slots on swaps.
    std::vector<rng::Stream> streams;
    std::vector<MetropolisChain> chains;
    streams.reserve(r);
    chains.reserve(r);
    for (int k = 0; k < r; ++k) {
        streams.emplace_back(rng::derive(cfg.seed, static_cast<std::uint64_t>(k)));
        chains.emplace_back(problem, random_spins(problem.n(), streams.back()));
    }
    rng::Stream swap_stream(rng::derive(cfg.seed, 0x5a5a5a5aULL + static_cast<std::uint64_t>(r)));
    std::vector<int> slot(static_cast<std::size_t>(r));
    for (int k = 0; k < r; ++k) slot[k] = k;

    SolveResult result;
    result.best_energy = chains[0].energy();
    result.best_config = chains[0].spins();
    for (const auto& c : chains)
        if (c.energy() < result.best_energy) {
            result.best_energy = c.energy();
            result.best_config = c.spins();
        }
    auto keep = [&](double, const SpinConfig& s) { result.best_config = s; };

    std::vector<std::uint64_t> attempts(static_cast<std::size_t>(r - 1), 0), accepts(attempts.size(), 0);
    for (int sweep = 1; sweep <= cfg.sweeps; ++sweep) {
        for (int k = 0; k < r; ++k) {
            MetropolisChain& chain = chains[slot[k]];
            chain.sweep(betas[k], streams[k], result.best_energy, keep);
            if (audit) chain.audit();
        }
        if (sweep % cfg.swap_interval != 0) continue;
        for (int k = 0; k + 1 < r; ++k) {
            const double p = swap_probability(betas[k], chains[slot[k]].energy(), betas[k + 1],
                                              chains[slot[k + 1]].energy());
            ++attempts[k];
            if (p >= 1.0 || swap_stream.uniform() < p) {
                std::swap(slot[k], slot[k + 1]);
                ++accepts[k];
            }
        }
    }

    result.best_energy = ising::energy(problem, result.best_config);
    result.energy_evaluations = static_cast<std::uint64_t>(cfg.sweeps) * r * problem.n();
    result.swap_acceptance.resize(attempts.size());
    for (std::size_t k = 0; k < attempts.size(); ++k)
        result.swap_acceptance[k] = attempts[k] ? static_cast<double>(accepts[k]) / attempts[k] : 0.0;
    result.wall_time = seconds_since(start);
    return result;
}

SolveResult ground_state_oracle(const IsingProblem& problem, const OracleOptions& options) {
    if (problem.n() <= options.brute_force_max_n) return brute_force(problem, options.brute_force_max_n);
    if (options.pt_runs < 1) throw ConfigError("oracle needs at least one parallel-tempering run");
    const auto start = Clock::now();
    SolveResult best;
    bool agree = true;
    std::uint64_t evaluations = 0;
    for (int run = 0; run < options.pt_runs; ++run) {
        PtConfig cfg = options.pt;
        cfg.seed = rng::derive(options.pt.seed, static_cast<std::uint64_t>(run));
        SolveResult r = parallel_tempering(problem, cfg);
        evaluations += r.energy_evaluations;
        if (run == 0) {
            best = std::move(r);
            continue;
        }
        if (!same_energy(problem, r.best_energy, best.best_energy)) agree = false;
        if (r.best_energy < best.best_energy) best = std::move(r);
    }
    best.proven_optimal = false;
    best.all_runs_agree = agree;
    best.energy_evaluations = evaluations;
    best.wall_time = seconds_since(start);
    return best;
}

}  // namespace cimbench::solvers
