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

#include <cstdint>
#include <optional>
#include <vector>

#include "cimbench/ising.hpp"
#include "cimbench/rng.hpp"

namespace cimbench::solvers {

using ising::IsingProblem;
using ising::SpinConfig;

struct SolveResult {
    double best_energy = 0.0;
    SpinConfig best_config;
    bool proven_optimal = false;
    std::uint64_t energy_evaluations = 0;
    double wall_time = 0.0;  // seconds
    /// Configurations attaining the minimum, both members of each +-s pair; brute force only.
    std::optional<std::uint64_t> degeneracy;
    /// Set by the multi-run oracle path.
    std::optional<bool> all_runs_agree;
    /// Per adjacent replica pair, parallel tempering only.
    std::vector<double> swap_acceptance;
};

/// Exhaustive Gray-code enumeration with incremental local fields and the
/// global spin-flip symmetry halved out when h = 0. Throws ConfigError above max_n.
SolveResult brute_force(const IsingProblem& problem, int max_n = 30);

/// Straight enumeration re-evaluating the energy of every configuration from
/// scratch. Independent cross-check for brute_force; n <= 20.
SolveResult enumerate_plain(const IsingProblem& problem);

/// Single-spin-flip Metropolis walker keeping local fields and the energy
/// up to date incrementally. Sweeps visit spins in index order.
class MetropolisChain {
  public:
    MetropolisChain(const IsingProblem& problem, SpinConfig initial);

    /// One sweep at inverse temperature beta. Returns the number of accepted flips.
    int sweep(double beta, rng::Stream& stream);
    /// Same, reporting every new minimum via the callback (energy, spins).
    template <typename OnImprove>
    int sweep(double beta, rng::Stream& stream, double& best, OnImprove&& on_improve);

    double energy() const noexcept { return energy_; }
    const SpinConfig& spins() const noexcept { return spins_; }
    /// Recomputes the energy from scratch and compares; throws std::logic_error on mismatch.
    void audit() const;

  private:
    bool try_flip(int i, double beta, rng::Stream& stream);

    const IsingProblem* problem_;
    SpinConfig spins_;
    std::vector<double> local_;
    double energy_;
};

struct SaOptions {
    int sweeps = 1000;
    double beta_start = 0.1;
    double beta_end = 3.0;
    std::uint64_t seed = 0;
    /// Re-evaluate the energy after every sweep (n <= 32 only).
    bool audit_energy = false;
};

/// Metropolis with beta ramped linearly from beta_start to beta_end over the
/// sweeps, from a random start; reports the best configuration ever visited.
SolveResult simulated_annealing(const IsingProblem& problem, const SaOptions& options);

struct PtConfig {
    int replicas = 16;
    double beta_min = 0.1;
    double beta_max = 3.0;
    int sweeps = 10000;
    int swap_interval = 1;
    std::uint64_t seed = 0;
    bool audit_energy = false;
};

void validate(const PtConfig& cfg);
/// Geometric ladder, ascending.
std::vector<double> beta_ladder(const PtConfig& cfg);

/// Exchange acceptance for adjacent replicas: min(1, exp((b_i - b_j)(E_i - E_j))).
double swap_probability(double beta_i, double energy_i, double beta_j, double energy_j);

/// Replica-exchange Monte Carlo. Replica k draws from its own stream derived
/// from (seed, k); swap decisions come from a separate stream.
SolveResult parallel_tempering(const IsingProblem& problem, const PtConfig& cfg);

struct OracleOptions {
    int brute_force_max_n = 26;
    int pt_runs = 5;
    PtConfig pt;
};

/// Exact for n <= brute_force_max_n; otherwise the best of pt_runs independent
/// parallel-tempering runs with all_runs_agree recorded.
SolveResult ground_state_oracle(const IsingProblem& problem, const OracleOptions& options = {});

/// Exact for integral problems, relative 1e-9 otherwise.
bool same_energy(const IsingProblem& problem, double a, double b);

template <typename OnImprove>
int MetropolisChain::sweep(double beta, rng::Stream& stream, double& best, OnImprove&& on_improve) {
    int accepted = 0;
    const int n = static_cast<int>(spins_.size());
    for (int i = 0; i < n; ++i) {
        if (!try_flip(i, beta, stream)) continue;
        ++accepted;
        if (energy_ < best) {
            best = energy_;
            on_improve(energy_, spins_);
        }
    }
    return accepted;
}

}  // namespace cimbench::solvers
