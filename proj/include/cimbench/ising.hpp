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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cimbench::ising {

enum class ProblemClass { sk, dense_maxcut, regular_maxcut, mobius, custom };

std::string_view to_string(ProblemClass c);
/// Accepts the canonical tags and the short CLI aliases ("dense", "regular").
ProblemClass parse_problem_class(std::string_view tag);

/// Entries are exactly +1 or -1.
using SpinConfig = std::vector<std::int8_t>;

struct Coupling {
    int j;
    double value;
};

struct ProblemMeta {
    ProblemClass problem_class = ProblemClass::custom;
    std::optional<std::uint64_t> seed;
    std::optional<int> degree;
};

/// H(s) = 1/2 sum_ij J_ij s_i s_j + sum_i h_i s_i over s in {+1,-1}^n.
///
/// Immutable after construction. J is stored densely (row-major, symmetric,
/// zero diagonal); a sparse row view is built once alongside it.
class IsingProblem {
  public:
    /// Throws ConfigError unless `couplings` is n*n, symmetric with zero diagonal,
    /// and `fields` is empty (all zero) or of length n.
    IsingProblem(int n, std::vector<double> couplings, std::vector<double> fields = {}, ProblemMeta meta = {});

    /// Builds from undirected edges (i, j, J_ij); repeated pairs are rejected.
    struct Edge {
        int i;
        int j;
        double value;
    };
    static IsingProblem from_edges(int n, std::span<const Edge> edges, std::vector<double> fields = {},
                                   ProblemMeta meta = {});

    int n() const noexcept { return n_; }
    double coupling(int i, int j) const { return couplings_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const double> row(int i) const {
        return {couplings_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
    }
    std::span<const double> dense() const noexcept { return couplings_; }
    std::span<const double> fields() const noexcept { return fields_; }
    double field(int i) const noexcept { return fields_[i]; }
    bool has_fields() const noexcept { return has_fields_; }

    /// Nonzero couplings of spin i in increasing neighbour order.
    std::span<const Coupling> neighbors(int i) const {
        return {adjacency_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
    }
    std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }
    /// Undirected edges with i < j, row-major order.
    std::vector<Edge> edges() const;

    /// True when every J and h entry is an integer, so energies are exact.
    bool integral() const noexcept { return integral_; }
    bool is_maxcut() const noexcept { return maxcut_; }
    const ProblemMeta& meta() const noexcept { return meta_; }
    double max_abs_coupling() const noexcept { return max_abs_coupling_; }

  private:
    int n_;
    std::vector<double> couplings_;
    std::vector<double> fields_;
    ProblemMeta meta_;
    std::vector<Coupling> adjacency_;
    std::vector<std::size_t> row_start_;
    bool has_fields_ = false;
    bool integral_ = true;
    bool maxcut_ = true;
    double max_abs_coupling_ = 0.0;
};

double energy(const IsingProblem& problem, std::span<const std::int8_t> spins);

/// Number of MAX-CUT edges crossing the partition: (|E| - H) / 2.
std::int64_t cut_value(const IsingProblem& problem, std::span<const std::int8_t> spins);

/// Throws ConfigError on a wrong length or an entry outside {+1,-1}.
void check_spins(const IsingProblem& problem, std::span<const std::int8_t> spins);

/// sign(0) = +1.
SpinConfig signs_of(std::span<const double> amplitudes);

/// Energy change from flipping spin i, given the local field sum_j J_ij s_j.
inline double flip_delta(int spin, double local_field, double bias) noexcept {
    return -2.0 * spin * (local_field + bias);
}

// Instance generators. Output is a pure function of the arguments: the stream is
// std::mt19937_64 seeded with `seed`, consumed in row-major pair order.

/// Fully connected, J_ij = +1 or -1 with probability 1/2 each.
IsingProblem gen_sk(int n, std::uint64_t seed);

/// Erdos-Renyi G(n, 1/2) as antiferromagnetic MAX-CUT (J = +1 on edges).
IsingProblem gen_dense_maxcut(int n, std::uint64_t seed);

struct RegularOptions {
    int attempts_per_slot = 200;
    int max_restarts = 50;
};

/// Simple d-regular graph as MAX-CUT. Edges are added one at a time between a
/// random open stub and a random eligible partner; a slot that fails
/// `attempts_per_slot` times discards the partial graph and restarts.
IsingProblem gen_regular(int n, int d, std::uint64_t seed, RegularOptions options = {});

/// Cycle of length n plus the n/2 diameters, all couplings +1.
IsingProblem gen_mobius_ladder(int n);

}  // namespace cimbench::ising
