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

// Chimera hardware graphs, native clique embeddings and embedded problems.
//
// Qubit (row, col, shore, k) of an s x s Chimera with half-cell size kappa has
// id ((row * s + col) * 2 + shore) * kappa + k. Shore 0 qubits are "vertical"
// (coupled to the same k in the cells above and below), shore 1 qubits are
// "horizontal" (coupled to the same k left and right). Inside a cell every
// shore-0 qubit is coupled to every shore-1 qubit.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cimbench/analysis.hpp"
#include "cimbench/ising.hpp"
#include "json.hpp"

namespace cimbench::chimera {

using ising::IsingProblem;
using ising::SpinConfig;

struct QubitCoord {
    int row;
    int col;
    int shore;
    int k;
};

class ChimeraGraph {
  public:
    ChimeraGraph(int s, int kappa = 4);

    int size() const noexcept { return s_; }
    int kappa() const noexcept { return kappa_; }
    int num_qubits() const noexcept { return 2 * kappa_ * s_ * s_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    int qubit(int row, int col, int shore, int k) const noexcept {
        return ((row * s_ + col) * 2 + shore) * kappa_ + k;
    }
    QubitCoord coord(int q) const noexcept;
    bool has_edge(int p, int q) const;
    std::span<const int> neighbors(int q) const { return adjacency_[q]; }
    /// (p, q) with p < q, sorted.
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

  private:
    int s_;
    int kappa_;
    std::vector<std::vector<int>> adjacency_;  // sorted
    std::vector<std::pair<int, int>> edges_;
};

/// "16x16x4" (or "16" meaning kappa = 4). Only square grids are supported.
ChimeraGraph parse_chimera(std::string_view spec);
std::string describe(const ChimeraGraph& g);

ChimeraGraph chimera(int s, int kappa = 4);

struct CliqueEmbedding {
    int n_logical = 0;
    int grid = 0;   // Chimera size s the embedding was built for
    int kappa = 0;
    std::vector<std::vector<int>> chains;  // physical qubit ids, in path order
};

/// Native clique embedding built on the upper triangle of an m x m block of
/// cells, m = ceil(N / kappa). Logical spin v = kappa * g + k owns the vertical
/// qubits (r, g, 0, k) for r = 0..g and the horizontal qubits (g, c, 1, k) for
/// c = g..m-1: an L turning at the diagonal cell (g, g), m + 1 qubits in all.
/// Spins v = (g, k) and w = (g', k') with g < g' meet in cell (g, g'), where v's
/// horizontal qubit is coupled to w's vertical one; spins of the same group
/// meet in their shared diagonal cell.
CliqueEmbedding clique_embedding(int n_logical, const ChimeraGraph& g);

/// Empty when the embedding is valid on g; otherwise one message per violation
/// (overlap, disconnected chain, length, missing clique coupler, qubit count).
std::vector<std::string> validate_embedding(const CliqueEmbedding& emb, const ChimeraGraph& g);

struct EmbedOptions {
    /// Spread each logical coupling evenly over all couplers between the two
    /// chains instead of placing it on the lowest-index one.
    bool split_logical_weight = false;
};

/// Physical problem over the embedding's qubits only. Compact index c refers to
/// Chimera qubit `qubits[c]`; chains are listed in compact indices.
struct EmbeddedProblem {
    IsingProblem physical;
    CliqueEmbedding embedding;
    std::vector<int> qubits;
    std::vector<std::vector<int>> chains;
    double j_c = 0.0;
    double scale = 1.0;
};

/// Chain couplers carry -J_c, logical couplers J_ij, and everything (fields
/// included) is multiplied by scale = 1 / max |coupling| afterwards.
EmbeddedProblem embed_problem(const IsingProblem& logical, const CliqueEmbedding& emb, const ChimeraGraph& g,
                              double j_c, EmbedOptions options = {});

struct Decoded {
    SpinConfig logical;
    int n_broken = 0;
};

/// Majority vote per chain; ties go to the chain's first qubit. A chain that is
/// not unanimous counts as broken.
Decoded decode_majority(std::span<const std::int8_t> physical, const EmbeddedProblem& embedded);

/// Physical configuration in which every chain copies its logical spin.
SpinConfig replicate(std::span<const std::int8_t> logical, const EmbeddedProblem& embedded);

enum class JcClass { sk, dense_maxcut, variable_density };
JcClass parse_jc_class(std::string_view tag);

/// 1.1 N^{1/2} (SK), 0.047 N^{3/2} (dense MAX-CUT), 9.5 (N/20)^{3/2} x (variable density).
double jc_heuristic(JcClass problem_class, int n, std::optional<double> edge_density = std::nullopt);
/// Chooses the rule from the problem's class tag; custom problems use the
/// measured edge density.
double jc_heuristic(const IsingProblem& problem);

struct AnnealSettings {
    int sweeps = 1000;
    double beta_start = 0.1;
    double beta_end = 10.0;
};

struct JcSweepRow {
    double j_c;
    analysis::Estimate estimate;
    double median_broken;
    double mean_broken;
};

/// Simulated annealing on the embedded problem at every J_c, decoded by
/// majority vote and scored against the logical ground energy.
std::vector<JcSweepRow> embedded_anneal_sweep(const IsingProblem& logical, const CliqueEmbedding& emb,
                                              const ChimeraGraph& g, std::span<const double> jc_grid,
                                              const AnnealSettings& settings, int trials, std::uint64_t seed,
                                              double ground_energy, unsigned jobs = 1);

/// Instance document for the physical problem plus an "embedding" block.
nlohmann::json to_json(const EmbeddedProblem& embedded, const ChimeraGraph& g);

}  // namespace cimbench::chimera
