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

#include "cimbench/chimera.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "cimbench/error.hpp"
#include "cimbench/instance_io.hpp"
#include "cimbench/parallel.hpp"
#include "cimbench/rng.hpp"
#include "cimbench/solvers.hpp"

namespace cimbench::chimera {

ChimeraGraph::ChimeraGraph(int s, int kappa) : s_(s), kappa_(kappa) {
    if (s < 1 || kappa < 1) throw ConfigError("Chimera needs s >= 1 and kappa >= 1");
    if (static_cast<long long>(2) * kappa * s * s > 1'000'000) throw ConfigError("Chimera graph too large");
    adjacency_.resize(static_cast<std::size_t>(num_qubits()));
    auto link = [&](int p, int q) {
        edges_.emplace_back(std::min(p, q), std::max(p, q));
        adjacency_[p].push_back(q);
        adjacency_[q].push_back(p);
    };
    for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c)
            for (int k = 0; k < kappa; ++k) {
                for (int k2 = 0; k2 < kappa; ++k2) link(qubit(r, c, 0, k), qubit(r, c, 1, k2));
                if (r + 1 < s) link(qubit(r, c, 0, k), qubit(r + 1, c, 0, k));
                if (c + 1 < s) link(qubit(r, c, 1, k), qubit(r, c + 1, 1, k));
            }
    std::sort(edges_.begin(), edges_.end());
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

QubitCoord ChimeraGraph::coord(int q) const noexcept {
    const int k = q % kappa_;
    const int shore = (q / kappa_) % 2;
    const int cell = q / (2 * kappa_);
    return {cell / s_, cell % s_, shore, k};
}

bool ChimeraGraph::has_edge(int p, int q) const {
    if (p < 0 || q < 0 || p >= num_qubits() || q >= num_qubits()) return false;
    const auto& nb = adjacency_[p];
    return std::binary_search(nb.begin(), nb.end(), q);
}

ChimeraGraph chimera(int s, int kappa) { return ChimeraGraph(s, kappa); }

ChimeraGraph parse_chimera(std::string_view spec) {
    std::vector<int> parts;
    std::string token;
    std::istringstream in{std::string(spec)};
    while (std::getline(in, token, 'x')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stoi(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ConfigError("malformed Chimera descriptor '" + std::string(spec) + "'");
        }
    }
    if (parts.size() == 1) return ChimeraGraph(parts[0], 4);
    if (parts.size() == 3 && parts[0] == parts[1]) return ChimeraGraph(parts[0], parts[2]);
    throw ConfigError("Chimera descriptor must look like SxSxK, got '" + std::string(spec) + "'");
}

std::string describe(const ChimeraGraph& g) {
    return std::to_string(g.size()) + "x" + std::to_string(g.size()) + "x" + std::to_string(g.kappa());
}

CliqueEmbedding clique_embedding(int n_logical, const ChimeraGraph& g) {
    const int kappa = g.kappa();
    if (n_logical < 1) throw ConfigError("clique embedding needs at least one logical spin");
    if (n_logical > kappa * g.size())
        throw ConfigError("clique of " + std::to_string(n_logical) + " spins does not fit on " + describe(g) +
                          " (limit " + std::to_string(kappa * g.size()) + ")");
    const int m = (n_logical + kappa - 1) / kappa;
    CliqueEmbedding emb;
    emb.n_logical = n_logical;
    emb.grid = g.size();
    emb.kappa = kappa;
    emb.chains.resize(static_cast<std::size_t>(n_logical));
    for (int v = 0; v < n_logical; ++v) {
        const int group = v / kappa;
        const int k = v % kappa;
        auto& chain = emb.chains[v];
        chain.reserve(static_cast<std::size_t>(m + 1));
        for (int r = 0; r <= group; ++r) chain.push_back(g.qubit(r, group, 0, k));
        for (int c = group; c < m; ++c) chain.push_back(g.qubit(group, c, 1, k));
    }
    return emb;
}

std::vector<std::string> validate_embedding(const CliqueEmbedding& emb, const ChimeraGraph& g) {
    std::vector<std::string> problems;
    const int n = emb.n_logical;
    if (static_cast<int>(emb.chains.size()) != n) {
        problems.push_back("chain count differs from n_logical");
        return problems;
    }
    const int expected_len = (n + g.kappa() - 1) / g.kappa() + 1;
    std::vector<int> owner(static_cast<std::size_t>(g.num_qubits()), -1);
    std::size_t total = 0;
    for (int v = 0; v < n; ++v) {
        const auto& chain = emb.chains[v];
        total += chain.size();
        if (static_cast<int>(chain.size()) != expected_len)
            problems.push_back("chain " + std::to_string(v) + " has " + std::to_string(chain.size()) +
                               " qubits, expected " + std::to_string(expected_len));
        for (int q : chain) {
            if (q < 0 || q >= g.num_qubits()) {
                problems.push_back("chain " + std::to_string(v) + " uses qubit " + std::to_string(q) +
                                   " outside the graph");
                continue;
            }
            if (owner[q] != -1)
                problems.push_back("qubit " + std::to_string(q) + " shared by chains " + std::to_string(owner[q]) +
                                   " and " + std::to_string(v));
            owner[q] = v;
        }
    }
    if (!problems.empty()) return problems;

    for (int v = 0; v < n; ++v) {
        const auto& chain = emb.chains[v];
        if (chain.empty()) continue;
        std::set<int> seen{chain.front()};
        std::queue<int> frontier;
        frontier.push(chain.front());
        while (!frontier.empty()) {
            const int q = frontier.front();
            frontier.pop();
            for (int p : g.neighbors(q))
                if (owner[p] == v && seen.insert(p).second) frontier.push(p);
        }
        if (seen.size() != chain.size()) problems.push_back("chain " + std::to_string(v) + " is not connected");
    }

    std::vector<char> touching(static_cast<std::size_t>(n) * n, 0);
    for (int v = 0; v < n; ++v)
        for (int q : emb.chains[v])
            for (int p : g.neighbors(q))
                if (owner[p] >= 0 && owner[p] != v) touching[static_cast<std::size_t>(v) * n + owner[p]] = 1;
    for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
            if (!touching[static_cast<std::size_t>(v) * n + w])
                problems.push_back("no coupler between chains " + std::to_string(v) + " and " + std::to_string(w));

    const std::size_t expected_total = static_cast<std::size_t>(n) * expected_len;
    if (total != expected_total)
        problems.push_back("embedding uses " + std::to_string(total) + " qubits, expected " +
                           std::to_string(expected_total));
    return problems;
}

EmbeddedProblem embed_problem(const IsingProblem& logical, const CliqueEmbedding& emb, const ChimeraGraph& g,
                              double j_c, EmbedOptions options) {
    if (emb.n_logical != logical.n())
        throw ConfigError("embedding has " + std::to_string(emb.n_logical) + " chains, problem has n = " +
                          std::to_string(logical.n()));
    if (!(j_c > 0.0) || !std::isfinite(j_c)) throw ConfigError("chain coupling J_c must be positive");

    std::vector<int> qubits;
    std::vector<std::vector<int>> chains(emb.chains.size());
    std::vector<int> compact(static_cast<std::size_t>(g.num_qubits()), -1);
    std::vector<int> owner(compact.size(), -1);
    for (std::size_t v = 0; v < emb.chains.size(); ++v)
        for (int q : emb.chains[v]) {
            if (q < 0 || q >= g.num_qubits() || compact[q] != -1) throw ConfigError("invalid embedding chains");
            compact[q] = static_cast<int>(qubits.size());
            owner[q] = static_cast<int>(v);
            chains[v].push_back(compact[q]);
            qubits.push_back(q);
        }

    struct Raw {
        int p, q;
        double value;
    };
    std::vector<Raw> raw;
    double max_abs = j_c;
    for (std::size_t v = 0; v < emb.chains.size(); ++v) {
        const auto& chain = emb.chains[v];
        for (std::size_t k = 1; k < chain.size(); ++k) {
            if (!g.has_edge(chain[k - 1], chain[k]))
                throw SolverError("chain " + std::to_string(v) + " is not a path in the Chimera graph");
            raw.push_back({compact[chain[k - 1]], compact[chain[k]], -j_c});
        }
    }
    for (const auto& e : logical.edges()) {
        std::vector<std::pair<int, int>> couplers;
        for (int q : emb.chains[e.i])
            for (int p : g.neighbors(q))
                if (owner[p] == e.j) couplers.emplace_back(std::min(p, q), std::max(p, q));
        if (couplers.empty())
            throw SolverError("no coupler between chains " + std::to_string(e.i) + " and " + std::to_string(e.j));
        std::sort(couplers.begin(), couplers.end());
        if (!options.split_logical_weight) couplers.resize(1);
        const double share = e.value / static_cast<double>(couplers.size());
        for (auto [p, q] : couplers) raw.push_back({compact[p], compact[q], share});
        max_abs = std::max(max_abs, std::abs(share));
    }

    const double scale = 1.0 / max_abs;
    std::vector<IsingProblem::Edge> edges;
    edges.reserve(raw.size());
    for (const auto& r : raw) edges.push_back({std::min(r.p, r.q), std::max(r.p, r.q), r.value * scale});
    std::vector<double> fields(qubits.size(), 0.0);
    if (logical.has_fields())
        for (std::size_t v = 0; v < chains.size(); ++v)
            for (int c : chains[v]) fields[c] = logical.field(static_cast<int>(v)) * scale / chains[v].size();

    return EmbeddedProblem{IsingProblem::from_edges(static_cast<int>(qubits.size()), edges, std::move(fields)),
                           emb, std::move(qubits), std::move(chains), j_c, scale};
}

Decoded decode_majority(std::span<const std::int8_t> physical, const EmbeddedProblem& embedded) {
    if (physical.size() != embedded.qubits.size())
        throw ConfigError("physical configuration has " + std::to_string(physical.size()) +
                          " spins, embedding uses " + std::to_string(embedded.qubits.size()));
    Decoded out;
    out.logical.resize(embedded.chains.size());
    for (std::size_t v = 0; v < embedded.chains.size(); ++v) {
        const auto& chain = embedded.chains[v];
        int sum = 0;
        for (int c : chain) sum += physical[c];
        if (sum > 0)
            out.logical[v] = 1;
        else if (sum < 0)
            out.logical[v] = -1;
        else
            out.logical[v] = physical[chain.front()];
        if (std::abs(sum) != static_cast<int>(chain.size())) ++out.n_broken;
    }
    return out;
}

SpinConfig replicate(std::span<const std::int8_t> logical, const EmbeddedProblem& embedded) {
    if (logical.size() != embedded.chains.size()) throw ConfigError("logical configuration length mismatch");
    SpinConfig physical(embedded.qubits.size());
    for (std::size_t v = 0; v < embedded.chains.size(); ++v)
        for (int c : embedded.chains[v]) physical[c] = logical[v];
    return physical;
}

JcClass parse_jc_class(std::string_view tag) {
    if (tag == "sk") return JcClass::sk;
    if (tag == "dense-maxcut" || tag == "dense") return JcClass::dense_maxcut;
    if (tag == "variable-density") return JcClass::variable_density;
    throw ConfigError("unknown J_c class '" + std::string(tag) + "'");
}

double jc_heuristic(JcClass problem_class, int n, std::optional<double> edge_density) {
    if (n < 1) throw ConfigError("J_c rule needs n >= 1");
    const double nn = static_cast<double>(n);
    switch (problem_class) {
        case JcClass::sk: return 1.1 * std::sqrt(nn);
        case JcClass::dense_maxcut: return 0.047 * std::pow(nn, 1.5);
        case JcClass::variable_density:
            if (!edge_density) throw ConfigError("variable-density J_c rule needs the edge density");
            return 9.5 * std::pow(nn / 20.0, 1.5) * *edge_density;
    }
    throw ConfigError("unknown J_c class");
}

double jc_heuristic(const IsingProblem& problem) {
    switch (problem.meta().problem_class) {
        case ising::ProblemClass::sk: return jc_heuristic(JcClass::sk, problem.n());
        case ising::ProblemClass::dense_maxcut: return jc_heuristic(JcClass::dense_maxcut, problem.n());
        default: {
            const double n = problem.n();
            const double density = n > 1 ? 2.0 * static_cast<double>(problem.edge_count()) / (n * (n - 1)) : 0.0;
            return jc_heuristic(JcClass::variable_density, problem.n(), density);
        }
    }
}

std::vector<JcSweepRow> embedded_anneal_sweep(const IsingProblem& logical, const CliqueEmbedding& emb,
                                              const ChimeraGraph& g, std::span<const double> jc_grid,
                                              const AnnealSettings& settings, int trials, std::uint64_t seed,
                                              double ground_energy, unsigned jobs) {
    if (jc_grid.empty()) throw ConfigError("J_c sweep needs a nonempty grid");
    if (trials < 1) throw ConfigError("J_c sweep needs trials >= 1");
    std::vector<JcSweepRow> rows;
    for (double j_c : jc_grid) {
        const EmbeddedProblem embedded = embed_problem(logical, emb, g, j_c);
        std::vector<char> hit(static_cast<std::size_t>(trials), 0);
        std::vector<double> broken(hit.size(), 0.0);
        // Trial k uses the same stream at every J_c.
        parallel_for(hit.size(), jobs, [&](std::size_t k) {
            solvers::SaOptions sa;
            sa.sweeps = settings.sweeps;
            sa.beta_start = settings.beta_start;
            sa.beta_end = settings.beta_end;
            sa.seed = rng::derive(seed, k);
            const auto r = solvers::simulated_annealing(embedded.physical, sa);
            const Decoded d = decode_majority(r.best_config, embedded);
            hit[k] = solvers::same_energy(logical, ising::energy(logical, d.logical), ground_energy) ? 1 : 0;
            broken[k] = d.n_broken;
        });
        std::uint64_t successes = 0;
        double total_broken = 0.0;
        for (std::size_t k = 0; k < hit.size(); ++k) {
            successes += static_cast<std::uint64_t>(hit[k]);
            total_broken += broken[k];
        }
        rows.push_back({j_c, analysis::wilson_interval(successes, hit.size()),
                        analysis::median_iqr(broken).median, total_broken / static_cast<double>(trials)});
    }
    return rows;
}

nlohmann::json to_json(const EmbeddedProblem& embedded, const ChimeraGraph& g) {
    nlohmann::json doc = io::to_json(embedded.physical);
    nlohmann::json chains = nlohmann::json::array();
    for (const auto& chain : embedded.embedding.chains) chains.push_back(chain);
    doc["embedding"] = {
        {"chimera", describe(g)},         {"J_c", embedded.j_c},
        {"scale", embedded.scale},        {"n_logical", embedded.embedding.n_logical},
        {"qubits", embedded.qubits},      {"chains", std::move(chains)},
    };
    return doc;
}

}  // namespace cimbench::chimera
