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

#include "cimbench/ising.hpp"

#include <algorithm>
#include <cmath>

#include "cimbench/error.hpp"
#include "cimbench/rng.hpp"

namespace cimbench::ising {

std::string_view to_string(ProblemClass c) {
    switch (c) {
        case ProblemClass::sk: return "sk";
        case ProblemClass::dense_maxcut: return "dense-maxcut";
        case ProblemClass::regular_maxcut: return "regular-maxcut";
        case ProblemClass::mobius: return "mobius";
        case ProblemClass::custom: return "custom";
    }
    return "custom";
}

ProblemClass parse_problem_class(std::string_view tag) {
    if (tag == "sk") return ProblemClass::sk;
    if (tag == "dense-maxcut" || tag == "dense") return ProblemClass::dense_maxcut;
    if (tag == "regular-maxcut" || tag == "regular" || tag == "cubic-maxcut") return ProblemClass::regular_maxcut;
    if (tag == "mobius") return ProblemClass::mobius;
    if (tag == "custom") return ProblemClass::custom;
    throw ConfigError("unknown problem class '" + std::string(tag) + "'");
}

IsingProblem::IsingProblem(int n, std::vector<double> couplings, std::vector<double> fields, ProblemMeta meta)
    : n_(n), couplings_(std::move(couplings)), fields_(std::move(fields)), meta_(meta) {
    if (n < 1) throw ConfigError("problem needs at least one spin");
    const auto nn = static_cast<std::size_t>(n);
    if (couplings_.size() != nn * nn)
        throw ConfigError("coupling matrix has " + std::to_string(couplings_.size()) + " entries, expected " +
                          std::to_string(nn * nn));
    if (fields_.empty()) fields_.assign(nn, 0.0);
    if (fields_.size() != nn) throw ConfigError("field vector length does not match n");

    row_start_.reserve(nn + 1);
    row_start_.push_back(0);
    for (int i = 0; i < n; ++i) {
        if (coupling(i, i) != 0.0) throw ConfigError("nonzero diagonal coupling at " + std::to_string(i));
        for (int j = 0; j < n; ++j) {
            const double v = coupling(i, j);
            if (!std::isfinite(v)) throw ConfigError("non-finite coupling");
            if (v != coupling(j, i))
                throw ConfigError("coupling matrix not symmetric at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
            if (v == 0.0) continue;
            adjacency_.push_back({j, v});
            if (v != std::round(v)) integral_ = false;
            if (v != 1.0) maxcut_ = false;
            max_abs_coupling_ = std::max(max_abs_coupling_, std::abs(v));
        }
        row_start_.push_back(adjacency_.size());
    }
    for (double h : fields_) {
        if (!std::isfinite(h)) throw ConfigError("non-finite field");
        if (h != 0.0) {
            has_fields_ = true;
            maxcut_ = false;
        }
        if (h != std::round(h)) integral_ = false;
    }
}

IsingProblem IsingProblem::from_edges(int n, std::span<const Edge> edges, std::vector<double> fields,
                                      ProblemMeta meta) {
    if (n < 1) throw ConfigError("problem needs at least one spin");
    const auto nn = static_cast<std::size_t>(n);
    std::vector<double> j(nn * nn, 0.0);
    std::vector<bool> seen(nn * nn, false);
    for (const Edge& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw ConfigError("edge index out of range");
        if (e.i == e.j) throw ConfigError("self-loop at " + std::to_string(e.i));
        const std::size_t a = static_cast<std::size_t>(e.i) * nn + e.j;
        const std::size_t b = static_cast<std::size_t>(e.j) * nn + e.i;
        if (seen[a]) throw ConfigError("duplicate edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ")");
        seen[a] = seen[b] = true;
        j[a] = j[b] = e.value;
    }
    return IsingProblem(n, std::move(j), std::move(fields), meta);
}

std::vector<IsingProblem::Edge> IsingProblem::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (int i = 0; i < n_; ++i)
        for (const Coupling& c : neighbors(i))
            if (c.j > i) out.push_back({i, c.j, c.value});
    return out;
}

void check_spins(const IsingProblem& problem, std::span<const std::int8_t> spins) {
    if (spins.size() != static_cast<std::size_t>(problem.n()))
        throw ConfigError("spin configuration has length " + std::to_string(spins.size()) + ", problem has n = " +
                          std::to_string(problem.n()));
    for (auto s : spins)
        if (s != 1 && s != -1) throw ConfigError("spin entries must be +1 or -1");
}

double energy(const IsingProblem& problem, std::span<const std::int8_t> spins) {
    check_spins(problem, spins);
    const int n = problem.n();
    if (problem.integral()) {
        std::int64_t total = 0;
        for (int i = 0; i < n; ++i) {
            std::int64_t row = 0;
            for (const Coupling& c : problem.neighbors(i))
                if (c.j > i) row += static_cast<std::int64_t>(c.value) * spins[c.j];
            total += row * spins[i] + static_cast<std::int64_t>(problem.field(i)) * spins[i];
        }
        return static_cast<double>(total);
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (const Coupling& c : problem.neighbors(i))
            if (c.j > i) row += c.value * spins[c.j];
        total += row * spins[i] + problem.field(i) * spins[i];
    }
    return total;
}

std::int64_t cut_value(const IsingProblem& problem, std::span<const std::int8_t> spins) {
    if (!problem.is_maxcut()) throw ConfigError("cut_value requires couplings in {0, +1} and zero fields");
    const auto h = static_cast<std::int64_t>(energy(problem, spins));
    const auto e = static_cast<std::int64_t>(problem.edge_count());
    return (e - h) / 2;
}

SpinConfig signs_of(std::span<const double> amplitudes) {
    SpinConfig s(amplitudes.size());
    std::transform(amplitudes.begin(), amplitudes.end(), s.begin(),
                   [](double a) { return static_cast<std::int8_t>(a < 0.0 ? -1 : 1); });
    return s;
}

namespace {

void require_min_size(int n) {
    if (n < 2) throw ConfigError("generator needs n >= 2, got " + std::to_string(n));
}

}  // namespace

IsingProblem gen_sk(int n, std::uint64_t seed) {
    require_min_size(n);
    rng::Stream stream(seed);
    std::vector<IsingProblem::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, static_cast<double>(stream.spin())});
    return IsingProblem::from_edges(n, edges, {}, {ProblemClass::sk, seed, std::nullopt});
}

IsingProblem gen_dense_maxcut(int n, std::uint64_t seed) {
    require_min_size(n);
    rng::Stream stream(seed);
    std::vector<IsingProblem::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (stream.coin()) edges.push_back({i, j, 1.0});
    return IsingProblem::from_edges(n, edges, {}, {ProblemClass::dense_maxcut, seed, std::nullopt});
}

IsingProblem gen_regular(int n, int d, std::uint64_t seed, RegularOptions options) {
    if (d < 1) throw ConfigError("regular graph degree must be >= 1");
    if (n < 2 || d > n - 1)
        throw ConfigError("no simple " + std::to_string(d) + "-regular graph on " + std::to_string(n) + " vertices");
    if ((static_cast<long>(n) * d) % 2 != 0)
        throw ConfigError("n*d is odd: no " + std::to_string(d) + "-regular graph on " + std::to_string(n) +
                          " vertices");

    rng::Stream stream(seed);
    const auto nn = static_cast<std::size_t>(n);
    const int slots = n * d / 2;
    std::vector<int> remaining(nn);
    std::vector<char> adjacent(nn * nn);
    std::vector<int> stubs;  // one entry per open stub
    std::vector<int> partners;
    std::vector<IsingProblem::Edge> edges;

    for (int restart = 0; restart <= options.max_restarts; ++restart) {
        std::fill(remaining.begin(), remaining.end(), d);
        std::fill(adjacent.begin(), adjacent.end(), 0);
        edges.clear();
        bool stuck = false;
        for (int slot = 0; slot < slots && !stuck; ++slot) {
            stubs.clear();
            for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), remaining[v], v);
            int attempt = 0;
            for (; attempt < options.attempts_per_slot; ++attempt) {
                const int u = stubs[stream.index(stubs.size())];
                partners.clear();
                for (int v = 0; v < n; ++v)
                    if (v != u && !adjacent[u * nn + v]) partners.insert(partners.end(), remaining[v], v);
                if (partners.empty()) continue;
                const int v = partners[stream.index(partners.size())];
                adjacent[u * nn + v] = adjacent[v * nn + u] = 1;
                --remaining[u];
                --remaining[v];
                edges.push_back({std::min(u, v), std::max(u, v), 1.0});
                break;
            }
            stuck = attempt == options.attempts_per_slot;
        }
        if (!stuck) {
            std::sort(edges.begin(), edges.end(),
                      [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
            return IsingProblem::from_edges(n, edges, {}, {ProblemClass::regular_maxcut, seed, d});
        }
    }
    throw SolverError("regular graph sampler exhausted " + std::to_string(options.max_restarts) +
                      " restarts for n = " + std::to_string(n) + ", d = " + std::to_string(d));
}

IsingProblem gen_mobius_ladder(int n) {
    if (n < 6 || n % 2 != 0) throw ConfigError("Mobius ladder needs even n >= 6, got " + std::to_string(n));
    std::vector<IsingProblem::Edge> edges;
    for (int i = 0; i < n; ++i) {
        const int next = (i + 1) % n;
        edges.push_back({std::min(i, next), std::max(i, next), 1.0});
    }
    for (int i = 0; i < n / 2; ++i) edges.push_back({i, i + n / 2, 1.0});
    return IsingProblem::from_edges(n, edges, {}, {ProblemClass::mobius, std::nullopt, 3});
}

}  // namespace cimbench::ising
