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

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "cimbench/chimera.hpp"
#include "cimbench/error.hpp"
#include "cimbench/ising.hpp"
#include "cimbench/solvers.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cimbench;
using chimera::ChimeraGraph;

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Recomputes every structural property from the coordinates, not from the
// library's own validator.
void check_embedding(int n, const ChimeraGraph& g) {
    const auto emb = chimera::clique_embedding(n, g);
    REQUIRE(emb.chains.size() == std::size_t(n));
    const int length = ceil_div(n, g.kappa()) + 1;
    std::set<int> used;
    std::size_t total = 0;
    for (const auto& chain : emb.chains) {
        REQUIRE(chain.size() == std::size_t(length));
        total += chain.size();
        for (int q : chain) {
            REQUIRE(q >= 0);
            REQUIRE(q < g.num_qubits());
            used.insert(q);
        }
        std::set<int> members(chain.begin(), chain.end()), seen{chain.front()};
        std::queue<int> frontier;
        frontier.push(chain.front());
        while (!frontier.empty()) {
            const int q = frontier.front();
            frontier.pop();
            for (int r : members)
                if (!seen.count(r) && g.has_edge(q, r)) {
                    seen.insert(r);
                    frontier.push(r);
                }
        }
        REQUIRE(seen.size() == members.size());
    }
    CHECK(used.size() == total);
    CHECK(total == std::size_t(n * length));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            bool joined = false;
            for (int p : emb.chains[a])
                for (int q : emb.chains[b]) joined = joined || g.has_edge(p, q);
            REQUIRE_MESSAGE(joined, "chains ", a, " and ", b);
        }
    CHECK(chimera::validate_embedding(emb, g).empty());
}

std::size_t expected_edges(int s, int k) { return std::size_t(s) * s * k * k + 2 * std::size_t(s) * (s - 1) * k; }

}  // namespace

TEST_CASE("Chimera graph sizes") {
    const auto one = chimera::chimera(1, 4);
    CHECK(one.num_qubits() == 8);
    CHECK(one.num_edges() == 16);
    const auto two = chimera::chimera(2, 4);
    CHECK(two.num_edges() == expected_edges(2, 4));
    // Direct recount from coordinates.
    std::size_t count = 0;
    for (int p = 0; p < two.num_qubits(); ++p)
        for (int q = p + 1; q < two.num_qubits(); ++q) {
            const auto a = two.coord(p), b = two.coord(q);
            const bool intra = a.row == b.row && a.col == b.col && a.shore != b.shore;
            const bool vertical = a.shore == 0 && b.shore == 0 && a.k == b.k && a.col == b.col &&
                                  std::abs(a.row - b.row) == 1;
            const bool horizontal = a.shore == 1 && b.shore == 1 && a.k == b.k && a.row == b.row &&
                                    std::abs(a.col - b.col) == 1;
            const bool expect = intra || vertical || horizontal;
            CHECK(two.has_edge(p, q) == expect);
            count += expect;
        }
    CHECK(count == two.num_edges());
    const auto c16 = chimera::chimera(16);
    CHECK(c16.num_qubits() == 2048);
    CHECK(c16.num_edges() == expected_edges(16, 4));
    for (int q : {0, 77, 2047}) {
        const auto c = c16.coord(q);
        CHECK(c16.qubit(c.row, c.col, c.shore, c.k) == q);
    }
}

TEST_CASE("Chimera shape strings") {
    CHECK(chimera::parse_chimera("16x16x4").num_qubits() == 2048);
    CHECK(chimera::parse_chimera("4").size() == 4);
    CHECK(chimera::parse_chimera("3x3x2").kappa() == 2);
    CHECK(chimera::describe(chimera::chimera(4)) == "4x4x4");
    CHECK_THROWS_AS(chimera::parse_chimera("4x5x4"), ConfigError);
    CHECK_THROWS_AS(chimera::parse_chimera("abc"), ConfigError);
    CHECK_THROWS_AS(chimera::parse_chimera("0"), ConfigError);
}

TEST_CASE("clique embedding on one cell") {
    const auto g = chimera::chimera(1);
    const auto emb = chimera::clique_embedding(4, g);
    std::set<int> all;
    for (const auto& c : emb.chains) {
        CHECK(c.size() == 2);
        all.insert(c.begin(), c.end());
    }
    CHECK(all.size() == 8);
    check_embedding(4, g);
}

TEST_CASE("clique embeddings are valid for every size on C16") {
    const auto g = chimera::chimera(16);
    for (int n = 2; n <= 64; ++n) check_embedding(n, g);
    std::size_t q61 = 0;
    for (const auto& c : chimera::clique_embedding(61, g).chains) q61 += c.size();
    CHECK(q61 == 1037);
    CHECK_THROWS_AS(chimera::clique_embedding(65, g), ConfigError);
    check_embedding(7, chimera::chimera(3, 3));
}

TEST_CASE("validator reports broken embeddings") {
    const auto g = chimera::chimera(4);
    auto emb = chimera::clique_embedding(8, g);
    auto overlap = emb;
    overlap.chains[1][0] = overlap.chains[0][0];
    CHECK_FALSE(chimera::validate_embedding(overlap, g).empty());
    auto shortened = emb;
    shortened.chains[2].pop_back();
    CHECK_FALSE(chimera::validate_embedding(shortened, g).empty());
    auto scattered = emb;
    std::swap(scattered.chains[0].back(), scattered.chains[7].back());
    CHECK_FALSE(chimera::validate_embedding(scattered, g).empty());
}

TEST_CASE("two-spin ferromagnet embedding") {
    const std::vector<ising::IsingProblem::Edge> edges = {{0, 1, -1}};
    const auto p = ising::IsingProblem::from_edges(2, edges);
    const auto g = chimera::chimera(1);
    const auto emb = chimera::clique_embedding(2, g);
    const auto e = chimera::embed_problem(p, emb, g, 2.0);
    CHECK(e.scale == 0.5);
    const auto& phys = e.physical;
    int logical = 0;
    for (const auto& edge : phys.edges()) {
        const bool same_chain = std::any_of(e.chains.begin(), e.chains.end(), [&](const auto& c) {
            return std::count(c.begin(), c.end(), edge.i) && std::count(c.begin(), c.end(), edge.j);
        });
        if (same_chain) {
            CHECK(edge.value == -1.0);
        } else {
            CHECK(edge.value == -0.5);
            ++logical;
        }
    }
    CHECK(logical == 1);
}

TEST_CASE("embedded energies and decoding") {
    std::mt19937_64 gen(8);
    const auto g = chimera::chimera(16);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + 5 * trial;
        const auto p = trial % 2 ? ising::gen_sk(n, gen()) : ising::gen_dense_maxcut(n, gen());
        const auto emb = chimera::clique_embedding(n, g);
        const double jc = 0.5 + trial;
        for (bool split : {false, true}) {
            chimera::EmbedOptions options;
            options.split_logical_weight = split;
            const auto e = chimera::embed_problem(p, emb, g, jc, options);
            CHECK(e.physical.max_abs_coupling() == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t c = 0; c < e.qubits.size(); ++c) CHECK(e.qubits[c] < g.num_qubits());
            double chain_edges = 0;
            for (const auto& c : e.chains) chain_edges += double(c.size()) - 1;
            for (int rep = 0; rep < 5; ++rep) {
                const auto s = testing::random_spins(n, gen);
                const auto phys = chimera::replicate(s, e);
                const auto d = chimera::decode_majority(phys, e);
                CHECK(d.logical == s);
                CHECK(d.n_broken == 0);
                const double expect = e.scale * (ising::energy(p, s) - jc * chain_edges);
                CHECK(ising::energy(e.physical, phys) == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("majority vote with broken chains") {
    const auto g = chimera::chimera(16);
    const auto p = ising::gen_sk(12, 1);
    const auto e = chimera::embed_problem(p, chimera::clique_embedding(12, g), g, 3.0);
    REQUIRE(e.chains[0].size() == 4);
    ising::SpinConfig phys(e.qubits.size(), 1);
    // Tie: first qubit decides.
    phys[e.chains[0][0]] = -1;
    phys[e.chains[0][1]] = -1;
    // 3 versus 1.
    phys[e.chains[1][2]] = -1;
    const auto d = chimera::decode_majority(phys, e);
    CHECK(d.logical[0] == -1);
    CHECK(d.logical[1] == 1);
    CHECK(d.n_broken == 2);
    CHECK_THROWS_AS(chimera::decode_majority(ising::SpinConfig(3, 1), e), ConfigError);
}

TEST_CASE("chain strength heuristics") {
    using chimera::JcClass;
    CHECK(chimera::jc_heuristic(JcClass::sk, 100) == doctest::Approx(11.0));
    CHECK(chimera::jc_heuristic(JcClass::dense_maxcut, 100) == doctest::Approx(47.0));
    CHECK(chimera::jc_heuristic(JcClass::variable_density, 20, 0.5) == doctest::Approx(4.75));
    CHECK_THROWS_AS(chimera::jc_heuristic(JcClass::variable_density, 20), ConfigError);
    CHECK(chimera::parse_jc_class("sk") == JcClass::sk);
    CHECK_THROWS_AS(chimera::parse_jc_class("mobius"), ConfigError);
    CHECK(chimera::jc_heuristic(ising::gen_sk(25, 1)) == doctest::Approx(5.5));
}

TEST_CASE("embedded ground state decodes to the logical ground state") {
    const auto g = chimera::chimera(4);
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
        const auto p = ising::gen_sk(8, 40 + seed);
        const auto e = chimera::embed_problem(p, chimera::clique_embedding(8, g), g, 1.1 * std::sqrt(8.0));
        REQUIRE(e.qubits.size() == 24);
        const auto phys = solvers::brute_force(e.physical);
        const auto d = chimera::decode_majority(phys.best_config, e);
        CHECK(d.n_broken == 0);
        CHECK(ising::energy(p, d.logical) == testing::exhaustive_minimum(p).minimum);
    }
}

TEST_CASE("very strong chains never break") {
    const auto g = chimera::chimera(16);
    const auto p = ising::gen_sk(8, 3);
    const auto emb = chimera::clique_embedding(8, g);
    const std::vector<double> grid = {1e3};
    const auto rows = chimera::embedded_anneal_sweep(p, emb, g, grid, {}, 20, 5, solvers::brute_force(p).best_energy);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].median_broken == 0.0);
    CHECK_THROWS_AS(chimera::embedded_anneal_sweep(p, emb, g, {}, {}, 20, 5, 0.0), ConfigError);
}

TEST_CASE("embedded instance document") {
    const auto g = chimera::chimera(16);
    const auto p = ising::gen_sk(6, 1);
    const auto e = chimera::embed_problem(p, chimera::clique_embedding(6, g), g, 2.0);
    const auto doc = chimera::to_json(e, g);
    CHECK(doc["n"] == e.qubits.size());
    CHECK(doc["embedding"]["chimera"] == "16x16x4");
    CHECK(doc["embedding"]["chains"].size() == 6);
    CHECK(doc["embedding"]["J_c"] == 2.0);
}
