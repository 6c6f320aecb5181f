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

#include "cimbench/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cimbench/error.hpp"

namespace cimbench::io {

json number(double value) {
    if (std::isfinite(value) && value == std::round(value) && std::abs(value) < 9.0e15)
        return static_cast<std::int64_t>(value);
    return value;
}

json to_json(const ising::IsingProblem& problem) {
    const auto& meta = problem.meta();
    json doc;
    doc["n"] = problem.n();
    doc["class"] = std::string(ising::to_string(meta.problem_class));
    doc["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
    doc["d"] = meta.degree ? json(*meta.degree) : json(nullptr);
    json edges = json::array();
    for (const auto& e : problem.edges()) edges.push_back(json::array({e.i, e.j, number(e.value)}));
    doc["edges"] = std::move(edges);
    json h = json::array();
    for (double v : problem.fields()) h.push_back(number(v));
    doc["h"] = std::move(h);
    return doc;
}

ising::IsingProblem problem_from_json(const json& doc) {
    try {
        const int n = doc.at("n").get<int>();
        ising::ProblemMeta meta;
        if (doc.contains("class")) meta.problem_class = ising::parse_problem_class(doc["class"].get<std::string>());
        if (doc.contains("seed") && !doc["seed"].is_null()) meta.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("d") && !doc["d"].is_null()) meta.degree = doc["d"].get<int>();
        std::vector<ising::IsingProblem::Edge> edges;
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw ConfigError("edge entries must be [i, j, J_ij]");
            const int i = e[0].get<int>();
            const int j = e[1].get<int>();
            if (i >= j) throw ConfigError("edge entries need i < j");
            edges.push_back({i, j, e[2].get<double>()});
        }
        std::vector<double> h;
        if (doc.contains("h")) h = doc["h"].get<std::vector<double>>();
        return ising::IsingProblem::from_edges(n, edges, std::move(h), meta);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed instance document: ") + ex.what());
    }
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + ex.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

ising::IsingProblem read_instance(const std::filesystem::path& path) { return problem_from_json(read_json(path)); }

void write_instance(const std::filesystem::path& path, const ising::IsingProblem& problem) {
    write_json(path, to_json(problem));
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string fnv1a_hex(std::string_view bytes) {
    const std::uint64_t hash = fnv1a(bytes);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string content_hash(const ising::IsingProblem& problem) {
    json doc = to_json(problem);
    json canonical = {{"n", doc["n"]}, {"edges", doc["edges"]}, {"h", doc["h"]}};
    return fnv1a_hex(canonical.dump());
}

}  // namespace cimbench::io
