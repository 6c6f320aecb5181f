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

// Instance files: {"n", "class", "seed", "d", "edges": [[i, j, J_ij], ...], "h": [...]}
// with 0-based indices, i < j, one entry per undirected pair.

#include <cstdint>
#include <filesystem>
#include <string>

#include "cimbench/ising.hpp"
#include "json.hpp"

namespace cimbench::io {

using nlohmann::json;

json to_json(const ising::IsingProblem& problem);
ising::IsingProblem problem_from_json(const json& doc);

ising::IsingProblem read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path, const ising::IsingProblem& problem);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::string_view bytes);
/// Same, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Hash of n, couplings and fields only; metadata does not participate.
std::string content_hash(const ising::IsingProblem& problem);

/// Writes integral values as JSON integers.
json number(double value);

}  // namespace cimbench::io
