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

// Independent reference computations shared by the unit tests.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cimbench/ising.hpp"

namespace testing {

using cimbench::ising::IsingProblem;
using cimbench::ising::SpinConfig;

/// Full double sum over ordered pairs, independent of the library's kernels.
inline double naive_energy(const IsingProblem& p, const SpinConfig& s) {
    double sum = 0.0;
    for (int i = 0; i < p.n(); ++i)
        for (int j = 0; j < p.n(); ++j) sum += 0.5 * p.coupling(i, j) * s[i] * s[j];
    for (int i = 0; i < p.n(); ++i) sum += (p.has_fields() ? p.field(i) : 0.0) * s[i];
    return sum;
}

inline SpinConfig spins_from_bits(int n, std::uint64_t bits) {
    SpinConfig s(n);
    for (int i = 0; i < n; ++i) s[i] = (bits >> i) & 1 ? -1 : 1;
    return s;
}

struct Exhaustive {
    double minimum = std::numeric_limits<double>::infinity();
    std::uint64_t count = 0;
};

/// Binary counting over all 2^n states.
inline Exhaustive exhaustive_minimum(const IsingProblem& p) {
    Exhaustive out;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << p.n()); ++bits) {
        const double e = naive_energy(p, spins_from_bits(p.n(), bits));
        if (e < out.minimum - 1e-9) {
            out.minimum = e;
            out.count = 1;
        } else if (e < out.minimum + 1e-9) {
            ++out.count;
        }
    }
    return out;
}

inline SpinConfig random_spins(int n, std::mt19937_64& gen) {
    SpinConfig s(n);
    for (auto& v : s) v = (gen() & 1) ? 1 : -1;
    return s;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cimbench-test-" + name + "-" +
                                                         std::to_string(std::random_device{}()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
