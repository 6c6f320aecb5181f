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

// Random-number plumbing with fully specified, platform-independent output.
//
// Sequential streams use std::mt19937_64, whose output sequence is fixed by the
// C++ standard. The standard distributions are implementation-defined, so all
// conversions from raw 64-bit words to doubles, indices and Gaussians live here.
//
// Counter-based draws (CIM vacuum noise) use the SplitMix64 output function
// (Steele, Lea & Flood 2014): word k of the stream with state `key` is
// mix64(key + k * 0x9e3779b97f4a7c15). Any element of any substream can be
// computed directly from (key, k) without touching a shared state. Gaussians
// are produced by inverting the normal CDF on one word (Wichura's AS241).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cimbench::rng {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Word `index` of the SplitMix64 stream whose initial state is `key`.
constexpr std::uint64_t splitmix_at(std::uint64_t key, std::uint64_t index) noexcept {
    return mix64(key + (index + 1) * kGoldenGamma);
}

/// Derives an independent child key; used to split seeds into substreams.
constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t tag) noexcept {
    return mix64(mix64(parent ^ 0x6a09e667f3bcc909ULL) + (tag + 1) * kGoldenGamma);
}

/// [0, 1) with 53 bits of resolution.
constexpr double to_unit(std::uint64_t word) noexcept {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// (0, 1], safe as a logarithm argument.
constexpr double to_unit_open_low(std::uint64_t word) noexcept {
    return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

/// Box-Muller (cosine branch) standard normal from two words.
inline double box_muller(std::uint64_t w1, std::uint64_t w2) noexcept {
    const double radius = std::sqrt(-2.0 * std::log(to_unit_open_low(w1)));
    return radius * std::cos(2.0 * std::numbers::pi * to_unit(w2));
}

/// Inverse standard normal CDF, Wichura's AS241 (PPND16), |relative error| < 1e-16.
inline double inverse_normal_cdf(double p) noexcept {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                     1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                  4.6303378461565452959) * r + 1.42343711074968357734) /
                (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                     0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
                  2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                     0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
                  5.4637849111641143699) * r + 6.6579046435011037772) /
                (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                     7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                  0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

/// Standard normal from one word by inversion; the uniform is the midpoint of
/// the word's 2^-53 bin, so it never touches 0 or 1.
inline double normal_from_word(std::uint64_t word) noexcept {
    return inverse_normal_cdf((static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52);
}

/// Sequential generator used by instance generators and Monte Carlo solvers.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return to_unit(engine_()); }
    bool coin() { return (engine_() >> 63) != 0; }
    int spin() { return coin() ? 1 : -1; }

    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t index(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t w;
        do {
            w = engine_();
        } while (w >= limit);
        return w % bound;
    }

    double normal() {
        const std::uint64_t a = engine_();
        return box_muller(a, engine_());
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace cimbench::rng
