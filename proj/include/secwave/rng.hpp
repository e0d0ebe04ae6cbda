// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace secwave {

using Rng = std::mt19937_64;

namespace detail {
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
}  // namespace detail

/**
 * Counter-based stream split.
 *
 * Substream `id` of master seed `seed` is an mt19937_64 seeded with
 * splitmix64(splitmix64(seed) ^ splitmix64(id + 1)). Streams depend only on
 * (seed, id), so trials can run in any order or in parallel and still
 * reproduce bit-identically.
 */
inline Rng substream(std::uint64_t seed, std::uint64_t id) {
    return Rng(detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(id + 1)));
}

/// Two-level split, e.g. (trial, role) for per-receiver draws inside a trial.
inline Rng substream(std::uint64_t seed, std::uint64_t id, std::uint64_t sub) {
    return substream(detail::splitmix64(seed) ^ detail::splitmix64(id + 0x51ED27ull), sub);
}

/// Circular complex Gaussian with E|z|^2 = variance.
inline std::complex<double> complex_normal(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace secwave
