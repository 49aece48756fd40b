// Copyright 2026 The iongradim Authors
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

/**
 * @file random.hpp
 * @brief Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A draw is a pure function of (key, counter), so Monte Carlo shots can be
 * evaluated in any order or in parallel and still be bit-identical. Every
 * shot uses the counter {shot_lo, shot_hi, stream, 0} under the key
 * {seed_lo, seed_hi}. Independent physical processes (noise, outcome)
 * use distinct streams.
 *
 * Uniform doubles take the top 52 bits of two consecutive words, offset by
 * half a step so they lie strictly inside (0, 1). Normals are Box-Muller on one block.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace iongradim {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace detail

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
        detail::mulhilo32(detail::kPhiloxM0, ctr[0], hi0, lo0);
        detail::mulhilo32(detail::kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/** Uniform in (0, 1) from two 32-bit words. */
constexpr double uniform_from_words(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/** Streams used by the shot simulator. */
enum class RngStream : std::uint32_t { CommonModeNoise = 1, GradientNoise = 2, Outcome = 3 };

/** Deterministic draws for one (seed, shot, stream) triple. */
class ShotRandom {
  public:
    constexpr ShotRandom(std::uint64_t seed, std::uint64_t shot, RngStream stream)
        : block_(philox4x32_10({static_cast<std::uint32_t>(shot), static_cast<std::uint32_t>(shot >> 32),
                                static_cast<std::uint32_t>(stream), 0u},
                               {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)})) {}

    constexpr double uniform0() const { return uniform_from_words(block_[0], block_[1]); }
    constexpr double uniform1() const { return uniform_from_words(block_[2], block_[3]); }

    /** Standard normal (first Box-Muller variate). */
    double normal() const {
        return std::sqrt(-2.0 * std::log(uniform0())) * std::cos(2.0 * std::numbers::pi * uniform1());
    }

    constexpr const PhiloxCounter &block() const { return block_; }

  private:
    PhiloxCounter block_;
};

} // namespace iongradim
