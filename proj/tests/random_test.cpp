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

#include "iongradim/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace iongradim;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(random, philox_known_answers) {
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
              (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(random, philox_is_constexpr) {
    constexpr auto block = philox4x32_10({0, 0, 0, 0}, {0, 0});
    static_assert(block[0] == 0x6627e8d5u);
}

TEST(random, uniform_endpoints) {
    EXPECT_GT(uniform_from_words(0, 0), 0.0);
    EXPECT_LT(uniform_from_words(0xffffffffu, 0xffffffffu), 1.0);
    EXPECT_DOUBLE_EQ(uniform_from_words(0x80000000u, 0), 0.5 + 0x1.0p-53);
}

TEST(random, draws_depend_on_every_key_component) {
    const ShotRandom base(7, 11, RngStream::Outcome);
    EXPECT_NE(base.block(), ShotRandom(8, 11, RngStream::Outcome).block());
    EXPECT_NE(base.block(), ShotRandom(7, 12, RngStream::Outcome).block());
    EXPECT_NE(base.block(), ShotRandom(7, 11, RngStream::GradientNoise).block());
    EXPECT_NE(base.block(), ShotRandom(7 + (1ull << 32), 11, RngStream::Outcome).block());
    EXPECT_NE(base.block(), ShotRandom(7, 11 + (1ull << 32), RngStream::Outcome).block());
    EXPECT_EQ(base.block(), ShotRandom(7, 11, RngStream::Outcome).block());
}

TEST(random, uniform_moments) {
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = ShotRandom(1, k, RngStream::Outcome).uniform0();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sq / n - mean * mean, 1.0 / 12, 2e-3);
}

TEST(random, normal_moments) {
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = ShotRandom(3, k, RngStream::GradientNoise).normal();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    EXPECT_NEAR(m1 / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(m2 / n, 1.0, 0.02);
    EXPECT_NEAR(m4 / n, 3.0, 0.1);
}
