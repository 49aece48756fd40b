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

#include "iongradim/crystal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace iongradim;

namespace {

// Coordinate-descent minimisation of V = sum u_i^2/2 + sum_{i<j} 1/|u_i - u_j|.
// Each sweep solves dV/du_i = 0 for one ion by bisection inside the gap
// left by its neighbours, where V is convex in u_i.
std::vector<double> minimise_potential(int n) {
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i)
        u[i] = 1.5 * (i - 0.5 * (n - 1));
    auto grad = [&](int i, double x) {
        double g = x;
        for (int j = 0; j < n; ++j)
            if (j != i) {
                const double d = x - u[j];
                g -= (d > 0 ? 1.0 : -1.0) / (d * d);
            }
        return g;
    };
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            double lo = i > 0 ? u[i - 1] + 1e-9 : u[i] - 100.0;
            double hi = i + 1 < n ? u[i + 1] - 1e-9 : u[i] + 100.0;
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                const double mid = 0.5 * (lo + hi);
                (grad(i, mid) > 0 ? hi : lo) = mid;
            }
            const double x = 0.5 * (lo + hi);
            moved = std::max(moved, std::abs(x - u[i]));
            u[i] = x;
        }
        if (moved < 1e-14)
            break;
    }
    return u;
}

} // namespace

TEST(crystal, length_scale_calcium_10mhz) {
    // closed form evaluated at 30 digits: 9.58218289595768e-7 m
    EXPECT_NEAR(length_scale(TrapConfig::calcium40(10e6)), 9.58218289595768e-7, 1e-19);
}

TEST(crystal, length_scale_power_laws) {
    const auto base = TrapConfig::calcium40(10e6);
    auto half = base;
    half.axial_frequency /= 2.0;
    EXPECT_NEAR(length_scale(half) / length_scale(base), std::cbrt(4.0), 1e-14);
    auto heavy = base;
    heavy.ion_mass *= 8.0;
    EXPECT_NEAR(length_scale(heavy) / length_scale(base), 0.5, 1e-14);
}

TEST(crystal, invalid_trap_is_configuration_error) {
    EXPECT_THROW(length_scale({-1.0, 1e-25}), ConfigurationError);
    EXPECT_THROW(length_scale({1.0, 0.0}), ConfigurationError);
    EXPECT_THROW(length_scale({1.0, 1e-25, -1e-19}), ConfigurationError);
    EXPECT_THROW(equilibrium_positions(0, TrapConfig::calcium40(1e6)), ConfigurationError);
    EXPECT_THROW(equilibrium_positions(31, TrapConfig::calcium40(1e6)), ConfigurationError);
}

TEST(crystal, two_ion_analytic) {
    const auto u = dimensionless_equilibrium(2);
    EXPECT_NEAR(u[0], -std::cbrt(0.25), 1e-14);
    EXPECT_NEAR(u[1], std::cbrt(0.25), 1e-14);
}

TEST(crystal, three_ion_outer_coordinate) {
    const auto u = dimensionless_equilibrium(3);
    EXPECT_NEAR(u[2], std::cbrt(1.25), 1e-14);
    EXPECT_NEAR(u[2], 1.0772, 1e-4);
    EXPECT_EQ(u[1], 0.0);
}

TEST(crystal, published_spacings) {
    const auto g10 = equilibrium_positions(3, TrapConfig::calcium40(10e6));
    const auto g5 = equilibrium_positions(3, TrapConfig::calcium40(5e6));
    EXPECT_NEAR(spacing(g10, 0, 1), 1.03e-6, 0.01 * 1.03e-6);
    EXPECT_NEAR(spacing(g5, 0, 1), 1.63e-6, 0.01 * 1.63e-6);
    // 30-digit closed form
    EXPECT_NEAR(spacing(g10, 0, 1), 1.03220936186407e-6, 1e-18);
    EXPECT_NEAR(spacing(g5, 0, 1), 1.63853022687445e-6, 1e-18);
}

TEST(crystal, spacing_edges) {
    const auto g = equilibrium_positions(3, TrapConfig::calcium40(10e6));
    EXPECT_EQ(spacing(g, 1, 1), 0.0);
    EXPECT_NEAR(spacing(g, 0, 2), 2.0 * spacing(g, 0, 1), 1e-21);
    EXPECT_THROW(spacing(g, 0, 3), IndexError);
}

TEST(crystal, matches_potential_minimisation_oracle) {
    for (int n = 2; n <= 7; ++n) {
        const auto newton = dimensionless_equilibrium(n);
        const auto oracle = minimise_potential(n);
        for (int i = 0; i < n; ++i)
            EXPECT_NEAR(newton[i], oracle[i], 1e-8) << "n=" << n << " i=" << i;
    }
}

TEST(crystal, known_five_ion_coordinates) {
    // high-precision root of the force balance
    const auto u = dimensionless_equilibrium(5);
    const double expected[] = {-1.74290321187393, -0.822100756568086, 0.0, 0.822100756568086, 1.74290321187393};
    for (int i = 0; i < 5; ++i)
        EXPECT_NEAR(u[i], expected[i], 1e-13);
}

TEST(crystal, geometry_invariants_all_sizes) {
    const auto trap = TrapConfig::calcium40(7e6);
    for (int n = 1; n <= 30; ++n) {
        const auto g = equilibrium_positions(n, trap);
        ASSERT_EQ(g.size(), static_cast<std::size_t>(n));
        double com = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            com += g.positions[i];
            if (i > 0) {
                EXPECT_GT(g.positions[i], g.positions[i - 1]);
            }
            EXPECT_NEAR(g.positions[i], -g.positions[g.size() - 1 - i], 1e-9 * g.length_scale);
        }
        EXPECT_NEAR(com / n, 0.0, 1e-12 * g.length_scale);
        EXPECT_LT(force_residual(g), 1e-12) << "n=" << n;
    }
}

TEST(crystal, doubling_frequency_scales_spacings) {
    const auto a = equilibrium_positions(6, TrapConfig::calcium40(4e6));
    const auto b = equilibrium_positions(6, TrapConfig::calcium40(8e6));
    const double factor = std::cbrt(4.0);
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        EXPECT_NEAR(spacing(a, i, i + 1) / spacing(b, i, i + 1), factor, 1e-13);
}

TEST(crystal, inner_spacing_smaller_than_outer) {
    const auto g = equilibrium_positions(5, TrapConfig::calcium40(10e6));
    EXPECT_LT(spacing(g, 1, 2), spacing(g, 0, 1));
}
