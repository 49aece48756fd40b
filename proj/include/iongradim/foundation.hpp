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
 * @file foundation.hpp
 * @brief Physical constants (SI), 3-vectors and the error types shared by
 *        every other iongradim header.
 *
 * Everything is SI internally. There is no unit-conversion layer; the CLI
 * converts its unit-suffixed keys (e.g. `axial_frequency_hz`) on input.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace iongradim {

inline constexpr const char *kVersion = "0.1.0";

// ===========================================================================
//  Errors
// ===========================================================================

/** Invalid physical or structural configuration (bad trap, bad probe, ...). */
class ConfigurationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/** Field evaluated at (or within the guard radius of) a point source. */
class SingularityError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/** Out-of-range index into a geometry or probe. */
class IndexError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/** Iterative solver failed; carries the last residual. */
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string &what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/** A requested estimate cannot be achieved (e.g. zero parity swing). */
class InfeasibleError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// ===========================================================================
//  Constants
// ===========================================================================

/**
 * The single authoritative constant set, CODATA 2018 where applicable.
 *
 * The electron moment is stored signed. Note that -9284.764e-26 J/T, as it
 * is sometimes quoted, is ten times too large; the CODATA value is used.
 */
struct PhysicalConstants {
    double elementary_charge;        ///< C
    double vacuum_permittivity;      ///< F/m
    double vacuum_permeability;      ///< H/m, exactly 4π·1e-7
    double bohr_magneton;            ///< J/T
    double electron_magnetic_moment; ///< J/T, negative
    double reduced_planck;           ///< J·s
    double atomic_mass_unit;         ///< kg
    double ca40_g_factor;            ///< Landé g of Ca+ S1/2

    friend constexpr bool operator==(const PhysicalConstants &, const PhysicalConstants &) = default;
};

inline constexpr PhysicalConstants kConstants{
    .elementary_charge = 1.602176634e-19,
    .vacuum_permittivity = 8.8541878128e-12,
    .vacuum_permeability = 4.0 * std::numbers::pi * 1.0e-7,
    .bohr_magneton = 9.2740100783e-24,
    .electron_magnetic_moment = -9.2847647043e-24,
    .reduced_planck = 1.054571817e-34,
    .atomic_mass_unit = 1.66053906660e-27,
    .ca40_g_factor = 2.00225,
};

constexpr const PhysicalConstants &constants() noexcept { return kConstants; }

/** μ0/4π, the prefactor of the point-dipole law. */
inline constexpr double kMu0Over4Pi = 1.0e-7;

// ===========================================================================
//  Vec3
// ===========================================================================

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 &operator+=(const Vec3 &o) noexcept {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3 &operator-=(const Vec3 &o) noexcept {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(double s) noexcept {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) noexcept { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3 &a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr double dot(const Vec3 &a, const Vec3 &b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double norm(const Vec3 &a) noexcept { return std::hypot(a.x, a.y, a.z); }

inline bool is_finite(const Vec3 &a) noexcept {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/** Point on the trap (z) axis. */
constexpr Vec3 on_axis(double z) noexcept { return {0.0, 0.0, z}; }

} // namespace iongradim
