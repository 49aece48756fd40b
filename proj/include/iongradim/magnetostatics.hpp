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
 * @file magnetostatics.hpp
 * @brief Point-dipole fields at probe-ion sites, the differential field
 *        across a probe pair, and the compensating uniform gradient.
 *
 * Only the standard dipole law B = (μ0/4π)(3 r̂(m·r̂) − m)/r³ is used. The
 * "axial" specialisation is that law restricted to the trap axis with the
 * moment along z; the often-quoted closed form with a (3z² − 1) factor is
 * not dimensionally consistent and is not used.
 */

#include "foundation.hpp"

#include <cmath>

namespace iongradim {

/** Closest allowed approach to a point source, m. */
inline constexpr double kSingularityGuard = 1e-9;

struct DipoleSource {
    Vec3 position; ///< m
    Vec3 moment;   ///< J/T

    /** Source on the trap axis with moment along ±z. */
    static DipoleSource axial(double z, double moment_z) { return {on_axis(z), {0.0, 0.0, moment_z}}; }
};

/** Spin state of a target spin-1/2 along the quantisation (z) axis. */
enum class Spin { Up, Down };

/** Moment of an electron spin in state `s`: ±|μe| ẑ. */
inline Vec3 electron_spin_moment(Spin s) {
    const double mag = std::abs(constants().electron_magnetic_moment);
    return {0.0, 0.0, s == Spin::Up ? mag : -mag};
}

/** B_z(p) = dBz_dz · (p − reference_point).z, a pure axial gradient. */
struct UniformGradient {
    double dBz_dz = 0.0; ///< T/m
    Vec3 reference_point;

    double bz(const Vec3 &p) const noexcept { return dBz_dz * (p.z - reference_point.z); }
};

struct FieldSample {
    Vec3 point;
    Vec3 b_field;
};

inline Vec3 dipole_field(const DipoleSource &source, const Vec3 &point) {
    const Vec3 r = point - source.position;
    const double dist = norm(r);
    if (!(dist >= kSingularityGuard))
        throw SingularityError("magnetostatics: field point within 1 nm of the source");
    const Vec3 rhat = r * (1.0 / dist);
    const double scale = kMu0Over4Pi / (dist * dist * dist);
    return (3.0 * dot(source.moment, rhat) * rhat - source.moment) * scale;
}

inline FieldSample sample_field(const DipoleSource &source, const Vec3 &point) {
    return {point, dipole_field(source, point)};
}

/**
 * On-axis B_z for a source on the axis with its moment along z:
 * B_z = 2 (μ0/4π) m_z / |z − z_s|³.
 */
inline double axial_bz(const DipoleSource &source, double z) {
    if (source.position.x != 0.0 || source.position.y != 0.0 || source.moment.x != 0.0 ||
        source.moment.y != 0.0)
        throw ConfigurationError("magnetostatics: axial_bz needs an on-axis, z-aligned source");
    const double dist = std::abs(z - source.position.z);
    if (!(dist >= kSingularityGuard))
        throw SingularityError("magnetostatics: field point within 1 nm of the source");
    return 2.0 * kMu0Over4Pi * source.moment.z / (dist * dist * dist);
}

/** δB = B_z(p2) − B_z(p1). */
inline double differential_field(const DipoleSource &source, const Vec3 &p1, const Vec3 &p2) {
    return dipole_field(source, p2).z - dipole_field(source, p1).z;
}

/**
 * Uniform gradient that cancels the source's differential field across
 * (p1, p2) for the source as given (spin up). With the source flipped the
 * two contributions add, doubling |δB|.
 */
inline UniformGradient compensation_gradient(const DipoleSource &source, const Vec3 &p1, const Vec3 &p2) {
    const double dz = p2.z - p1.z;
    if (!(std::abs(dz) >= kSingularityGuard))
        throw ConfigurationError("magnetostatics: degenerate probe pair for compensation");
    return {-differential_field(source, p1, p2) / dz, p1};
}

/** δB across (p1, p2) from a source plus an applied gradient. */
inline double total_differential_field(const DipoleSource &source, const UniformGradient &gradient, const Vec3 &p1,
                                       const Vec3 &p2) {
    return differential_field(source, p1, p2) + (gradient.bz(p2) - gradient.bz(p1));
}

} // namespace iongradim
