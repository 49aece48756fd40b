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
 * @file crystal.hpp
 * @brief Equilibrium positions of a linear ion crystal in a harmonic trap.
 *
 * The solve happens in dimensionless units u = z/ℓ with
 * ℓ = (q²/(4πε0 m ωz²))^{1/3}, where the force balance reads
 *
 *     u_i − Σ_{j<i} (u_i − u_j)^{-2} + Σ_{j>i} (u_j − u_i)^{-2} = 0.
 *
 * All ions share one mass and charge (mixed species use the logic-ion mass).
 */

#include "foundation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace iongradim {

struct TrapConfig {
    double axial_frequency; ///< ωz, rad/s
    double ion_mass;        ///< kg
    double ion_charge = constants().elementary_charge;

    void validate() const {
        if (!(axial_frequency > 0.0) || !std::isfinite(axial_frequency))
            throw ConfigurationError("crystal: axial_frequency must be > 0");
        if (!(ion_mass > 0.0) || !std::isfinite(ion_mass))
            throw ConfigurationError("crystal: ion_mass must be > 0");
        if (!(ion_charge > 0.0) || !std::isfinite(ion_charge))
            throw ConfigurationError("crystal: ion_charge must be > 0");
    }

    /** Singly charged 40Ca+ at axial frequency f (Hz). */
    static TrapConfig calcium40(double axial_frequency_hz) {
        return {2.0 * std::numbers::pi * axial_frequency_hz, 40.0 * constants().atomic_mass_unit};
    }
};

struct CrystalGeometry {
    std::vector<double> positions; ///< axial coordinates, m, ascending
    double length_scale = 0.0;     ///< ℓ, m

    std::size_t size() const noexcept { return positions.size(); }
    Vec3 position(std::size_t i) const { return on_axis(positions.at(i)); }
};

inline double length_scale(const TrapConfig &trap) {
    trap.validate();
    const auto &c = constants();
    const double q2 = trap.ion_charge * trap.ion_charge;
    const double w2 = trap.axial_frequency * trap.axial_frequency;
    return std::cbrt(q2 / (4.0 * std::numbers::pi * c.vacuum_permittivity * trap.ion_mass * w2));
}

namespace detail {

inline constexpr int kMaxIons = 30;
inline constexpr int kNewtonIterationCap = 200;
inline constexpr double kResidualTolerance = 1e-12;

/** Dimensionless net force on each ion (zero at equilibrium). */
inline Eigen::VectorXd crystal_force_residual(const Eigen::VectorXd &u) {
    const auto n = u.size();
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double fi = u[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i)
                continue;
            const double d = u[i] - u[j];
            fi -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
        }
        f[i] = fi;
    }
    return f;
}

inline Eigen::MatrixXd crystal_force_jacobian(const Eigen::VectorXd &u) {
    const auto n = u.size();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i)
                continue;
            const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
            jac(i, i) += c;
            jac(i, j) -= c;
        }
    }
    return jac;
}

inline bool strictly_ascending(const Eigen::VectorXd &u) {
    for (Eigen::Index i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1]))
            return false;
    return true;
}

} // namespace detail

/**
 * Dimensionless equilibrium coordinates for n ions.
 *
 * Damped Newton from a uniformly spaced start. A step is halved until the
 * residual decreases and the ordering is preserved. The converged solution
 * is mirror-symmetrized, which is exact for identical ions.
 */
inline std::vector<double> dimensionless_equilibrium(int n_ions) {
    if (n_ions < 1 || n_ions > detail::kMaxIons)
        throw ConfigurationError("crystal: n_ions must be in [1, 30], got " + std::to_string(n_ions));

    const auto n = static_cast<Eigen::Index>(n_ions);
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i)
        u[i] = static_cast<double>(i) - 0.5 * static_cast<double>(n - 1);

    Eigen::VectorXd f = detail::crystal_force_residual(u);
    double residual = f.lpNorm<Eigen::Infinity>();
    int iter = 0;
    for (; iter < detail::kNewtonIterationCap && residual >= detail::kResidualTolerance; ++iter) {
        const Eigen::VectorXd step = detail::crystal_force_jacobian(u).ldlt().solve(-f);
        double damping = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, damping *= 0.5) {
            Eigen::VectorXd trial = u + damping * step;
            if (!detail::strictly_ascending(trial))
                continue;
            Eigen::VectorXd ft = detail::crystal_force_residual(trial);
            const double rt = ft.lpNorm<Eigen::Infinity>();
            if (rt < residual || (rt == residual && rt < detail::kResidualTolerance)) {
                u = std::move(trial);
                f = std::move(ft);
                residual = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break; // stalled at machine precision; judged below
    }

    // identical ions in a harmonic well: the solution is mirror symmetric
    Eigen::VectorXd sym(n);
    for (Eigen::Index i = 0; i < n; ++i)
        sym[i] = 0.5 * (u[i] - u[n - 1 - i]);
    const double sym_residual = detail::crystal_force_residual(sym).lpNorm<Eigen::Infinity>();
    if (sym_residual <= residual) {
        u = sym;
        residual = sym_residual;
    }

    if (!(residual < detail::kResidualTolerance))
        throw SolverError("crystal: equilibrium solve did not converge for n_ions = " + std::to_string(n_ions),
                          residual);
    return {u.data(), u.data() + n};
}

inline CrystalGeometry equilibrium_positions(int n_ions, const TrapConfig &trap) {
    CrystalGeometry g;
    g.length_scale = length_scale(trap);
    g.positions = dimensionless_equilibrium(n_ions);
    for (double &p : g.positions)
        p *= g.length_scale;
    return g;
}

inline double spacing(const CrystalGeometry &geometry, std::size_t i, std::size_t j) {
    if (i >= geometry.size() || j >= geometry.size())
        throw IndexError("crystal: ion index out of range (size " + std::to_string(geometry.size()) + ")");
    return std::abs(geometry.positions[j] - geometry.positions[i]);
}

/** Max-norm of the dimensionless force residual of a geometry. */
inline double force_residual(const CrystalGeometry &geometry) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(geometry.size()));
    for (std::size_t i = 0; i < geometry.size(); ++i)
        u[static_cast<Eigen::Index>(i)] = geometry.positions[i] / geometry.length_scale;
    return detail::crystal_force_residual(u).lpNorm<Eigen::Infinity>();
}

} // namespace iongradim
