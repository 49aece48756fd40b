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
 * @file protocol.hpp
 * @brief Decoherence-free Bell/GHZ probe states: differential Zeeman phase,
 *        the analysis pulse and the parity observable.
 *
 * A probe is two complementary spin branches plus a relative phase φ and a
 * contrast. Each branch has zero net magnetic quantum number, so a spatially
 * uniform field shifts both branches equally and φ does not move. Parity
 * follows P = contrast · cos φ; the analysis-pulse phase enters as a bias.
 */

#include "foundation.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace iongradim {

enum class ProbeKind { Bell, Ghz };

inline const char *to_string(ProbeKind k) { return k == ProbeKind::Bell ? "bell" : "ghz"; }

struct ZeemanConfig {
    double g_factor = constants().ca40_g_factor;

    void validate() const {
        if (!(g_factor > 0.0) || !std::isfinite(g_factor))
            throw ConfigurationError("protocol: g_factor must be > 0");
    }

    /** g μB / ħ, rad s⁻¹ T⁻¹. */
    double gyromagnetic_ratio() const { return g_factor * constants().bohr_magneton / constants().reduced_planck; }
};

struct ProbeState {
    ProbeKind kind = ProbeKind::Bell;
    std::vector<Vec3> ion_positions;
    /// magnetic quantum number (±1/2) of each ion in branch 1; branch 2 is the complement
    std::vector<double> branch_weights;
    double phase = 0.0;
    double contrast = 1.0;

    std::size_t size() const noexcept { return ion_positions.size(); }

    /** m_i(branch 1) − m_i(branch 2) = 2 · m_i(branch 1), i.e. ±1. */
    double delta_m(std::size_t i) const { return 2.0 * branch_weights.at(i); }

    void validate() const {
        const auto n = ion_positions.size();
        if (branch_weights.size() != n)
            throw ConfigurationError("protocol: one Zeeman weight per probe ion required");
        if (kind == ProbeKind::Bell && n != 2)
            throw ConfigurationError("protocol: a Bell probe has exactly 2 ions");
        if (kind == ProbeKind::Ghz && (n < 2 || n % 2 != 0))
            throw ConfigurationError("protocol: a GHZ probe needs an even number (>= 2) of ions");
        double net = 0.0;
        for (double w : branch_weights) {
            if (w != 0.5 && w != -0.5)
                throw ConfigurationError("protocol: Zeeman weights must be +-1/2");
            net += w;
        }
        if (net != 0.0)
            throw ConfigurationError("protocol: branch is not decoherence free (net m != 0)");
        if (!(contrast >= 0.0 && contrast <= 1.0))
            throw ConfigurationError("protocol: contrast must be in [0, 1]");
        if (!std::isfinite(phase))
            throw ConfigurationError("protocol: phase must be finite");
    }
};

/** Bell pair |↑↓⟩ + e^{iφ}|↓↑⟩ at two sites. */
inline ProbeState make_bell(const Vec3 &ion1, const Vec3 &ion2, double contrast = 1.0) {
    ProbeState p{ProbeKind::Bell, {ion1, ion2}, {0.5, -0.5}, 0.0, contrast};
    p.validate();
    return p;
}

/**
 * GHZ probe with branch-1 pattern ↑↓…↓↑ mirrored about the centre: the left
 * half alternates starting at ↑ and the right half is its mirror image, e.g.
 * ↑↓ X ↓↑ for four ions around a central X.
 */
inline ProbeState make_mirrored_ghz(std::span<const Vec3> ions, double contrast = 1.0) {
    const auto n = ions.size();
    ProbeState p{ProbeKind::Ghz, {ions.begin(), ions.end()}, std::vector<double>(n), 0.0, contrast};
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double w = (i % 2 == 0) ? 0.5 : -0.5;
        p.branch_weights[i] = w;
        p.branch_weights[n - 1 - i] = w;
    }
    p.validate();
    return p;
}

/**
 * Ideal preparation followed by transfer into the ground-state Zeeman qubit.
 * The imperfect fidelity becomes the parity contrast; φ starts at 0.
 */
inline ProbeState transfer_and_prepare(ProbeState layout, double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw ConfigurationError("protocol: fidelity must be in [0, 1]");
    layout.phase = 0.0;
    layout.contrast = fidelity;
    layout.validate();
    return layout;
}

/** dφ/dt = (g μB/ħ) Σ_i Δm_i B_i. */
inline double phase_rate(const ProbeState &probe, const ZeemanConfig &zeeman, std::span<const double> field_at_ions) {
    if (field_at_ions.size() != probe.size())
        throw ConfigurationError("protocol: expected one field value per probe ion");
    zeeman.validate();
    double sum = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i)
        sum += probe.delta_m(i) * field_at_ions[i];
    return zeeman.gyromagnetic_ratio() * sum;
}

inline ProbeState evolve(ProbeState probe, const ZeemanConfig &zeeman, std::span<const double> field_at_ions,
                         double duration) {
    if (!(duration >= 0.0))
        throw ConfigurationError("protocol: evolution duration must be >= 0");
    probe.phase += phase_rate(probe, zeeman, field_at_ions) * duration;
    return probe;
}

inline double parity(const ProbeState &probe) { return probe.contrast * std::cos(probe.phase); }

/** Parity after the analysis pulse with phase offset `bias_phase`. */
inline double parity(const ProbeState &probe, double bias_phase) {
    return probe.contrast * std::cos(probe.phase + bias_phase);
}

struct ParityRecord {
    double time;
    double parity;
    double phase;
};

/** +1 if an even number of ions read ↓, else −1. */
inline int outcome_parity_sign(std::uint32_t pattern) { return (std::popcount(pattern) % 2 == 0) ? 1 : -1; }

/**
 * Outcome distribution over the 2^N spin patterns after the analysis pulse.
 * Ion i is bit (N − 1 − i) of the index, set for ↓, so a Bell pair is
 * ordered (↑↑, ↑↓, ↓↑, ↓↓).
 *
 * Even-parity patterns share (1 + C cos(φ + bias))/2 uniformly, odd ones
 * share the rest.
 */
inline std::vector<double> outcome_probabilities(const ProbeState &probe, double bias_phase) {
    const auto n = probe.size();
    if (n == 0 || n > 20)
        throw ConfigurationError("protocol: outcome distribution needs 1..20 ions");
    const std::size_t count = std::size_t{1} << n;
    const double p_even = 0.5 * (1.0 + parity(probe, bias_phase));
    const double per_even = p_even / static_cast<double>(count / 2);
    const double per_odd = (1.0 - p_even) / static_cast<double>(count / 2);
    std::vector<double> probs(count);
    for (std::size_t s = 0; s < count; ++s)
        probs[s] = outcome_parity_sign(static_cast<std::uint32_t>(s)) > 0 ? per_even : per_odd;
    return probs;
}

} // namespace iongradim
