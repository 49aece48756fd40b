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
 * @file estimation.hpp
 * @brief Monte Carlo shots under projection noise and quasi-static field
 *        noise; parity estimators, two-hypothesis SNR, shot budgets.
 *
 * Noise is quasi-static: each shot draws one common-mode offset and one
 * axial gradient, both Gaussian, constant over the interaction time. The
 * common-mode part enters the phase through Σ Δm_i, which is exactly zero
 * for a decoherence-free probe, so it never changes an outcome.
 */

#include "foundation.hpp"
#include "protocol.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <thread>
#include <vector>

namespace iongradim {

struct NoiseModel {
    double common_mode_rms = 0.0; ///< T, uniform offset per shot
    double gradient_rms = 0.0;    ///< T/m, axial gradient per shot
    double contrast = 1.0;        ///< readout contrast, multiplies the probe's

    void validate() const {
        if (!(common_mode_rms >= 0.0) || !std::isfinite(common_mode_rms))
            throw ConfigurationError("estimation: common_mode_rms must be >= 0");
        if (!(gradient_rms >= 0.0) || !std::isfinite(gradient_rms))
            throw ConfigurationError("estimation: gradient_rms must be >= 0");
        if (!(contrast >= 0.0 && contrast <= 1.0))
            throw ConfigurationError("estimation: contrast must be in [0, 1]");
    }
};

struct ExperimentPlan {
    long long shots = 1;
    double interaction_time = 0.0; ///< s
    double bias_phase = 0.0;       ///< rad, analysis-pulse phase
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (shots < 1)
            throw ConfigurationError("estimation: shots must be >= 1");
        if (!(interaction_time >= 0.0) || !std::isfinite(interaction_time))
            throw ConfigurationError("estimation: interaction_time must be >= 0");
        if (!std::isfinite(bias_phase))
            throw ConfigurationError("estimation: bias_phase must be finite");
    }
};

/** One hypothesis: a prepared probe and the signal field at each probe ion. */
struct ShotInputs {
    ProbeState probe;
    ZeemanConfig zeeman;
    std::vector<double> signal_field; ///< T, B_z at each probe ion
};

struct ShotOutcome {
    std::uint32_t pattern; ///< see outcome_probabilities for the bit layout
    int parity;            ///< +1 even, −1 odd
};

struct EstimationResult {
    double parity_estimate = 0.0;
    double std_error = 0.0;
    double true_parity = std::numeric_limits<double>::quiet_NaN();
    double snr = 0.0;
    long long shots_used = 0;
};

/** Phase after `plan.interaction_time` for one shot with the given noise draws. */
inline double shot_phase(const ShotInputs &in, const ExperimentPlan &plan, double common_mode, double gradient) {
    const auto n = in.probe.size();
    std::vector<double> gradient_field(n);
    double net_delta_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gradient_field[i] = gradient * in.probe.ion_positions[i].z;
        net_delta_m += in.probe.delta_m(i);
    }
    const double rate = phase_rate(in.probe, in.zeeman, in.signal_field) +
                        phase_rate(in.probe, in.zeeman, gradient_field) +
                        in.zeeman.gyromagnetic_ratio() * net_delta_m * common_mode;
    return in.probe.phase + rate * plan.interaction_time;
}

/** Noise-free parity the estimator targets (readout contrast included). */
inline double true_parity(const ShotInputs &in, const ExperimentPlan &plan, const NoiseModel &noise) {
    return noise.contrast * in.probe.contrast * std::cos(shot_phase(in, plan, 0.0, 0.0) + plan.bias_phase);
}

namespace detail {

inline ShotOutcome draw_shot(const ShotInputs &in, const ExperimentPlan &plan, const NoiseModel &noise,
                             std::uint64_t shot) {
    const double common_mode =
        noise.common_mode_rms > 0.0
            ? noise.common_mode_rms * ShotRandom(plan.rng_seed, shot, RngStream::CommonModeNoise).normal()
            : 0.0;
    const double gradient =
        noise.gradient_rms > 0.0
            ? noise.gradient_rms * ShotRandom(plan.rng_seed, shot, RngStream::GradientNoise).normal()
            : 0.0;
    const double phase = shot_phase(in, plan, common_mode, gradient);
    const double p_even =
        0.5 * (1.0 + noise.contrast * in.probe.contrast * std::cos(phase + plan.bias_phase));

    const ShotRandom draw(plan.rng_seed, shot, RngStream::Outcome);
    const bool even = draw.uniform0() < p_even;

    // uniform pattern within the parity class: free bits for ions 0..n-2,
    // the last ion's bit fixes the parity
    const auto n = static_cast<unsigned>(in.probe.size());
    const std::uint32_t free_bits = n > 1 ? static_cast<std::uint32_t>(draw.uniform1() * double(1u << (n - 1))) : 0u;
    std::uint32_t pattern = free_bits << 1;
    const bool free_even = std::popcount(free_bits) % 2 == 0;
    if (free_even != even)
        pattern |= 1u;
    return {pattern, even ? 1 : -1};
}

} // namespace detail

/**
 * Simulate `plan.shots` shots, shot k keyed by (rng_seed, first_shot + k).
 * Output is bit-identical for any thread count.
 */
inline std::vector<ShotOutcome> simulate_shots(const ExperimentPlan &plan, const ShotInputs &inputs,
                                               const NoiseModel &noise, unsigned threads = 1,
                                               std::uint64_t first_shot = 0) {
    plan.validate();
    noise.validate();
    inputs.probe.validate();
    if (inputs.signal_field.size() != inputs.probe.size())
        throw ConfigurationError("estimation: one signal field value per probe ion required");
    if (inputs.probe.size() > 20)
        throw ConfigurationError("estimation: at most 20 probe ions");

    const auto total = static_cast<std::size_t>(plan.shots);
    std::vector<ShotOutcome> out(total);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
            out[k] = detail::draw_shot(inputs, plan, noise, first_shot + k);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(total, 256))));
    if (threads == 1) {
        work(0, total);
        return out;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(total, begin + chunk);
        if (begin < end)
            pool.emplace_back(work, begin, end);
    }
    return out;
}

/** Standard error of a parity estimate from n shots; rule-of-three at |P̂| = 1. */
inline double parity_std_error(double estimate, long long n) {
    const double dn = static_cast<double>(n);
    if (std::abs(estimate) >= 1.0)
        return 3.0 / dn;
    return std::sqrt((1.0 - estimate * estimate) / dn);
}

inline EstimationResult parity_estimate(std::span<const ShotOutcome> outcomes,
                                        double true_parity = std::numeric_limits<double>::quiet_NaN()) {
    if (outcomes.empty())
        throw ConfigurationError("estimation: parity estimate needs at least one outcome");
    long long even = 0;
    for (const auto &o : outcomes)
        even += o.parity > 0 ? 1 : 0;
    const auto n = static_cast<long long>(outcomes.size());
    EstimationResult r;
    r.shots_used = n;
    r.parity_estimate = static_cast<double>(2 * even - n) / static_cast<double>(n);
    r.std_error = parity_std_error(r.parity_estimate, n);
    r.true_parity = true_parity;
    r.snr = std::abs(r.parity_estimate) / r.std_error;
    return r;
}

struct DiscriminationResult {
    EstimationResult first;  ///< e.g. target spin up
    EstimationResult second; ///< e.g. target spin down
    double snr = 0.0;
};

/** |P̂₂ − P̂₁| / sqrt(σ₁² + σ₂²). */
inline double pooled_snr(const EstimationResult &a, const EstimationResult &b) {
    const double pooled = std::hypot(a.std_error, b.std_error);
    return std::abs(b.parity_estimate - a.parity_estimate) / pooled;
}

/**
 * Two-hypothesis discrimination with `plan.shots` shots per arm. The first
 * arm uses shot indices [0, N), the second [N, 2N), both under the plan seed.
 */
inline DiscriminationResult spin_discrimination_snr(const ExperimentPlan &plan, const ShotInputs &first,
                                                    const ShotInputs &second, const NoiseModel &noise,
                                                    unsigned threads = 1) {
    const auto n = static_cast<std::uint64_t>(plan.shots);
    const auto a = simulate_shots(plan, first, noise, threads, 0);
    const auto b = simulate_shots(plan, second, noise, threads, n);
    DiscriminationResult r;
    r.first = parity_estimate(a, true_parity(first, plan, noise));
    r.second = parity_estimate(b, true_parity(second, plan, noise));
    r.snr = pooled_snr(r.first, r.second);
    return r;
}

/** Per-shot standard error of an arm with true parity p over n shots (asymptotic). */
inline double analytic_arm_error(double p, double n) {
    const double var = 1.0 - p * p;
    return var > 0.0 ? std::sqrt(var / n) : 3.0 / n;
}

inline double analytic_snr(double parity_first, double parity_second, double shots) {
    return std::abs(parity_second - parity_first) /
           std::hypot(analytic_arm_error(parity_first, shots), analytic_arm_error(parity_second, shots));
}

/** Smallest shot count per arm whose analytic SNR reaches `target_snr`. */
inline long long required_shots(double target_snr, double parity_first, double parity_second) {
    if (!(target_snr > 0.0) || !std::isfinite(target_snr))
        throw ConfigurationError("estimation: target_snr must be > 0");
    if (std::abs(parity_first) > 1.0 || std::abs(parity_second) > 1.0)
        throw ConfigurationError("estimation: arm parities must lie in [-1, 1]");
    const double swing = std::abs(parity_second - parity_first);
    if (!(swing > 0.0))
        throw InfeasibleError("estimation: zero parity swing, hypotheses are indistinguishable");

    // analytic_snr is increasing in n; bracket then bisect
    long long hi = 1;
    while (analytic_snr(parity_first, parity_second, static_cast<double>(hi)) < target_snr) {
        if (hi > (1LL << 60))
            throw InfeasibleError("estimation: required shot count overflows");
        hi *= 2;
    }
    long long lo = hi / 2; // snr(lo) < target, or lo == 0
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (analytic_snr(parity_first, parity_second, static_cast<double>(mid)) >= target_snr)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

/** Swing-only form: arms at ±swing/2 around the zero crossing. */
inline long long required_shots(double target_snr, double parity_swing) {
    if (!(parity_swing >= 0.0 && parity_swing <= 2.0))
        throw ConfigurationError("estimation: parity_swing must be in (0, 2]");
    return required_shots(target_snr, 0.5 * parity_swing, -0.5 * parity_swing);
}

/**
 * Contrast left after averaging over quasi-static Gaussian gradient noise:
 * exp(−σφ²/2), σφ = (g μB/ħ) |Σ Δm_i z_i| · gradient_rms · t.
 */
inline double dephasing_contrast(double gradient_rms, const ProbeState &probe, const ZeemanConfig &zeeman,
                                 double duration) {
    if (!(gradient_rms >= 0.0) || !(duration >= 0.0))
        throw ConfigurationError("estimation: dephasing inputs must be >= 0");
    double lever = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i)
        lever += probe.delta_m(i) * probe.ion_positions[i].z;
    const double sigma = zeeman.gyromagnetic_ratio() * std::abs(lever) * gradient_rms * duration;
    return std::exp(-0.5 * sigma * sigma);
}

inline double median(std::vector<double> values) {
    if (values.empty())
        throw ConfigurationError("estimation: median of an empty sample");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const double below = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + below);
    }
    return m;
}

/** SNR of `trials` independent discrimination runs, trial k seeded base_seed + k. */
inline std::vector<double> snr_trials(ExperimentPlan plan, const ShotInputs &first, const ShotInputs &second,
                                      const NoiseModel &noise, int trials, std::uint64_t base_seed) {
    std::vector<double> snrs;
    snrs.reserve(static_cast<std::size_t>(std::max(trials, 0)));
    for (int k = 0; k < trials; ++k) {
        plan.rng_seed = base_seed + static_cast<std::uint64_t>(k);
        snrs.push_back(spin_discrimination_snr(plan, first, second, noise).snr);
    }
    return snrs;
}

} // namespace iongradim
