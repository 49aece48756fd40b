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

#include "iongradim/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <string>

using namespace iongradim;

namespace {

ScenarioConfig config(ScenarioKind kind, bool paper = false) {
    ScenarioConfig c;
    c.kind = kind;
    c.paper_values = paper;
    if (kind == ScenarioKind::DoubleWell)
        c.plan.interaction_time = 2.5;
    return c;
}

double value(const ScenarioReport &r, const std::string &name) { return r.quantity(name).value; }

bool mentions(const ScenarioReport &r, const std::string &needle) {
    for (const auto &a : r.annotations)
        if (a.find(needle) != std::string::npos)
            return true;
    return false;
}

// trajectory phase must equal gamma * sum(dm_i B_i) * t for the arm_fields entries
void expect_trajectories_match_arm_fields(const ScenarioReport &r, const ScenarioConfig &cfg) {
    const auto &fields = r.table("arm_fields");
    const double gamma = cfg.zeeman.gyromagnetic_ratio();
    std::map<std::string, std::vector<double>> by_arm;
    for (std::size_t k = 0; k < fields.rows.size(); ++k)
        by_arm[std::get<std::string>(fields.rows[k][0])].push_back(fields.number(k, "Bz_T"));
    ASSERT_FALSE(by_arm.empty());
    for (const auto &[arm, b] : by_arm) {
        // Bell: +1, -1. Mirrored GHZ: alternating from each end toward the centre.
        double rate = 0.0;
        if (b.size() == 2)
            rate = gamma * (b[0] - b[1]);
        else
            for (std::size_t i = 0; i < b.size(); ++i)
                rate += gamma * (std::min(i, b.size() - 1 - i) % 2 == 0 ? 1.0 : -1.0) * b[i];
        const auto &traj = r.table("trajectory_" + arm);
        for (std::size_t k = 0; k < traj.rows.size(); ++k) {
            const double t = traj.number(k, "time_s");
            EXPECT_NEAR(traj.number(k, "phase_rad"), rate * t, 1e-12 * std::max(1.0, std::abs(rate * t))) << arm;
        }
    }
}

} // namespace

TEST(scenarios, names) {
    EXPECT_STREQ(to_string(ScenarioKind::ThreeIonSpin), "three_ion_spin");
    EXPECT_STREQ(to_string(ScenarioKind::GhzChain), "ghz_chain");
}

TEST(scenarios, three_ion_geometry_and_fields) {
    const auto r = run_three_ion_spin(config(ScenarioKind::ThreeIonSpin));
    EXPECT_EQ(r.mode, "computed");
    const double d12 = value(r, "d12_m");
    EXPECT_NEAR(d12, 1.03220936186407e-6, 1e-12 * 1.03e-6);
    // on-axis dipole: 2 * 1e-7 * |mu_e| / d^3
    EXPECT_NEAR(value(r, "B_near_computed_T"), 2e-7 * 9.2847647043e-24 / (d12 * d12 * d12), 1e-24);
    EXPECT_EQ(r.quantity("B_near_computed_T").source, Provenance::Computed);
    EXPECT_EQ(r.quantity("B_near_reference_T").source, Provenance::Paper);
    EXPECT_TRUE(mentions(r, "7.8e-13"));
}

TEST(scenarios, three_ion_paper_time_to_pi) {
    auto cfg = config(ScenarioKind::ThreeIonSpin, true);
    cfg.zeeman.g_factor = 2.002;
    const auto r = run_three_ion_spin(cfg);
    EXPECT_EQ(r.mode, "paper-values");
    EXPECT_NEAR(value(r, "t_pi_s"), 26.2413083292684, 1e-9);
    EXPECT_NEAR(value(r, "t_pi_spin_down_compensated_s"), 0.5 * value(r, "t_pi_s"), 1e-9);
    EXPECT_EQ(r.quantity("delta_B_T").source, Provenance::Paper);
    EXPECT_TRUE(mentions(r, "26 s"));
}

TEST(scenarios, compensated_spin_up_is_flat) {
    for (bool paper : {false, true}) {
        const auto r = run_three_ion_spin(config(ScenarioKind::ThreeIonSpin, paper));
        const auto &t = r.table("trajectory_spin_up");
        ASSERT_EQ(t.rows.size(), 61u);
        for (std::size_t k = 0; k < t.rows.size(); ++k)
            EXPECT_NEAR(t.number(k, "phase_rad"), 0.0, 1e-12);
    }
}

TEST(scenarios, spin_down_sees_twice_the_gradient) {
    const auto r = run_three_ion_spin(config(ScenarioKind::ThreeIonSpin));
    const auto &arms = r.table("arms");
    const double bare = arms.number(0, "phase_rate_rad_per_s");
    const double down = arms.number(2, "phase_rate_rad_per_s");
    EXPECT_NEAR(down, -2.0 * bare, 1e-9 * std::abs(bare));
}

TEST(scenarios, three_ion_trajectories_match_arm_fields) {
    for (bool paper : {false, true}) {
        const auto cfg = config(ScenarioKind::ThreeIonSpin, paper);
        expect_trajectories_match_arm_fields(run_three_ion_spin(cfg), cfg);
    }
}

TEST(scenarios, three_ion_discrimination_summary) {
    const auto r = run_three_ion_spin(config(ScenarioKind::ThreeIonSpin, true));
    EXPECT_NEAR(value(r, "parity_true_spin_up"), 0.0, 1e-12);
    EXPECT_LT(value(r, "parity_true_spin_down"), -0.5);
    EXPECT_EQ(value(r, "discrimination_feasible"), 1.0);
    EXPECT_GE(value(r, "required_shots_per_arm"), 1.0);
    EXPECT_DOUBLE_EQ(value(r, "total_time_s"), 2.0 * 10 * (5.0 + 1.0));
    EXPECT_GT(value(r, "snr_monte_carlo"), 0.0);
}

TEST(scenarios, runs_are_reproducible) {
    for (auto kind : {ScenarioKind::ThreeIonSpin, ScenarioKind::MolecularStateChange, ScenarioKind::DoubleWell,
                      ScenarioKind::GhzChain}) {
        const auto a = run_scenario(config(kind)), b = run_scenario(config(kind));
        ASSERT_EQ(a.summary.size(), b.summary.size());
        for (std::size_t k = 0; k < a.summary.size(); ++k) {
            EXPECT_EQ(a.summary[k].name, b.summary[k].name);
            EXPECT_EQ(a.summary[k].value, b.summary[k].value) << a.summary[k].name;
        }
        EXPECT_EQ(a.annotations, b.annotations);
    }
}

TEST(scenarios, molecular_no_change_is_infeasible) {
    auto cfg = config(ScenarioKind::MolecularStateChange);
    cfg.moment_after = cfg.moment_before;
    const auto r = run_molecular_state_change(cfg);
    EXPECT_EQ(value(r, "discrimination_feasible"), 0.0);
    EXPECT_FALSE(r.has_quantity("required_shots_per_arm"));
    EXPECT_TRUE(mentions(r, "infeasible"));
}

TEST(scenarios, molecular_rate_is_linear_in_moment_change) {
    auto cfg = config(ScenarioKind::MolecularStateChange);
    cfg.moment_after = 0.0;
    const double full = value(run_molecular_state_change(cfg), "phase_rate_after_rad_per_s");
    cfg.moment_after = 0.5 * cfg.moment_before;
    const auto r = run_molecular_state_change(cfg);
    EXPECT_NEAR(value(r, "phase_rate_after_rad_per_s"), 0.5 * full, 1e-9 * std::abs(full));
    EXPECT_NEAR(value(r, "phase_rate_before_rad_per_s"), 0.0, 1e-12 * std::abs(full));
    for (bool paper : {false, true}) {
        cfg.paper_values = paper;
        expect_trajectories_match_arm_fields(run_molecular_state_change(cfg), cfg);
    }
}

TEST(scenarios, double_well_balanced_is_flat) {
    auto cfg = config(ScenarioKind::DoubleWell);
    cfg.atom_imbalance = 0;
    const auto r = run_double_well(cfg);
    EXPECT_EQ(value(r, "delta_B_T"), 0.0);
    EXPECT_EQ(value(r, "parity_modulation"), 0.0);
    EXPECT_EQ(value(r, "discrimination_feasible"), 0.0);
}

TEST(scenarios, double_well_field_is_linear_and_antisymmetric) {
    auto cfg = config(ScenarioKind::DoubleWell);
    const double one = value(run_double_well(cfg), "delta_B_T");
    EXPECT_GT(std::abs(one), 0.0);
    cfg.atom_imbalance = 3;
    EXPECT_NEAR(value(run_double_well(cfg), "delta_B_T"), 3.0 * one, 1e-12 * std::abs(one));
    cfg.atom_imbalance = -1;
    EXPECT_NEAR(value(run_double_well(cfg), "delta_B_T"), -one, 1e-12 * std::abs(one));
    cfg.paper_values = true;
    cfg.atom_imbalance = 3;
    EXPECT_NEAR(value(run_double_well(cfg), "delta_B_T"), 3.9e-11, 1e-24);
}

TEST(scenarios, double_well_paper_modulation) {
    const auto r = run_double_well(config(ScenarioKind::DoubleWell, true));
    // 30-digit reference phase at g = 2.00225: 5.72259572414190 rad
    EXPECT_NEAR(std::abs(value(r, "phase_at_t_rad")), 5.72259572414190, 1e-9);
    EXPECT_GE(value(r, "parity_modulation"), reference::kZeroCrossingModulation);
    EXPECT_EQ(value(r, "phase_exceeds_pi"), 1.0);
    EXPECT_TRUE(mentions(r, "past pi"));
    const auto cfg = config(ScenarioKind::DoubleWell, true);
    expect_trajectories_match_arm_fields(r, cfg);
}

TEST(scenarios, double_well_rejects_wide_probe) {
    auto cfg = config(ScenarioKind::DoubleWell);
    cfg.probe_spacing = cfg.well_separation;
    EXPECT_THROW(run_double_well(cfg), ConfigurationError);
}

TEST(scenarios, ghz_rate_doubles_bell) {
    for (bool paper : {false, true}) {
        const auto cfg = config(ScenarioKind::GhzChain, paper);
        const auto r = run_ghz_chain(cfg);
        EXPECT_NEAR(value(r, "rate_ratio_ghz_over_bell"), 2.0, 1e-9);
        EXPECT_LT(value(r, "inner_spacing_m"), value(r, "outer_spacing_m"));
        expect_trajectories_match_arm_fields(r, cfg);
    }
    auto big = config(ScenarioKind::GhzChain);
    big.n_ions = 9;
    // larger chains pick up the outer probes too, so only the branch sum holds
    expect_trajectories_match_arm_fields(run_ghz_chain(big), big);
}

TEST(scenarios, ghz_null_source) {
    auto cfg = config(ScenarioKind::GhzChain);
    cfg.source_moment = 0.0;
    const auto r = run_ghz_chain(cfg);
    EXPECT_EQ(value(r, "phase_rate_ghz_rad_per_s"), 0.0);
    EXPECT_FALSE(r.has_quantity("rate_ratio_ghz_over_bell"));
    EXPECT_TRUE(mentions(r, "undefined"));
    EXPECT_EQ(value(r, "discrimination_feasible"), 0.0);
}

TEST(scenarios, ghz_invalid_sizes) {
    for (int n : {3, 4, 6, 7}) {
        auto cfg = config(ScenarioKind::GhzChain);
        cfg.n_ions = n;
        EXPECT_THROW(run_ghz_chain(cfg), ConfigurationError) << n;
    }
    auto cfg = config(ScenarioKind::GhzChain, true);
    cfg.n_ions = 9;
    EXPECT_THROW(run_ghz_chain(cfg), ConfigurationError);
}

TEST(scenarios, invalid_common_inputs) {
    auto cfg = config(ScenarioKind::ThreeIonSpin);
    cfg.fidelity = 1.5;
    EXPECT_THROW(run_scenario(cfg), ConfigurationError);
    cfg = config(ScenarioKind::ThreeIonSpin);
    cfg.trajectory_points = 1;
    EXPECT_THROW(run_scenario(cfg), ConfigurationError);
    cfg = config(ScenarioKind::ThreeIonSpin);
    cfg.trap.axial_frequency = -1.0;
    EXPECT_THROW(run_scenario(cfg), ConfigurationError);
}

TEST(scenarios, report_lookup_errors) {
    const auto r = run_three_ion_spin(config(ScenarioKind::ThreeIonSpin));
    EXPECT_THROW(r.quantity("nope"), IndexError);
    EXPECT_THROW(r.table("nope"), IndexError);
}
