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
 * @file cli.hpp
 * @brief Run configuration files, command dispatch and result emission.
 *
 * Config format (UTF-8):
 *
 *     # comment
 *     command = scenario          # crystal | field | protocol | montecarlo | scenario
 *     scenario = three_ion_spin
 *     axial_frequency_hz = 10e6
 *
 * One `key = value` per line; `#` starts a comment. Keys are strict: a key
 * that is unknown, repeated, or not used by the selected command is an
 * error. Physical keys carry their unit in the name and take SI values
 * (frequencies in Hz, converted to rad/s internally).
 *
 * A run produces a ResultBundle: a provenance header (version, config hash,
 * seed), the normalized config echo, a summary, tables and annotations. The
 * config hash is FNV-1a 64 over the echo text, so it can be recomputed from
 * the emitted echo.
 */

#include "crystal.hpp"
#include "estimation.hpp"
#include "foundation.hpp"
#include "magnetostatics.hpp"
#include "protocol.hpp"
#include "report.hpp"
#include "scenarios.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace iongradim::cli {

// ===========================================================================
//  Errors
// ===========================================================================

enum class IssueKind { Syntax, DuplicateKey, UnknownKey, NotApplicable, InvalidValue, OutOfRange, MissingKey };

inline const char *to_string(IssueKind k) {
    switch (k) {
    case IssueKind::Syntax:
        return "syntax error";
    case IssueKind::DuplicateKey:
        return "duplicate key";
    case IssueKind::UnknownKey:
        return "unknown key";
    case IssueKind::NotApplicable:
        return "key not used by this command";
    case IssueKind::InvalidValue:
        return "invalid value";
    case IssueKind::OutOfRange:
        return "out of range";
    case IssueKind::MissingKey:
        return "missing key";
    }
    return "?";
}

struct ConfigIssue {
    IssueKind kind;
    int line = 0;   ///< 1-based, 0 when not tied to a line
    int column = 0; ///< 1-based
    std::string key;
    std::string message;

    std::string describe() const {
        std::string s;
        if (line > 0)
            s += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
        s += to_string(kind);
        if (!key.empty())
            s += " '" + key + "'";
        if (!message.empty())
            s += ": " + message;
        return s;
    }
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<ConfigIssue> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<ConfigIssue> &issues() const noexcept { return issues_; }

  private:
    static std::string join(const std::vector<ConfigIssue> &issues) {
        std::string s;
        for (const auto &i : issues)
            s += (s.empty() ? "" : "\n") + i.describe();
        return s;
    }
    std::vector<ConfigIssue> issues_;
};

// ===========================================================================
//  RunConfig
// ===========================================================================

enum class Command { Crystal, Field, Protocol, MonteCarlo, Scenario };
enum class OutputFormat { Csv, Text };

inline const char *to_string(Command c) {
    switch (c) {
    case Command::Crystal:
        return "crystal";
    case Command::Field:
        return "field";
    case Command::Protocol:
        return "protocol";
    case Command::MonteCarlo:
        return "montecarlo";
    case Command::Scenario:
        return "scenario";
    }
    return "?";
}

inline const char *to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "text"; }

/** Raw, unit-suffixed run parameters exactly as they appear in a config file. */
struct RunConfig {
    Command command = Command::Crystal;
    ScenarioKind scenario = ScenarioKind::ThreeIonSpin;
    std::uint64_t seed = 0;
    OutputFormat output_format = OutputFormat::Csv;
    std::string output_path;
    bool paper_values = false;

    int n_ions = 3;
    double axial_frequency_hz = 10e6;
    double ion_mass_kg = 40.0 * constants().atomic_mass_unit;
    double ion_charge_c = constants().elementary_charge;

    int source_index = 2;
    double source_moment_j_per_t = -constants().electron_magnetic_moment;
    bool compensation = false;

    double delta_b_t = 6.8e-13;
    double g_factor = constants().ca40_g_factor;
    double fidelity = 0.99;
    double interaction_time_s = 5.0;
    double bias_phase_rad = std::numbers::pi / 2.0;
    double trajectory_duration_s = 30.0;
    int trajectory_points = 61;

    long long shots = 10;
    double probe_spacing_m = 1.03e-6;
    double common_mode_rms_t = 0.0;
    double gradient_rms_t_per_m = 0.0;
    double readout_contrast = 1.0;
    int threads = 1;

    double target_snr = 2.0;
    double shot_overhead_s = 1.0;
    double moment_before_j_per_t = constants().bohr_magneton;
    double moment_after_j_per_t = 0.5 * constants().bohr_magneton;
    double well_separation_m = 4.4e-6;
    long long atom_imbalance = 1;
    double atom_moment_j_per_t = constants().bohr_magneton;

    TrapConfig trap() const {
        return {2.0 * std::numbers::pi * axial_frequency_hz, ion_mass_kg, ion_charge_c};
    }

    ScenarioConfig scenario_config() const {
        ScenarioConfig s;
        s.kind = scenario;
        s.trap = trap();
        s.zeeman.g_factor = g_factor;
        s.noise = {common_mode_rms_t, gradient_rms_t_per_m, readout_contrast};
        s.plan = {shots, interaction_time_s, bias_phase_rad, seed};
        s.paper_values = paper_values;
        s.fidelity = fidelity;
        s.target_snr = target_snr;
        s.shot_overhead = shot_overhead_s;
        s.trajectory_duration = trajectory_duration_s;
        s.trajectory_points = trajectory_points;
        s.source_moment = source_moment_j_per_t;
        s.n_ions = n_ions;
        s.moment_before = moment_before_j_per_t;
        s.moment_after = moment_after_j_per_t;
        s.well_separation = well_separation_m;
        s.probe_spacing = probe_spacing_m;
        s.atom_imbalance = atom_imbalance;
        s.atom_moment = atom_moment_j_per_t;
        return s;
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/** Value-level failure raised by a key's setter. */
struct ValueProblem {
    IssueKind kind;
    std::string message;
};

inline double parse_double(std::string_view s) {
    std::string tmp(s);
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || errno == ERANGE || !std::isfinite(v))
        throw ValueProblem{IssueKind::InvalidValue, "expected a finite number, got '" + tmp + "'"};
    return v;
}

inline long long parse_int(std::string_view s) {
    std::string tmp(s);
    char *end = nullptr;
    errno = 0;
    const long long v = std::strtoll(tmp.c_str(), &end, 10);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || errno == ERANGE)
        throw ValueProblem{IssueKind::InvalidValue, "expected an integer, got '" + tmp + "'"};
    return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
    std::string tmp(s);
    if (tmp.empty() || tmp[0] == '-' || tmp[0] == '+')
        throw ValueProblem{IssueKind::InvalidValue, "expected an unsigned 64-bit integer, got '" + tmp + "'"};
    char *end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(tmp.c_str(), &end, 10);
    if (end != tmp.c_str() + tmp.size() || errno == ERANGE)
        throw ValueProblem{IssueKind::InvalidValue, "expected an unsigned 64-bit integer, got '" + tmp + "'"};
    return v;
}

inline bool parse_switch(std::string_view s) {
    if (s == "on")
        return true;
    if (s == "off")
        return false;
    throw ValueProblem{IssueKind::InvalidValue, "expected 'on' or 'off', got '" + std::string(s) + "'"};
}

inline void require(bool ok, const std::string &what) {
    if (!ok)
        throw ValueProblem{IssueKind::OutOfRange, what};
}

inline std::optional<Command> command_from(std::string_view s) {
    for (auto c : {Command::Crystal, Command::Field, Command::Protocol, Command::MonteCarlo, Command::Scenario})
        if (s == to_string(c))
            return c;
    return std::nullopt;
}

inline std::optional<ScenarioKind> scenario_from(std::string_view s) {
    for (auto k : {ScenarioKind::ThreeIonSpin, ScenarioKind::MolecularStateChange, ScenarioKind::DoubleWell,
                   ScenarioKind::GhzChain})
        if (s == to_string(k))
            return k;
    return std::nullopt;
}

// applicability masks
inline constexpr unsigned kCrystal = 1u << 0;
inline constexpr unsigned kField = 1u << 1;
inline constexpr unsigned kProtocol = 1u << 2;
inline constexpr unsigned kMonteCarlo = 1u << 3;
inline constexpr unsigned kThreeIon = 1u << 4;
inline constexpr unsigned kMolecular = 1u << 5;
inline constexpr unsigned kDoubleWell = 1u << 6;
inline constexpr unsigned kGhz = 1u << 7;
inline constexpr unsigned kAllScenarios = kThreeIon | kMolecular | kDoubleWell | kGhz;
inline constexpr unsigned kEverything = kCrystal | kField | kProtocol | kMonteCarlo | kAllScenarios;

inline unsigned mask_of(const RunConfig &c) {
    switch (c.command) {
    case Command::Crystal:
        return kCrystal;
    case Command::Field:
        return kField;
    case Command::Protocol:
        return kProtocol;
    case Command::MonteCarlo:
        return kMonteCarlo;
    case Command::Scenario:
        switch (c.scenario) {
        case ScenarioKind::ThreeIonSpin:
            return kThreeIon;
        case ScenarioKind::MolecularStateChange:
            return kMolecular;
        case ScenarioKind::DoubleWell:
            return kDoubleWell;
        case ScenarioKind::GhzChain:
            return kGhz;
        }
    }
    return 0;
}

struct KeySpec {
    const char *name;
    unsigned applies;
    std::function<void(RunConfig &, std::string_view)> set;
    std::function<std::string(const RunConfig &)> get;
};

// clang-format off
inline const std::vector<KeySpec> &key_registry() {
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        auto num = [&k](const char *name, unsigned applies, double RunConfig::*field,
                        std::function<bool(double)> ok, const char *range) {
            k.push_back({name, applies,
                         [=](RunConfig &c, std::string_view v) {
                             const double d = parse_double(v);
                             require(ok(d), std::string(name) + " must be " + range);
                             c.*field = d;
                         },
                         [=](const RunConfig &c) { return format_double(c.*field); }});
        };
        auto positive = [](double v) { return v > 0.0; };
        auto nonneg = [](double v) { return v >= 0.0; };
        auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        auto any = [](double) { return true; };
        constexpr unsigned trap_users = kCrystal | kField | (kAllScenarios & ~kDoubleWell);
        constexpr unsigned zeeman_users = kProtocol | kMonteCarlo | kAllScenarios;

        k.push_back({"command", kEverything, [](RunConfig &, std::string_view) {},
                     [](const RunConfig &c) { return std::string(to_string(c.command)); }});
        k.push_back({"scenario", kAllScenarios, [](RunConfig &, std::string_view) {},
                     [](const RunConfig &c) { return std::string(to_string(c.scenario)); }});
        k.push_back({"seed", kEverything,
                     [](RunConfig &c, std::string_view v) { c.seed = parse_u64(v); },
                     [](const RunConfig &c) { return std::to_string(c.seed); }});
        k.push_back({"output_format", kEverything,
                     [](RunConfig &c, std::string_view v) {
                         if (v == "csv") c.output_format = OutputFormat::Csv;
                         else if (v == "text") c.output_format = OutputFormat::Text;
                         else throw ValueProblem{IssueKind::InvalidValue, "expected 'csv' or 'text'"};
                     },
                     [](const RunConfig &c) { return std::string(to_string(c.output_format)); }});
        k.push_back({"paper_values", kAllScenarios,
                     [](RunConfig &c, std::string_view v) { c.paper_values = parse_switch(v); },
                     [](const RunConfig &c) { return std::string(c.paper_values ? "on" : "off"); }});
        k.push_back({"n_ions", kCrystal | kField | kGhz,
                     [](RunConfig &c, std::string_view v) {
                         const auto n = parse_int(v);
                         require(n >= 1 && n <= 30, "n_ions must be in [1, 30]");
                         c.n_ions = static_cast<int>(n);
                     },
                     [](const RunConfig &c) { return std::to_string(c.n_ions); }});
        num("axial_frequency_hz", trap_users, &RunConfig::axial_frequency_hz, positive, "> 0");
        num("ion_mass_kg", trap_users, &RunConfig::ion_mass_kg, positive, "> 0");
        num("ion_charge_c", trap_users, &RunConfig::ion_charge_c, positive, "> 0");
        k.push_back({"source_index", kField,
                     [](RunConfig &c, std::string_view v) {
                         const auto i = parse_int(v);
                         require(i >= 0 && i < 30, "source_index must be in [0, 30)");
                         c.source_index = static_cast<int>(i);
                     },
                     [](const RunConfig &c) { return std::to_string(c.source_index); }});
        num("source_moment_j_per_t", kField | kThreeIon | kGhz, &RunConfig::source_moment_j_per_t, any, "finite");
        k.push_back({"compensation", kField,
                     [](RunConfig &c, std::string_view v) { c.compensation = parse_switch(v); },
                     [](const RunConfig &c) { return std::string(c.compensation ? "on" : "off"); }});
        num("delta_b_t", kProtocol | kMonteCarlo, &RunConfig::delta_b_t, any, "finite");
        num("g_factor", zeeman_users, &RunConfig::g_factor, positive, "> 0");
        num("fidelity", zeeman_users, &RunConfig::fidelity, unit, "in [0, 1]");
        num("interaction_time_s", zeeman_users, &RunConfig::interaction_time_s, nonneg, ">= 0");
        num("bias_phase_rad", zeeman_users, &RunConfig::bias_phase_rad, any, "finite");
        num("trajectory_duration_s", kProtocol | kAllScenarios, &RunConfig::trajectory_duration_s, positive, "> 0");
        k.push_back({"trajectory_points", kProtocol | kAllScenarios,
                     [](RunConfig &c, std::string_view v) {
                         const auto n = parse_int(v);
                         require(n >= 2 && n <= 100000, "trajectory_points must be in [2, 100000]");
                         c.trajectory_points = static_cast<int>(n);
                     },
                     [](const RunConfig &c) { return std::to_string(c.trajectory_points); }});
        k.push_back({"shots", kMonteCarlo | kAllScenarios,
                     [](RunConfig &c, std::string_view v) {
                         const auto n = parse_int(v);
                         require(n >= 1 && n <= 100000000, "shots must be in [1, 1e8]");
                         c.shots = n;
                     },
                     [](const RunConfig &c) { return std::to_string(c.shots); }});
        num("probe_spacing_m", kMonteCarlo | kDoubleWell, &RunConfig::probe_spacing_m, positive, "> 0");
        num("common_mode_rms_t", kMonteCarlo | kAllScenarios, &RunConfig::common_mode_rms_t, nonneg, ">= 0");
        num("gradient_rms_t_per_m", kMonteCarlo | kAllScenarios, &RunConfig::gradient_rms_t_per_m, nonneg, ">= 0");
        num("readout_contrast", kMonteCarlo | kAllScenarios, &RunConfig::readout_contrast, unit, "in [0, 1]");
        k.push_back({"threads", kMonteCarlo,
                     [](RunConfig &c, std::string_view v) {
                         const auto n = parse_int(v);
                         require(n >= 1 && n <= 256, "threads must be in [1, 256]");
                         c.threads = static_cast<int>(n);
                     },
                     [](const RunConfig &c) { return std::to_string(c.threads); }});
        num("target_snr", kAllScenarios, &RunConfig::target_snr, positive, "> 0");
        num("shot_overhead_s", kAllScenarios, &RunConfig::shot_overhead_s, nonneg, ">= 0");
        num("moment_before_j_per_t", kMolecular, &RunConfig::moment_before_j_per_t, any, "finite");
        num("moment_after_j_per_t", kMolecular, &RunConfig::moment_after_j_per_t, any, "finite");
        num("well_separation_m", kDoubleWell, &RunConfig::well_separation_m, positive, "> 0");
        k.push_back({"atom_imbalance", kDoubleWell,
                     [](RunConfig &c, std::string_view v) {
                         const auto n = parse_int(v);
                         require(n >= -1000000 && n <= 1000000, "atom_imbalance must be in [-1e6, 1e6]");
                         c.atom_imbalance = n;
                     },
                     [](const RunConfig &c) { return std::to_string(c.atom_imbalance); }});
        num("atom_moment_j_per_t", kDoubleWell, &RunConfig::atom_moment_j_per_t, any, "finite");
        return k;
    }();
    return keys;
}
// clang-format on

inline const KeySpec *find_key(std::string_view name) {
    for (const auto &k : key_registry())
        if (name == k.name)
            return &k;
    return nullptr;
}

/** Defaults that depend on the selected command or scenario. */
inline RunConfig defaults_for(Command command, ScenarioKind scenario) {
    RunConfig c;
    c.command = command;
    c.scenario = scenario;
    if (command == Command::Scenario) {
        if (scenario == ScenarioKind::GhzChain)
            c.n_ions = 5;
        if (scenario == ScenarioKind::DoubleWell) {
            c.probe_spacing_m = 3.5e-6;
            c.interaction_time_s = 2.5;
        }
    }
    return c;
}

struct RawEntry {
    std::string value;
    int line;
    int key_column;
    int value_column;
};

inline bool is_key_char(char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
}

} // namespace detail

/** Parse and validate a config file; throws ConfigError listing every issue found. */
inline RunConfig parse_config(std::string_view text) {
    std::vector<ConfigIssue> issues;
    std::map<std::string, detail::RawEntry> entries;
    std::vector<std::string> order;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);

        auto col_of = [&](std::size_t i) { return static_cast<int>(i) + 1; };
        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        if (i == line.size())
            continue;
        const std::size_t key_begin = i;
        while (i < line.size() && detail::is_key_char(line[i]))
            ++i;
        const std::size_t key_end = i;
        if (key_end == key_begin) {
            issues.push_back({IssueKind::Syntax, line_no, col_of(i), "", "expected a key ([a-z0-9_]+)"});
            continue;
        }
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        if (i == line.size() || line[i] != '=') {
            issues.push_back({IssueKind::Syntax, line_no, col_of(i), "", "expected '=' after key"});
            continue;
        }
        ++i;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        std::size_t value_end = line.size();
        while (value_end > i && (line[value_end - 1] == ' ' || line[value_end - 1] == '\t'))
            --value_end;
        if (value_end == i) {
            issues.push_back({IssueKind::Syntax, line_no, col_of(i), "", "missing value after '='"});
            continue;
        }
        const std::string key(line.substr(key_begin, key_end - key_begin));
        const std::string value(line.substr(i, value_end - i));
        for (std::size_t v = 0; v < value.size(); ++v)
            if (value[v] == ' ' || value[v] == '\t') {
                issues.push_back({IssueKind::Syntax, line_no, col_of(i + v), key, "whitespace inside value"});
                break;
            }
        if (auto it = entries.find(key); it != entries.end()) {
            issues.push_back({IssueKind::DuplicateKey, line_no, col_of(key_begin), key,
                              "first set on line " + std::to_string(it->second.line)});
            continue;
        }
        entries.emplace(key, detail::RawEntry{value, line_no, col_of(key_begin), col_of(i)});
        order.push_back(key);
    }
    if (!issues.empty())
        throw ConfigError(std::move(issues));

    // command and scenario select the key set and defaults
    Command command = Command::Crystal;
    ScenarioKind scenario = ScenarioKind::ThreeIonSpin;
    if (auto it = entries.find("command"); it == entries.end()) {
        issues.push_back({IssueKind::MissingKey, 0, 0, "command", "one of crystal|field|protocol|montecarlo|scenario"});
    } else if (auto c = detail::command_from(it->second.value)) {
        command = *c;
    } else {
        issues.push_back({IssueKind::InvalidValue, it->second.line, it->second.value_column, "command",
                          "expected crystal|field|protocol|montecarlo|scenario"});
    }
    if (issues.empty() && command == Command::Scenario) {
        if (auto it = entries.find("scenario"); it == entries.end()) {
            issues.push_back({IssueKind::MissingKey, 0, 0, "scenario",
                              "one of three_ion_spin|molecular_state_change|double_well|ghz_chain"});
        } else if (auto s = detail::scenario_from(it->second.value)) {
            scenario = *s;
        } else {
            issues.push_back({IssueKind::InvalidValue, it->second.line, it->second.value_column, "scenario",
                              "expected three_ion_spin|molecular_state_change|double_well|ghz_chain"});
        }
    }
    if (!issues.empty())
        throw ConfigError(std::move(issues));

    RunConfig cfg = detail::defaults_for(command, scenario);
    const unsigned mask = detail::mask_of(cfg);
    bool source_index_given = false;
    for (const auto &key : order) {
        const auto &e = entries.at(key);
        const auto *spec = detail::find_key(key);
        if (!spec) {
            issues.push_back({IssueKind::UnknownKey, e.line, e.key_column, key, ""});
            continue;
        }
        if (!(spec->applies & mask)) {
            issues.push_back({IssueKind::NotApplicable, e.line, e.key_column, key,
                              std::string("not used by command '") + to_string(command) +
                                  (command == Command::Scenario ? std::string("/") + to_string(scenario) : "") + "'"});
            continue;
        }
        try {
            spec->set(cfg, e.value);
            source_index_given = source_index_given || key == "source_index";
        } catch (const detail::ValueProblem &p) {
            issues.push_back({p.kind, e.line, e.value_column, key, p.message});
        }
    }
    if (cfg.command == Command::Field) {
        if (!source_index_given)
            cfg.source_index = cfg.n_ions - 1;
        else if (cfg.source_index >= cfg.n_ions)
            issues.push_back({IssueKind::OutOfRange, entries.at("source_index").line,
                              entries.at("source_index").value_column, "source_index", "must be < n_ions"});
    }
    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return cfg;
}

/** Normalized config text: every applicable key in registry order, defaults filled in. */
inline std::string config_echo(const RunConfig &cfg) {
    const unsigned mask = detail::mask_of(cfg);
    std::string out;
    for (const auto &k : detail::key_registry())
        if (k.applies & mask)
            out += std::string(k.name) + " = " + k.get(cfg) + "\n";
    return out;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string config_hash(const RunConfig &cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(config_echo(cfg)));
    return buf;
}

// ===========================================================================
//  ResultBundle / execute
// ===========================================================================

struct ResultBundle {
    std::string version = kVersion;
    std::string command;
    std::string mode;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string config_echo;
    std::vector<Quantity> summary;
    std::vector<Table> tables;
    std::vector<std::string> annotations;

    const Table &table(const std::string &name) const {
        for (const auto &t : tables)
            if (t.name == name)
                return t;
        throw IndexError("cli: no table '" + name + "'");
    }
    const Quantity &quantity(const std::string &name) const {
        for (const auto &q : summary)
            if (q.name == name)
                return q;
        throw IndexError("cli: no quantity '" + name + "'");
    }
};

namespace detail {

inline ResultBundle run_crystal(const RunConfig &cfg) {
    ResultBundle b;
    const auto geo = equilibrium_positions(cfg.n_ions, cfg.trap());
    b.summary.push_back({"n_ions", static_cast<double>(cfg.n_ions), "1", Provenance::Input});
    b.summary.push_back({"length_scale_m", geo.length_scale, "m", Provenance::Computed});
    b.summary.push_back({"force_residual", force_residual(geo), "1", Provenance::Computed});
    Table pos{"positions", {"ion_index", "z_m", "u"}, {}};
    for (std::size_t i = 0; i < geo.size(); ++i)
        pos.rows.push_back({static_cast<long long>(i), geo.positions[i], geo.positions[i] / geo.length_scale});
    Table gaps{"spacings", {"ion_index", "next_index", "spacing_m"}, {}};
    for (std::size_t i = 0; i + 1 < geo.size(); ++i)
        gaps.rows.push_back({static_cast<long long>(i), static_cast<long long>(i + 1), spacing(geo, i, i + 1)});
    if (geo.size() >= 2)
        b.summary.push_back({"d12_m", spacing(geo, 0, 1), "m", Provenance::Computed});
    b.tables = {std::move(pos), std::move(gaps)};
    if (cfg.n_ions == 3)
        b.annotations.push_back("reference: d12 = 1.077 l, i.e. 1.03e-6 m at 10 MHz and 1.63e-6 m at 5 MHz (Ca-40)");
    return b;
}

inline ResultBundle run_field(const RunConfig &cfg) {
    ResultBundle b;
    const auto geo = equilibrium_positions(cfg.n_ions, cfg.trap());
    const auto x = static_cast<std::size_t>(cfg.source_index);
    const DipoleSource src = DipoleSource::axial(geo.positions.at(x), cfg.source_moment_j_per_t);

    // the two ions nearest X on one side form the probe pair (far, near)
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    if (x >= 2)
        pair = std::pair{x - 2, x - 1};
    else if (x + 2 < geo.size())
        pair = std::pair{x + 2, x + 1};
    std::optional<UniformGradient> comp;
    if (cfg.compensation) {
        if (!pair)
            throw ConfigurationError("field: compensation needs two probe ions on one side of the source");
        comp = compensation_gradient(src, geo.position(pair->first), geo.position(pair->second));
    }

    Table t{"field_table", {"ion_index", "z_m", "Bz_T"}, {}};
    for (std::size_t i = 0; i < geo.size(); ++i) {
        if (i == x)
            continue;
        double bz = axial_bz(src, geo.positions[i]);
        if (comp)
            bz += comp->bz(geo.position(i));
        t.rows.push_back({static_cast<long long>(i), geo.positions[i], bz});
    }
    b.tables.push_back(std::move(t));
    b.summary.push_back({"source_index", static_cast<double>(x), "1", Provenance::Input});
    b.summary.push_back({"source_moment_J_per_T", cfg.source_moment_j_per_t, "J/T", Provenance::Input});
    if (pair) {
        const Vec3 far = geo.position(pair->first), near = geo.position(pair->second);
        const double db = differential_field(src, far, near);
        b.summary.push_back({"B_near_T", axial_bz(src, near.z), "T", Provenance::Computed});
        b.summary.push_back({"B_far_T", axial_bz(src, far.z), "T", Provenance::Computed});
        b.summary.push_back({"delta_B_T", db, "T", Provenance::Computed});
        const UniformGradient g = comp ? *comp : compensation_gradient(src, far, near);
        b.summary.push_back({"compensation_gradient_T_per_m", g.dBz_dz, "T/m", Provenance::Computed});
        if (comp) {
            const DipoleSource flipped{src.position, -src.moment};
            b.summary.push_back({"delta_B_compensated_same_T", total_differential_field(src, g, far, near), "T",
                                 Provenance::Computed});
            b.summary.push_back({"delta_B_compensated_flipped_T", total_differential_field(flipped, g, far, near),
                                 "T", Provenance::Computed});
        }
    }
    b.annotations.push_back("reference: 7.8e-13 T at 1.03 um and 9.7e-14 T at 2.06 um from a single electron spin; "
                            "the dipole law with the CODATA moment gives about 2.2x more");
    return b;
}

inline ResultBundle run_protocol(const RunConfig &cfg) {
    ResultBundle b;
    const ZeemanConfig zeeman{cfg.g_factor};
    const ProbeState probe =
        transfer_and_prepare(make_bell(on_axis(0.0), on_axis(cfg.probe_spacing_m)), cfg.fidelity);
    const std::vector<double> fields{0.0, cfg.delta_b_t};
    const double rate = phase_rate(probe, zeeman, fields);
    const ProbeState at_t = evolve(probe, zeeman, fields, cfg.interaction_time_s);
    b.summary.push_back({"delta_B_T", cfg.delta_b_t, "T", Provenance::Input});
    b.summary.push_back({"phase_rate_rad_per_s", rate, "rad/s", Provenance::Computed});
    b.summary.push_back(
        {"t_pi_s", rate != 0.0 ? std::numbers::pi / std::abs(rate) : std::numeric_limits<double>::infinity(), "s", Provenance::Computed});
    b.summary.push_back({"phase_at_t_rad", at_t.phase, "rad", Provenance::Computed});
    b.summary.push_back({"parity_at_t", parity(at_t), "1", Provenance::Computed});
    b.summary.push_back({"parity_at_t_biased", parity(at_t, cfg.bias_phase_rad), "1", Provenance::Computed});

    Table traj{"trajectory", {"time_s", "phase_rad", "parity"}, {}};
    for (int k = 0; k < cfg.trajectory_points; ++k) {
        const double time = cfg.trajectory_duration_s * k / static_cast<double>(cfg.trajectory_points - 1);
        const ProbeState s = evolve(probe, zeeman, fields, time);
        traj.rows.push_back({time, s.phase, parity(s)});
    }
    Table outcomes{"outcomes", {"outcome", "probability"}, {}};
    const char *labels[] = {"up_up", "up_down", "down_up", "down_down"};
    const auto probs = outcome_probabilities(at_t, cfg.bias_phase_rad);
    for (std::size_t i = 0; i < probs.size(); ++i)
        outcomes.rows.push_back({std::string(labels[i]), probs[i]});
    b.tables = {std::move(traj), std::move(outcomes)};
    return b;
}

inline ResultBundle run_montecarlo(const RunConfig &cfg) {
    ResultBundle b;
    const ZeemanConfig zeeman{cfg.g_factor};
    const ProbeState probe =
        transfer_and_prepare(make_bell(on_axis(0.0), on_axis(cfg.probe_spacing_m)), cfg.fidelity);
    const ShotInputs in{probe, zeeman, {0.0, cfg.delta_b_t}};
    const ExperimentPlan plan{cfg.shots, cfg.interaction_time_s, cfg.bias_phase_rad, cfg.seed};
    const NoiseModel noise{cfg.common_mode_rms_t, cfg.gradient_rms_t_per_m, cfg.readout_contrast};
    const auto shots = simulate_shots(plan, in, noise, static_cast<unsigned>(cfg.threads));
    const auto est = parity_estimate(shots, true_parity(in, plan, noise));
    const double dephasing = dephasing_contrast(cfg.gradient_rms_t_per_m, probe, zeeman, cfg.interaction_time_s);

    b.summary.push_back({"shots", static_cast<double>(est.shots_used), "1", Provenance::Input});
    b.summary.push_back({"parity_estimate", est.parity_estimate, "1", Provenance::Computed});
    b.summary.push_back({"std_error", est.std_error, "1", Provenance::Computed});
    b.summary.push_back({"true_parity", est.true_parity, "1", Provenance::Computed});
    b.summary.push_back({"snr", est.snr, "1", Provenance::Computed});
    b.summary.push_back({"dephasing_contrast", dephasing, "1", Provenance::Computed});
    b.summary.push_back(
        {"expected_parity_with_dephasing", dephasing * est.true_parity, "1", Provenance::Computed});

    Table t{"shots", {"shot_index", "pattern", "parity"}, {}};
    for (std::size_t k = 0; k < shots.size(); ++k)
        t.rows.push_back({static_cast<long long>(k), static_cast<long long>(shots[k].pattern),
                          static_cast<long long>(shots[k].parity)});
    b.tables.push_back(std::move(t));
    return b;
}

} // namespace detail

/** Dispatch a validated config. Module errors propagate with their module prefix. */
inline ResultBundle execute(const RunConfig &cfg) {
    ResultBundle b;
    std::string mode = "computed";
    switch (cfg.command) {
    case Command::Crystal:
        b = detail::run_crystal(cfg);
        break;
    case Command::Field:
        b = detail::run_field(cfg);
        break;
    case Command::Protocol:
        b = detail::run_protocol(cfg);
        mode = "input";
        break;
    case Command::MonteCarlo:
        b = detail::run_montecarlo(cfg);
        mode = "input";
        break;
    case Command::Scenario: {
        ScenarioReport r = run_scenario(cfg.scenario_config());
        b.summary = std::move(r.summary);
        b.tables = std::move(r.tables);
        b.annotations = std::move(r.annotations);
        mode = r.mode;
        break;
    }
    }
    b.command = to_string(cfg.command);
    if (cfg.command == Command::Scenario)
        b.command += std::string("/") + to_string(cfg.scenario);
    b.mode = mode;
    b.seed = cfg.seed;
    b.config_echo = config_echo(cfg);
    b.config_hash = config_hash(cfg);
    return b;
}

// ===========================================================================
//  Emission
// ===========================================================================

struct EmittedFile {
    std::string name;
    std::string content;
};

namespace detail {

/** Scientific notation, 17 significant digits. */
inline std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string cell_text(const Cell &c) {
    if (const auto *d = std::get_if<double>(&c))
        return format_number(*d);
    if (const auto *i = std::get_if<long long>(&c))
        return std::to_string(*i);
    return std::get<std::string>(c);
}

inline std::string provenance_line(const ResultBundle &b) {
    return "# iongradim " + b.version + " command=" + b.command + " mode=" + b.mode + " seed=" +
           std::to_string(b.seed) + " config_hash=" + b.config_hash;
}

inline Table summary_table(const ResultBundle &b) {
    Table t{"summary", {"name", "value", "unit", "source"}, {}};
    for (const auto &q : b.summary)
        t.rows.push_back({q.name, q.value, q.unit, std::string(to_string(q.source))});
    return t;
}

inline std::string csv_table(const ResultBundle &b, const Table &t) {
    std::string out = provenance_line(b) + "\r\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out += (c ? "," : "") + csv_field(t.columns[c]);
    out += "\r\n";
    for (const auto &row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out += (c ? "," : "") + csv_field(cell_text(row[c]));
        out += "\r\n";
    }
    return out;
}

inline std::string provenance_text(const ResultBundle &b) {
    std::ostringstream os;
    os << "iongradim " << b.version << "\n"
       << "command: " << b.command << "\n"
       << "mode: " << b.mode << "\n"
       << "seed: " << b.seed << "\n"
       << "config_hash: " << b.config_hash << "\n";
    for (const auto &a : b.annotations)
        os << "note: " << a << "\n";
    os << "--- config ---\n" << b.config_echo;
    return os.str();
}

inline std::string text_table(const Table &t) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        width[c] = t.columns[c].size();
    for (const auto &row : t.rows) {
        auto &r = cells.emplace_back();
        for (std::size_t c = 0; c < row.size(); ++c) {
            r.push_back(cell_text(row[c]));
            width[c] = std::max(width[c], r.back().size());
        }
    }
    auto line = [&](const std::vector<std::string> &r) {
        std::string s;
        for (std::size_t c = 0; c < r.size(); ++c) {
            s += (c ? "  " : "") + r[c];
            if (c + 1 < r.size())
                s += std::string(width[c] - r[c].size(), ' ');
        }
        return s + "\n";
    };
    std::string out = "[" + t.name + "]\n" + line(t.columns);
    for (const auto &r : cells)
        out += line(r);
    return out;
}

} // namespace detail

/**
 * Render a bundle. CSV: one file per table (`<table>.csv`, with a summary
 * table first) plus `provenance.txt`. Text: a single `report.txt` holding
 * the same content.
 */
inline std::vector<EmittedFile> emit(const ResultBundle &bundle, OutputFormat format) {
    std::vector<EmittedFile> files;
    std::vector<Table> all;
    all.push_back(detail::summary_table(bundle));
    all.insert(all.end(), bundle.tables.begin(), bundle.tables.end());
    if (format == OutputFormat::Csv) {
        files.push_back({"provenance.txt", detail::provenance_text(bundle)});
        for (const auto &t : all)
            files.push_back({t.name + ".csv", detail::csv_table(bundle, t)});
    } else {
        std::string text = detail::provenance_text(bundle);
        for (const auto &t : all)
            text += "\n" + detail::text_table(t);
        files.push_back({"report.txt", std::move(text)});
    }
    return files;
}

} // namespace iongradim::cli
