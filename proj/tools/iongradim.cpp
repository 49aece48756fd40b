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

// iongradim command-line entry point.
//
//   iongradim --config run.cfg [--seed N] [--out DIR] [--format csv|text] [--paper-values on|off]
//
// Exit status: 0 success, 1 configuration error, 2 runtime or solver error.
// IONGRADIM_LOG=0|1|2 (quiet|info|debug) controls diagnostics on stderr.

#include "iongradim/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int log_level() {
    const char *env = std::getenv("IONGRADIM_LOG");
    if (!env || !*env)
        return 0;
    const std::string v(env);
    if (v == "debug" || v == "2")
        return 2;
    if (v == "info" || v == "1")
        return 1;
    return 0;
}

void log(int level, const std::string &msg) {
    if (log_level() >= level)
        std::cerr << "[iongradim] " << msg << "\n";
}

bool write_files(const std::filesystem::path &dir, const std::vector<iongradim::cli::EmittedFile> &files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << dir << ": " << ec.message() << "\n";
        return false;
    }
    for (const auto &f : files) {
        const auto path = dir / f.name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << f.content;
        if (!os) {
            std::cerr << "error: cannot write " << path << "\n";
            return false;
        }
        log(1, "wrote " + path.string());
    }
    return true;
}

} // namespace

int main(int argc, char **argv) {
    namespace cli = iongradim::cli;

    CLI::App app{"iongradim: entangled-ion magnetic gradient sensing simulator"};
    std::string config_path, out_dir, format, paper_values;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "run configuration file")->required();
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (default: print to stdout)");
    app.add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
    app.add_option("--paper-values", paper_values, "inject published field values (scenario runs)")
        ->check(CLI::IsMember({"on", "off"}));
    app.set_version_flag("--version", std::string("iongradim ") + iongradim::kVersion);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config file '" << config_path << "'\n";
        return kExitConfig;
    }
    std::stringstream text;
    text << in.rdbuf();

    cli::RunConfig cfg;
    try {
        cfg = cli::parse_config(text.str());
    } catch (const cli::ConfigError &e) {
        for (const auto &issue : e.issues())
            std::cerr << config_path << ": " << issue.describe() << "\n";
        return kExitConfig;
    }
    if (seed)
        cfg.seed = *seed;
    if (!format.empty())
        cfg.output_format = format == "csv" ? cli::OutputFormat::Csv : cli::OutputFormat::Text;
    if (!paper_values.empty()) {
        if (cfg.command != cli::Command::Scenario) {
            std::cerr << "error: --paper-values applies to scenario runs only\n";
            return kExitConfig;
        }
        cfg.paper_values = paper_values == "on";
    }
    cfg.output_path = out_dir;
    log(2, "normalized config:\n" + cli::config_echo(cfg));

    cli::ResultBundle bundle;
    try {
        bundle = cli::execute(cfg);
    } catch (const iongradim::ConfigurationError &e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    log(1, "run " + bundle.command + " (" + bundle.mode + "), config hash " + bundle.config_hash);

    const auto files = cli::emit(bundle, cfg.output_format);
    if (out_dir.empty()) {
        for (std::size_t i = 0; i < files.size(); ++i)
            std::cout << (i ? "\n" : "") << "==> " << files[i].name << " <==\n" << files[i].content;
        return 0;
    }
    return write_files(out_dir, files) ? 0 : kExitRuntime;
}
