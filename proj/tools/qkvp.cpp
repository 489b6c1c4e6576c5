// Copyright 2026 The qkvp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qkvp: S-matrix Kohn scans with classical or VQLS inversion of M.
//
// Exit codes: 0 success, 2 some energies failed, 1 config or I/O error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qkvp/harness.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> inverter;
    std::optional<int> depth;
    std::optional<int> jobs;
};

void add_common(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--config", o.config, "JSON config file (defaults built in)")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "optimizer seed");
    cmd->add_option("--inverter", o.inverter, "classical or vqls")->check(CLI::IsMember({"classical", "vqls"}));
    cmd->add_option("--depth", o.depth, "ansatz layers")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

qkvp::cli::RunConfig resolve(const Overrides &o, const std::string &command) {
    // the convergence study is defined for the single-channel well only
    const auto kind = command == "convergence" ? qkvp::ProblemKind::OneChannelExpWell : qkvp::ProblemKind::SecrestJohnson;
    qkvp::cli::RunConfig c = o.config.empty() ? qkvp::cli::default_config(kind) : qkvp::cli::load_config(o.config);
    if (o.seed) {
        c.vqls.optimizer.seed = *o.seed;
    }
    if (o.inverter) {
        c.inverter = qkvp::cli::parse_inverter(*o.inverter);
    }
    if (o.depth) {
        c.vqls.depth = *o.depth;
    }
    if (o.jobs) {
        c.jobs = *o.jobs;
    }
    return c;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"S-matrix Kohn scattering with a variational quantum linear solver"};
    app.require_subcommand(1);
    Overrides o;
    std::string which;
    for (const char *name : {"scan", "convergence", "fidelity", "scaling", "cc-only"}) {
        CLI::App *cmd = app.add_subcommand(name);
        add_common(cmd, o);
        cmd->callback([&which, name] { which = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    qkvp::cli::RunOutcome outcome;
    try {
        const qkvp::cli::RunConfig c = resolve(o, which);
        if (which == "scan") {
            outcome = qkvp::cli::run_scan(c, o.out);
        } else if (which == "convergence") {
            outcome = qkvp::cli::run_convergence(c, o.out);
        } else if (which == "fidelity") {
            outcome = qkvp::cli::run_fidelity_table(c, o.out);
        } else if (which == "scaling") {
            outcome = qkvp::cli::run_scaling(c, o.out);
        } else {
            outcome = qkvp::cli::run_cc_only(c, o.out);
        }
    } catch (const qkvp::cli::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto &f : outcome.files) {
        std::cout << f.string() << '\n';
    }
    if (outcome.failures > 0) {
        std::cerr << outcome.failures << " point(s) failed; see the summary JSON\n";
        return 2;
    }
    return 0;
}
