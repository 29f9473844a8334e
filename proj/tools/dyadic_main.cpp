// Entry point: argument parsing only. All configuration semantics
// (precedence, vetting, defaults) live in dyadic/cli.hpp so they are
// testable in-process.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/cli.hpp"

namespace {

struct SubcommandOptions {
    CLI::App* app = nullptr;
    dyadic::cli::Command command = dyadic::cli::Command::Verify;
    std::string config_path;
    std::vector<std::pair<std::string, CLI::Option*>> options;  // config key -> option
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic: mixed-family shell model constructions and checks"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, dyadic::cli::Command>> commands = {
        {"simulate", dyadic::cli::Command::Simulate},
        {"constant", dyadic::cli::Command::Constant},
        {"selfsimilar", dyadic::cli::Command::SelfSimilar},
        {"sweep", dyadic::cli::Command::Sweep},
        {"verify", dyadic::cli::Command::Verify},
    };
    const std::vector<std::string> keys = {"beta",    "delta1", "delta2", "forcing", "shells",
                                           "out",     "format", "t_end",  "rel_tol", "a0",
                                           "a1",      "grid",   "workers"};
    const char* descriptions[] = {
        "wavenumber growth exponent (default 1)",
        "forward-transfer weight (default 1)",
        "backward-transfer weight (default 1)",
        "constant force on shell 0 (default 0)",
        "truncation index N (default 40)",
        "output file path (default <command>.<format>)",
        "output format: csv or json (default csv)",
        "time horizon; enables the sweep blow-up probe when set",
        "integrator relative tolerance (default 1e-10)",
        "constant-family seed / simulate data scale (default 1)",
        "self-similar family seed (default 1)",
        "sweep grid as d1lo:d1hi:n,d2lo:d2hi:n (default 0.01:2:20,0.01:2:20)",
        "sweep worker threads (default 4)",
    };

    std::vector<SubcommandOptions> subs(commands.size());
    // Each subcommand's option values live here; only the chosen
    // subcommand ever writes to them.
    std::vector<std::map<std::string, std::string>> storage(commands.size());

    for (std::size_t c = 0; c < commands.size(); ++c) {
        SubcommandOptions& sub = subs[c];
        sub.command = commands[c].second;
        sub.app = app.add_subcommand(commands[c].first, "");
        sub.app->add_option("--config", sub.config_path, "flat key = value config file");
        for (std::size_t k = 0; k < keys.size(); ++k) {
            std::string flag = "--" + keys[k];
            for (char& ch : flag)
                if (ch == '_') ch = '-';
            sub.options.emplace_back(
                keys[k], sub.app->add_option(flag, storage[c][keys[k]], descriptions[k]));
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    for (std::size_t c = 0; c < commands.size(); ++c) {
        if (!subs[c].app->parsed()) continue;
        try {
            dyadic::cli::ConfigMap file_values;
            if (!subs[c].config_path.empty())
                file_values = dyadic::cli::parse_config_file(subs[c].config_path);
            dyadic::cli::ConfigMap flag_values;
            for (const auto& [key, opt] : subs[c].options)
                if (opt->count() > 0)
                    flag_values[key] = dyadic::cli::ConfigEntry{storage[c][key], 0};
            const dyadic::cli::RunConfig cfg =
                dyadic::cli::build_config(subs[c].command, file_values, flag_values);
            return dyadic::cli::run(cfg);
        } catch (const dyadic::cli::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }
    std::cerr << "usage error: no command given\n";
    return 2;
}
