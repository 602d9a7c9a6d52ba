// trimachine_cli.cpp — Command-line front end: point reports, sweeps and invariant checks

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "trimachine/cli.hpp"

int main(int argc, char** argv) {
    using trimachine::cli::Command;

    CLI::App app{"Three-qubit XXZ thermal machine: steady states, regimes and sweeps"};
    app.require_subcommand(1);

    Command cmd;
    auto add_common = [&](CLI::App* sub, bool sweep) {
        sub->add_option("--config", cmd.config_path, "JSON config, or a CSV with an echoed config line")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", cmd.output_path, "Output path (default: stdout)");
        sub->add_option("--set", cmd.overrides, "Override KEY=VALUE (repeatable)")->take_all();
        if (sweep) {
            sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { cmd.seed = s; },
                                                    "Master seed");
            sub->add_option_function<std::size_t>("--samples", [&](const std::size_t& n) { cmd.samples = n; },
                                                  "Number of random samples");
            sub->add_option("--workers", cmd.workers, "Worker threads (0 = all cores)");
        }
    };
    add_common(app.add_subcommand("point", "Full report for one parameter point (JSON)"), false);
    add_common(app.add_subcommand("sweep-random", "Random parameter atlas (CSV)"), true);
    add_common(app.add_subcommand("sweep-valve", "B2 heat-valve scan (CSV)"), true);
    add_common(app.add_subcommand("sweep-boost", "Work-recycling COP window scan (CSV)"), true);
    add_common(app.add_subcommand("validate", "Invariant suite over a random sweep"), true);

    CLI11_PARSE(app, argc, argv);
    cmd.subcommand = app.get_subcommands().front()->get_name();

    try {
        return trimachine::cli::run(cmd);
    } catch (const trimachine::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
}
