#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lentparticle/cli.hpp"

namespace {

struct CommonFlags {
    std::optional<std::string> config;
    lp::cli::Overrides overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("config", flags.config, "INI config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.overrides.seed, "master seed");
    cmd->add_option("--paths", flags.overrides.paths, "number of sampled configurations");
    cmd->add_option("--horizon", flags.overrides.horizon, "time horizon T");
    cmd->add_option("--measure", flags.overrides.measure, "symmetric-stable | uniform");
    cmd->add_option("--phi", flags.overrides.phi, "builtin name or comma-separated polynomial coefficients");
    cmd->add_option("--jobs", flags.overrides.jobs, "worker threads (0 = all cores)");
    cmd->add_option("--output", flags.overrides.output, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carre du champ and gradient of Poisson functionals by the lent particle method"};
    app.require_subcommand(1);

    CommonFlags verify_flags;
    CommonFlags simulate_flags;
    CommonFlags density_flags;

    CLI::App* verify = app.add_subcommand("verify", "run the identity checks and print a report");
    add_common_flags(verify, verify_flags);
    verify->add_option("--checks", verify_flags.overrides.checks, "comma-separated check names (default: all)");

    CLI::App* simulate = app.add_subcommand("simulate", "write sampled paths and functional values as CSV");
    add_common_flags(simulate, simulate_flags);

    CLI::App* density = app.add_subcommand("density", "energy image density diagnostic for V");
    add_common_flags(density, density_flags);
    density->add_option("--bins", density_flags.overrides.bins, "histogram bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto run = [](const CommonFlags& flags, auto command) {
        try {
            const lp::cli::Settings settings = lp::cli::resolve_settings(flags.config, flags.overrides);
            return command(settings, std::cout, std::cerr);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    };
    if (verify->parsed()) return run(verify_flags, lp::cli::cmd_verify);
    if (simulate->parsed()) return run(simulate_flags, lp::cli::cmd_simulate);
    return run(density_flags, lp::cli::cmd_density);
}
