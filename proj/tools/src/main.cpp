#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pame/cli/commands.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct CommonFlags {
    std::string spec;
    std::string strategies;
    pame::cli::RunOverrides overrides;
    bool time_varying = false;
    bool time_invariant = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--spec", spec, "JSON spec file");
        cmd->add_option("--seed", overrides.seed, "base seed; test i uses seed + i");
        cmd->add_option("--n-tests", overrides.n_tests, "number of Monte-Carlo tests");
        cmd->add_option("--strategies", strategies,
                        "comma list of uncertainty,random,take_all,platform_only");
        cmd->add_flag("--time-varying", time_varying, "evolve traffic while driving");
        cmd->add_flag("--time-invariant", time_invariant, "keep traffic fixed");
        cmd->add_option("--grid-step", overrides.grid_step, "RMSE grid spacing in metres");
        cmd->add_option("--out", overrides.out, "output directory");
    }

    std::optional<std::filesystem::path> spec_path() const {
        if (spec.empty()) return std::nullopt;
        return std::filesystem::path(spec);
    }

    pame::cli::RunOverrides resolved() const {
        auto o = overrides;
        if (!strategies.empty()) o.strategies = split_list(strategies);
        if (time_varying) o.time_varying = true;
        if (time_invariant) o.time_varying = false;
        return o;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online mapping of parking availability with Gaussian processes"};
    app.set_version_flag("--version", pame::cli::build_identifier());
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "run a Monte-Carlo experiment");
    run_flags.attach(run);

    std::vector<std::string> dirs;
    std::string merged;
    auto* compare = app.add_subcommand("compare", "pool and compare run directories");
    compare->add_option("dirs", dirs, "run directories")->required();
    compare->add_option("--out", merged, "merged CSV path");

    CommonFlags snap_flags;
    double at_position = 0.0;
    auto* snapshot = app.add_subcommand("snapshot", "map profile at a given position");
    snap_flags.attach(snapshot);
    snapshot->add_option("--at-position", at_position, "platform position in metres")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pame::cli::kExitConfig;
    }

    if (*run) return pame::cli::cmd_run(run_flags.spec_path(), run_flags.resolved(), std::cout, std::cerr);
    if (*compare) {
        std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
        std::optional<std::filesystem::path> out;
        if (!merged.empty()) out = merged;
        return pame::cli::cmd_compare(paths, out, std::cout, std::cerr);
    }
    return pame::cli::cmd_snapshot(snap_flags.spec_path(), snap_flags.resolved(), at_position,
                                   std::cout, std::cerr);
}
