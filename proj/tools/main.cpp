#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <geoctl/errors.hpp>

#include "commands.hpp"
#include "config.hpp"

// Exit codes: 0 success/pass, 1 analysis fail (e.g. matching failed),
// 2 config/usage error, 3 numerical failure.

namespace {

geoctl::cli::RunContext make_context(const std::string& out_flag, bool out_given,
                                     std::uint64_t seed, bool seed_given, int threads,
                                     bool threads_given) {
    geoctl::cli::RunContext ctx;
    ctx.out_dir = "out";
    if (const char* env = std::getenv("GEOCTL_OUT"); env && *env) ctx.out_dir = env;
    if (out_given) ctx.out_dir = out_flag;
    ctx.seed = seed_given ? seed : 0;
    ctx.seed_from_flag = seed_given;
    ctx.threads = 1;
    if (const char* env = std::getenv("GEOCTL_THREADS"); env && *env)
        ctx.threads = std::max(1, std::atoi(env));
    if (threads_given) ctx.threads = std::max(1, threads);
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric control toolkit: Jacobi-metric geometrization, "
                 "connection matching, curvature stability maps, and "
                 "curvature-invariant cost optimization"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--config", config_path, "Path to the run config (JSON)");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Random seed (u64)");
    auto* threads_opt = app.add_option("--threads", threads, "Worker thread count");

    auto* systems = app.add_subcommand("systems", "List or show catalog systems");
    std::vector<std::string> systems_args;
    systems->add_option("args", systems_args, "list | show <name>")->expected(1, 2);

    auto* simulate = app.add_subcommand("simulate", "Integrate a flow and export CSV");
    auto* jacobi = app.add_subcommand("jacobi-compare",
                                      "Compare an EL path with the Jacobi geodesic");
    auto* match = app.add_subcommand("match", "Verify matching of a candidate metric");
    auto* stability = app.add_subcommand("stability", "Curvature stability map");
    auto* optimize = app.add_subcommand("optimize", "Optimize a metric family");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    using namespace geoctl::cli;
    const RunContext ctx = make_context(out_dir, out_opt->count() > 0, seed,
                                        seed_opt->count() > 0, threads,
                                        threads_opt->count() > 0);

    try {
        if (systems->parsed()) return cmd_systems(systems_args);

        if (config_path.empty()) throw ConfigError("--config is required for this command");
        json config = load_config_file(config_path);

        // Config may carry a seed; an explicit --seed wins.
        RunContext run = ctx;
        if (!ctx.seed_from_flag && config.is_object() && config.contains("seed"))
            run.seed = static_cast<std::uint64_t>(as_number(config.at("seed"), "seed"));

        if (simulate->parsed()) return cmd_simulate(config, run);
        if (jacobi->parsed()) return cmd_jacobi_compare(config, run);
        if (match->parsed()) return cmd_match(config, run);
        if (stability->parsed()) return cmd_stability(config, run);
        if (optimize->parsed()) return cmd_optimize(config, run);
        throw ConfigError("no subcommand selected");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const geoctl::MatchingFailed& e) {
        std::cerr << "matching failed: " << e.what() << "\n";
        return 1;
    } catch (const geoctl::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
