#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orules/harness.hpp"

namespace {

struct CommonFlags {
    std::string scenario_path;
    std::uint64_t seed = 1;
    std::optional<double> dt_override;
    bool strict_rule1 = false;
    bool prune = true;
    std::string trace_out;
    std::string stats_out;
};

void add_run_flags(CLI::App* cmd, CommonFlags& f, bool with_trace) {
    cmd->add_option("scenario", f.scenario_path, "scenario file (.scn)")->required();
    cmd->add_option("--seed", f.seed, "base random seed");
    cmd->add_option("--dt", f.dt_override, "time-step override")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--strict-orule1", f.strict_rule1,
                  "sample rule 1 over every component and discard non-ready hits");
    cmd->add_flag("--prune,!--no-prune", f.prune, "phantom pruning (default on)");
    if (with_trace) cmd->add_option("--trace-out", f.trace_out, "write a trajectory trace here");
}

orules::harness::RunOptions make_options(const CommonFlags& f) {
    orules::harness::RunOptions opts;
    opts.strict_rule1 = f.strict_rule1;
    opts.prune = f.prune;
    opts.dt_override = f.dt_override;
    return opts;
}

int write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 3;
    }
    out << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orules - stochastic state-reduction simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::size_t runs = 1000;
    std::optional<unsigned> workers;
    CLI::App* run_cmd = app.add_subcommand("run", "run a seeded ensemble and report statistics");
    add_run_flags(run_cmd, run_flags, true);
    run_cmd->add_option("--runs", runs, "number of trajectories")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    run_cmd->add_option("--stats-out", run_flags.stats_out, "write ensemble statistics here");
    unsigned workers_arg = 0;
    run_cmd->add_option("--workers", workers_arg, "worker threads (default: ORULES_WORKERS or all cores)");

    CommonFlags trace_flags;
    CLI::App* trace_cmd = app.add_subcommand("trace", "run one trajectory and emit its full log");
    add_run_flags(trace_cmd, trace_flags, true);

    CommonFlags check_flags;
    CLI::App* check_cmd = app.add_subcommand("check", "parse and validate a scenario file");
    check_cmd->add_option("scenario", check_flags.scenario_path, "scenario file (.scn)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check_cmd) {
            auto sc = orules::scenario::load_scenario(check_flags.scenario_path);
            std::cout << "ok: " << sc.name << " (" << orules::scenario::version_key(sc.version)
                      << ")\n";
            return 0;
        }
        if (*trace_cmd) {
            auto sc = orules::scenario::load_scenario(trace_flags.scenario_path);
            auto rec = orules::harness::run_trajectory(sc, trace_flags.seed,
                                                       make_options(trace_flags));
            return write_text(trace_flags.trace_out, rec.trace_text());
        }
        if (*run_cmd) {
            auto sc = orules::scenario::load_scenario(run_flags.scenario_path);
            auto opts = make_options(run_flags);
            if (run_cmd->count("--workers")) workers = workers_arg;
            auto stats = orules::harness::run_ensemble(sc, runs, run_flags.seed, opts, workers);
            if (!run_flags.trace_out.empty()) {
                auto rec = orules::harness::run_trajectory(sc, run_flags.seed, opts);
                if (int rc = write_text(run_flags.trace_out, rec.trace_text())) return rc;
            }
            return write_text(run_flags.stats_out, stats.stats_text());
        }
    } catch (const orules::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    } catch (const orules::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
