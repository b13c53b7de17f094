#ifndef ORULES_HARNESS_HPP
#define ORULES_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orules/engine.hpp"
#include "orules/scenario.hpp"

namespace orules::harness {

using RunOptions = engine::SimOptions;

/// One run's event log and terminal state. Deterministic in (scenario,
/// seed): the trace text is byte-identical across replays and worker
/// counts.
struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<engine::SimEvent> events;
    std::vector<std::pair<std::string, double>> terminal_components;
    std::string terminal_label;  // " + "-joined component labels
    double terminal_weight = 0.0;
    std::vector<double> hit_times;
    int reductions = 0;
    double max_norm_drift = 0.0;
    double cumulative_vertical = 0.0;
    double end_time = 0.0;

    /// Line-delimited export: time,event_kind,component_label,weight
    std::string trace_text() const;
};

TrajectoryRecord run_trajectory(const scenario::Scenario& sc, std::uint64_t seed,
                                const RunOptions& opts = {});

struct EnsembleStats {
    std::size_t n_runs = 0;
    std::map<std::string, std::uint64_t> outcomes;  // terminal label -> count
    std::vector<double> hit_times;                  // all hits, seed order
    std::optional<double> ks;  // vs the half-life reference CDF, when hits exist

    /// JSON export with fields n_runs, outcomes, ks.
    std::string stats_text() const;
};

/// Run n independent trajectories seeded base_seed .. base_seed+n-1,
/// possibly on several workers; the fold is in seed order, so the result
/// does not depend on the worker count.
EnsembleStats run_ensemble(const scenario::Scenario& sc, std::size_t n, std::uint64_t base_seed,
                           const RunOptions& opts = {},
                           std::optional<unsigned> workers = std::nullopt);

/// Worker count from ORULES_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Two-sided Kolmogorov-Smirnov statistic of hit-time samples against
/// F(t) = (1 - 2^(-t/half_life)) / 0.5 truncated to [0, half_life].
/// Throws EmptySampleError on an empty sample.
double compare_hit_cdf(std::vector<double> samples, double half_life);

}  // namespace orules::harness

#endif
