#ifndef ORULES_ENGINE_HPP
#define ORULES_ENGINE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orules/dynamics.hpp"
#include "orules/rng.hpp"
#include "orules/scenario.hpp"
#include "orules/state.hpp"

namespace orules::engine {

/// A stochastic choice: rule 1 selected `chosen` at `time`, driven by the
/// net inflow `trigger_inflow` it was receiving.
struct HitEvent {
    double time = 0.0;
    ComponentId chosen = 0;
    double trigger_inflow = 0.0;
};

/// Rule 1 sampler. Hit probability for the step is dt * sum(J_n+) / s over
/// the eligible inflows (Ready-containing targets by default, every target
/// when `strict` samples rule 1 verbatim); the chosen component is drawn
/// proportionally to its inflow. Draws exactly two numbers per call, hit
/// test then selection, whatever the outcome.
/// Throws StepTooCoarseError when the step hazard exceeds 0.1.
std::optional<HitEvent> sample_stochastic_choice(const dynamics::CurrentLedger& ledger, double s,
                                                 double dt, double t, CountedRng& rng,
                                                 bool strict = false);

/// Rule 3: the chosen component's Ready tokens become Conscious, every
/// other component drops to zero immediately, the survivor renormalizes to
/// weight 1 and its classical progressions resume (a parked d1 device is
/// released, a pending observer engagement settles).
/// Throws NotReadyError when the chosen component has no Ready token.
void reduce(StateGraph& g, const scenario::Scenario& sc, const HitEvent& hit);

enum class SimEventKind {
    Init,
    Look,
    Observe,
    Ring,
    Cutoff,
    Spawn,
    Hit,
    HitDiscarded,
    Reduce,
    Prune,
    Terminal,
};

const char* to_string(SimEventKind k);

struct SimEvent {
    double time = 0.0;
    SimEventKind kind = SimEventKind::Init;
    std::string label;
    double weight = 0.0;
};

struct SimOptions {
    bool strict_rule1 = false;
    bool prune = true;
    bool disable_hits = false;
    bool disable_cutoff = false;
    std::optional<double> dt_override;
    std::optional<double> t_max;       // default: max(half_life, last event) + 3T
    bool error_on_timeout = true;      // reaching t_max raises NonTermination
    /// Test hook, called after each step's transfers with the step ledger.
    std::function<void(const StateGraph&, const dynamics::CurrentLedger&)> step_observer;
};

/// One trajectory's mutable state, stepped until quiescence.
class SimRun {
  public:
    SimRun(const scenario::Scenario& sc, std::uint64_t seed, SimOptions opts = {});

    /// Advance one step (events, currents, gating, transfer, sampling,
    /// reduction, pruning — in that fixed order). Returns false once the
    /// run is quiescent.
    bool step();

    /// Step until quiescent or until the time bound trips.
    void run();

    const StateGraph& graph() const { return graph_; }
    const std::vector<SimEvent>& log() const { return log_; }
    const std::vector<double>& hit_times() const { return hit_times_; }
    int reductions() const { return reductions_; }
    double max_norm_drift() const { return max_norm_drift_; }
    double cumulative_vertical() const { return cumulative_vertical_; }
    double time() const { return graph_.time; }
    bool finished() const { return finished_; }

    /// Components a pruning pass would keep, independent of whether pruning
    /// ran: live weighty components minus dead-ended Ready phantoms.
    std::vector<const Component*> kept_components() const;

  private:
    void apply_event(const scenario::ScheduledEvent& ev);
    void apply_look(const std::string& agent);
    void apply_observe(const std::string& agent);
    void apply_ring();
    bool future_inflow_possible(const Component& c) const;
    void prune_phantoms();
    void log_event(SimEventKind kind, const Component& c);

    scenario::Scenario sc_;
    SimOptions opts_;
    StateGraph graph_;
    CountedRng rng_;
    std::vector<dynamics::ActiveResolution> resolutions_;
    std::vector<SimEvent> log_;
    std::vector<double> hit_times_;
    std::size_t next_event_ = 0;
    double dt_ = 0.0;
    double t_max_ = 0.0;
    double expected_norm_ = 1.0;
    double max_norm_drift_ = 0.0;
    double cumulative_vertical_ = 0.0;
    int reductions_ = 0;
    bool finished_ = false;
};

/// Standalone rule 4 phantom sweep, exposed for direct testing: removes
/// Ready-containing components that receive nothing now and cannot receive
/// anything later. Returns the pruned ids.
std::vector<ComponentId> prune_phantoms(StateGraph& g, const scenario::Scenario& sc,
                                        const std::vector<dynamics::ActiveResolution>& resolutions,
                                        bool cutoff_enabled = true);

}  // namespace orules::engine

#endif
