#ifndef ORULES_DYNAMICS_HPP
#define ORULES_DYNAMICS_HPP

#include <cstdint>
#include <vector>

#include "orules/state.hpp"

namespace orules::scenario {
struct Scenario;
}

namespace orules::dynamics {

/// Physical and numerical parameters of one run. Times share the unit of
/// half_life; kappa is a rate in the inverse unit.
struct DynamicsParams {
    double half_life = 1.0;    // detector exposure window t_1/2
    double transit_time = 0.3; // device traversal time T over the alpha grid
    int alpha_bins = 100;      // grid resolution K
    double kappa = 0.0;        // physiological relaxation rate; 0 = default
    double dt = 0.0;           // step; 0 = transit_time / alpha_bins
    int pulse_width = 1;       // injection width in bins
    double time_unit = 1.0;    // scale applied to times at parse

    double decay_rate() const; // ln2 / half_life
    double bin_time() const;   // transit_time / alpha_bins
    double step() const;       // resolved dt
    double phys_rate() const;  // resolved kappa (default 30 / half_life)

    bool operator==(const DynamicsParams&) const = default;
};

enum class FlowKind { Decay, Transport, Completion, Physiological };

const char* to_string(FlowKind k);

/// One realized transfer: `amount` is the mass moved this step, so the
/// current J it realizes is amount / dt.
struct FlowEdge {
    ComponentId from = 0;
    ComponentId to = 0;  // 0 until the target is materialized
    FlowKind kind = FlowKind::Decay;
    double amount = 0.0;
    bool into_ready = false;
    std::string agent;  // resolving agent for Physiological flows
    bool wake = false;  // Physiological flow driven by a wake-up event
};

/// An edge suppressed by rule 4: its source holds a Ready brain token.
struct BlockedEdge {
    ComponentId from = 0;
    FlowKind kind = FlowKind::Decay;
};

/// Per-step net positive inflow bookkeeping with gating provenance.
struct CurrentLedger {
    std::vector<FlowEdge> flows;
    std::vector<BlockedEdge> blocked;
    double dt = 0.0;

    double inflow(ComponentId id) const;       // mass into id this step
    double inflow_rate(ComponentId id) const;  // J_n
    double ready_inflow() const;               // total mass into Ready-containing comps
    double total_inflow() const;               // total mass over all flows
    bool empty() const { return flows.empty(); }
};

/// Instantaneous primary (radioactive-decay) current out of a d0 component
/// of weight w0: lambda * w0 before the half-life cutoff, 0 after.
double decay_current(double t, double w0, const DynamicsParams& p);

/// Exact mass leaving a d0 component of weight w0 over [t, t+dt], honoring
/// the cutoff mid-step. Integrates the exponential in closed form so the
/// surviving weight tracks 2^(-t/half_life) to rounding.
double decay_step_transfer(double t, double dt, double w0, const DynamicsParams& p,
                           bool cutoff_enabled = true);

/// Instantaneous physiological (vertical) current from a source of weight
/// w_src: 0 before the observation time, kappa * w_src after.
double physiological_current(double t, double t_ob, double w_src, const DynamicsParams& p);

/// Exact physiological mass transferred over one step.
double physiological_step_transfer(double dt, double w_src, const DynamicsParams& p);

struct AdvanceResult {
    Component advanced;      // the component with its pulse shifted
    double completed_mass;   // mass that crossed the end of the grid
};

/// Shift a Running device pulse toward the end of the grid by dt worth of
/// progress. Whole-bin shifts only; fractional progress is carried in the
/// factor, so transport never diffuses and conserves mass exactly.
/// Throws GatedComponentError on a Ready-containing component: rule 4 says
/// such a component cannot advance, callers gate first.
AdvanceResult advance_device_pulse(const Component& c, const DynamicsParams& p, double dt);

/// Sources of vertical current registered by an observation or wake event.
struct ActiveResolution {
    std::string agent;
    double since = 0.0;
    bool wake = false;  // true when the agent resolves its own wake-up
};

struct StepConfig {
    double t = 0.0;
    double dt = 0.0;
    bool cutoff_enabled = true;
};

/// True when a weighty component other than `source` and other than the
/// source's own completion target is live — the coexisting-alternatives
/// test deciding whether a completed alarm leaves the cat Ready.
bool has_live_alternative(const StateGraph& g, const scenario::Scenario& sc,
                          const Component& source);

/// Assemble every candidate current for one step — primary decay, pulse
/// transport/completion, physiological transfer — and apply rule 4: edges
/// whose source contains a Ready token are dropped and recorded. Pure;
/// `apply_flows` executes the result.
CurrentLedger step_currents(const StateGraph& g, const scenario::Scenario& sc,
                            const std::vector<ActiveResolution>& resolutions,
                            const StepConfig& cfg);

/// Execute the ledger against the graph: moves masses, shifts pulses,
/// materializes flow targets that do not exist yet (at weight 0).
/// Returns the ids of components created, in creation order.
std::vector<ComponentId> apply_flows(StateGraph& g, const scenario::Scenario& sc,
                                     CurrentLedger& ledger, const StepConfig& cfg);

}  // namespace orules::dynamics

#endif
