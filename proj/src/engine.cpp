#include "orules/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace orules::engine {

namespace {
constexpr double kWeightFloor = 1e-14;
constexpr double kLabelFloor = 1e-12;
constexpr double kTimeEps = 1e-12;
}  // namespace

const char* to_string(SimEventKind k) {
    switch (k) {
        case SimEventKind::Init: return "init";
        case SimEventKind::Look: return "look";
        case SimEventKind::Observe: return "observe";
        case SimEventKind::Ring: return "ring";
        case SimEventKind::Cutoff: return "cutoff";
        case SimEventKind::Spawn: return "spawn";
        case SimEventKind::Hit: return "hit";
        case SimEventKind::HitDiscarded: return "hit_discarded";
        case SimEventKind::Reduce: return "reduce";
        case SimEventKind::Prune: return "prune";
        case SimEventKind::Terminal: return "terminal";
    }
    return "?";
}

std::optional<HitEvent> sample_stochastic_choice(const dynamics::CurrentLedger& ledger, double s,
                                                 double dt, double t, CountedRng& rng,
                                                 bool strict) {
    // Aggregate eligible inflows per target component.
    std::map<ComponentId, double> inflow;
    double total = 0.0;
    for (const auto& f : ledger.flows) {
        if (!strict && !f.into_ready) continue;
        if (f.to == 0 || f.amount <= 0.0) continue;
        inflow[f.to] += f.amount;
        total += f.amount;
    }

    double p = 0.0;
    if (total > 0.0) {
        // s is the square modulus still outside ready components; a fully
        // drained source forces the choice.
        p = s > 0.0 ? total / s : 1.0;
        if (p > 0.1 + 1e-9)
            throw StepTooCoarseError("stochastic-choice hazard " + std::to_string(p) +
                                     " exceeds 0.1; reduce dt");
    }

    // Two draws per call, hit test then selection, regardless of outcome.
    double u_hit = rng.next_unit();
    double u_pick = rng.next_unit();
    if (total <= 0.0 || u_hit >= p) return std::nullopt;

    double mark = u_pick * total;
    double acc = 0.0;
    for (const auto& [id, amount] : inflow) {
        acc += amount;
        if (mark < acc) return HitEvent{t, id, amount / dt};
    }
    auto last = std::prev(inflow.end());
    return HitEvent{t, last->first, last->second / dt};
}

void reduce(StateGraph& g, const scenario::Scenario& sc, const HitEvent& hit) {
    Component* chosen = g.find(hit.chosen);
    if (!chosen) throw NotReadyError("chosen component no longer exists");
    if (!contains_ready(*chosen))
        throw NotReadyError("component '" + chosen->label() + "' has no ready brain state");

    Component survivor = *chosen;
    for (auto* b : survivor.brains())
        if (b->status == BrainStatus::Ready) b->status = BrainStatus::Conscious;

    // Renormalize the lone survivor; rule 1's hazard is scale-free either
    // way and a unit norm keeps the invariants simple.
    double w = survivor.weight;
    if (w > 0.0) {
        double scale = 1.0 / w;
        survivor.weight = 1.0;
        if (DeviceFactor* dev = survivor.device(); dev && !dev->bins.empty())
            for (double& b : dev->bins) b *= scale;
    } else {
        survivor.weight = 1.0;
    }

    // Classical progressions resume: a parked d1 device is released and
    // starts its task from the first grid bin.
    const DetectorFactor* det = survivor.detector();
    if (DeviceFactor* dev = survivor.device();
        dev && det && det->value == 1 && dev->pos == DevicePos::AtStart) {
        dev->pos = DevicePos::Running;
        dev->bins.assign(static_cast<std::size_t>(sc.params.alpha_bins), 0.0);
        dev->bins[0] = survivor.weight;
        dev->shift_phase = 0.0;
    }

    g.components.clear();
    g.insert(std::move(survivor));
}

namespace {

bool future_inflow_into(const StateGraph& g, const scenario::Scenario& sc,
                        const std::vector<dynamics::ActiveResolution>& resolutions,
                        bool cutoff_enabled, const Component& target) {
    bool decay_alive = !cutoff_enabled || g.time < sc.params.half_life;
    for (const auto& s : g.components) {
        if (s.id == target.id || s.weight <= kWeightFloor || contains_ready(s)) continue;
        const DetectorFactor* det = s.detector();
        if (det && det->value == 0 && decay_alive &&
            scenario::decay_target(sc, s).label_equal(target))
            return true;
        const DeviceFactor* dev = s.device();
        if (det && det->value == 1 && dev && dev->pos == DevicePos::Running &&
            dev->bin_mass() > kWeightFloor &&
            scenario::completion_target(sc, s, true).label_equal(target))
            return true;
        for (const auto& res : resolutions) {
            const BrainFactor* b = s.brain(res.agent);
            if (!b) continue;
            bool source = res.wake ? b->status == BrainStatus::Unconscious
                                   : b->status == BrainStatus::Brink;
            if (source && scenario::resolution_twin(sc, s, res.agent, res.wake).label_equal(target))
                return true;
        }
    }
    return false;
}

}  // namespace

std::vector<ComponentId> prune_phantoms(StateGraph& g, const scenario::Scenario& sc,
                                        const std::vector<dynamics::ActiveResolution>& resolutions,
                                        bool cutoff_enabled) {
    std::vector<ComponentId> pruned;
    for (const auto& c : g.components) {
        if (!contains_ready(c)) continue;
        if (future_inflow_into(g, sc, resolutions, cutoff_enabled, c)) continue;
        pruned.push_back(c.id);
    }
    for (ComponentId id : pruned) g.erase(id);
    return pruned;
}

SimRun::SimRun(const scenario::Scenario& sc, std::uint64_t seed, SimOptions opts)
    : sc_(sc), opts_(std::move(opts)), graph_(scenario::build_initial_state(sc)), rng_(seed) {
    dt_ = opts_.dt_override.value_or(sc_.params.step());
    if (dt_ <= 0.0 || dt_ > sc_.params.bin_time() * (1.0 + 1e-12))
        throw ScenarioError(ScenarioError::Kind::OrderViolation, 0, 0,
                            "dt must lie in (0, transit_time / alpha_bins]");
    double last_event = 0.0;
    for (const auto& ev : sc_.schedule.events) last_event = std::max(last_event, ev.time);
    t_max_ = opts_.t_max.value_or(std::max(sc_.params.half_life, last_event) +
                                  3.0 * sc_.params.transit_time);
    expected_norm_ = graph_.total_modulus();
    for (const auto& c : graph_.components) log_event(SimEventKind::Init, c);
}

void SimRun::log_event(SimEventKind kind, const Component& c) {
    log_.push_back({graph_.time, kind, c.label(), c.weight});
}

void SimRun::apply_look(const std::string& agent) {
    for (auto& c : graph_.components) {
        if (IndicatorFactor* ind = c.indicator()) {
            if (ind->level == Indicator::i0) ind->level = Indicator::I0;
            if (ind->level == Indicator::i1) ind->level = Indicator::I1;
        }
        if (BrainFactor* b = c.brain(agent); b && b->status == BrainStatus::External)
            b->status = BrainStatus::Brink;
    }
    log_.push_back({graph_.time, SimEventKind::Look, "-", graph_.total_modulus()});
}

void SimRun::apply_observe(const std::string& agent) {
    std::size_t weighty = 0;
    bool any_conscious = false;
    for (const auto& c : graph_.components) {
        if (c.weight <= kWeightFloor) continue;
        ++weighty;
        if (contains_conscious(c)) any_conscious = true;
    }

    if (weighty <= 1 || any_conscious) {
        // A conscious witness (or a lone component) anchors the engagement:
        // it completes classically, in place. Components discontinuous with
        // that baseline acquire a ready token instead (rule 2).
        for (auto& c : graph_.components) {
            BrainFactor* b = c.brain(agent);
            if (!b || is_active(b->status)) continue;
            std::string aware = scenario::observer_awareness(sc_, c);
            bool conscious_here = contains_conscious(c);
            if (contains_ready(c)) {
                b->status = BrainStatus::Ready;
            } else if (conscious_here || weighty <= 1) {
                b->status = BrainStatus::Conscious;
            } else {
                b->status = BrainStatus::Ready;
            }
            b->awareness = aware;
        }
    } else {
        // No conscious anchor: the resolution branches. Sources keep their
        // brink token and drain vertically into ready twins born at zero
        // weight; rule 4 keeps ready sources from branching at all.
        std::vector<ComponentId> sources;
        for (const auto& c : graph_.components)
            if (c.weight > kWeightFloor && !contains_ready(c) && c.brain(agent)) sources.push_back(c.id);
        for (ComponentId id : sources) {
            const Component* src = graph_.find(id);
            Component twin = scenario::resolution_twin(sc_, *src, agent, false);
            if (graph_.find_label_match(twin)) continue;
            twin.created_at = graph_.time;
            ComponentId tid = graph_.insert(std::move(twin));
            log_event(SimEventKind::Spawn, *graph_.find(tid));
        }
        resolutions_.push_back({agent, graph_.time, false});
    }
    log_.push_back({graph_.time, SimEventKind::Observe, "-", graph_.total_modulus()});
}

void SimRun::apply_ring() {
    const std::string cat = sc_.cat_agent();
    bool any_cat_conscious = false;
    for (auto& c : graph_.components) {
        if (ClockFactor* n = c.clock()) n->rung = true;
        const BrainFactor* b = c.brain(cat);
        if (b && b->status == BrainStatus::Conscious && c.weight > kWeightFloor)
            any_cat_conscious = true;
    }
    if (!any_cat_conscious && !cat.empty()) {
        // The wake-up resolves superposed alternatives exactly like an
        // outside observation: sleeping sources drain into ready twins.
        std::vector<ComponentId> sources;
        for (const auto& c : graph_.components) {
            const BrainFactor* b = c.brain(cat);
            if (c.weight > kWeightFloor && b && b->status == BrainStatus::Unconscious &&
                !contains_ready(c))
                sources.push_back(c.id);
        }
        for (ComponentId id : sources) {
            const Component* src = graph_.find(id);
            Component twin = scenario::resolution_twin(sc_, *src, cat, true);
            if (graph_.find_label_match(twin)) continue;
            twin.created_at = graph_.time;
            ComponentId tid = graph_.insert(std::move(twin));
            log_event(SimEventKind::Spawn, *graph_.find(tid));
        }
        resolutions_.push_back({cat, graph_.time, true});
    }
    log_.push_back({graph_.time, SimEventKind::Ring, "-", graph_.total_modulus()});
}

void SimRun::apply_event(const scenario::ScheduledEvent& ev) {
    switch (ev.kind) {
        case scenario::EventKind::Look: apply_look(ev.agent); return;
        case scenario::EventKind::Observe: apply_observe(ev.agent); return;
        case scenario::EventKind::Cutoff:
            log_.push_back({graph_.time, SimEventKind::Cutoff, "-", graph_.total_modulus()});
            return;
        case scenario::EventKind::Ring:
            if (!scenario::version_has_clock(sc_.version))
                throw UnknownEventError("ring event scheduled without an internal clock");
            apply_ring();
            return;
    }
    throw UnknownEventError("unscheduled event kind");
}

bool SimRun::future_inflow_possible(const Component& c) const {
    return future_inflow_into(graph_, sc_, resolutions_, !opts_.disable_cutoff, c);
}

void SimRun::prune_phantoms() {
    std::vector<ComponentId> ids;
    for (const auto& c : graph_.components) {
        if (!contains_ready(c)) continue;
        if (future_inflow_possible(c)) continue;
        ids.push_back(c.id);
    }
    for (ComponentId id : ids) {
        const Component* c = graph_.find(id);
        log_event(SimEventKind::Prune, *c);
        expected_norm_ -= c->weight;
        graph_.erase(id);
    }
}

bool SimRun::step() {
    if (finished_) return false;

    // (1) scheduled branching events
    while (next_event_ < sc_.schedule.events.size() &&
           sc_.schedule.events[next_event_].time <= graph_.time + kTimeEps) {
        apply_event(sc_.schedule.events[next_event_]);
        ++next_event_;
    }

    dynamics::StepConfig cfg;
    cfg.t = graph_.time;
    cfg.dt = dt_;
    cfg.cutoff_enabled = !opts_.disable_cutoff;

    // (2) current assembly + rule 4 gating
    double s_before = graph_.nonready_modulus();
    dynamics::CurrentLedger ledger = dynamics::step_currents(graph_, sc_, resolutions_, cfg);

    // (3) weight transfer
    auto created = dynamics::apply_flows(graph_, sc_, ledger, cfg);
    for (ComponentId id : created)
        if (const Component* c = graph_.find(id)) log_event(SimEventKind::Spawn, *c);
    for (const auto& f : ledger.flows)
        if (f.kind == dynamics::FlowKind::Physiological) cumulative_vertical_ += f.amount;

    double drift = std::abs(graph_.total_modulus() - expected_norm_);
    max_norm_drift_ = std::max(max_norm_drift_, drift);

    if (opts_.step_observer) opts_.step_observer(graph_, ledger);

    // (4) stochastic sampling, (5) reduction
    if (!opts_.disable_hits) {
        auto hit = sample_stochastic_choice(ledger, s_before, dt_, graph_.time + dt_ / 2.0, rng_,
                                            opts_.strict_rule1);
        if (hit) {
            const Component* chosen = graph_.find(hit->chosen);
            if (chosen && !contains_ready(*chosen)) {
                log_event(SimEventKind::HitDiscarded, *chosen);
            } else if (chosen) {
                log_event(SimEventKind::Hit, *chosen);
                hit_times_.push_back(hit->time);
                reduce(graph_, sc_, *hit);
                ++reductions_;
                Component& survivor = graph_.components.front();
                // A pending engagement settles: nothing is left to resolve.
                for (const auto& res : resolutions_) {
                    BrainFactor* b = survivor.brain(res.agent);
                    if (b && b->status == BrainStatus::Brink) {
                        b->status = BrainStatus::Conscious;
                        b->awareness = scenario::observer_awareness(sc_, survivor);
                    }
                }
                resolutions_.clear();
                expected_norm_ = graph_.total_modulus();
                log_event(SimEventKind::Reduce, survivor);
            }
        }
    }

    // (6) phantom pruning
    if (opts_.prune) prune_phantoms();

    graph_.time += dt_;

    // Quiescence: no events left and nothing can flow anymore.
    bool events_done = next_event_ >= sc_.schedule.events.size();
    bool pending = false;
    if (!ledger.flows.empty()) pending = true;
    bool decay_alive = opts_.disable_cutoff || graph_.time < sc_.params.half_life;
    for (const auto& c : graph_.components) {
        if (pending) break;
        if (contains_ready(c)) continue;
        const DetectorFactor* det = c.detector();
        if (det && det->value == 0 && decay_alive && c.weight > kWeightFloor) pending = true;
        const DeviceFactor* dev = c.device();
        if (det && det->value == 1 && dev && dev->pos == DevicePos::Running &&
            dev->bin_mass() > kWeightFloor)
            pending = true;
        for (const auto& res : resolutions_) {
            const BrainFactor* b = c.brain(res.agent);
            if (!b) continue;
            bool source = res.wake ? b->status == BrainStatus::Unconscious
                                   : b->status == BrainStatus::Brink;
            if (source && c.weight > kWeightFloor) pending = true;
        }
    }
    if (events_done && !pending) {
        finished_ = true;
        return false;
    }

    if (graph_.time > t_max_ + kTimeEps) {
        if (opts_.error_on_timeout)
            throw NonTerminationError("trajectory still active past t = " +
                                      std::to_string(t_max_) + "; dynamics bug?");
        finished_ = true;
        return false;
    }
    return true;
}

void SimRun::run() {
    while (step()) {
    }
}

std::vector<const Component*> SimRun::kept_components() const {
    std::vector<const Component*> kept;
    for (const auto& c : graph_.components) {
        if (c.weight <= kLabelFloor) continue;
        if (contains_ready(c) && !future_inflow_possible(c)) continue;
        kept.push_back(&c);
    }
    if (kept.empty() && !graph_.components.empty()) {
        const Component* best = &graph_.components.front();
        for (const auto& c : graph_.components)
            if (c.weight > best->weight) best = &c;
        kept.push_back(best);
    }
    return kept;
}

}  // namespace orules::engine
