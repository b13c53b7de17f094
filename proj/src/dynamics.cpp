#include "orules/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "orules/scenario.hpp"

namespace orules::dynamics {

namespace {
constexpr double kWeightFloor = 1e-14;
}

double DynamicsParams::decay_rate() const { return std::log(2.0) / half_life; }

double DynamicsParams::bin_time() const { return transit_time / alpha_bins; }

double DynamicsParams::step() const {
    if (dt > 0.0) return dt;
    // One bin per step, sub-divided into whole sub-steps when the combined
    // rates would push the per-step hazard past the sampler's bound.
    double rate = phys_rate() + decay_rate();
    double n = std::ceil(rate * bin_time() / 0.095);
    return n > 1.0 ? bin_time() / n : bin_time();
}

double DynamicsParams::phys_rate() const { return kappa > 0.0 ? kappa : 30.0 / half_life; }

const char* to_string(FlowKind k) {
    switch (k) {
        case FlowKind::Decay: return "decay";
        case FlowKind::Transport: return "transport";
        case FlowKind::Completion: return "completion";
        case FlowKind::Physiological: return "physiological";
    }
    return "?";
}

double CurrentLedger::inflow(ComponentId id) const {
    double sum = 0.0;
    for (const auto& f : flows)
        if (f.to == id) sum += f.amount;
    return sum;
}

double CurrentLedger::inflow_rate(ComponentId id) const {
    return dt > 0.0 ? inflow(id) / dt : 0.0;
}

double CurrentLedger::ready_inflow() const {
    double sum = 0.0;
    for (const auto& f : flows)
        if (f.into_ready) sum += f.amount;
    return sum;
}

double CurrentLedger::total_inflow() const {
    double sum = 0.0;
    for (const auto& f : flows) sum += f.amount;
    return sum;
}

double decay_current(double t, double w0, const DynamicsParams& p) {
    if (t >= p.half_life) return 0.0;
    return p.decay_rate() * w0;
}

double decay_step_transfer(double t, double dt, double w0, const DynamicsParams& p,
                           bool cutoff_enabled) {
    double end = t + dt;
    if (cutoff_enabled) end = std::min(end, p.half_life);
    double span = end - std::min(t, cutoff_enabled ? p.half_life : end);
    if (span <= 0.0 || w0 <= 0.0) return 0.0;
    return w0 * -std::expm1(-p.decay_rate() * span);
}

double physiological_current(double t, double t_ob, double w_src, const DynamicsParams& p) {
    if (t < t_ob) return 0.0;
    return p.phys_rate() * w_src;
}

double physiological_step_transfer(double dt, double w_src, const DynamicsParams& p) {
    if (w_src <= 0.0) return 0.0;
    return w_src * -std::expm1(-p.phys_rate() * dt);
}

namespace {

// Fractional bin progress accumulated over dt; snaps to whole bins so the
// locked step dt = T/K shifts exactly one bin per step.
double bin_progress(const DynamicsParams& p, double dt) {
    double inc = dt / p.bin_time();
    double nearest = std::round(inc);
    if (nearest > 0.0 && std::abs(inc - nearest) < 1e-9) inc = nearest;
    return inc;
}

int pending_shifts(double phase) { return static_cast<int>(std::floor(phase + 1e-12)); }

// Mass that would leave the grid if `shifts` whole-bin moves happen now.
double peek_spill(const std::vector<double>& bins, int shifts) {
    double spill = 0.0;
    int n = static_cast<int>(bins.size());
    for (int i = 0; i < shifts && i < n; ++i) spill += bins[n - 1 - i];
    if (shifts >= n) {
        spill = 0.0;
        for (double b : bins) spill += b;
    }
    return spill;
}

void shift_bins(std::vector<double>& bins, int shifts, double& spill_out) {
    int n = static_cast<int>(bins.size());
    for (int s = 0; s < shifts; ++s) {
        spill_out += bins[n - 1];
        for (int i = n - 1; i > 0; --i) bins[i] = bins[i - 1];
        bins[0] = 0.0;
    }
}

}  // namespace

bool has_live_alternative(const StateGraph& g, const scenario::Scenario& sc,
                          const Component& source) {
    Component done_conscious = scenario::completion_target(sc, source, false);
    Component done_ready = scenario::completion_target(sc, source, true);
    for (const auto& c : g.components) {
        if (c.id == source.id || c.weight <= 1e-12) continue;
        if (c.label_equal(done_conscious) || c.label_equal(done_ready)) continue;
        return true;
    }
    return false;
}

AdvanceResult advance_device_pulse(const Component& c, const DynamicsParams& p, double dt) {
    if (contains_ready(c))
        throw GatedComponentError("component '" + c.label() +
                                  "' holds a ready brain state and cannot advance");
    AdvanceResult out{c, 0.0};
    DeviceFactor* dev = out.advanced.device();
    if (!dev || dev->pos != DevicePos::Running || dev->bins.empty()) return out;
    dev->shift_phase += bin_progress(p, dt);
    int shifts = pending_shifts(dev->shift_phase);
    if (shifts > 0) {
        dev->shift_phase -= shifts;
        shift_bins(dev->bins, shifts, out.completed_mass);
        out.advanced.weight -= out.completed_mass;
    }
    return out;
}

CurrentLedger step_currents(const StateGraph& g, const scenario::Scenario& sc,
                            const std::vector<ActiveResolution>& resolutions,
                            const StepConfig& cfg) {
    CurrentLedger ledger;
    ledger.dt = cfg.dt;
    const DynamicsParams& p = sc.params;

    auto target_id = [&](const Component& tmpl) -> ComponentId {
        for (const auto& c : g.components)
            if (c.label_equal(tmpl)) return c.id;
        return 0;
    };

    for (const auto& c : g.components) {
        const bool gated = contains_ready(c);
        double planned_spill = 0.0;

        // Primary interaction: d0 components feed the decay branch.
        const DetectorFactor* det = c.detector();
        if (det && det->value == 0 && c.weight > kWeightFloor) {
            bool decay_alive = !cfg.cutoff_enabled || cfg.t < p.half_life;
            if (decay_alive) {
                if (gated) {
                    ledger.blocked.push_back({c.id, FlowKind::Decay});
                } else {
                    double amount =
                        decay_step_transfer(cfg.t, cfg.dt, c.weight, p, cfg.cutoff_enabled);
                    if (amount > 0.0) {
                        Component tmpl = scenario::decay_target(sc, c);
                        ledger.flows.push_back({c.id, target_id(tmpl), FlowKind::Decay, amount,
                                                contains_ready(tmpl), "", false});
                    }
                }
            }
        }

        // Classical task progress of a running device, spilling completed
        // mass into the scenario's completion target.
        const DeviceFactor* dev = c.device();
        if (det && det->value == 1 && dev && dev->pos != DevicePos::Done &&
            c.weight > kWeightFloor) {
            if (gated) {
                ledger.blocked.push_back({c.id, FlowKind::Transport});
            } else if (dev->pos == DevicePos::Running && dev->bin_mass() > 0.0) {
                double phase = dev->shift_phase + bin_progress(p, cfg.dt);
                double spill = peek_spill(dev->bins, pending_shifts(phase));
                if (spill > 0.0) {
                    planned_spill = spill;
                    Component tmpl =
                        scenario::completion_target(sc, c, has_live_alternative(g, sc, c));
                    ledger.flows.push_back({c.id, target_id(tmpl), FlowKind::Completion, spill,
                                            contains_ready(tmpl), "", false});
                }
            }
        }

        // Physiological (vertical) current out of every engaged source.
        // The base excludes mass this step's completion already claims, so
        // the two outflows can never exceed the source weight.
        for (const auto& res : resolutions) {
            const BrainFactor* b = c.brain(res.agent);
            if (!b) continue;
            bool source = res.wake ? b->status == BrainStatus::Unconscious
                                   : b->status == BrainStatus::Brink;
            if (!source || c.weight <= kWeightFloor) continue;
            if (gated) {
                ledger.blocked.push_back({c.id, FlowKind::Physiological});
                continue;
            }
            double base = c.weight - planned_spill;
            double amount = physiological_step_transfer(cfg.dt, base, p);
            if (amount > 0.0) {
                Component tmpl = scenario::resolution_twin(sc, c, res.agent, res.wake);
                ledger.flows.push_back({c.id, target_id(tmpl), FlowKind::Physiological, amount,
                                        true, res.agent, res.wake});
            }
        }
    }
    return ledger;
}

std::vector<ComponentId> apply_flows(StateGraph& g, const scenario::Scenario& sc,
                                     CurrentLedger& ledger, const StepConfig& cfg) {
    std::vector<ComponentId> created;
    const DynamicsParams& p = sc.params;

    auto materialize = [&](FlowEdge& f) -> Component* {
        if (f.to != 0) return g.find(f.to);
        const Component* src = g.find(f.from);
        Component tmpl;
        switch (f.kind) {
            case FlowKind::Decay: tmpl = scenario::decay_target(sc, *src); break;
            case FlowKind::Completion:
                // into_ready pins the flavor chosen at assembly time; the
                // graph may already have shifted underneath us.
                tmpl = scenario::completion_target(sc, *src, f.into_ready);
                break;
            case FlowKind::Physiological:
                tmpl = scenario::resolution_twin(sc, *src, f.agent, f.wake);
                break;
            case FlowKind::Transport: return nullptr;
        }
        if (Component* existing = g.find_label_match(tmpl)) {
            f.to = existing->id;
            return existing;
        }
        tmpl.weight = 0.0;
        tmpl.created_at = cfg.t;
        f.to = g.insert(std::move(tmpl));
        created.push_back(f.to);
        return g.find(f.to);
    };

    // Transport first: completion amounts were peeked against pre-shift bins.
    for (auto& c : g.components) {
        const DetectorFactor* det = c.detector();
        DeviceFactor* dev = c.device();
        if (!det || det->value != 1 || !dev || dev->pos != DevicePos::Running) continue;
        if (contains_ready(c)) continue;  // rule 4: pinned in place
        double spill = 0.0;
        dev->shift_phase += bin_progress(p, cfg.dt);
        int shifts = pending_shifts(dev->shift_phase);
        if (shifts > 0) {
            dev->shift_phase -= shifts;
            shift_bins(dev->bins, shifts, spill);
            c.weight -= spill;
            // spill is re-added below through the Completion flow
        }
    }

    for (auto& f : ledger.flows) {
        Component* dst = materialize(f);
        Component* src = g.find(f.from);
        if (!dst || !src) continue;
        switch (f.kind) {
            case FlowKind::Decay: {
                src->weight -= f.amount;
                dst->weight += f.amount;
                if (DeviceFactor* ddev = dst->device(); ddev && ddev->pos == DevicePos::Running) {
                    if (ddev->bins.empty()) ddev->bins.assign(p.alpha_bins, 0.0);
                    int w = std::clamp(p.pulse_width, 1, p.alpha_bins);
                    double q = f.amount / w;
                    for (int i = 0; i < w; ++i) ddev->bins[i] += q;
                }
                break;
            }
            case FlowKind::Completion: {
                // Source weight already dropped during the shift above.
                dst->weight += f.amount;
                break;
            }
            case FlowKind::Physiological: {
                // The twin accumulates the image of its source's pulse;
                // every source bin is drained proportionally so bin mass
                // keeps tracking the source weight.
                DeviceFactor* sdev = src->device();
                DeviceFactor* ddev = dst->device();
                if (sdev && ddev && sdev->pos == DevicePos::Running &&
                    ddev->pos == DevicePos::Running && !sdev->bins.empty() && src->weight > 0.0) {
                    if (ddev->bins.empty()) ddev->bins.assign(sdev->bins.size(), 0.0);
                    double ratio = std::min(f.amount / src->weight, 1.0);
                    for (std::size_t i = 0; i < sdev->bins.size(); ++i) {
                        double moved = sdev->bins[i] * ratio;
                        sdev->bins[i] -= moved;
                        ddev->bins[i] += moved;
                    }
                }
                src->weight -= f.amount;
                dst->weight += f.amount;
                break;
            }
            case FlowKind::Transport: break;
        }
    }
    return created;
}

}  // namespace orules::dynamics
