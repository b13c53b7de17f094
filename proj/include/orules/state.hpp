#ifndef ORULES_STATE_HPP
#define ORULES_STATE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "orules/errors.hpp"

namespace orules {

using ComponentId = std::uint32_t;

/// Engagement ladder of a brain token. External is the pre-engagement
/// bystander, Brink is engaged but not yet resolving, Ready and Conscious
/// are the two active states, Unconscious is classically inert.
enum class BrainStatus { External, Brink, Ready, Conscious, Unconscious };

bool is_active(BrainStatus s);  // Ready or Conscious

const char* to_string(BrainStatus s);

/// Task-progress position of the mechanical device.
enum class DevicePos {
    AtStart,  // parked at the initial task position
    Running,  // mass distributed over the progress grid
    Done,     // task completed
};

enum class Indicator { i0, i1, I0, I1 };

const char* to_string(Indicator v);

struct DetectorFactor {
    int value = 0;  // 0 = no capture, 1 = capture
    bool operator==(const DetectorFactor&) const = default;
};

/// The device has quantum uncertainty in how far its task has progressed;
/// while Running that uncertainty is a mass distribution over `bins`
/// (mass per bin, summing to the owning component's weight).
struct DeviceFactor {
    DevicePos pos = DevicePos::AtStart;
    std::vector<double> bins;  // non-empty only while Running
    double shift_phase = 0.0;  // fractional bin progress carried between steps

    double bin_mass() const;
    bool label_equal(const DeviceFactor& o) const { return pos == o.pos; }
};

struct IndicatorFactor {
    Indicator level = Indicator::i0;
    bool operator==(const IndicatorFactor&) const = default;
};

struct BrainFactor {
    std::string agent;      // agent identifier from the scenario
    std::string awareness;  // what this brain is aware of (e.g. "C0", "B1")
    BrainStatus status = BrainStatus::External;
    bool operator==(const BrainFactor&) const = default;
};

/// Internal alarm clock; rings once at its scheduled time in every
/// component simultaneously.
struct ClockFactor {
    bool rung = false;
    bool operator==(const ClockFactor&) const = default;
};

using SubsystemFactor =
    std::variant<DetectorFactor, DeviceFactor, IndicatorFactor, BrainFactor, ClockFactor>;

/// One superposition branch: an ordered product of subsystem factors plus
/// its square modulus. Weight bookkeeping is at component granularity; a
/// Running device keeps its bin masses summing to the component weight.
struct Component {
    ComponentId id = 0;
    std::vector<SubsystemFactor> factors;
    double weight = 0.0;
    double created_at = 0.0;

    const DetectorFactor* detector() const;
    DetectorFactor* detector();
    const DeviceFactor* device() const;
    DeviceFactor* device();
    const IndicatorFactor* indicator() const;
    IndicatorFactor* indicator();
    const ClockFactor* clock() const;
    ClockFactor* clock();
    const BrainFactor* brain(const std::string& agent) const;
    BrainFactor* brain(const std::string& agent);
    std::vector<const BrainFactor*> brains() const;
    std::vector<BrainFactor*> brains();

    /// Discrete-label identity: detector value, device position, indicator
    /// level, each brain's (agent, awareness, status), clock ring status.
    /// Device bin contents and weight are excluded.
    std::string label() const;

    /// True when the factor labels coincide (same identity as label()).
    bool label_equal(const Component& o) const;
};

/// Validated constructor: weight in [0,1], factors non-empty, at most one
/// brain per agent. Assigns no id; the graph does that on insertion.
Component make_component(std::vector<SubsystemFactor> factors, double weight);

/// True iff any brain factor is in the Ready state (the components rule 3
/// may reduce to and rule 4 gates).
bool contains_ready(const Component& c);

/// True iff any brain factor is Conscious.
bool contains_conscious(const Component& c);

/// Rule 2 predicate: two components are discontinuous when their discrete
/// labels differ. Continuous task progress within one device pulse never
/// separates labels, so it never registers here.
bool is_discontinuous(const Component& a, const Component& b);

/// The live superposition of one trajectory.
struct StateGraph {
    std::vector<Component> components;
    double time = 0.0;

    ComponentId insert(Component c);  // assigns a fresh id
    Component* find(ComponentId id);
    const Component* find(ComponentId id) const;
    /// First live component whose labels match `like`, if any.
    Component* find_label_match(const Component& like);
    void erase(ComponentId id);

    /// Total square modulus over all live components.
    double total_modulus() const;
    /// Square modulus of components without Ready tokens: the probability
    /// not yet delivered into reducible components, the denominator of the
    /// per-step stochastic-choice probability.
    double nonready_modulus() const;

  private:
    ComponentId next_id_ = 1;
};

}  // namespace orules

#endif
