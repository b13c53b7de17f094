#ifndef ORULES_SCENARIO_HPP
#define ORULES_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "orules/dynamics.hpp"
#include "orules/state.hpp"

namespace orules::scenario {

/// The seven experiment templates. Version I puts a conscious cat to sleep
/// through a decay-triggered device; version II wakes a sleeping cat with a
/// decay-triggered alarm; observer variants add an outside witness and the
/// natural-wake variant adds the cat's internal clock.
enum class Version {
    ApparatusOnly,
    ApparatusObserver,
    CatV1,
    CatV1Observer,
    CatV2,
    CatV2Observer,
    CatV2NaturalWake,
};

const char* version_key(Version v);
std::optional<Version> version_from_key(const std::string& key);

bool version_has_cat(Version v);
bool version_has_observer(Version v);
bool version_has_indicator(Version v);
bool version_has_clock(Version v);

enum class EventKind { Look, Observe, Cutoff, Ring };

const char* to_string(EventKind k);

struct ScheduledEvent {
    double time = 0.0;
    EventKind kind = EventKind::Cutoff;
    std::string agent;  // empty for Cutoff and Ring

    bool operator==(const ScheduledEvent&) const = default;
};

/// Strictly time-ordered; always contains exactly one Cutoff at half_life.
struct EventSchedule {
    std::vector<ScheduledEvent> events;
    bool operator==(const EventSchedule&) const = default;
};

enum class AgentRole { Cat, Observer };

struct AgentSpec {
    std::string id;
    AgentRole role = AgentRole::Cat;
    bool operator==(const AgentSpec&) const = default;
};

struct Scenario {
    std::string name;
    Version version = Version::ApparatusOnly;
    dynamics::DynamicsParams params;
    EventSchedule schedule;
    std::vector<AgentSpec> agents;
    std::optional<double> t_look;
    std::optional<double> t_ob;
    std::optional<double> t_ff;

    std::string cat_agent() const;       // empty when the version has none
    std::string observer_agent() const;  // empty when the version has none

    bool operator==(const Scenario&) const = default;
};

/// Parse the line-oriented scenario format. Throws ScenarioError with
/// line/column diagnostics; a returned Scenario is fully validated.
Scenario parse_scenario(const std::string& text);

/// Parse a scenario file from disk.
Scenario load_scenario(const std::string& path);

/// Canonical text form; parse(serialize(sc)) == sc.
std::string serialize_scenario(const Scenario& sc);

/// Initial superposition for the scenario: a single normalized component.
StateGraph build_initial_state(const Scenario& sc);

// ---------------------------------------------------------------------
// Branch templates: where current from a given source lands. Together
// these are the scenario's completion maps; the rule engine materializes
// targets from them on first flow.

/// Target of the primary decay branch out of a d0 component. Rule 2 turns
/// every active brain in the new (discontinuous) component Ready; a Ready
/// result keeps its device parked, since rule 4 pins it anyway.
Component decay_target(const Scenario& sc, const Component& source);

/// Target reached when a running pulse finishes its task. A cat woken by
/// the alarm is Ready while discontinuous alternatives coexist
/// (`alternatives_exist`) and Conscious when the completing component is a
/// lone post-reduction survivor.
Component completion_target(const Scenario& sc, const Component& source, bool alternatives_exist);

/// Weight-0 twin spawned when an observation (or the cat's own wake-up)
/// resolves a superposed alternative: the resolving agent's token becomes
/// Ready and the twin then receives vertical current from its source.
Component resolution_twin(const Scenario& sc, const Component& source, const std::string& agent,
                          bool wake);

/// Awareness token an observer acquires when it resolves `comp`.
std::string observer_awareness(const Scenario& sc, const Component& comp);

}  // namespace orules::scenario

#endif
