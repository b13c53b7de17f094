#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "orules/scenario.hpp"

using namespace orules;
using scenario::Scenario;
using Kind = ScenarioError::Kind;

#ifndef ORULES_SCENARIO_DIR
#define ORULES_SCENARIO_DIR "scenarios"
#endif

namespace {

const char* kFixtures[] = {
    "apparatus_only.scn", "apparatus_observer.scn", "cat_v1.scn",  "cat_v1_observer.scn",
    "cat_v2.scn",         "cat_v2_observer.scn",    "cat_v2_natural.scn",
};

std::string fixture_path(const char* name) {
    return std::string(ORULES_SCENARIO_DIR) + "/" + name;
}

Kind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ScenarioError& e) {
        return e.kind;
    }
    FAIL("expected a scenario error");
    return Kind::Syntax;
}

}  // namespace

TEST_CASE("the shipped cat_v1 fixture equals a hand-built scenario") {
    Scenario parsed = scenario::load_scenario(fixture_path("cat_v1.scn"));

    Scenario expect;
    expect.name = "cat_v1";
    expect.version = scenario::Version::CatV1;
    expect.params.half_life = 1.0;
    expect.params.transit_time = 0.3;
    expect.params.alpha_bins = 100;
    expect.agents = {{"cat", scenario::AgentRole::Cat}};
    expect.schedule.events = {{1.0, scenario::EventKind::Cutoff, ""}};

    CHECK(parsed == expect);
    CHECK(parsed.params.half_life == 1.0);
    CHECK(parsed.params.transit_time == 0.3);
}

TEST_CASE("parse -> serialize -> parse is the identity on every fixture") {
    for (const char* name : kFixtures) {
        Scenario once = scenario::load_scenario(fixture_path(name));
        Scenario twice = scenario::parse_scenario(scenario::serialize_scenario(once));
        CHECK(once == twice);
    }
}

TEST_CASE("every fixture builds a normalized single-component graph") {
    for (const char* name : kFixtures) {
        Scenario sc = scenario::load_scenario(fixture_path(name));
        StateGraph g = scenario::build_initial_state(sc);
        REQUIRE(g.components.size() == 1);
        CHECK(g.total_modulus() == 1.0);
        CHECK_FALSE(contains_ready(g.components.front()));
    }
}

TEST_CASE("initial states carry the right factors") {
    Scenario v1 = scenario::load_scenario(fixture_path("cat_v1.scn"));
    StateGraph g1 = scenario::build_initial_state(v1);
    CHECK(g1.components.front().label() == "d0 M(a0) cat=C0");

    Scenario v2 = scenario::load_scenario(fixture_path("cat_v2.scn"));
    StateGraph g2 = scenario::build_initial_state(v2);
    const Component& c2 = g2.components.front();
    CHECK(c2.label() == "d0 M(a0) cat=U");
    // the version-II completion map wakes the cat into a ready state while
    // alternatives coexist
    Component pulse = scenario::decay_target(v2, c2);
    CHECK(pulse.label() == "d1 M(a) cat=U");
    Component done = scenario::completion_target(v2, pulse, true);
    CHECK(done.brain("cat")->status == BrainStatus::Ready);
    CHECK(done.label() == "d1 M(af) cat=_C");

    Scenario nat = scenario::load_scenario(fixture_path("cat_v2_natural.scn"));
    StateGraph gn = scenario::build_initial_state(nat);
    CHECK(gn.components.front().label() == "d0 M(a0) cat=U N");
    CHECK(gn.components.front().clock() != nullptr);
}

TEST_CASE("version-I decay branch is ready and pinned") {
    Scenario v1 = scenario::load_scenario(fixture_path("cat_v1.scn"));
    Component init = scenario::build_initial_state(v1).components.front();
    Component branch = scenario::decay_target(v1, init);
    CHECK(branch.brain("cat")->status == BrainStatus::Ready);
    CHECK(branch.device()->pos == DevicePos::AtStart);
    CHECK(branch.label() == "d1 M(a0) cat=_C0");
}

TEST_CASE("event-order violations are rejected") {
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = apparatus_observer\n[params]\nhalf_life = 1\ntransit_time = 0.3\n"
                  "[events]\nt_ob = 0.1\nt_look = 0.2\n[agents]\nobs = observer\n");
          }) == Kind::OrderViolation);
}

TEST_CASE("an empty scenario is missing its requirements") {
    CHECK(kind_of([] { scenario::parse_scenario(""); }) == Kind::MissingRequired);
}

TEST_CASE("unknown keys carry their position") {
    try {
        scenario::parse_scenario(
            "version = cat_v1\n[params]\nhalf_life = 1\ntransit_time = 0.3\nbogus = 3\n"
            "[agents]\ncat = cat\n");
        FAIL("expected an error");
    } catch (const ScenarioError& e) {
        CHECK(e.kind == Kind::UnknownKey);
        CHECK(e.line == 5);
        CHECK(e.column == 1);
    }
}

TEST_CASE("malformed lines and values are syntax errors") {
    CHECK(kind_of([] { scenario::parse_scenario("version cat_v1\n"); }) == Kind::Syntax);
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v1\n[params]\nhalf_life = soon\ntransit_time = 0.3\n"
                  "[agents]\ncat = cat\n");
          }) == Kind::Syntax);
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v1\n[params]\nhalf_life = -1\ntransit_time = 0.3\n"
                  "[agents]\ncat = cat\n");
          }) == Kind::Syntax);
}

TEST_CASE("inapplicable events are unknown keys for the version") {
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v1\n[params]\nhalf_life = 1\ntransit_time = 0.3\n"
                  "[events]\nt_ob = 0.5\n[agents]\ncat = cat\n");
          }) == Kind::UnknownKey);
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v2\n[params]\nhalf_life = 1\ntransit_time = 0.3\n"
                  "[events]\nt_ff = 0.5\n[agents]\ncat = cat\n");
          }) == Kind::UnknownKey);
}

TEST_CASE("missing agents and events are reported") {
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v1\n[params]\nhalf_life = 1\ntransit_time = 0.3\n");
          }) == Kind::MissingRequired);
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v2_natural_wake\n[params]\nhalf_life = 1\ntransit_time = 0.3\n"
                  "[agents]\ncat = cat\n");
          }) == Kind::MissingRequired);
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = apparatus_observer\n[params]\nhalf_life = 1\ntransit_time = 0.3\n"
                  "[events]\nt_look = 0.1\nt_ob = 0.2\n");
          }) == Kind::MissingRequired);
}

TEST_CASE("a too-coarse dt violates the grid constraint") {
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = cat_v1\n[params]\nhalf_life = 1\ntransit_time = 0.3\ndt = 0.01\n"
                  "[agents]\ncat = cat\n");
          }) == Kind::OrderViolation);
}

TEST_CASE("time_unit rescales every time-valued field") {
    Scenario sc = scenario::parse_scenario(
        "version = apparatus_observer\n[params]\nhalf_life = 2\ntransit_time = 0.6\n"
        "time_unit = 0.5\n[events]\nt_look = 0.2\nt_ob = 0.4\n[agents]\nobs = observer\n");
    CHECK(sc.params.half_life == doctest::Approx(1.0));
    CHECK(sc.params.transit_time == doctest::Approx(0.3));
    CHECK(*sc.t_look == doctest::Approx(0.1));
    CHECK(*sc.t_ob == doctest::Approx(0.2));
}

TEST_CASE("colliding event times are order violations") {
    CHECK(kind_of([] {
              scenario::parse_scenario(
                  "version = apparatus_observer\n[params]\nhalf_life = 1\ntransit_time = 0.3\n"
                  "[events]\nt_look = 0.2\nt_ob = 1.0\n[agents]\nobs = observer\n");
          }) == Kind::OrderViolation);  // t_ob collides with the cutoff
}

TEST_CASE("missing scenario files surface as scenario errors") {
    CHECK_THROWS_AS(scenario::load_scenario("/nonexistent/path.scn"), ScenarioError);
}

TEST_CASE("the schedule always holds exactly one cutoff at the half-life") {
    for (const char* name : kFixtures) {
        Scenario sc = scenario::load_scenario(fixture_path(name));
        int cutoffs = 0;
        for (const auto& ev : sc.schedule.events)
            if (ev.kind == scenario::EventKind::Cutoff) {
                ++cutoffs;
                CHECK(ev.time == sc.params.half_life);
            }
        CHECK(cutoffs == 1);
        for (std::size_t i = 1; i < sc.schedule.events.size(); ++i)
            CHECK(sc.schedule.events[i - 1].time < sc.schedule.events[i].time);
    }
}
