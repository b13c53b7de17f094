#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orules/state.hpp"

using namespace orules;

namespace {

Component comp(std::vector<SubsystemFactor> f, double w = 1.0) {
    return make_component(std::move(f), w);
}

BrainFactor cat(const char* aware, BrainStatus st) { return {"cat", aware, st}; }

}  // namespace

TEST_CASE("make_component accepts the initial apparatus state") {
    Component c = comp({DetectorFactor{0}, DeviceFactor{}, IndicatorFactor{Indicator::i0}}, 1.0);
    CHECK(c.weight == 1.0);
    CHECK(c.detector()->value == 0);
    CHECK(c.indicator()->level == Indicator::i0);
    CHECK(c.label() == "d0 M(a0) i0");
}

TEST_CASE("make_component allows a zero-weight component") {
    Component c = comp({DetectorFactor{0}}, 0.0);
    CHECK(c.weight == 0.0);
}

TEST_CASE("make_component rejects duplicate agents and bad weights") {
    CHECK_THROWS_AS(comp({SubsystemFactor{cat("C0", BrainStatus::Conscious)},
                          SubsystemFactor{cat("U", BrainStatus::Unconscious)}}),
                    DuplicateAgentError);
    CHECK_THROWS_AS(comp({DetectorFactor{0}}, 1.5), BadWeightError);
    CHECK_THROWS_AS(comp({DetectorFactor{0}}, -0.1), BadWeightError);
    CHECK_THROWS_AS(comp({}, 0.5), BadWeightError);
}

TEST_CASE("contains_ready sees only Ready brain tokens") {
    // the growing second branch of version I: ready cat pinned at the start
    Component ready = comp({DetectorFactor{1}, DeviceFactor{}, cat("C0", BrainStatus::Ready)}, 0.0);
    CHECK(contains_ready(ready));

    Component plain = comp({DetectorFactor{0}, DeviceFactor{}, IndicatorFactor{Indicator::i0}});
    CHECK_FALSE(contains_ready(plain));

    // a brink-state observer is inactive, not ready
    Component brink = comp({DetectorFactor{0}, DeviceFactor{},
                            BrainFactor{"obs", "", BrainStatus::Brink}});
    CHECK_FALSE(contains_ready(brink));
    CHECK_FALSE(contains_conscious(brink));
}

TEST_CASE("is_discontinuous splits on discrete labels only") {
    Component d0 = comp({DetectorFactor{0}, DeviceFactor{}, IndicatorFactor{Indicator::i0}});
    Component d1 = comp({DetectorFactor{1},
                         DeviceFactor{DevicePos::Running, std::vector<double>{0.5, 0.5}, 0.0},
                         IndicatorFactor{Indicator::i0}},
                        1.0);
    CHECK(is_discontinuous(d0, d1));  // the plus sign between d0 and d1

    // one running pulse seen at two times: same labels, no discontinuity
    Component later = d1;
    later.device()->bins = {0.0, 1.0};
    later.device()->shift_phase = 0.4;
    CHECK_FALSE(is_discontinuous(d1, later));

    CHECK_FALSE(is_discontinuous(d0, d0));
}

TEST_CASE("is_discontinuous is symmetric and irreflexive over the label alphabet") {
    std::vector<Component> all;
    for (int det : {0, 1})
        for (DevicePos pos : {DevicePos::AtStart, DevicePos::Running, DevicePos::Done})
            for (Indicator ind : {Indicator::i0, Indicator::i1, Indicator::I0, Indicator::I1})
                for (BrainStatus st : {BrainStatus::External, BrainStatus::Brink,
                                       BrainStatus::Ready, BrainStatus::Conscious,
                                       BrainStatus::Unconscious})
                    for (bool rung : {false, true}) {
                        DeviceFactor dev;
                        dev.pos = pos;
                        all.push_back(comp({DetectorFactor{det}, dev, IndicatorFactor{ind},
                                            cat("C0", st), ClockFactor{rung}},
                                           0.5));
                    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK_FALSE(is_discontinuous(all[i], all[i]));
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            CHECK(is_discontinuous(all[i], all[j]) == is_discontinuous(all[j], all[i]));
            CHECK(is_discontinuous(all[i], all[j]));  // all label tuples here differ
        }
    }
}

TEST_CASE("graph bookkeeping: totals and the non-ready modulus") {
    StateGraph g;
    g.insert(comp({DetectorFactor{0}, DeviceFactor{}, cat("C0", BrainStatus::Conscious)}, 0.75));
    g.insert(comp({DetectorFactor{1}, DeviceFactor{}, cat("C0", BrainStatus::Ready)}, 0.25));
    CHECK(g.total_modulus() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.nonready_modulus() == doctest::Approx(0.75).epsilon(1e-15));

    Component like = comp({DetectorFactor{1}, DeviceFactor{}, cat("C0", BrainStatus::Ready)}, 0.0);
    REQUIRE(g.find_label_match(like) != nullptr);
    g.erase(g.find_label_match(like)->id);
    CHECK(g.components.size() == 1);
}
