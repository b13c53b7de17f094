#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "orules/harness.hpp"

namespace py = pybind11;
using namespace orules;

namespace {

harness::RunOptions make_options(bool strict_rule1, bool prune, std::optional<double> dt,
                                 std::optional<double> t_max, bool disable_hits,
                                 bool disable_cutoff) {
    harness::RunOptions opts;
    opts.strict_rule1 = strict_rule1;
    opts.prune = prune;
    opts.dt_override = dt;
    opts.t_max = t_max;
    opts.disable_hits = disable_hits;
    opts.disable_cutoff = disable_cutoff;
    opts.error_on_timeout = !t_max.has_value();
    return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic state-reduction simulator for the seven cat scenarios";

    py::register_exception<ScenarioError>(m, "ScenarioFileError", PyExc_ValueError);

    py::enum_<scenario::Version>(m, "Version")
        .value("APPARATUS_ONLY", scenario::Version::ApparatusOnly)
        .value("APPARATUS_OBSERVER", scenario::Version::ApparatusObserver)
        .value("CAT_V1", scenario::Version::CatV1)
        .value("CAT_V1_OBSERVER", scenario::Version::CatV1Observer)
        .value("CAT_V2", scenario::Version::CatV2)
        .value("CAT_V2_OBSERVER", scenario::Version::CatV2Observer)
        .value("CAT_V2_NATURAL_WAKE", scenario::Version::CatV2NaturalWake);

    py::class_<dynamics::DynamicsParams>(m, "DynamicsParams")
        .def_readonly("half_life", &dynamics::DynamicsParams::half_life)
        .def_readonly("transit_time", &dynamics::DynamicsParams::transit_time)
        .def_readonly("alpha_bins", &dynamics::DynamicsParams::alpha_bins)
        .def_readonly("kappa", &dynamics::DynamicsParams::kappa)
        .def_readonly("dt", &dynamics::DynamicsParams::dt)
        .def_readonly("pulse_width", &dynamics::DynamicsParams::pulse_width)
        .def_property_readonly("step", &dynamics::DynamicsParams::step)
        .def_property_readonly("phys_rate", &dynamics::DynamicsParams::phys_rate);

    py::class_<scenario::Scenario>(m, "Scenario")
        .def_readonly("name", &scenario::Scenario::name)
        .def_readonly("version", &scenario::Scenario::version)
        .def_readonly("params", &scenario::Scenario::params)
        .def_readonly("t_look", &scenario::Scenario::t_look)
        .def_readonly("t_ob", &scenario::Scenario::t_ob)
        .def_readonly("t_ff", &scenario::Scenario::t_ff)
        .def("cat_agent", &scenario::Scenario::cat_agent)
        .def("observer_agent", &scenario::Scenario::observer_agent)
        .def("__eq__", [](const scenario::Scenario& a, const scenario::Scenario& b) { return a == b; })
        .def("__repr__", [](const scenario::Scenario& sc) {
            return "<Scenario " + sc.name + " (" + scenario::version_key(sc.version) + ")>";
        });

    py::class_<engine::SimEvent>(m, "SimEvent")
        .def_readonly("time", &engine::SimEvent::time)
        .def_property_readonly("kind",
                               [](const engine::SimEvent& e) { return engine::to_string(e.kind); })
        .def_readonly("label", &engine::SimEvent::label)
        .def_readonly("weight", &engine::SimEvent::weight);

    py::class_<harness::TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("seed", &harness::TrajectoryRecord::seed)
        .def_readonly("events", &harness::TrajectoryRecord::events)
        .def_readonly("terminal_components", &harness::TrajectoryRecord::terminal_components)
        .def_readonly("terminal_label", &harness::TrajectoryRecord::terminal_label)
        .def_readonly("terminal_weight", &harness::TrajectoryRecord::terminal_weight)
        .def_readonly("hit_times", &harness::TrajectoryRecord::hit_times)
        .def_readonly("reductions", &harness::TrajectoryRecord::reductions)
        .def_readonly("max_norm_drift", &harness::TrajectoryRecord::max_norm_drift)
        .def_readonly("cumulative_vertical", &harness::TrajectoryRecord::cumulative_vertical)
        .def_readonly("end_time", &harness::TrajectoryRecord::end_time)
        .def("trace_text", &harness::TrajectoryRecord::trace_text);

    py::class_<harness::EnsembleStats>(m, "EnsembleStats")
        .def_readonly("n_runs", &harness::EnsembleStats::n_runs)
        .def_readonly("outcomes", &harness::EnsembleStats::outcomes)
        .def_readonly("hit_times", &harness::EnsembleStats::hit_times)
        .def_readonly("ks", &harness::EnsembleStats::ks)
        .def("stats_text", &harness::EnsembleStats::stats_text);

    m.def("parse_scenario", &scenario::parse_scenario, py::arg("text"),
          "Parse scenario text into a validated Scenario.");
    m.def("load_scenario", &scenario::load_scenario, py::arg("path"),
          "Parse a scenario file from disk.");
    m.def("serialize_scenario", &scenario::serialize_scenario, py::arg("scenario"));

    m.def(
        "run_trajectory",
        [](const scenario::Scenario& sc, std::uint64_t seed, bool strict_rule1, bool prune,
           std::optional<double> dt, std::optional<double> t_max, bool disable_hits,
           bool disable_cutoff) {
            return harness::run_trajectory(
                sc, seed, make_options(strict_rule1, prune, dt, t_max, disable_hits, disable_cutoff));
        },
        py::arg("scenario"), py::arg("seed"), py::kw_only(), py::arg("strict_rule1") = false,
        py::arg("prune") = true, py::arg("dt") = std::nullopt, py::arg("t_max") = std::nullopt,
        py::arg("disable_hits") = false, py::arg("disable_cutoff") = false,
        "Run one seeded trajectory.");

    m.def(
        "run_ensemble",
        [](const scenario::Scenario& sc, std::size_t n, std::uint64_t base_seed,
           std::optional<unsigned> workers, bool strict_rule1, bool prune, std::optional<double> dt,
           std::optional<double> t_max, bool disable_hits, bool disable_cutoff) {
            harness::EnsembleStats stats;
            {
                py::gil_scoped_release release;
                stats = harness::run_ensemble(
                    sc, n, base_seed,
                    make_options(strict_rule1, prune, dt, t_max, disable_hits, disable_cutoff),
                    workers);
            }
            return stats;
        },
        py::arg("scenario"), py::arg("n"), py::arg("base_seed") = 1, py::kw_only(),
        py::arg("workers") = std::nullopt, py::arg("strict_rule1") = false, py::arg("prune") = true,
        py::arg("dt") = std::nullopt, py::arg("t_max") = std::nullopt,
        py::arg("disable_hits") = false, py::arg("disable_cutoff") = false,
        "Run a seeded ensemble and aggregate outcome statistics.");

    m.def("compare_hit_cdf", &harness::compare_hit_cdf, py::arg("samples"), py::arg("half_life"),
          "KS statistic of hit times against the half-life reference CDF.");
}
