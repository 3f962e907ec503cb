// Python bindings. Structured results cross the boundary as JSON text and are
// decoded on the Python side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afp/classifier.hpp"
#include "afp/gridbot.hpp"
#include "afp/planner.hpp"
#include "afp/scenario.hpp"
#include "afp/sim.hpp"

namespace py = pybind11;
using namespace afp;

namespace {

Scenario open_scenario(const std::string& ref) {
  if (ref == "builtin:gridbot") return gridbot::build(gridbot::case_study_spec());
  if (ref == "builtin:mini") return gridbot::build_mini(false);
  if (ref == "builtin:mini-wall") return gridbot::build_mini(true);
  return load_scenario_file(ref);
}

ActionSet choose(const Scenario& sc, const State& s, const std::string& which) {
  if (which == "all") return ActionSet::all(sc.domain);
  if (which != "visible") throw std::invalid_argument("actions must be 'visible' or 'all'");
  return ActionSet(sc.domain, partition_actions(s, sc.domain).visible);
}

}  // namespace

PYBIND11_MODULE(_afp, m) {
  m.doc() = "Antifragile planning core";

  py::register_exception<ScenarioParseError>(m, "ScenarioParseError", PyExc_ValueError);
  py::register_exception<ScenarioValidationError>(m, "ScenarioValidationError", PyExc_ValueError);
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", PyExc_RuntimeError);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_property_readonly("predicates",
                             [](const Scenario& s) {
                               std::vector<std::string> out;
                               for (std::uint32_t i = 0; i < s.domain.predicate_count(); ++i) {
                                 out.push_back(s.domain.predicate_name(PredicateId{i}));
                               }
                               return out;
                             })
      .def_property_readonly("actions",
                             [](const Scenario& s) {
                               std::vector<std::string> out;
                               for (const auto& a : s.domain.actions()) out.push_back(a.name);
                               return out;
                             })
      .def_property_readonly("initial_state",
                             [](const Scenario& s) { return s.domain.true_predicates(s.env.initial_state); })
      .def("to_json", [](const Scenario& s) { return save_scenario(s).dump(); });

  m.def("open_scenario", &open_scenario, py::arg("ref"), "Load a scenario file or builtin:gridbot|mini|mini-wall");
  m.def("load_scenario_text", [](const std::string& text) { return load_scenario(std::string_view(text)); },
        py::arg("text"));

  m.def(
      "plan",
      [](const Scenario& sc, const std::string& goal, const std::string& mode, const std::string& actions,
         const std::optional<std::string>& start) -> std::optional<std::vector<std::string>> {
        const State s = start ? parse_state(sc.domain, *start) : sc.env.initial_state;
        PlanRequest req{s, Condition{parse_literal_list(sc.domain, goal)}, choose(sc, s, actions), sc.env.hazards,
                        std::nullopt};
        if (mode == "robust") {
          req.recommendation = Recommendation{When::Now, Duration::All, PlanMode::Robust};
        } else if (mode == "resilient") {
          req.recommendation = Recommendation{When::Now, Duration::All, PlanMode::Resilient};
        } else if (mode == "plain") {
          req.hazards.clear();
        } else {
          throw std::invalid_argument("mode must be 'plain', 'robust' or 'resilient'");
        }
        const auto rp = plan_with_recommendation(sc.domain, req);
        if (!rp.plan) return std::nullopt;
        return step_names(sc.domain, *rp.plan);
      },
      py::arg("scenario"), py::arg("goal"), py::arg("mode") = "plain", py::arg("actions") = "visible",
      py::arg("start") = py::none());

  m.def(
      "classify_json",
      [](const Scenario& sc, const std::string& actions) {
        const State& s = sc.env.initial_state;
        return verdict_json(classify_system(sc.domain, sc.env, s, choose(sc, s, actions), sc.env.hazards)).dump();
      },
      py::arg("scenario"), py::arg("actions") = "visible");

  m.def(
      "run_ndjson",
      [](const Scenario& sc, std::optional<std::uint64_t> seed, std::size_t max_missions) {
        RunOptions opts;
        opts.seed = seed;
        opts.max_missions = max_missions;
        GameResult r;
        {
          py::gil_scoped_release release;
          r = run_game(sc, opts);
        }
        return r.trace.to_ndjson();
      },
      py::arg("scenario"), py::arg("seed") = py::none(), py::arg("max_missions") = 16);

  m.def(
      "metrics_json",
      [](const std::string& ndjson, std::size_t bound) {
        const auto trace = Trace::from_ndjson(std::string_view(ndjson));
        MetricsOptions opts;
        opts.strength_bound = bound;
        return report_metrics(trace, scenario_from_trace(trace), opts).dump();
      },
      py::arg("ndjson"), py::arg("bound") = 10);
}
