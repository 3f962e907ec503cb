// afp: command-line front end for scenarios, planning, classification and runs.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "afp/classifier.hpp"
#include "afp/gridbot.hpp"
#include "afp/planner.hpp"
#include "afp/scenario.hpp"
#include "afp/sim.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kPathological = 2;
constexpr int kUsage = 3;

afp::Scenario open_scenario(const std::string& ref) {
  if (ref == "builtin:gridbot") return afp::gridbot::build(afp::gridbot::case_study_spec());
  if (ref == "builtin:mini") return afp::gridbot::build_mini(false);
  if (ref == "builtin:mini-wall") return afp::gridbot::build_mini(true);
  return afp::load_scenario_file(ref);
}

void print_violations(const std::vector<afp::Violation>& vs) {
  for (const auto& v : vs) std::cerr << "[" << afp::rule_name(v.rule) << "] " << v.entity << ": " << v.message << '\n';
}

afp::ActionSet choose_actions(const afp::Scenario& sc, const afp::State& s, const std::string& which) {
  if (which == "all") return afp::ActionSet::all(sc.domain);
  return afp::ActionSet(sc.domain, afp::partition_actions(s, sc.domain).visible);
}

int cmd_validate(const std::string& ref, const std::string& export_path) {
  auto sc = open_scenario(ref);
  if (!export_path.empty()) std::ofstream(export_path) << afp::save_scenario(sc).dump(2) << '\n';
  std::cout << "ok: " << sc.name << ", " << sc.domain.predicate_count() << " predicates, "
            << sc.domain.actions().size() << " actions, " << sc.env.hazards.size() << " hazard rules, "
            << sc.env.missions.size() << " missions\n";
  return kOk;
}

int cmd_plan(const std::string& ref, const std::string& from, const std::string& goal_text, const std::string& mode,
             const std::string& actions) {
  auto sc = open_scenario(ref);
  const afp::State start = from.empty() ? sc.env.initial_state : afp::parse_state(sc.domain, from);
  afp::PlanRequest req{start, afp::Condition{afp::parse_literal_list(sc.domain, goal_text)},
                       choose_actions(sc, start, actions), sc.env.hazards, std::nullopt};
  if (mode == "robust") {
    req.recommendation = afp::Recommendation{afp::When::Now, afp::Duration::All, afp::PlanMode::Robust};
  } else if (mode == "resilient") {
    req.recommendation = afp::Recommendation{afp::When::Now, afp::Duration::All, afp::PlanMode::Resilient};
  } else {
    req.hazards.clear();
  }
  const auto rp = afp::plan_with_recommendation(sc.domain, req);
  if (!rp.plan) {
    std::cout << "no plan\n";
    return kPathological;
  }
  std::cout << "# " << afp::to_string(rp.achieved) << ", " << rp.plan->size() << " steps\n";
  for (const auto& n : afp::step_names(sc.domain, *rp.plan)) std::cout << n << '\n';
  return kOk;
}

int cmd_classify(const std::string& ref, const std::string& actions) {
  auto sc = open_scenario(ref);
  const afp::State& s = sc.env.initial_state;
  const auto allowed = choose_actions(sc, s, actions);
  const auto v = afp::classify_system(sc.domain, sc.env, s, allowed, sc.env.hazards);
  afp::Json out = afp::verdict_json(v);
  out["actions"] = actions;
  afp::Json evidence = afp::Json::array();
  for (const auto& e : v.evidence) {
    afp::Json ej{{"mission", e.mission},
                 {"start", e.start},
                 {"achievable", e.achievable},
                 {"has_robust_plan", e.has_robust_plan},
                 {"has_resilient_plan", e.has_resilient_plan},
                 {"all_plans_resilient", e.all_plans_resilient}};
    if (e.unrecoverable_source) ej["unrecoverable_source"] = sc.domain.true_predicates(*e.unrecoverable_source);
    evidence.push_back(std::move(ej));
  }
  out["evidence"] = evidence;
  std::cout << out.dump(2) << '\n';
  return kOk;
}

void print_renders(const afp::Scenario& sc, const afp::Trace& trace) {
  for (const auto& e : trace.events()) {
    const bool boundary = e.kind == afp::event::kSnapshot;
    const bool hazard = e.kind == afp::event::kHazardDetected;
    if (!boundary && !hazard) continue;
    std::cout << "-- step " << e.step << " (" << e.kind << ")\n" << afp::render_grid(sc, trace, e.step);
  }
}

int report_run(const afp::Scenario& sc, const afp::GameResult& r, const std::string& trace_path, bool render) {
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace '" + trace_path + "'");
    r.trace.write_ndjson(out);
  }
  if (render) print_renders(sc, r.trace);
  std::cout << "missions completed: " << r.completed << ", aborted: " << r.aborted << '\n';
  std::cout << "hazards injected: " << r.trace.of_kind(afp::event::kHazardInjected).size()
            << ", detected: " << r.trace.of_kind(afp::event::kHazardDetected).size() << '\n';
  std::vector<afp::SystemVerdict> verdicts;
  for (const auto* e : r.trace.of_kind(afp::event::kSnapshot)) {
    if (e->data.contains("verdict") && !e->data.at("verdict").is_null()) {
      verdicts.push_back(afp::verdict_from_json(e->data.at("verdict")));
    }
  }
  const auto af = afp::check_antifragile(verdicts);
  std::cout << "antifragility: " << (af.never_fragile ? "never-fragile" : af.antifragile ? "antifragile" : "fragile");
  if (af.fragile_snapshot) std::cout << " (fragile at snapshot " << *af.fragile_snapshot;
  if (af.recovered_snapshot) std::cout << ", recovered at snapshot " << *af.recovered_snapshot;
  if (af.fragile_snapshot) std::cout << ")";
  std::cout << '\n';
  if (r.pathological) {
    std::cout << "pathological outcome recorded\n";
    return kPathological;
  }
  return kOk;
}

int cmd_metrics(const std::string& path, std::size_t bound) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
  const auto trace = afp::Trace::from_ndjson(in);
  const auto sc = afp::scenario_from_trace(trace);
  afp::MetricsOptions opts;
  opts.strength_bound = bound;
  const auto m = afp::report_metrics(trace, sc, opts);
  std::cout << m.dump(2) << '\n';
  return m.at("pathological").get<std::size_t>() > 0 ? kPathological : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antifragile planning agent: scenarios, planning, classification, simulated runs"};
  app.require_subcommand(1);

  std::string scenario, from, goal, mode = "plain", actions = "visible", trace_path, metrics_path, export_path;
  std::uint64_t seed = 0;
  std::size_t max_missions = 16, bound = 10;
  bool render = false;

  auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
  validate->add_option("scenario", scenario, "Scenario JSON file or builtin:gridbot|mini|mini-wall")->required();
  validate->add_option("--export", export_path, "Write the normalized scenario JSON here");

  auto* plan = app.add_subcommand("plan", "Synthesize a plan");
  plan->add_option("scenario", scenario)->required();
  plan->add_option("--from", from, "True predicates of the start state, comma separated (default: initial state)");
  plan->add_option("--goal", goal, "Goal literals, comma separated; '!p' negates")->required();
  plan->add_option("--mode", mode, "robust|resilient|plain")->check(CLI::IsMember({"robust", "resilient", "plain"}));
  plan->add_option("--actions", actions, "visible|all")->check(CLI::IsMember({"visible", "all"}));

  auto* classify = app.add_subcommand("classify", "Classify the system at its initial state");
  classify->add_option("scenario", scenario)->required();
  classify->add_option("--actions", actions, "visible|all")->check(CLI::IsMember({"visible", "all"}));

  auto* run = app.add_subcommand("run", "Play the mission game");
  run->add_option("scenario", scenario)->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--max-missions", max_missions, "Missions to play (list cycles)");
  run->add_option("--trace", trace_path, "Write the NDJSON trace here");
  run->add_flag("--render", render, "Print the grid at mission boundaries and hazards");

  auto* casestudy = app.add_subcommand("casestudy", "Run the built-in gridbot case study");
  casestudy->add_option("--trace", trace_path, "Write the NDJSON trace here");
  casestudy->add_option("--export", export_path, "Write the scenario JSON here");
  casestudy->add_flag("--render", render, "Print the grid at mission boundaries and hazards");

  auto* metrics = app.add_subcommand("metrics", "Compute run metrics from a trace");
  metrics->add_option("trace", metrics_path)->required();
  metrics->add_option("--bound", bound, "Plan length bound for strength");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(scenario, export_path);
    if (*plan) return cmd_plan(scenario, from, goal, mode, actions);
    if (*classify) return cmd_classify(scenario, actions);
    if (*run) {
      auto sc = open_scenario(scenario);
      afp::RunOptions opts;
      opts.max_missions = max_missions;
      if (*seed_opt) opts.seed = seed;
      return report_run(sc, afp::run_game(sc, opts), trace_path, render);
    }
    if (*casestudy) {
      auto sc = afp::gridbot::build(afp::gridbot::case_study_spec());
      if (!export_path.empty()) {
        std::ofstream(export_path) << afp::save_scenario(sc).dump(2) << '\n';
      }
      afp::RunOptions opts;
      opts.max_missions = sc.env.missions.size();
      return report_run(sc, afp::run_game(sc, opts), trace_path, render);
    }
    if (*metrics) return cmd_metrics(metrics_path, bound);
  } catch (const afp::ScenarioValidationError& e) {
    print_violations(e.violations());
    return kInvalid;
  } catch (const afp::ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const afp::RenderUnsupported& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kUsage;
}
