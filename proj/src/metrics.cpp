#include <map>

#include "afp/sim.hpp"

namespace afp {

namespace {

State state_from_names(const Domain& d, const Json& names) {
  State s = d.make_state();
  for (const auto& n : names) s.set(d.predicate(n.get<std::string>()), true);
  return s;
}

Condition goal_from_json(const Domain& d, const Json& lits) {
  return Condition{parse_literals(d, lits.get<std::vector<std::string>>())};
}

}  // namespace

Json report_metrics(const Trace& trace, const Scenario& sc, MetricsOptions options) {
  const Domain& d = sc.domain;

  Json missions = Json::array();
  std::map<std::string, std::uint64_t> injected_by_rule;
  std::size_t injected = 0, detected = 0, completed = 0, aborted = 0, pathological = 0;
  std::vector<GroundMission> recovery;
  std::optional<Condition> current_goal;
  std::optional<State> last_observed;
  std::optional<std::size_t> first_detection_step;
  Json* open = nullptr;

  for (const auto& e : trace.events()) {
    if (e.kind == event::kGoalIssued) {
      missions.push_back(Json{{"mission", e.data.at("mission")},
                              {"goal", e.data.at("goal")},
                              {"status", "open"},
                              {"reason", nullptr},
                              {"plan_lengths", Json::array()},
                              {"actions_executed", 0},
                              {"hazards", 0}});
      open = &missions.back();
      current_goal = goal_from_json(d, e.data.at("goal"));
    } else if (e.kind == event::kPlanSynthesized && open) {
      (*open)["plan_lengths"].push_back(e.data.at("plan").size());
    } else if (e.kind == event::kActionExecuted && open) {
      (*open)["actions_executed"] = (*open)["actions_executed"].get<std::size_t>() + 1;
    } else if (e.kind == event::kHazardInjected) {
      ++injected;
      ++injected_by_rule[e.data.at("rule").get<std::string>()];
      last_observed = state_from_names(d, e.data.at("observed"));
    } else if (e.kind == event::kHazardDetected) {
      ++detected;
      if (open) (*open)["hazards"] = (*open)["hazards"].get<std::size_t>() + 1;
      if (!first_detection_step) first_detection_step = e.step;
      if (last_observed && current_goal) recovery.push_back(GroundMission{{*last_observed}, *current_goal});
    } else if (e.kind == event::kMissionCompleted && open) {
      (*open)["status"] = "completed";
      ++completed;
      open = nullptr;
    } else if (e.kind == event::kMissionAborted && open) {
      (*open)["status"] = "aborted";
      (*open)["reason"] = e.data.at("reason");
      ++aborted;
      open = nullptr;
    } else if (e.kind == event::kPathological) {
      ++pathological;
    }
  }

  Json snapshots = Json::array();
  std::vector<SystemVerdict> verdicts;
  std::vector<StrengthReport> strengths;
  std::vector<std::uint64_t> snapshot_steps;
  for (const auto* e : trace.of_kind(event::kSnapshot)) {
    const State s = state_from_names(d, e->data.at("state"));
    const auto part = partition_actions(s, d);
    const ActionSet visible(d, part.visible);
    SystemVerdict v;
    if (e->data.contains("verdict") && !e->data.at("verdict").is_null()) {
      v = verdict_from_json(e->data.at("verdict"));
    } else {
      v = classify_system(d, sc.env, s, visible, sc.env.hazards, options.limits);
    }
    auto ground = ground_missions(d, sc.env, s, visible, options.limits.search);
    ground.insert(ground.end(), recovery.begin(), recovery.end());
    const auto strength = strength_metric(d, visible, ground, options.strength_bound, options.limits.search);
    snapshots.push_back(Json{{"index", e->data.at("index")},
                             {"step", e->step},
                             {"verdict", verdict_json(v)},
                             {"strength",
                              {{"bound", strength.bound},
                               {"missions", ground.size()},
                               {"achievable_missions", strength.achievable_missions},
                               {"plan_counts", strength.plan_counts},
                               {"total_plans", strength.total_plans()}}}});
    verdicts.push_back(v);
    strengths.push_back(strength);
    snapshot_steps.push_back(e->step);
  }

  const auto af = check_antifragile(verdicts);
  Json antifragility{{"verdict", af.never_fragile ? "never-fragile" : af.antifragile ? "antifragile" : "fragile"},
                     {"fragile_snapshot", af.fragile_snapshot ? Json(*af.fragile_snapshot) : Json(nullptr)},
                     {"recovered_snapshot", af.recovered_snapshot ? Json(*af.recovered_snapshot) : Json(nullptr)}};

  Json boundary = nullptr;
  if (first_detection_step) {
    std::optional<std::size_t> before, after;
    for (std::size_t i = 0; i < snapshot_steps.size(); ++i) {
      if (snapshot_steps[i] < *first_detection_step) before = i;
      if (snapshot_steps[i] > *first_detection_step && !after) after = i;
    }
    if (before && after) {
      const auto& a = strengths[*before];
      const auto& b = strengths[*after];
      boundary = Json{{"before", *before},
                      {"after", *after},
                      {"strictly_stronger", b.achievable_missions > a.achievable_missions &&
                                                b.total_plans() > a.total_plans()}};
    }
  }

  Json by_rule = Json::object();
  for (const auto& [rule, n] : injected_by_rule) by_rule[rule] = n;

  return Json{{"scenario", sc.name},
              {"missions", missions},
              {"completed_missions", completed},
              {"aborted_missions", aborted},
              {"pathological", pathological},
              {"hazards", {{"injected", injected}, {"detected", detected}, {"by_rule", by_rule}}},
              {"snapshots", snapshots},
              {"hazard_boundary", boundary},
              {"antifragility", antifragility}};
}

}  // namespace afp
