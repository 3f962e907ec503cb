#include "afp/sim.hpp"

namespace afp {

ScheduledHazards::ScheduledHazards(const Domain& domain, const Environment& env, std::uint64_t seed, Trace* trace)
    : domain_(domain), env_(env), trace_(trace), rng_(seed), matches_(env.hazards.size(), 0) {}

bool ScheduledHazards::fires(std::size_t rule) {
  const HazardSchedule sched = rule < env_.schedule.size() ? env_.schedule[rule] : HazardSchedule{};
  const auto count = ++matches_[rule];
  switch (sched.trigger) {
    case TriggerKind::Always:
      return true;
    case TriggerKind::NthMatch:
      return count == sched.nth;
    case TriggerKind::Probability: {
      const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      return u < sched.probability;
    }
  }
  return false;
}

StepHooks::Result ScheduledHazards::after_step(const Action&, const State&, const State& post) {
  State state = post;
  bool injected = false;
  for (std::size_t i = 0; i < env_.hazards.size(); ++i) {
    const auto& rule = env_.hazards[i];
    if (!matches_source(rule, post) || !fires(i)) continue;
    const State before = state;
    state = overridden(state, rule.consequence);
    injected = true;
    ++injected_;
    if (trace_) {
      trace_->emit(event::kHazardInjected, Json{{"rule", rule.name},
                                                {"e", digest_hex(before)},
                                                {"c", digest_hex(state)},
                                                {"observed", domain_.true_predicates(state)}});
      emit_visibility_changes(*trace_, domain_, before, state, cause::kHazard);
    }
  }
  return {std::move(state), injected};
}

Json verdict_json(const SystemVerdict& v) {
  return Json{{"fragile", v.fragile}, {"robust", v.robust}, {"resilient", v.resilient}, {"unachievable", v.unachievable}};
}

SystemVerdict verdict_from_json(const Json& j) {
  SystemVerdict v;
  v.fragile = j.at("fragile").get<bool>();
  v.robust = j.at("robust").get<bool>();
  v.resilient = j.at("resilient").get<bool>();
  v.unachievable = j.value("unachievable", false);
  return v;
}

Json partition_json(const Domain& domain, const ActionPartition& p) {
  auto names = [&](const std::vector<ActionId>& ids) {
    Json out = Json::array();
    const ActionSet sorted(domain, ids);
    for (auto id : sorted.ids()) out.push_back(domain.action(id).name);
    return out;
  };
  return Json{{"empowering", names(p.empowering)}, {"visible", names(p.visible)}, {"hidden", names(p.hidden)}};
}

GameResult run_game(const Scenario& sc, RunOptions options) {
  GameResult result;
  Trace& trace = result.trace;
  const Domain& domain = sc.domain;
  const Environment& env = sc.env;
  const std::uint64_t seed = options.seed.value_or(sc.seed);

  Json doc = save_scenario(sc);
  doc["seed"] = seed;
  trace.emit(event::kScenario,
             Json{{"name", sc.name}, {"seed", seed}, {"max_missions", options.max_missions}, {"document", doc}});

  State state = env.initial_state;
  KnowledgeBase kb(domain, env.hazards, sc.policy);
  ScheduledHazards hooks(domain, env, seed, &trace);
  Manager manager(domain, kb, trace, hooks, options.manager);

  auto snapshot = [&](std::size_t index, std::optional<std::size_t> next_mission) {
    const auto part = partition_actions(state, domain);
    Json data{{"index", index},
              {"next_mission", next_mission ? Json(*next_mission) : Json(nullptr)},
              {"digest", digest_hex(state)},
              {"state", domain.true_predicates(state)},
              {"partition", partition_json(domain, part)}};
    if (options.classify_snapshots) {
      try {
        const ActionSet visible(domain, part.visible);
        data["verdict"] = verdict_json(classify_system(domain, env, state, visible, env.hazards, options.classify));
      } catch (const BudgetExhausted& e) {
        data["verdict"] = nullptr;
        data["error"] = e.what();
      }
    }
    trace.emit(event::kSnapshot, std::move(data));
  };

  const std::size_t n = env.missions.size();
  const std::size_t total = n == 0 ? 0 : options.max_missions;
  for (std::size_t k = 0; k < total; ++k) {
    manager.drain_deferred(state);
    snapshot(k, k);
    manager.run_mission(k, env.missions[k % n].goal, state);
  }
  manager.drain_deferred(state);
  snapshot(total, std::nullopt);

  result.pathological = manager.pathological();
  result.completed = manager.missions_completed();
  result.aborted = manager.missions_aborted();
  return result;
}

Scenario scenario_from_trace(const Trace& trace) {
  const auto events = trace.events();
  if (events.empty() || events.front().kind != event::kScenario || !events.front().data.contains("document")) {
    throw std::runtime_error("trace does not start with a Scenario event");
  }
  return load_scenario(events.front().data.at("document"));
}

State replay_state(const Scenario& sc, const Trace& trace, std::uint64_t step) {
  const Domain& d = sc.domain;
  State state = sc.env.initial_state;
  auto find_rule = [&](const std::string& name) -> const HazardRule& {
    for (const auto& h : sc.env.hazards) {
      if (h.name == name) return h;
    }
    throw std::runtime_error("trace names unknown hazard '" + name + "'");
  };
  for (const auto& e : trace.events()) {
    if (e.step > step) break;
    if (e.kind == event::kActionExecuted) {
      state = apply(state, d.action(d.action_id(e.data.at("action").get<std::string>())));
    } else if (e.kind == event::kHazardInjected) {
      state = overridden(state, find_rule(e.data.at("rule").get<std::string>()).consequence);
    } else if (e.kind == event::kResetIssued) {
      state = reset_target(state, d);
    } else if (e.kind == event::kVisibilityChanged && e.data.at("cause") == cause::kManagerToggle) {
      state.set(d.predicate(e.data.at("predicate").get<std::string>()), e.data.at("value").get<bool>());
    }
  }
  return state;
}

}  // namespace afp
