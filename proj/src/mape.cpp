#include "afp/mape.hpp"

#include <algorithm>

namespace afp {

Recommendation AnalyzerPolicy::lookup(std::span<const std::string> tags) const {
  for (const auto& t : tags) {
    if (auto it = by_tag.find(t); it != by_tag.end()) return it->second;
  }
  return fallback;
}

KnowledgeBase::KnowledgeBase(const Domain& domain, std::vector<HazardRule> catalog, AnalyzerPolicy policy)
    : domain_(&domain), catalog_(std::move(catalog)), policy_(std::move(policy)) {}

void KnowledgeBase::learn(const HazardRule& rule) {
  const bool present = std::any_of(known_.begin(), known_.end(),
                                   [&](const HazardRule& r) { return r.name == rule.name; });
  if (!present) known_.push_back(rule);
}

const HazardRule* KnowledgeBase::find_rule(std::string_view name) const {
  for (const auto& r : catalog_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

HazardRecord& KnowledgeBase::append(HazardRecord record) {
  history_.push_back(std::move(record));
  return history_.back();
}

void KnowledgeBase::add_internal_goals(std::span<const PredicateId> predicates) {
  for (auto p : predicates) {
    if (!domain_->is_visibility_predicate(p)) {
      throw DisciplineViolation("internal goal '" + domain_->predicate_name(p) + "' is not a visibility predicate");
    }
    internal_goals_.insert(p);
  }
}

void KnowledgeBase::stage_toggles(std::span<const PredicateId> predicates) {
  pending_.insert(predicates.begin(), predicates.end());
}

std::vector<PredicateId> KnowledgeBase::take_pending_toggles() {
  std::vector<PredicateId> out(pending_.begin(), pending_.end());
  pending_.clear();
  return out;
}

std::optional<std::vector<Literal>> monitor_detect(const State& observed, const Action& next_action) {
  auto failing = violated_literals(observed, next_action.precondition);
  if (failing.empty()) return std::nullopt;
  return failing;
}

HazardRecord& record_hazard(KnowledgeBase& kb, const State& e, const State& c, std::size_t step) {
  HazardRecord r{e, c, step, {}};
  for (const auto& rule : kb.catalog()) {
    if (matches_source(rule, e) && overridden(e, rule.consequence) == c) r.matched_rules.push_back(rule.name);
  }
  return kb.append(std::move(r));
}

std::vector<HazardHandling> analyze(const KnowledgeBase& kb, const HazardRecord& record) {
  const auto catalog = kb.catalog();
  std::vector<const HazardRule*> matched;
  for (const auto& name : record.matched_rules) {
    if (const auto* r = kb.find_rule(name)) matched.push_back(r);
  }

  if (matched.empty()) {
    HazardRule synthetic;
    synthetic.name = "unknown#" + std::to_string(kb.history().size());
    for (std::uint32_t i = 0; i < record.pre_state.size(); ++i) {
      const PredicateId p{i};
      if (record.pre_state.get(p) != record.observed.get(p)) {
        synthetic.source.literals.push_back(Literal{p, record.pre_state.get(p)});
        synthetic.consequence.literals.push_back(Literal{p, record.observed.get(p)});
      }
    }
    return {HazardHandling{{std::move(synthetic)}, kb.policy().fallback, true}};
  }

  std::set<std::string> tags;
  for (const auto* r : matched) tags.insert(r->tags.begin(), r->tags.end());
  auto in_closure = [&](const HazardRule& r) {
    if (std::any_of(matched.begin(), matched.end(), [&](const HazardRule* m) { return m->name == r.name; })) {
      return true;
    }
    return std::any_of(r.tags.begin(), r.tags.end(), [&](const std::string& t) { return tags.contains(t); });
  };

  std::vector<HazardHandling> groups;
  auto add = [&](const HazardRule& r) {
    const auto rec = kb.policy().lookup(r.tags);
    for (auto& g : groups) {
      if (g.recommendation == rec) {
        if (std::none_of(g.hazards.begin(), g.hazards.end(), [&](const HazardRule& h) { return h.name == r.name; })) {
          g.hazards.push_back(r);
        }
        return;
      }
    }
    groups.push_back(HazardHandling{{r}, rec, false});
  };
  add(*matched.front());
  for (const auto& r : catalog) {
    if (in_closure(r)) add(r);
  }
  // Keep catalog order inside each group.
  for (auto& g : groups) {
    std::stable_sort(g.hazards.begin(), g.hazards.end(), [&](const HazardRule& a, const HazardRule& b) {
      auto pos = [&](const HazardRule& x) {
        return std::find_if(catalog.begin(), catalog.end(), [&](const HazardRule& c) { return c.name == x.name; }) -
               catalog.begin();
      };
      return pos(a) < pos(b);
    });
  }
  return groups;
}

namespace {

Json literal_names(const Domain& d, std::span<const Literal> ls) {
  Json out = Json::array();
  for (const auto& l : ls) out.push_back(d.describe(l));
  return out;
}

}  // namespace

ExecutionResult execute(const Domain& domain, const Plan& plan, const State& start, StepHooks& hooks, Trace* trace,
                        KnowledgeBase* kb, const Condition* goal) {
  State state = start;
  State last_post = start;
  // Stays set until the deviation is detected: a hazard may leave the next
  // few actions applicable and surface only later.
  bool injected = false;

  auto halt = [&](std::size_t index, std::vector<Literal> mismatch) {
    ExecutionResult r{ExecutionOutcome{OutcomeKind::HazardHalt, index, std::nullopt, std::move(mismatch)}, state};
    HazardRecord record{last_post, state, index, {}};
    if (kb) record = record_hazard(*kb, last_post, state, index);
    if (trace) {
      trace->emit(event::kHazardDetected, Json{{"index", index},
                                               {"e", digest_hex(record.pre_state)},
                                               {"c", digest_hex(record.observed)},
                                               {"matched_rules", record.matched_rules},
                                               {"mismatch", literal_names(domain, r.outcome.mismatch)}});
    }
    r.outcome.record = std::move(record);
    return r;
  };

  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& action = domain.action(plan.steps[i]);
    if (auto mismatch = monitor_detect(state, action)) {
      if (injected) return halt(i, std::move(*mismatch));
      return ExecutionResult{ExecutionOutcome{OutcomeKind::StepFailure, i, std::nullopt, std::move(*mismatch)}, state};
    }
    const State pre = state;
    const State post = overridden(pre, action.effect);
    if (trace) {
      trace->emit(event::kActionExecuted, Json{{"action", action.name},
                                               {"pre", digest_hex(pre)},
                                               {"post", digest_hex(post)}});
      emit_visibility_changes(*trace, domain, pre, post,
                              action.kind == ActionKind::Empowering ? cause::kEmpoweringAction
                                                                    : cause::kOperationalAction);
    }
    auto r = hooks.after_step(action, pre, post);
    if (r.injected || !injected) last_post = post;
    state = std::move(r.state);
    injected = injected || r.injected;
  }
  if (goal && !satisfies(state, *goal)) {
    auto mismatch = violated_literals(state, *goal);
    if (injected) return halt(plan.size(), std::move(mismatch));
    return ExecutionResult{ExecutionOutcome{OutcomeKind::StepFailure, plan.size(), std::nullopt, std::move(mismatch)},
                           state};
  }
  return ExecutionResult{ExecutionOutcome{OutcomeKind::Completed, plan.size(), std::nullopt, {}}, state};
}

State toggle_visibility(const Domain& domain, const State& s, std::span<const PredicateId> predicates, bool value,
                        Trace* trace) {
  State out = s;
  for (auto p : predicates) {
    if (!domain.is_visibility_predicate(p)) {
      throw DisciplineViolation("'" + domain.predicate_name(p) + "' is not a visibility predicate");
    }
    if (value && !s.get(p)) {
      throw DisciplineViolation("manager may not raise '" + domain.predicate_name(p) +
                                "' directly; use an empowering plan");
    }
    out.set(p, value);
  }
  if (trace) emit_visibility_changes(*trace, domain, s, out, cause::kManagerToggle);
  return out;
}

// Manager

Manager::Manager(const Domain& domain, KnowledgeBase& kb, Trace& trace, StepHooks& hooks, ManagerConfig config)
    : domain_(domain), kb_(kb), trace_(trace), hooks_(hooks), config_(config) {}

ActionSet Manager::visible(const State& s) const { return ActionSet(domain_, partition_actions(s, domain_).visible); }
ActionSet Manager::hidden(const State& s) const { return ActionSet(domain_, partition_actions(s, domain_).hidden); }

ActionSet Manager::empowering_and_visible(const State& s) const {
  auto part = partition_actions(s, domain_);
  part.visible.insert(part.visible.end(), part.empowering.begin(), part.empowering.end());
  return ActionSet(domain_, std::move(part.visible));
}

std::vector<HazardRule> Manager::planning_hazards(const HazardRecord* record) const {
  std::vector<HazardRule> out(kb_.known_hazards().begin(), kb_.known_hazards().end());
  if (record) {
    for (const auto& name : record->matched_rules) {
      const bool present =
          std::any_of(out.begin(), out.end(), [&](const HazardRule& r) { return r.name == name; });
      if (!present) {
        if (const auto* r = kb_.find_rule(name)) out.push_back(*r);
      }
    }
  }
  return out;
}

void Manager::emit_plan(const Plan& plan, std::string_view rung, std::string_view purpose) {
  trace_.emit(event::kPlanSynthesized,
              Json{{"purpose", purpose}, {"rung", rung}, {"plan", step_names(domain_, plan)}});
}

RecommendedPlan Manager::on_goal(const State& state, const Condition& goal) {
  PlanRequest req{state, goal, visible(state), planning_hazards(nullptr), kb_.active_recommendation()};
  auto rp = plan_with_recommendation(domain_, req, config_.limits);
  if (rp.plan) emit_plan(*rp.plan, to_string(rp.achieved), "mission");
  return rp;
}

std::optional<MinHiddenPlan> Manager::min_hidden_ladder(const State& s, const Condition& goal,
                                                        std::span<const HazardRule> hazards, PlanMode mode) {
  const auto vis = visible(s);
  const auto hid = hidden(s);
  if (mode == PlanMode::Robust) {
    if (auto p = find_plan_min_hidden(domain_, s, goal, vis, hid, hazards, PlanMode::Robust, config_.limits)) return p;
  }
  if (auto p = find_plan_min_hidden(domain_, s, goal, vis, hid, hazards, PlanMode::Resilient, config_.limits)) {
    return p;
  }
  return find_plan_min_hidden(domain_, s, goal, vis, hid, {}, PlanMode::Robust, config_.limits);
}

void Manager::issue_reset(State& state) {
  const State before = state;
  state = reset_target(state, domain_);
  trace_.emit(event::kResetIssued, Json{{"from", digest_hex(before)}, {"to", digest_hex(state)}});
  emit_visibility_changes(trace_, domain_, before, state, cause::kReset);
}

std::optional<std::vector<PredicateId>> Manager::empower(State& state, std::span<const PredicateId> targets,
                                                         Duration duration, std::string_view purpose) {
  auto plan = achieve_predicates(domain_, state, targets, empowering_and_visible(state), config_.limits);
  if (!plan) return std::nullopt;
  emit_plan(*plan, "Plain", purpose);
  Condition goal;
  for (auto p : targets) goal.literals.push_back(Literal{p, true});
  const State before = state;
  auto res = execute(domain_, *plan, state, hooks_, &trace_, &kb_, &goal);
  state = res.final_state;
  if (res.outcome.kind != OutcomeKind::Completed) return std::nullopt;
  std::vector<PredicateId> raised;
  for (auto p : domain_.visibility_predicates()) {
    if (!before.get(p) && state.get(p)) raised.push_back(p);
  }
  if (duration == Duration::Current) kb_.stage_toggles(raised);
  return raised;
}

Manager::HazardResponse Manager::on_hazard(const HazardRecord& record, State& state, const Condition& goal) {
  for (const auto& name : record.matched_rules) {
    if (const auto* r = kb_.find_rule(name)) kb_.learn(*r);
  }

  // A resilient plan over the current visible actions needs no new capability.
  const auto hazards = planning_hazards(&record);
  if (auto p = find_resilient_plan(domain_, state, goal, visible(state), hazards, config_.limits)) {
    emit_plan(*p, "Resilient", "recovery");
    return {std::move(p), "resilient-recovery"};
  }

  const auto handlings = analyze(kb_, record);
  std::optional<Plan> resume;
  bool reset_done = false;
  std::string reason = "resumed";
  auto reset_once = [&] {
    if (!reset_done) issue_reset(state);
    reset_done = true;
  };
  auto defer = [&](const std::vector<PredicateId>& targets, Duration d) {
    kb_.deferred().push_back(DeferredEmpowerment{targets, d});
    Json names = Json::array();
    for (auto p : targets) names.push_back(domain_.predicate_name(p));
    trace_.emit(event::kEmpowermentDeferred, Json{{"targets", names}});
  };

  for (std::size_t idx = 0; idx < handlings.size(); ++idx) {
    const auto& h = handlings[idx];
    Json names = Json::array();
    for (const auto& r : h.hazards) names.push_back(r.name);
    trace_.emit(event::kRecommendationChosen, Json{{"hazards", names},
                                                   {"synthetic", h.synthetic},
                                                   {"when", to_string(h.recommendation.when)},
                                                   {"duration", to_string(h.recommendation.duration)},
                                                   {"mode", to_string(h.recommendation.mode)}});
    for (const auto& r : h.hazards) kb_.learn(r);
    if (idx == 0) kb_.set_active_recommendation(h.recommendation);

    auto mh = min_hidden_ladder(state, goal, h.hazards, h.recommendation.mode);
    if (!mh) {
      if (idx == 0) {
        pathological_ = true;
        trace_.emit(event::kPathological, Json{{"reason", "no plan even with hidden actions"}});
        reason = "pathological";
        reset_once();
      }
      continue;
    }
    std::vector<PredicateId> pred_v;
    for (auto id : mh->used_hidden) {
      if (auto v = domain_.action(id).visibility) pred_v.push_back(*v);
    }
    std::sort(pred_v.begin(), pred_v.end());
    pred_v.erase(std::unique(pred_v.begin(), pred_v.end()), pred_v.end());
    kb_.add_internal_goals(pred_v);
    if (idx == 0) resume = mh->plan;
    if (pred_v.empty()) continue;

    if (h.recommendation.when == When::Later) {
      if (idx == 0) {
        reason = "deferred";
        reset_once();
      }
      defer(pred_v, h.recommendation.duration);
      continue;
    }
    if (!empower(state, pred_v, h.recommendation.duration, "empowerment")) {
      if (idx == 0) {
        reason = "empowerment-failed";
        reset_once();
      }
      defer(pred_v, h.recommendation.duration);
    }
  }

  if (reset_done) return {std::nullopt, reason};
  if (resume) {
    try {
      (void)path_of(domain_, *resume, state);
      emit_plan(*resume, to_string(kb_.active_recommendation()->mode), "min-hidden");
      return {std::move(resume), reason};
    } catch (const PreconditionViolation&) {
      // Empowerment moved the agent; plan afresh from where it stands.
    }
  }
  PlanRequest req{state, goal, visible(state), planning_hazards(&record), kb_.active_recommendation()};
  auto rp = plan_with_recommendation(domain_, req, config_.limits);
  if (rp.plan) {
    emit_plan(*rp.plan, to_string(rp.achieved), "recovery");
    return {std::move(rp.plan), "replanned"};
  }
  issue_reset(state);
  return {std::nullopt, "no-plan-after-empowerment"};
}

void Manager::drain_deferred(State& state) {
  auto& queue = kb_.deferred();
  while (!queue.empty()) {
    auto task = std::move(queue.front());
    queue.pop_front();
    std::vector<PredicateId> missing;
    for (auto p : task.targets) {
      if (!state.get(p)) missing.push_back(p);
    }
    if (missing.empty()) continue;
    if (!empower(state, missing, task.duration, "deferred-empowerment")) {
      trace_.emit(event::kPathological, Json{{"reason", "deferred empowerment failed"}});
      pathological_ = true;
    }
  }
}

void Manager::finish_mission(State& state) {
  const auto toggles = kb_.take_pending_toggles();
  if (!toggles.empty()) state = toggle_visibility(domain_, state, toggles, false, &trace_);
}

MissionResult Manager::run_mission(std::size_t mission_index, const Condition& goal, State& state) {
  Json goal_names = Json::array();
  for (const auto& l : goal.literals) goal_names.push_back(domain_.describe(l));
  trace_.emit(event::kGoalIssued, Json{{"mission", mission_index}, {"goal", goal_names}});

  auto abort = [&](std::string reason, bool reset) {
    if (reset) issue_reset(state);
    trace_.emit(event::kMissionAborted, Json{{"mission", mission_index}, {"reason", reason}});
    finish_mission(state);
    ++aborted_;
    return MissionResult{MissionStatus::Aborted, std::move(reason)};
  };

  auto rp = on_goal(state, goal);
  if (!rp.plan) return abort("no-plan", true);
  Plan plan = std::move(*rp.plan);

  for (std::size_t handled = 0;;) {
    auto res = execute(domain_, plan, state, hooks_, &trace_, &kb_, &goal);
    state = res.final_state;
    switch (res.outcome.kind) {
      case OutcomeKind::Completed:
        trace_.emit(event::kMissionCompleted, Json{{"mission", mission_index}});
        finish_mission(state);
        ++completed_;
        return MissionResult{MissionStatus::Completed, "completed"};
      case OutcomeKind::StepFailure:
        throw std::logic_error("step " + std::to_string(res.outcome.index) + " of mission " +
                               std::to_string(mission_index) + " failed without a hazard: " +
                               domain_.describe(res.outcome.mismatch));
      case OutcomeKind::HazardHalt:
        break;
    }
    if (++handled > config_.max_hazards_per_mission) return abort("hazard-limit", true);
    auto response = on_hazard(*res.outcome.record, state, goal);
    if (!response.resume) return abort(response.reason, false);
    plan = std::move(*response.resume);
  }
}

}  // namespace afp
