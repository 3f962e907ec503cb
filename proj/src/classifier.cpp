#include "afp/classifier.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

namespace afp {

PlanVerdict classify_plan(const Domain& domain, const Plan& plan, const State& start, const Condition& goal,
                          std::span<const HazardRule> hazards, const ActionSet& actions,
                          SearchLimits limits) {
  const auto path = path_of(domain, plan, start);
  RecoveryCache cache(domain, goal, actions, limits);
  PlanVerdict v;
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (const auto& rule : hazards) {
      auto t = hazard_consequence(rule, path[i]);
      if (!t) continue;
      if (v.robust) {
        v.robust = false;
        v.first_hazard_source = HazardWitness{i, rule.name, *t};
      }
      if (!v.fragile && !cache.recoverable(*t)) {
        v.fragile = true;
        v.fragility = HazardWitness{i, rule.name, *t};
      }
    }
  }
  v.resilient = !v.fragile;
  return v;
}

std::vector<GroundMission> ground_missions(const Domain& domain, const Environment& env,
                                           const State& snapshot, const ActionSet& allowed,
                                           SearchLimits limits) {
  std::vector<State> closure;
  std::unordered_map<State, std::size_t, StateHash> seen;
  auto visit = [&](State s) {
    if (seen.try_emplace(s, closure.size()).second) closure.push_back(std::move(s));
  };
  visit(snapshot);
  const bool has_reset = !domain.waypoints().empty();
  for (std::size_t i = 0; i < closure.size(); ++i) {
    if (i > limits.max_expansions) throw BudgetExhausted(i);
    const State current = closure[i];
    if (has_reset) visit(reset_target(current, domain));
    for (auto id : allowed.ids()) {
      const auto& a = domain.action(id);
      if (applicable(current, a)) visit(overridden(current, a.effect));
    }
  }

  std::vector<GroundMission> out;
  for (std::size_t m = 0; m < env.missions.size(); ++m) {
    GroundMission g;
    g.goal = env.missions[m].goal;
    std::optional<Condition> start = env.missions[m].start;
    if (!start && m > 0) start = env.missions[m - 1].goal;
    if (!start) {
      g.starts.push_back(snapshot);
    } else {
      for (const auto& s : closure) {
        if (satisfies(s, *start)) g.starts.push_back(s);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

// Forward closure from c, then backward propagation from goal states inside
// it. A state lies on some plan path iff it is in both sets.
bool every_plan_resilient(const Domain& domain, const State& c, const Condition& goal, const ActionSet& allowed,
                          std::span<const HazardRule> hazards, RecoveryCache& cache, const ClassifyLimits& limits,
                          std::optional<State>& witness) {
  std::vector<State> states{c};
  std::unordered_map<State, std::size_t, StateHash> index{{c, 0}};
  std::vector<std::vector<std::size_t>> preds(1);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states.size() > limits.max_states) throw BudgetExhausted(states.size());
    const State current = states[i];
    for (auto id : allowed.ids()) {
      const auto& a = domain.action(id);
      if (!applicable(current, a)) continue;
      State next = overridden(current, a.effect);
      auto [it, inserted] = index.try_emplace(next, states.size());
      if (inserted) {
        states.push_back(std::move(next));
        preds.emplace_back();
      }
      preds[it->second].push_back(i);
    }
  }

  std::vector<bool> coreach(states.size(), false);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (satisfies(states[i], goal)) {
      coreach[i] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop_front();
    for (auto p : preds[i]) {
      if (!coreach[p]) {
        coreach[p] = true;
        frontier.push_back(p);
      }
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (coreach[i] && unrecoverable_source(states[i], hazards, cache)) {
      witness = states[i];
      return false;
    }
  }
  return true;
}

}  // namespace

SystemVerdict classify_system(const Domain& domain, std::span<const GroundMission> missions,
                              const ActionSet& allowed, std::span<const HazardRule> hazards,
                              ClassifyLimits limits) {
  SystemVerdict v;
  for (std::size_t m = 0; m < missions.size(); ++m) {
    const auto& mission = missions[m];
    RecoveryCache cache(domain, mission.goal, allowed, limits.search);
    for (std::size_t k = 0; k < mission.starts.size(); ++k) {
      const State& c = mission.starts[k];
      MissionEvidence e;
      e.mission = m;
      e.start = k;
      e.achievable = find_plan(domain, c, mission.goal, allowed, limits.search).has_value();
      if (e.achievable) {
        e.has_resilient_plan =
            find_resilient_plan(domain, c, mission.goal, allowed, hazards, limits.search).has_value();
        e.has_robust_plan =
            e.has_resilient_plan &&
            find_robust_plan(domain, c, mission.goal, allowed, hazards, limits.search).has_value();
        e.all_plans_resilient =
            e.has_resilient_plan &&
            every_plan_resilient(domain, c, mission.goal, allowed, hazards, cache, limits, e.unrecoverable_source);
      }
      v.unachievable = v.unachievable || !e.achievable;
      v.fragile = v.fragile || !e.has_resilient_plan;
      v.robust = v.robust && e.has_robust_plan;
      v.resilient = v.resilient && e.all_plans_resilient;
      v.evidence.push_back(std::move(e));
    }
  }
  return v;
}

SystemVerdict classify_system(const Domain& domain, const Environment& env, const State& snapshot,
                              const ActionSet& allowed, std::span<const HazardRule> hazards,
                              ClassifyLimits limits) {
  const auto missions = ground_missions(domain, env, snapshot, allowed, limits.search);
  return classify_system(domain, missions, allowed, hazards, limits);
}

AntifragilityVerdict check_antifragile(std::span<const SystemVerdict> snapshots) {
  AntifragilityVerdict out;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    if (!snapshots[i].fragile) continue;
    // Take the first fragile snapshot that later recovers; otherwise report the first fragile one.
    if (!out.fragile_snapshot) out.fragile_snapshot = i;
    for (std::size_t j = i + 1; j < snapshots.size(); ++j) {
      if (snapshots[j].robust || snapshots[j].resilient) {
        out.antifragile = true;
        out.fragile_snapshot = i;
        out.recovered_snapshot = j;
        return out;
      }
    }
  }
  if (!out.fragile_snapshot) {
    out.antifragile = true;
    out.never_fragile = true;
  }
  return out;
}

std::uint64_t StrengthReport::total_plans() const {
  std::uint64_t total = 0;
  for (auto c : plan_counts) {
    total = (total > std::numeric_limits<std::uint64_t>::max() - c) ? std::numeric_limits<std::uint64_t>::max()
                                                                    : total + c;
  }
  return total;
}

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

class PlanCounter {
 public:
  PlanCounter(const Domain& d, const ActionSet& a, const Condition& g, std::size_t bound, SearchLimits limits)
      : domain_(d), actions_(a), goal_(g), bound_(bound), limits_(limits) {}

  // Number of action sequences of length <= k from s whose final state satisfies the goal.
  std::uint64_t count(const State& s, std::size_t k) {
    auto& row = memo_[s];
    if (row.empty()) row.assign(bound_ + 1, kUnknown);
    if (row[k] != kUnknown) return row[k];
    if (++evaluations_ > limits_.max_expansions) throw BudgetExhausted(evaluations_);
    std::uint64_t total = satisfies(s, goal_) ? 1 : 0;
    if (k > 0) {
      for (auto id : actions_.ids()) {
        const auto& a = domain_.action(id);
        if (applicable(s, a)) total = saturating_add(total, count(overridden(s, a.effect), k - 1));
      }
    }
    memo_[s][k] = total;  // rehash may have invalidated row
    return total;
  }

 private:
  static constexpr std::uint64_t kUnknown = std::numeric_limits<std::uint64_t>::max() - 1;
  const Domain& domain_;
  const ActionSet& actions_;
  const Condition& goal_;
  std::size_t bound_;
  SearchLimits limits_;
  std::size_t evaluations_ = 0;
  std::unordered_map<State, std::vector<std::uint64_t>, StateHash> memo_;
};

}  // namespace

StrengthReport strength_metric(const Domain& domain, const ActionSet& allowed,
                               std::span<const GroundMission> missions, std::size_t bound,
                               SearchLimits limits) {
  StrengthReport report;
  report.bound = bound;
  for (const auto& m : missions) {
    PlanCounter counter(domain, allowed, m.goal, bound, limits);
    std::uint64_t count = 0;
    bool achievable = !m.starts.empty();
    for (const auto& c : m.starts) {
      count = saturating_add(count, counter.count(c, bound));
      achievable = achievable && find_plan(domain, c, m.goal, allowed, limits).has_value();
    }
    report.plan_counts.push_back(count);
    if (achievable) ++report.achievable_missions;
  }
  return report;
}

}  // namespace afp
