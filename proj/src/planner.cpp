#include "afp/planner.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <tuple>

namespace afp {

std::vector<std::string> step_names(const Domain& domain, const Plan& plan) {
  std::vector<std::string> out;
  out.reserve(plan.steps.size());
  for (auto id : plan.steps) out.push_back(domain.action(id).name);
  return out;
}

std::string_view to_string(When w) { return w == When::Now ? "Now" : "Later"; }
std::string_view to_string(Duration d) { return d == Duration::Current ? "Current" : "All"; }
std::string_view to_string(PlanMode m) { return m == PlanMode::Robust ? "Robust" : "Resilient"; }

std::string_view to_string(AchievedMode m) {
  switch (m) {
    case AchievedMode::Robust: return "Robust";
    case AchievedMode::Resilient: return "Resilient";
    case AchievedMode::Plain: return "Plain";
  }
  return "Plain";
}

std::vector<State> path_of(const Domain& domain, const Plan& plan, const State& start) {
  std::vector<State> states{start};
  states.reserve(plan.size() + 1);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& action = domain.action(plan.steps[i]);
    auto failing = violated_literals(states.back(), action.precondition);
    if (!failing.empty()) throw PreconditionViolation(action.name, std::move(failing), i);
    states.push_back(overridden(states.back(), action.effect));
  }
  return states;
}

namespace {

struct SearchSpec {
  const Domain& domain;
  const State& start;
  const Condition& goal;
  const ActionSet& actions;
  const ActionSet* costly = nullptr;  // occurrences counted as the primary cost
  std::function<bool(const State&)> admissible;
  SearchLimits limits;
};

struct SearchResult {
  Plan plan;
  std::size_t costly_steps = 0;
};

// Uniform-cost search on (costly occurrences, length). Successors are
// generated in action-name order and the first discovery of a state at a given
// cost wins, which fixes a unique answer among equal-cost plans.
std::optional<SearchResult> search(const SearchSpec& spec) {
  if (spec.admissible && !spec.admissible(spec.start)) return std::nullopt;

  struct Node {
    State state;
    std::ptrdiff_t parent;
    ActionId via;
    std::size_t costly;
    std::size_t length;
  };
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;  // costly, length, node index

  std::vector<Node> nodes;
  std::unordered_map<State, std::size_t, StateHash> best;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
  std::vector<bool> flags;
  if (spec.costly) {
    flags.assign(spec.domain.actions().size(), false);
    for (auto id : spec.costly->ids()) flags[id.index] = true;
  }

  nodes.push_back(Node{spec.start, -1, ActionId{}, 0, 0});
  best.emplace(spec.start, 0);
  open.emplace(0, 0, 0);
  std::size_t expansions = 0;

  while (!open.empty()) {
    auto [cost, length, index] = open.top();
    open.pop();
    if (best.at(nodes[index].state) != index) continue;  // stale entry
    if (satisfies(nodes[index].state, spec.goal)) {
      SearchResult result;
      result.costly_steps = cost;
      for (auto i = static_cast<std::ptrdiff_t>(index); nodes[i].parent >= 0; i = nodes[i].parent) {
        result.plan.steps.push_back(nodes[i].via);
      }
      std::reverse(result.plan.steps.begin(), result.plan.steps.end());
      return result;
    }
    if (++expansions > spec.limits.max_expansions) throw BudgetExhausted(expansions - 1);

    const State current = nodes[index].state;
    for (auto id : spec.actions.ids()) {
      const auto& action = spec.domain.action(id);
      if (!applicable(current, action)) continue;
      State next = overridden(current, action.effect);
      const std::size_t next_cost = cost + (flags.empty() ? 0 : (flags[id.index] ? 1 : 0));
      const std::size_t next_length = length + 1;
      auto it = best.find(next);
      if (it != best.end()) {
        const auto& seen = nodes[it->second];
        if (std::tie(seen.costly, seen.length) <= std::tie(next_cost, next_length)) continue;
      }
      if (spec.admissible && !spec.admissible(next)) continue;
      nodes.push_back(Node{next, static_cast<std::ptrdiff_t>(index), id, next_cost, next_length});
      const std::size_t new_index = nodes.size() - 1;
      best.insert_or_assign(std::move(next), new_index);
      open.emplace(next_cost, next_length, new_index);
    }
  }
  return std::nullopt;
}

bool any_source(const State& s, std::span<const HazardRule> hazards) {
  return std::any_of(hazards.begin(), hazards.end(),
                     [&](const HazardRule& h) { return matches_source(h, s); });
}

}  // namespace

RecoveryCache::RecoveryCache(const Domain& domain, const Condition& goal, const ActionSet& actions,
                             SearchLimits limits)
    : domain_(domain), goal_(goal), actions_(actions), limits_(limits) {}

bool RecoveryCache::recoverable(const State& t) {
  if (auto it = known_.find(t); it != known_.end()) return it->second;

  // Breadth-first from t; states proven dead earlier are pruned, states proven
  // live end the search early.
  std::vector<State> visited{t};
  std::vector<std::ptrdiff_t> parent{-1};
  std::unordered_map<State, std::size_t, StateHash> index{{t, 0}};
  std::deque<std::size_t> frontier{0};
  std::size_t expansions = 0;
  std::optional<std::size_t> hit;

  while (!frontier.empty() && !hit) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    if (satisfies(visited[i], goal_)) {
      hit = i;
      break;
    }
    if (auto it = known_.find(visited[i]); i != 0 && it != known_.end() && it->second) {
      hit = i;
      break;
    }
    if (++expansions > limits_.max_expansions) throw BudgetExhausted(expansions - 1);
    const State current = visited[i];
    for (auto id : actions_.ids()) {
      const auto& action = domain_.action(id);
      if (!applicable(current, action)) continue;
      State next = overridden(current, action.effect);
      if (index.contains(next)) continue;
      if (auto it = known_.find(next); it != known_.end() && !it->second) continue;
      index.emplace(next, visited.size());
      visited.push_back(std::move(next));
      parent.push_back(static_cast<std::ptrdiff_t>(i));
      frontier.push_back(visited.size() - 1);
    }
  }

  if (hit) {
    for (auto i = static_cast<std::ptrdiff_t>(*hit); i >= 0; i = parent[i]) known_[visited[i]] = true;
    return true;
  }
  for (auto& s : visited) known_.emplace(std::move(s), false);
  return false;
}

bool unrecoverable_source(const State& s, std::span<const HazardRule> hazards, RecoveryCache& cache) {
  for (const auto& h : hazards) {
    if (auto t = hazard_consequence(h, s); t && !cache.recoverable(*t)) return true;
  }
  return false;
}

std::optional<Plan> find_plan(const Domain& domain, const State& start, const Condition& goal,
                              const ActionSet& actions, SearchLimits limits) {
  auto r = search(SearchSpec{domain, start, goal, actions, nullptr, {}, limits});
  if (!r) return std::nullopt;
  return std::move(r->plan);
}

std::optional<Plan> find_robust_plan(const Domain& domain, const State& start, const Condition& goal,
                                     const ActionSet& actions, std::span<const HazardRule> hazards,
                                     SearchLimits limits) {
  auto admissible = [&](const State& s) { return !any_source(s, hazards); };
  auto r = search(SearchSpec{domain, start, goal, actions, nullptr, admissible, limits});
  if (!r) return std::nullopt;
  return std::move(r->plan);
}

std::optional<Plan> find_resilient_plan(const Domain& domain, const State& start, const Condition& goal,
                                        const ActionSet& actions, std::span<const HazardRule> hazards,
                                        SearchLimits limits) {
  RecoveryCache cache(domain, goal, actions, limits);
  auto admissible = [&](const State& s) { return !unrecoverable_source(s, hazards, cache); };
  auto r = search(SearchSpec{domain, start, goal, actions, nullptr, admissible, limits});
  if (!r) return std::nullopt;
  return std::move(r->plan);
}

std::optional<MinHiddenPlan> find_plan_min_hidden(const Domain& domain, const State& start,
                                                  const Condition& goal, const ActionSet& visible,
                                                  const ActionSet& hidden,
                                                  std::span<const HazardRule> hazards, PlanMode mode,
                                                  SearchLimits limits) {
  for (auto id : hidden.ids()) {
    if (visible.contains(id)) throw std::invalid_argument("visible and hidden action sets overlap");
  }
  const ActionSet combined = visible.united(domain, hidden);
  RecoveryCache cache(domain, goal, combined, limits);
  std::function<bool(const State&)> admissible;
  if (mode == PlanMode::Robust) {
    admissible = [&](const State& s) { return !any_source(s, hazards); };
  } else {
    admissible = [&](const State& s) { return !unrecoverable_source(s, hazards, cache); };
  }
  auto r = search(SearchSpec{domain, start, goal, combined, &hidden, admissible, limits});
  if (!r) return std::nullopt;

  MinHiddenPlan out;
  out.hidden_steps = r->costly_steps;
  std::vector<ActionId> used;
  for (auto id : r->plan.steps) {
    if (hidden.contains(id)) used.push_back(id);
  }
  const ActionSet distinct(domain, std::move(used));
  out.used_hidden.assign(distinct.ids().begin(), distinct.ids().end());
  out.plan = std::move(r->plan);
  return out;
}

std::optional<Plan> achieve_predicates(const Domain& domain, const State& start,
                                       std::span<const PredicateId> targets, const ActionSet& actions,
                                       SearchLimits limits) {
  Condition goal;
  for (auto p : targets) goal.literals.push_back(Literal{p, true});
  normalize(goal.literals);
  return find_plan(domain, start, goal, actions, limits);
}

RecommendedPlan plan_with_recommendation(const Domain& domain, const PlanRequest& request,
                                         SearchLimits limits) {
  if (!request.recommendation) {
    return {find_plan(domain, request.start, request.goal, request.actions, limits), AchievedMode::Plain};
  }
  if (request.recommendation->mode == PlanMode::Robust) {
    if (auto p = find_robust_plan(domain, request.start, request.goal, request.actions, request.hazards, limits)) {
      return {std::move(p), AchievedMode::Robust};
    }
  }
  if (auto p = find_resilient_plan(domain, request.start, request.goal, request.actions, request.hazards, limits)) {
    return {std::move(p), AchievedMode::Resilient};
  }
  if (auto p = find_plan(domain, request.start, request.goal, request.actions, limits)) {
    return {std::move(p), AchievedMode::Plain};
  }
  return {std::nullopt, AchievedMode::Plain};
}

}  // namespace afp
