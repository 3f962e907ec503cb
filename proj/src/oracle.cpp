#include "afp/oracle.hpp"

#include <deque>
#include <string>

namespace afp::oracle {

std::size_t StateGraph::intern(const State& s) {
  auto [it, inserted] = index_.try_emplace(s, states_.size());
  if (inserted) states_.push_back(s);
  return it->second;
}

std::optional<std::size_t> StateGraph::find(const State& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void StateGraph::build_edges(const Domain& domain, const ActionSet& actions, std::span<const HazardRule> hazards,
                             bool grow, Limits limits) {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_.size() > limits.max_states) {
      throw std::length_error("oracle state graph exceeds " + std::to_string(limits.max_states) + " states");
    }
    const State s = states_[i];
    std::vector<std::size_t> out;
    for (auto id : actions.ids()) {
      const auto& a = domain.action(id);
      if (!applicable(s, a)) continue;
      const State t = overridden(s, a.effect);
      out.push_back(grow ? intern(t) : index_.at(t));
    }
    std::vector<std::size_t> hz;
    for (const auto& h : hazards) {
      if (!satisfies(s, h.source)) continue;
      const State t = overridden(s, h.consequence);
      hz.push_back(grow ? intern(t) : index_.at(t));
    }
    succ_.push_back(std::move(out));
    hazard_.push_back(std::move(hz));
  }
  pred_.assign(states_.size(), {});
  for (std::size_t i = 0; i < succ_.size(); ++i) {
    for (auto j : succ_[i]) pred_[j].push_back(i);
  }
}

StateGraph StateGraph::full(const Domain& domain, const ActionSet& actions, std::span<const HazardRule> hazards,
                            Limits limits) {
  const std::size_t n = domain.predicate_count();
  if (n > limits.full_enumeration_predicates) {
    throw std::length_error("full enumeration limited to " + std::to_string(limits.full_enumeration_predicates) +
                            " predicates, domain has " + std::to_string(n));
  }
  StateGraph g;
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t code = 0; code < count; ++code) {
    State s(n);
    for (std::uint32_t b = 0; b < n; ++b) s.set(PredicateId{b}, (code >> b) & 1u);
    g.intern(s);
  }
  g.build_edges(domain, actions, hazards, false, limits);
  return g;
}

StateGraph StateGraph::closure(const Domain& domain, const ActionSet& actions, std::span<const HazardRule> hazards,
                               std::span<const State> seeds, Limits limits) {
  StateGraph g;
  for (const auto& s : seeds) g.intern(s);
  g.build_edges(domain, actions, hazards, true, limits);
  return g;
}

StateGraph StateGraph::materialize(const Domain& domain, const ActionSet& actions,
                                   std::span<const HazardRule> hazards, std::span<const State> seeds,
                                   Limits limits) {
  if (domain.predicate_count() <= limits.full_enumeration_predicates) return full(domain, actions, hazards, limits);
  return closure(domain, actions, hazards, seeds, limits);
}

std::vector<bool> StateGraph::satisfying(const Condition& c) const {
  std::vector<bool> out(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) out[i] = satisfies(states_[i], c);
  return out;
}

std::vector<bool> StateGraph::backward(const std::vector<bool>& targets) const {
  std::vector<bool> out = targets;
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i]) q.push_back(i);
  }
  while (!q.empty()) {
    const auto i = q.front();
    q.pop_front();
    for (auto p : pred_[i]) {
      if (!out[p]) {
        out[p] = true;
        q.push_back(p);
      }
    }
  }
  return out;
}

std::vector<bool> StateGraph::forward(std::size_t from, const std::vector<bool>& allowed) const {
  std::vector<bool> out(states_.size(), false);
  if (!allowed[from]) return out;
  out[from] = true;
  std::deque<std::size_t> q{from};
  while (!q.empty()) {
    const auto i = q.front();
    q.pop_front();
    for (auto j : succ_[i]) {
      if (allowed[j] && !out[j]) {
        out[j] = true;
        q.push_back(j);
      }
    }
  }
  return out;
}

namespace {

bool intersects(const std::vector<bool>& a, const std::vector<bool>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) return true;
  }
  return false;
}

}  // namespace

SystemVerdict classify(const Domain& domain, std::span<const GroundMission> missions, const ActionSet& allowed,
                       std::span<const HazardRule> hazards, Limits limits) {
  std::vector<State> seeds;
  for (const auto& m : missions) seeds.insert(seeds.end(), m.starts.begin(), m.starts.end());
  const auto graph = StateGraph::materialize(domain, allowed, hazards, seeds, limits);
  const std::vector<bool> everything(graph.size(), true);

  // H as explicit pairs: source[i] iff some (s_i, t) in H.
  std::vector<bool> source(graph.size(), false);
  for (std::size_t i = 0; i < graph.size(); ++i) source[i] = !graph.hazard_consequences(i).empty();
  std::vector<bool> not_source(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) not_source[i] = !source[i];

  SystemVerdict v;
  for (std::size_t m = 0; m < missions.size(); ++m) {
    const auto goal_states = graph.satisfying(missions[m].goal);
    const auto has_plan = graph.backward(goal_states);  // states admitting a plan to g
    std::vector<bool> safe(graph.size(), true);         // no (s, t) with t lacking a plan
    for (std::size_t i = 0; i < graph.size(); ++i) {
      for (auto t : graph.hazard_consequences(i)) {
        if (!has_plan[t]) safe[i] = false;
      }
    }
    for (std::size_t k = 0; k < missions[m].starts.size(); ++k) {
      const auto c = *graph.find(missions[m].starts[k]);
      MissionEvidence e;
      e.mission = m;
      e.start = k;
      e.achievable = has_plan[c];
      e.has_resilient_plan = intersects(graph.forward(c, safe), goal_states);
      e.has_robust_plan = intersects(graph.forward(c, not_source), goal_states);
      std::vector<bool> on_plan_path = graph.forward(c, everything);
      for (std::size_t i = 0; i < graph.size(); ++i) on_plan_path[i] = on_plan_path[i] && has_plan[i];
      e.all_plans_resilient = e.achievable;
      for (std::size_t i = 0; i < graph.size(); ++i) {
        if (on_plan_path[i] && !safe[i]) {
          e.all_plans_resilient = false;
          e.unrecoverable_source = graph.state(i);
          break;
        }
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

PlanVerdict classify_plan(const Domain& domain, const Plan& plan, const State& start, const Condition& goal,
                          std::span<const HazardRule> hazards, const ActionSet& actions, Limits limits) {
  std::vector<State> path{start};
  for (auto id : plan.steps) path.push_back(apply(path.back(), domain.action(id)));
  const auto graph = StateGraph::materialize(domain, actions, hazards, path, limits);
  const auto has_plan = graph.backward(graph.satisfying(goal));

  PlanVerdict v;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto s = *graph.find(path[i]);
    const auto consequences = graph.hazard_consequences(s);
    for (std::size_t r = 0, hit = 0; r < hazards.size(); ++r) {
      if (!satisfies(path[i], hazards[r].source)) continue;
      const auto t = consequences[hit++];
      if (v.robust) {
        v.robust = false;
        v.first_hazard_source = HazardWitness{i, hazards[r].name, graph.state(t)};
      }
      if (!has_plan[t] && !v.fragile) {
        v.fragile = true;
        v.fragility = HazardWitness{i, hazards[r].name, graph.state(t)};
      }
    }
  }
  v.resilient = !v.fragile;
  return v;
}

std::optional<std::size_t> distance(const Domain& domain, const State& start, const Condition& goal,
                                    const ActionSet& actions, Limits limits) {
  const std::vector<State> seeds{start};
  const auto graph = StateGraph::materialize(domain, actions, {}, seeds, limits);
  const auto goal_states = graph.satisfying(goal);
  std::vector<std::size_t> dist(graph.size(), SIZE_MAX);
  const auto c = *graph.find(start);
  dist[c] = 0;
  std::deque<std::size_t> q{c};
  while (!q.empty()) {
    const auto i = q.front();
    q.pop_front();
    if (goal_states[i]) return dist[i];
    for (auto j : graph.successors(i)) {
      if (dist[j] == SIZE_MAX) {
        dist[j] = dist[i] + 1;
        q.push_back(j);
      }
    }
  }
  return std::nullopt;
}

}  // namespace afp::oracle
