#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifndef AFP_SOURCE_DIR
#define AFP_SOURCE_DIR "."
#endif

namespace afp::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::vector<Literal> literals_over(const std::vector<PredicateId>& pool, std::size_t count, std::mt19937_64& rng) {
  std::vector<PredicateId> chosen = pool;
  std::shuffle(chosen.begin(), chosen.end(), rng);
  chosen.resize(std::min(count, chosen.size()));
  std::vector<Literal> out;
  for (auto p : chosen) out.push_back(Literal{p, coin(rng)});
  normalize(out);
  return out;
}

Condition full_condition(const State& s) {
  Condition c;
  for (std::uint32_t i = 0; i < s.size(); ++i) c.literals.push_back(Literal{PredicateId{i}, s.get(PredicateId{i})});
  return c;
}

}  // namespace

State random_state(const Domain& d, std::mt19937_64& rng) {
  State s = d.make_state();
  for (std::uint32_t i = 0; i < d.predicate_count(); ++i) s.set(PredicateId{i}, coin(rng));
  return s;
}

RandomCase random_case(std::uint64_t seed, RandomDomainSpec spec) {
  std::mt19937_64 rng(seed);
  RandomCase rc;
  Domain& d = rc.domain;
  const std::size_t n = pick(rng, 3, spec.max_predicates);
  const std::size_t n_vis = n >= 6 ? pick(rng, 1, 2) : 1;
  std::vector<PredicateId> ordinary, vis, all;
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_vis = i >= n - n_vis;
    const auto p = d.add_predicate((is_vis ? "v" : "p") + std::to_string(is_vis ? i - (n - n_vis) : i));
    (is_vis ? vis : ordinary).push_back(p);
    all.push_back(p);
  }

  const std::size_t n_actions = pick(rng, 1, spec.max_actions);
  for (std::size_t i = 0; i < n_actions; ++i) {
    Action a;
    a.name = "a" + std::to_string(i);
    if (coin(rng, 0.2)) {
      a.kind = ActionKind::Empowering;
      a.precondition.literals = literals_over(all, pick(rng, 0, 2), rng);
      a.effect.literals = literals_over(ordinary, pick(rng, 0, 1), rng);
      a.effect.literals.push_back(Literal{vis[pick(rng, 0, vis.size() - 1)], true});
    } else {
      a.kind = ActionKind::Operational;
      a.visibility = vis[pick(rng, 0, vis.size() - 1)];
      a.precondition.literals = literals_over(all, pick(rng, 0, 3), rng);
      a.effect.literals = literals_over(ordinary, pick(rng, 1, 3), rng);
      if (coin(rng, 0.1)) a.effect.literals.push_back(Literal{vis[0], false});
    }
    normalize(a.effect.literals);
    d.add_action(std::move(a));
  }

  d.set_reset_projection(ordinary);
  State way = random_state(d, rng);
  Condition wp;
  for (auto p : ordinary) wp.literals.push_back(Literal{p, way.get(p)});
  d.add_waypoint(wp);

  Environment& env = rc.env;
  env.initial_state = random_state(d, rng);
  env.goal_patterns.push_back(d.waypoints().front());
  const std::size_t n_hazards = pick(rng, 0, spec.max_hazards);
  for (std::size_t i = 0; i < n_hazards; ++i) {
    HazardRule h;
    h.name = "h" + std::to_string(i);
    h.source.literals = literals_over(all, pick(rng, 1, 3), rng);
    h.consequence.literals = literals_over(all, pick(rng, 1, 2), rng);
    h.tags = {coin(rng) ? "alpha" : "beta"};
    env.hazards.push_back(std::move(h));
    env.schedule.push_back({});
  }

  const std::size_t n_missions = pick(rng, 1, spec.max_missions);
  for (std::size_t m = 0; m < n_missions; ++m) {
    GroundMission g;
    g.goal.literals = literals_over(ordinary, pick(rng, 1, 2), rng);
    g.starts.push_back(m == 0 ? env.initial_state : random_state(d, rng));
    if (coin(rng, 0.3)) g.starts.push_back(random_state(d, rng));
    env.missions.push_back(Mission{full_condition(g.starts.front()), g.goal});
    rc.missions.push_back(std::move(g));
  }

  if (auto vs = validate_domain(d, env); !vs.empty()) {
    throw std::logic_error("random domain " + std::to_string(seed) + " invalid: " + vs.front().message);
  }
  return rc;
}

State make_state(const Domain& d, std::initializer_list<std::string_view> true_predicates) {
  State s = d.make_state();
  for (auto n : true_predicates) s.set(d.predicate(n), true);
  return s;
}

Plan plan_of(const Domain& d, std::initializer_list<std::string_view> names) {
  Plan p;
  for (auto n : names) p.steps.push_back(d.action_id(n));
  return p;
}

Plan plan_of(const Domain& d, const std::vector<std::string>& names) {
  Plan p;
  for (const auto& n : names) p.steps.push_back(d.action_id(n));
  return p;
}

std::string fixture_path(const std::string& name) { return std::string(AFP_SOURCE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario load_fixture(const std::string& name) { return load_scenario_file(fixture_path(name)); }

}  // namespace afp::testing
