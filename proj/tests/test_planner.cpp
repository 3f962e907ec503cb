#include <fstream>
#include <functional>
#include <random>

#include "afp/gridbot.hpp"
#include "afp/oracle.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace afp;
using afp::testing::make_state;
using afp::testing::plan_of;

namespace {

const nlohmann::json& expected() {
  static const nlohmann::json j =
      nlohmann::json::parse(afp::testing::read_file(afp::testing::fixture_path("tests/oracle/expected.json")));
  return j;
}

std::vector<std::string> frozen(const char* section, const char* key) {
  return expected().at(section).at(key).get<std::vector<std::string>>();
}

const Scenario& case_study() {
  static const Scenario sc = gridbot::build(gridbot::case_study_spec());
  return sc;
}

const Scenario& mini() {
  static const Scenario sc = gridbot::build_mini(false);
  return sc;
}

Condition goal_of(const Domain& d, std::initializer_list<std::string_view> names) {
  Condition c;
  for (auto n : names) c.literals.push_back(Literal{d.predicate(n), true});
  normalize(c.literals);
  return c;
}

ActionSet visible_at(const Scenario& sc, const State& s) {
  return ActionSet(sc.domain, partition_actions(s, sc.domain).visible);
}

std::vector<HazardRule> tagged(const Scenario& sc, std::string_view tag) {
  std::vector<HazardRule> out;
  for (const auto& h : sc.env.hazards) {
    if (std::find(h.tags.begin(), h.tags.end(), tag) != h.tags.end()) out.push_back(h);
  }
  return out;
}

bool is_source(const State& s, std::span<const HazardRule> hazards) {
  return std::any_of(hazards.begin(), hazards.end(), [&](const HazardRule& h) { return matches_source(h, s); });
}

// Lexicographically first (by action name) plan of minimal length up to max_len
// whose path satisfies `ok` at every state, by exhaustive enumeration.
std::optional<Plan> brute_force(const Domain& d, const State& start, const Condition& goal, const ActionSet& actions,
                                std::size_t max_len, const std::function<bool(const State&)>& ok) {
  if (!ok(start)) return std::nullopt;
  Plan current;
  std::function<bool(const State&, std::size_t)> dfs = [&](const State& s, std::size_t left) -> bool {
    if (left == 0) return satisfies(s, goal);
    for (auto id : actions.ids()) {
      const auto& a = d.action(id);
      if (!applicable(s, a)) continue;
      const State t = apply(s, a);
      if (!ok(t)) continue;
      current.steps.push_back(id);
      if (dfs(t, left - 1)) return true;
      current.steps.pop_back();
    }
    return false;
  };
  for (std::size_t k = 0; k <= max_len; ++k) {
    current.steps.clear();
    if (dfs(start, k)) return current;
  }
  return std::nullopt;
}

bool reaches(const Domain& d, const State& from, const Condition& goal, const ActionSet& actions) {
  return oracle::distance(d, from, goal, actions).has_value();
}

}  // namespace

TEST_CASE("path_of") {
  const Domain& d = mini().domain;
  const State s0 = mini().env.initial_state;
  SUBCASE("empty plan") { CHECK(path_of(d, Plan{}, s0) == std::vector<State>{s0}); }
  SUBCASE("valid plan") {
    const auto path = path_of(d, plan_of(d, {"MOVE_E_from_0_0", "MOVE_E_from_1_0"}), s0);
    REQUIRE(path.size() == 3);
    CHECK(path.back() == make_state(d, {"at_2_0", "heading_E", "vis_move"}));
  }
  SUBCASE("inapplicable step reports its index") {
    try {
      (void)path_of(d, plan_of(d, {"MOVE_E_from_0_0", "MOVE_N_from_1_0"}), s0);
      FAIL("expected PreconditionViolation");
    } catch (const PreconditionViolation& e) {
      CHECK(e.step() == std::optional<std::size_t>(1));
      CHECK(e.action() == "MOVE_N_from_1_0");
    }
  }
}

TEST_CASE("find_plan: frozen plain plans") {
  SUBCASE("mini grid") {
    const auto& sc = mini();
    const auto p = find_plan(sc.domain, sc.env.initial_state, goal_of(sc.domain, {"at_2_0"}),
                             visible_at(sc, sc.env.initial_state));
    REQUIRE(p);
    CHECK(step_names(sc.domain, *p) == frozen("mini", "plain_0_0_to_2_0"));
  }
  SUBCASE("case study mission 0") {
    const auto& sc = case_study();
    const auto p = find_plan(sc.domain, sc.env.initial_state, goal_of(sc.domain, {"at_5_2"}),
                             visible_at(sc, sc.env.initial_state));
    REQUIRE(p);
    CHECK(step_names(sc.domain, *p) == frozen("case_study", "mission0_plain"));
  }
  SUBCASE("goal already satisfied") {
    const auto& sc = mini();
    const auto p = find_plan(sc.domain, sc.env.initial_state, goal_of(sc.domain, {"at_0_0"}),
                             visible_at(sc, sc.env.initial_state));
    REQUIRE(p);
    CHECK(p->empty());
  }
  SUBCASE("unreachable goal") {
    const auto& sc = mini();
    // Without small actions, nothing reaches a fine subcell.
    const auto p = find_plan(sc.domain, sc.env.initial_state, goal_of(sc.domain, {"fat_2_0"}),
                             visible_at(sc, sc.env.initial_state));
    CHECK_FALSE(p);
  }
}

TEST_CASE("find_robust_plan: frozen mini detour and source-free path") {
  const auto& sc = mini();
  const auto p = find_robust_plan(sc.domain, sc.env.initial_state, goal_of(sc.domain, {"at_2_0"}),
                                  visible_at(sc, sc.env.initial_state), sc.env.hazards);
  REQUIRE(p);
  CHECK(step_names(sc.domain, *p) == frozen("mini", "robust_0_0_to_2_0"));
  for (const auto& s : path_of(sc.domain, *p, sc.env.initial_state)) CHECK_FALSE(is_source(s, sc.env.hazards));
}

TEST_CASE("find_robust_plan: start on a source has no plan") {
  const auto& sc = mini();
  const State on_spill = make_state(sc.domain, {"at_1_0", "heading_E", "vis_move"});
  CHECK_FALSE(find_robust_plan(sc.domain, on_spill, goal_of(sc.domain, {"at_2_0"}), visible_at(sc, on_spill),
                               sc.env.hazards));
}

TEST_CASE("robust equals plain without hazards; resilient equals plain with only recoverable hazards") {
  const auto& sc = mini();
  const auto goal = goal_of(sc.domain, {"at_2_2"});
  const auto acts = ActionSet::all(sc.domain);
  const auto plain = find_plan(sc.domain, sc.env.initial_state, goal, acts);
  CHECK(find_robust_plan(sc.domain, sc.env.initial_state, goal, acts, {}) == plain);
  CHECK(find_resilient_plan(sc.domain, sc.env.initial_state, goal, acts, {}) == plain);

  // Over all actions every spill consequence can walk out on the fine grid.
  const auto res = find_resilient_plan(sc.domain, sc.env.initial_state, goal, acts, sc.env.hazards);
  CHECK(res == plain);
}

TEST_CASE("find_plan_min_hidden: frozen case-study recovery plan") {
  const auto& sc = case_study();
  const auto& d = sc.domain;
  const State c = make_state(d, {"at_2_0", "fat_4_0", "heading_E", "inSpill", "vis_move"});
  const auto part = partition_actions(c, d);
  const auto slippery = tagged(sc, "slippery");
  const auto r = find_plan_min_hidden(d, c, goal_of(d, {"at_5_2"}), ActionSet(d, part.visible),
                                      ActionSet(d, part.hidden), slippery, PlanMode::Robust);
  REQUIRE(r);
  CHECK(step_names(d, r->plan) == frozen("case_study", "min_hidden_robust"));
  CHECK(r->hidden_steps == expected()["case_study"]["min_hidden_hidden_steps"].get<std::size_t>());
  std::vector<std::string> used;
  for (auto id : r->used_hidden) used.push_back(d.action(id).name);
  CHECK(used == std::vector<std::string>{"smallMOVE_E_from_f4_0", "smallMOVE_E_from_f5_0"});
}

TEST_CASE("find_plan_min_hidden rejects overlapping sets and prefers visible-only plans") {
  const auto& sc = mini();
  const auto& d = sc.domain;
  const auto part = partition_actions(sc.env.initial_state, d);
  const ActionSet vis(d, part.visible);
  CHECK_THROWS_AS(find_plan_min_hidden(d, sc.env.initial_state, goal_of(d, {"at_2_0"}), vis, vis, {},
                                       PlanMode::Robust),
                  std::invalid_argument);
  const auto r = find_plan_min_hidden(d, sc.env.initial_state, goal_of(d, {"at_2_0"}), vis, ActionSet(d, part.hidden),
                                      sc.env.hazards, PlanMode::Robust);
  REQUIRE(r);
  CHECK(r->hidden_steps == 0);
  CHECK(step_names(d, r->plan) == frozen("mini", "robust_0_0_to_2_0"));
}

TEST_CASE("achieve_predicates") {
  const auto& sc = case_study();
  const auto& d = sc.domain;
  const auto part = partition_actions(sc.env.initial_state, d);
  const auto allowed = ActionSet(d, part.visible).united(d, ActionSet(d, part.empowering));
  const std::vector<PredicateId> targets{d.predicate("vis_smallTURN"), d.predicate("vis_smallMOVE")};
  const auto p = achieve_predicates(d, sc.env.initial_state, targets, allowed);
  REQUIRE(p);
  CHECK(step_names(d, *p) == frozen("case_study", "achieve_small"));
  CHECK(achieve_predicates(d, sc.env.initial_state, {}, allowed) == Plan{});
  // Operational actions alone never raise a visibility predicate.
  CHECK_FALSE(achieve_predicates(d, sc.env.initial_state, targets, ActionSet(d, part.visible)));
}

TEST_CASE("case study mission 1 robust over small actions") {
  const auto& sc = case_study();
  const auto& d = sc.domain;
  const State s = make_state(d, {"at_5_2", "heading_N", "vis_move", "vis_smallMOVE", "vis_smallTURN",
                                 "sensorsCalibrated"});
  const auto p = find_robust_plan(d, s, goal_of(d, {"at_0_4"}), visible_at(sc, s), tagged(sc, "slippery"));
  REQUIRE(p);
  CHECK(step_names(d, *p) == frozen("case_study", "mission1_robust_small"));
}

TEST_CASE("plan_with_recommendation ladder") {
  const auto& sc = mini();
  const auto& d = sc.domain;
  const State s0 = sc.env.initial_state;
  const auto goal = goal_of(d, {"at_2_0"});
  const Recommendation robust{When::Now, Duration::All, PlanMode::Robust};
  const Recommendation resilient{When::Now, Duration::All, PlanMode::Resilient};

  SUBCASE("robust available") {
    const auto r = plan_with_recommendation(d, PlanRequest{s0, goal, visible_at(sc, s0), sc.env.hazards, robust});
    CHECK(r.achieved == AchievedMode::Robust);
    REQUIRE(r.plan);
    CHECK(step_names(d, *r.plan) == frozen("mini", "robust_0_0_to_2_0"));
  }
  SUBCASE("no recommendation plans plainly") {
    const auto r = plan_with_recommendation(d, PlanRequest{s0, goal, visible_at(sc, s0), sc.env.hazards, {}});
    CHECK(r.achieved == AchievedMode::Plain);
    REQUIRE(r.plan);
    CHECK(r.plan->size() == 2);
  }
  SUBCASE("resilient recommendation skips the robust rung") {
    // The two-step plan crosses the spill; its consequence is dead over visible moves.
    const auto r = plan_with_recommendation(d, PlanRequest{s0, goal, visible_at(sc, s0), sc.env.hazards, resilient});
    CHECK(r.achieved == AchievedMode::Resilient);
    REQUIRE(r.plan);
    CHECK(step_names(d, *r.plan) == frozen("mini", "robust_0_0_to_2_0"));
  }

  const Scenario wall = gridbot::build_mini(true);
  const auto& wd = wall.domain;
  SUBCASE("robust impossible, resilient possible") {
    std::vector<ActionId> ids;
    for (auto id : wd.actions_by_name()) {
      if (wd.action(id).name.find("_enter_") == std::string::npos) ids.push_back(id);
    }
    const auto r = plan_with_recommendation(
        wd, PlanRequest{wall.env.initial_state, goal_of(wd, {"at_2_0"}), ActionSet(wd, ids), wall.env.hazards, robust});
    CHECK(r.achieved == AchievedMode::Resilient);
    REQUIRE(r.plan);
    CHECK_FALSE(find_robust_plan(wd, wall.env.initial_state, goal_of(wd, {"at_2_0"}), ActionSet(wd, ids),
                                 wall.env.hazards));
  }
  SUBCASE("only a plain plan exists") {
    const State w0 = wall.env.initial_state;
    const auto r = plan_with_recommendation(
        wd, PlanRequest{w0, goal_of(wd, {"at_2_0"}), visible_at(wall, w0), wall.env.hazards, robust});
    CHECK(r.achieved == AchievedMode::Plain);
    CHECK(r.plan);
  }
  SUBCASE("no plan at all") {
    const auto r = plan_with_recommendation(
        d, PlanRequest{s0, goal_of(d, {"fat_2_0"}), visible_at(sc, s0), sc.env.hazards, robust});
    CHECK_FALSE(r.plan);
  }
}

TEST_CASE("BudgetExhausted is raised instead of a false negative") {
  const auto& sc = case_study();
  SearchLimits tiny{5};
  CHECK_THROWS_AS(find_plan(sc.domain, sc.env.initial_state, goal_of(sc.domain, {"at_0_4"}),
                            visible_at(sc, sc.env.initial_state), tiny),
                  BudgetExhausted);
  RecoveryCache cache(sc.domain, goal_of(sc.domain, {"at_0_4"}), ActionSet::all(sc.domain), tiny);
  CHECK_THROWS_AS(cache.recoverable(sc.env.initial_state), BudgetExhausted);
}

TEST_CASE("RecoveryCache answers consistently with the oracle") {
  const auto& sc = mini();
  const auto acts = visible_at(sc, sc.env.initial_state);
  const auto goal = goal_of(sc.domain, {"at_2_2"});
  RecoveryCache cache(sc.domain, goal, acts);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const State s = afp::testing::random_state(sc.domain, rng);
    CHECK(cache.recoverable(s) == reaches(sc.domain, s, goal, acts));
    CHECK(cache.recoverable(s) == reaches(sc.domain, s, goal, acts));
  }
}

TEST_CASE("random domains: planners are optimal and lexicographically first") {
  constexpr std::size_t kMaxLen = 4;
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto rc = afp::testing::random_case(seed, {8, 7, 3, 3});
    const Domain& d = rc.domain;
    const auto acts = ActionSet::all(d);
    const auto& hz = rc.env.hazards;
    for (const auto& m : rc.missions) {
      const State& s = m.starts.front();
      const auto always = [](const State&) { return true; };
      const auto robust_ok = [&](const State& t) { return !is_source(t, hz); };
      const auto resilient_ok = [&](const State& t) {
        for (const auto& h : hz) {
          if (auto c = hazard_consequence(h, t); c && !reaches(d, *c, m.goal, acts)) return false;
        }
        return true;
      };
      const std::pair<std::optional<Plan>, std::function<bool(const State&)>> cases[] = {
          {find_plan(d, s, m.goal, acts), always},
          {find_robust_plan(d, s, m.goal, acts, hz), robust_ok},
          {find_resilient_plan(d, s, m.goal, acts, hz), resilient_ok},
      };
      for (const auto& [plan, ok] : cases) {
        const auto bf = brute_force(d, s, m.goal, acts, kMaxLen, ok);
        if (plan && plan->size() <= kMaxLen) {
          REQUIRE(bf);
          CHECK(*bf == *plan);
          ++compared;
        } else {
          CHECK_FALSE(bf);
        }
      }
      const auto dist = oracle::distance(d, s, m.goal, acts);
      const auto plain = find_plan(d, s, m.goal, acts);
      CHECK(dist.has_value() == plain.has_value());
      if (plain) CHECK(*dist == plain->size());
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("random domains: min-hidden cost is optimal over short plans") {
  for (std::uint64_t seed = 200; seed < 260; ++seed) {
    const auto rc = afp::testing::random_case(seed, {8, 7, 3, 2});
    const Domain& d = rc.domain;
    const auto& m = rc.missions.front();
    const State& s = m.starts.front();
    const auto part = partition_actions(s, d);
    const ActionSet vis(d, part.visible), hid(d, part.hidden);
    const auto r = find_plan_min_hidden(d, s, m.goal, vis, hid, rc.env.hazards, PlanMode::Robust);
    const auto combined = vis.united(d, hid);

    std::optional<std::pair<std::size_t, std::size_t>> best;
    Plan current;
    std::function<void(const State&, std::size_t, std::size_t)> dfs = [&](const State& t, std::size_t h,
                                                                           std::size_t depth) {
      if (is_source(t, rc.env.hazards)) return;
      if (satisfies(t, m.goal)) {
        const std::pair<std::size_t, std::size_t> cost{h, depth};
        if (!best || cost < *best) best = cost;
      }
      if (depth == 5) return;
      for (auto id : combined.ids()) {
        if (!applicable(t, d.action(id))) continue;
        dfs(apply(t, d.action(id)), h + (hid.contains(id) ? 1 : 0), depth + 1);
      }
    };
    dfs(s, 0, 0);
    if (!r) {
      CHECK_FALSE(best);
      continue;
    }
    const std::pair<std::size_t, std::size_t> got{r->hidden_steps, r->plan.size()};
    std::size_t counted = 0;
    for (auto id : r->plan.steps) counted += hid.contains(id) ? 1 : 0;
    CHECK(counted == r->hidden_steps);
    if (best) CHECK(got <= *best);
    if (r->plan.size() <= 5) CHECK(best == got);
  }
}

TEST_CASE("planning is deterministic") {
  const auto& sc = case_study();
  const auto& d = sc.domain;
  const State c = make_state(d, {"at_2_0", "fat_4_0", "heading_E", "inSpill", "vis_move"});
  const auto part = partition_actions(c, d);
  const auto first = find_plan_min_hidden(d, c, goal_of(d, {"at_0_4"}), ActionSet(d, part.visible),
                                          ActionSet(d, part.hidden), sc.env.hazards, PlanMode::Resilient);
  for (int i = 0; i < 3; ++i) {
    const auto again = find_plan_min_hidden(d, c, goal_of(d, {"at_0_4"}), ActionSet(d, part.visible),
                                            ActionSet(d, part.hidden), sc.env.hazards, PlanMode::Resilient);
    REQUIRE(again);
    CHECK(again->plan == first->plan);
  }
}
