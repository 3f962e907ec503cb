#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "afp/domain.hpp"

namespace afp {

struct Plan {
  std::vector<ActionId> steps;
  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

std::vector<std::string> step_names(const Domain& domain, const Plan& plan);

/// Thrown when a search exceeds its node-expansion cap. Never means "no plan".
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(std::size_t expansions)
      : std::runtime_error("search budget exhausted after " + std::to_string(expansions) + " expansions"),
        expansions_(expansions) {}
  std::size_t expansions() const { return expansions_; }

 private:
  std::size_t expansions_;
};

struct SearchLimits {
  std::size_t max_expansions = 1'000'000;
};

enum class When { Now, Later };
enum class Duration { Current, All };
enum class PlanMode { Robust, Resilient };

struct Recommendation {
  When when = When::Now;
  Duration duration = Duration::All;
  PlanMode mode = PlanMode::Resilient;
  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

std::string_view to_string(When w);
std::string_view to_string(Duration d);
std::string_view to_string(PlanMode m);

/// states[0] = start, states[i+1] = apply(states[i], steps[i]).
/// Throws PreconditionViolation carrying the failing step index.
std::vector<State> path_of(const Domain& domain, const Plan& plan, const State& start);

/// Memoized "is the goal reachable from t over these actions" oracle.
/// Not thread-safe; use one cache per search.
class RecoveryCache {
 public:
  RecoveryCache(const Domain& domain, const Condition& goal, const ActionSet& actions,
                SearchLimits limits = {});
  bool recoverable(const State& t);

 private:
  const Domain& domain_;
  Condition goal_;
  ActionSet actions_;
  SearchLimits limits_;
  std::unordered_map<State, bool, StateHash> known_;
};

/// True when some hazard rule matches s and its consequence cannot reach the goal.
bool unrecoverable_source(const State& s, std::span<const HazardRule> hazards, RecoveryCache& cache);

std::optional<Plan> find_plan(const Domain& domain, const State& start, const Condition& goal,
                              const ActionSet& actions, SearchLimits limits = {});

/// Shortest plan whose path (start included) avoids every hazard source state.
std::optional<Plan> find_robust_plan(const Domain& domain, const State& start, const Condition& goal,
                                     const ActionSet& actions, std::span<const HazardRule> hazards,
                                     SearchLimits limits = {});

/// Shortest plan whose every hazard source on the path has a recoverable consequence.
std::optional<Plan> find_resilient_plan(const Domain& domain, const State& start, const Condition& goal,
                                        const ActionSet& actions, std::span<const HazardRule> hazards,
                                        SearchLimits limits = {});

struct MinHiddenPlan {
  Plan plan;
  std::size_t hidden_steps = 0;
  std::vector<ActionId> used_hidden;  // distinct, by name
};

/// Lexicographic cost (hidden occurrences, length) over visible and hidden
/// actions. Robust mode avoids hazard sources; Resilient mode avoids sources
/// with unrecoverable consequences (recovery over visible and hidden).
std::optional<MinHiddenPlan> find_plan_min_hidden(const Domain& domain, const State& start,
                                                  const Condition& goal, const ActionSet& visible,
                                                  const ActionSet& hidden,
                                                  std::span<const HazardRule> hazards, PlanMode mode,
                                                  SearchLimits limits = {});

std::optional<Plan> achieve_predicates(const Domain& domain, const State& start,
                                       std::span<const PredicateId> targets, const ActionSet& actions,
                                       SearchLimits limits = {});

enum class AchievedMode { Robust, Resilient, Plain };
std::string_view to_string(AchievedMode m);

struct PlanRequest {
  State start;
  Condition goal;
  ActionSet actions;
  std::vector<HazardRule> hazards;
  std::optional<Recommendation> recommendation;
};

struct RecommendedPlan {
  std::optional<Plan> plan;
  AchievedMode achieved = AchievedMode::Plain;
};

/// Robust -> Resilient -> Plain ladder, entered at the recommended mode.
RecommendedPlan plan_with_recommendation(const Domain& domain, const PlanRequest& request,
                                         SearchLimits limits = {});

}  // namespace afp
