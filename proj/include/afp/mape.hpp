#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "afp/domain.hpp"
#include "afp/planner.hpp"
#include "afp/trace.hpp"

namespace afp {

struct HazardRecord {
  State pre_state;  // e: reached by the previous action
  State observed;   // c
  std::size_t step = 0;
  std::vector<std::string> matched_rules;
};

/// Recommendations keyed by hazard class tag, with a fallback.
struct AnalyzerPolicy {
  Recommendation fallback{When::Now, Duration::All, PlanMode::Resilient};
  std::map<std::string, Recommendation> by_tag;

  /// First tag (in the given order) with an entry, else the fallback.
  Recommendation lookup(std::span<const std::string> tags) const;
};

struct DeferredEmpowerment {
  std::vector<PredicateId> targets;
  Duration duration = Duration::All;
};

class KnowledgeBase {
 public:
  KnowledgeBase(const Domain& domain, std::vector<HazardRule> catalog, AnalyzerPolicy policy);

  const Domain& domain() const { return *domain_; }
  const AnalyzerPolicy& policy() const { return policy_; }
  /// Rules the agent can recognize when a hazard is observed.
  std::span<const HazardRule> catalog() const { return catalog_; }
  /// Rules the agent currently plans against.
  std::span<const HazardRule> known_hazards() const { return known_; }
  void learn(const HazardRule& rule);
  const HazardRule* find_rule(std::string_view name) const;

  std::span<const HazardRecord> history() const { return history_; }
  HazardRecord& append(HazardRecord record);

  const std::set<PredicateId>& internal_goals() const { return internal_goals_; }
  void add_internal_goals(std::span<const PredicateId> predicates);

  /// Visibility predicates to lower when the current goal is achieved.
  const std::set<PredicateId>& pending_toggles() const { return pending_; }
  void stage_toggles(std::span<const PredicateId> predicates);
  std::vector<PredicateId> take_pending_toggles();

  std::deque<DeferredEmpowerment>& deferred() { return deferred_; }
  const std::optional<Recommendation>& active_recommendation() const { return active_; }
  void set_active_recommendation(Recommendation r) { active_ = r; }

 private:
  const Domain* domain_;
  std::vector<HazardRule> catalog_;
  std::vector<HazardRule> known_;
  AnalyzerPolicy policy_;
  std::vector<HazardRecord> history_;
  std::set<PredicateId> internal_goals_;
  std::set<PredicateId> pending_;
  std::deque<DeferredEmpowerment> deferred_;
  std::optional<Recommendation> active_;
};

/// Violated precondition literals of the next action, if any.
std::optional<std::vector<Literal>> monitor_detect(const State& observed, const Action& next_action);

/// Appends (e, c) to the history; a catalog rule matches when e satisfies its
/// source and c equals e overridden by its consequence.
HazardRecord& record_hazard(KnowledgeBase& kb, const State& e, const State& c, std::size_t step);

struct HazardHandling {
  std::vector<HazardRule> hazards;  // H'
  Recommendation recommendation;
  bool synthetic = false;  // built from (e, c) because no catalog rule matched
};

/// Matched rules closed under shared class tags, grouped by recommendation.
/// The group holding the first matched rule comes first.
std::vector<HazardHandling> analyze(const KnowledgeBase& kb, const HazardRecord& record);

/// Environment side of stepped execution: sees each applied action and may
/// inject a hazard before the next precondition check.
class StepHooks {
 public:
  struct Result {
    State state;
    bool injected = false;
  };
  virtual ~StepHooks() = default;
  virtual Result after_step(const Action& action, const State& pre, const State& post) = 0;
};

/// Hooks that never inject anything.
class NoHazards final : public StepHooks {
 public:
  Result after_step(const Action&, const State&, const State& post) override { return {post, false}; }
};

enum class OutcomeKind { Completed, HazardHalt, StepFailure };

struct ExecutionOutcome {
  OutcomeKind kind = OutcomeKind::Completed;
  std::size_t index = 0;                // first step not executed
  std::optional<HazardRecord> record;   // HazardHalt
  std::vector<Literal> mismatch;        // HazardHalt / StepFailure
};

struct ExecutionResult {
  ExecutionOutcome outcome;
  State final_state;
};

/// Runs plan from start. With a goal, a hazard after the last step is caught
/// by the goal check. Hazards are appended to kb's history when kb is given.
ExecutionResult execute(const Domain& domain, const Plan& plan, const State& start, StepHooks& hooks,
                        Trace* trace = nullptr, KnowledgeBase* kb = nullptr, const Condition* goal = nullptr);

class DisciplineViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The Manager may only lower visibility predicates; raising throws.
State toggle_visibility(const Domain& domain, const State& s, std::span<const PredicateId> predicates, bool value,
                        Trace* trace = nullptr);

struct ManagerConfig {
  SearchLimits limits;
  std::size_t max_hazards_per_mission = 32;
};

enum class MissionStatus { Completed, Aborted };

struct MissionResult {
  MissionStatus status = MissionStatus::Completed;
  std::string reason;
};

/// Autonomic Manager: orchestrates planning, execution, and hazard handling
/// around one mutable world state. All knowledge updates go through it.
class Manager {
 public:
  Manager(const Domain& domain, KnowledgeBase& kb, Trace& trace, StepHooks& hooks, ManagerConfig config = {});

  MissionResult run_mission(std::size_t mission_index, const Condition& goal, State& state);

  /// Plans for a newly issued goal over the current visible actions.
  RecommendedPlan on_goal(const State& state, const Condition& goal);

  struct HazardResponse {
    std::optional<Plan> resume;  // absent: mission was reset
    std::string reason;
  };
  HazardResponse on_hazard(const HazardRecord& record, State& state, const Condition& goal);

  /// Runs deferred empowerment tasks; called at mission boundaries.
  void drain_deferred(State& state);

  void issue_reset(State& state);
  bool pathological() const { return pathological_; }
  std::size_t missions_completed() const { return completed_; }
  std::size_t missions_aborted() const { return aborted_; }

 private:
  ActionSet visible(const State& s) const;
  ActionSet hidden(const State& s) const;
  ActionSet empowering_and_visible(const State& s) const;
  std::vector<HazardRule> planning_hazards(const HazardRecord* record) const;
  std::optional<MinHiddenPlan> min_hidden_ladder(const State& s, const Condition& goal,
                                                 std::span<const HazardRule> hazards, PlanMode mode);
  /// Plans and executes an empowering plan; returns the raised visibility predicates.
  std::optional<std::vector<PredicateId>> empower(State& state, std::span<const PredicateId> targets,
                                                  Duration duration, std::string_view purpose);
  void finish_mission(State& state);
  void emit_plan(const Plan& plan, std::string_view rung, std::string_view purpose);

  const Domain& domain_;
  KnowledgeBase& kb_;
  Trace& trace_;
  StepHooks& hooks_;
  ManagerConfig config_;
  bool pathological_ = false;
  std::size_t completed_ = 0;
  std::size_t aborted_ = 0;
};

}  // namespace afp
