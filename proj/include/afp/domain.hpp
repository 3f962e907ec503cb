#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace afp {

struct PredicateId {
  std::uint32_t index = 0;
  friend auto operator<=>(const PredicateId&, const PredicateId&) = default;
};

struct ActionId {
  std::uint32_t index = 0;
  friend auto operator<=>(const ActionId&, const ActionId&) = default;
};

/// Raised when a domain refers to predicates or waypoints it does not declare.
class DomainIntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Total boolean valuation over a domain's predicates.
class State {
 public:
  State() = default;
  explicit State(std::size_t predicate_count);

  std::size_t size() const { return size_; }
  bool get(PredicateId p) const;
  void set(PredicateId p, bool value);

  /// Stable 64-bit FNV-1a digest of the valuation, independent of platform.
  std::uint64_t digest() const;

  std::size_t hash() const;
  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct Literal {
  PredicateId predicate;
  bool value = true;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of signed literals.
struct Condition {
  std::vector<Literal> literals;
  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Override assignment: each literal forces its predicate to the given value.
struct Effect {
  std::vector<Literal> literals;
  friend bool operator==(const Effect&, const Effect&) = default;
};

/// Sorts literals by predicate and removes exact duplicates.
void normalize(std::vector<Literal>& literals);

bool holds(const State& s, const Literal& l);
bool satisfies(const State& s, const Condition& c);
std::vector<Literal> violated_literals(const State& s, const Condition& c);
State overridden(const State& s, const Effect& e);

enum class ActionKind { Empowering, Operational };

struct Action {
  std::string name;
  ActionKind kind = ActionKind::Operational;
  std::optional<PredicateId> visibility;  // Operational only
  Condition precondition;
  Effect effect;
};

struct HazardRule {
  std::string name;
  Condition source;
  Effect consequence;
  std::vector<std::string> tags;
  friend bool operator==(const HazardRule&, const HazardRule&) = default;
};

/// Raised by apply() when the action's precondition fails in the state.
class PreconditionViolation : public std::runtime_error {
 public:
  PreconditionViolation(std::string action, std::vector<Literal> failing,
                        std::optional<std::size_t> step = std::nullopt);
  const std::string& action() const { return action_; }
  const std::vector<Literal>& failing() const { return failing_; }
  std::optional<std::size_t> step() const { return step_; }

 private:
  std::string action_;
  std::vector<Literal> failing_;
  std::optional<std::size_t> step_;
};

class Domain {
 public:
  PredicateId add_predicate(std::string name);
  ActionId add_action(Action action);

  /// Reset moves every predicate in the projection to the nearest waypoint's
  /// value (Hamming distance over the projection, ties by declaration order).
  void set_reset_projection(std::vector<PredicateId> projection);
  /// Adds a waypoint; projection predicates it does not mention become false.
  void add_waypoint(const Condition& partial);

  std::size_t predicate_count() const { return predicate_names_.size(); }
  const std::string& predicate_name(PredicateId p) const;
  std::optional<PredicateId> find_predicate(std::string_view name) const;
  PredicateId predicate(std::string_view name) const;

  std::span<const Action> actions() const { return actions_; }
  const Action& action(ActionId id) const;
  std::optional<ActionId> find_action(std::string_view name) const;
  ActionId action_id(std::string_view name) const;

  /// Every action, ordered by name; search expands successors in this order.
  std::span<const ActionId> actions_by_name() const { return by_name_; }
  std::size_t name_rank(ActionId id) const { return name_rank_.at(id.index); }

  std::span<const Condition> waypoints() const { return waypoints_; }
  std::span<const PredicateId> reset_projection() const { return projection_; }

  /// Predicates used as the visibility predicate of some Operational action.
  std::vector<PredicateId> visibility_predicates() const;
  bool is_visibility_predicate(PredicateId p) const;

  State make_state() const { return State(predicate_count()); }
  std::string describe(const Literal& l) const;
  std::string describe(std::span<const Literal> ls) const;
  /// Names of the true predicates, in declaration order.
  std::vector<std::string> true_predicates(const State& s) const;

 private:
  void rebuild_name_order();

  std::vector<std::string> predicate_names_;
  std::unordered_map<std::string, PredicateId> predicate_index_;
  std::vector<Action> actions_;
  std::unordered_map<std::string, ActionId> action_index_;
  std::vector<ActionId> by_name_;
  std::vector<std::size_t> name_rank_;
  std::vector<Condition> waypoints_;
  std::vector<PredicateId> projection_;
};

/// Action subset, kept sorted by action name.
class ActionSet {
 public:
  ActionSet() = default;
  ActionSet(const Domain& domain, std::vector<ActionId> ids);
  static ActionSet all(const Domain& domain);

  std::span<const ActionId> ids() const { return ids_; }
  bool contains(ActionId id) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  ActionSet united(const Domain& domain, const ActionSet& other) const;
  friend bool operator==(const ActionSet&, const ActionSet&) = default;

 private:
  std::vector<ActionId> ids_;
};

enum class TriggerKind { Always, NthMatch, Probability };

struct HazardSchedule {
  TriggerKind trigger = TriggerKind::Always;
  std::uint64_t nth = 1;
  double probability = 1.0;
  friend bool operator==(const HazardSchedule&, const HazardSchedule&) = default;
};

struct Mission {
  std::optional<Condition> start;
  Condition goal;
  friend bool operator==(const Mission&, const Mission&) = default;
};

struct Environment {
  State initial_state;
  std::vector<Condition> goal_patterns;  // extra members of G besides mission goals
  std::vector<Mission> missions;
  std::vector<HazardRule> hazards;
  std::vector<HazardSchedule> schedule;  // parallel to hazards

  /// G: mission goals followed by the extra goal patterns.
  std::vector<Condition> goals() const;
};

bool applicable(const State& s, const Action& a);
State apply(const State& s, const Action& a);

struct ActionPartition {
  std::vector<ActionId> empowering;
  std::vector<ActionId> visible;
  std::vector<ActionId> hidden;
  friend bool operator==(const ActionPartition&, const ActionPartition&) = default;
};

ActionPartition partition_actions(const State& s, const Domain& domain);

enum class ValidationRule {
  VisibilityWrite,   // (a) operational action raises a visibility predicate
  UnknownPredicate,  // (b)
  ResetTotality,     // (c)
  WaypointsInGoals,  // (d)
  WellFormed,        // (e)
};

std::string_view rule_name(ValidationRule rule);

struct Violation {
  ValidationRule rule;
  std::string entity;
  std::string message;
};

std::vector<Violation> validate_domain(const Domain& domain, const Environment& env);

std::optional<State> hazard_consequence(const HazardRule& rule, const State& s);
bool matches_source(const HazardRule& rule, const State& s);

State reset_target(const State& s, const Domain& domain);

}  // namespace afp
