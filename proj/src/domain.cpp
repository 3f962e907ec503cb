#include "afp/domain.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace afp {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void check_index(const State& s, PredicateId p) {
  if (p.index >= s.size()) {
    throw DomainIntegrityError("predicate index " + std::to_string(p.index) +
                               " outside state of size " + std::to_string(s.size()));
  }
}

}  // namespace

State::State(std::size_t predicate_count)
    : size_(predicate_count), words_((predicate_count + 63) / 64, 0) {}

bool State::get(PredicateId p) const {
  check_index(*this, p);
  return (words_[p.index / 64] >> (p.index % 64)) & 1u;
}

void State::set(PredicateId p, bool value) {
  check_index(*this, p);
  const std::uint64_t bit = std::uint64_t{1} << (p.index % 64);
  if (value) {
    words_[p.index / 64] |= bit;
  } else {
    words_[p.index / 64] &= ~bit;
  }
}

std::uint64_t State::digest() const {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < size_; ++i) {
    const auto byte = static_cast<std::uint64_t>((words_[i / 64] >> (i % 64)) & 1u);
    h ^= byte;
    h *= kFnvPrime;
  }
  return h;
}

std::size_t State::hash() const {
  std::uint64_t h = kFnvOffset ^ size_;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

void normalize(std::vector<Literal>& literals) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
}

bool holds(const State& s, const Literal& l) { return s.get(l.predicate) == l.value; }

bool satisfies(const State& s, const Condition& c) {
  return std::all_of(c.literals.begin(), c.literals.end(),
                     [&](const Literal& l) { return holds(s, l); });
}

std::vector<Literal> violated_literals(const State& s, const Condition& c) {
  std::vector<Literal> out;
  for (const auto& l : c.literals) {
    if (!holds(s, l)) out.push_back(l);
  }
  return out;
}

State overridden(const State& s, const Effect& e) {
  State t = s;
  for (const auto& l : e.literals) t.set(l.predicate, l.value);
  return t;
}

PreconditionViolation::PreconditionViolation(std::string action, std::vector<Literal> failing,
                                             std::optional<std::size_t> step)
    : std::runtime_error("precondition of '" + action + "' violated" +
                         (step ? " at step " + std::to_string(*step) : std::string{})),
      action_(std::move(action)),
      failing_(std::move(failing)),
      step_(step) {}

// Domain

PredicateId Domain::add_predicate(std::string name) {
  const PredicateId id{static_cast<std::uint32_t>(predicate_names_.size())};
  predicate_index_.try_emplace(name, id);
  predicate_names_.push_back(std::move(name));
  return id;
}

ActionId Domain::add_action(Action action) {
  const ActionId id{static_cast<std::uint32_t>(actions_.size())};
  normalize(action.precondition.literals);
  normalize(action.effect.literals);
  action_index_.try_emplace(action.name, id);
  actions_.push_back(std::move(action));
  rebuild_name_order();
  return id;
}

void Domain::rebuild_name_order() {
  by_name_.clear();
  for (std::uint32_t i = 0; i < actions_.size(); ++i) by_name_.push_back(ActionId{i});
  std::stable_sort(by_name_.begin(), by_name_.end(), [&](ActionId a, ActionId b) {
    return actions_[a.index].name < actions_[b.index].name;
  });
  name_rank_.assign(actions_.size(), 0);
  for (std::size_t r = 0; r < by_name_.size(); ++r) name_rank_[by_name_[r].index] = r;
}

void Domain::set_reset_projection(std::vector<PredicateId> projection) {
  std::sort(projection.begin(), projection.end());
  projection.erase(std::unique(projection.begin(), projection.end()), projection.end());
  projection_ = std::move(projection);
}

void Domain::add_waypoint(const Condition& partial) {
  Condition full = partial;
  for (auto p : projection_) {
    const bool mentioned = std::any_of(partial.literals.begin(), partial.literals.end(),
                                       [&](const Literal& l) { return l.predicate == p; });
    if (!mentioned) full.literals.push_back(Literal{p, false});
  }
  normalize(full.literals);
  waypoints_.push_back(std::move(full));
}

const std::string& Domain::predicate_name(PredicateId p) const {
  if (p.index >= predicate_names_.size()) {
    throw DomainIntegrityError("unknown predicate index " + std::to_string(p.index));
  }
  return predicate_names_[p.index];
}

std::optional<PredicateId> Domain::find_predicate(std::string_view name) const {
  auto it = predicate_index_.find(std::string(name));
  if (it == predicate_index_.end()) return std::nullopt;
  return it->second;
}

PredicateId Domain::predicate(std::string_view name) const {
  if (auto p = find_predicate(name)) return *p;
  throw DomainIntegrityError("unknown predicate '" + std::string(name) + "'");
}

const Action& Domain::action(ActionId id) const {
  if (id.index >= actions_.size()) {
    throw DomainIntegrityError("unknown action index " + std::to_string(id.index));
  }
  return actions_[id.index];
}

std::optional<ActionId> Domain::find_action(std::string_view name) const {
  auto it = action_index_.find(std::string(name));
  if (it == action_index_.end()) return std::nullopt;
  return it->second;
}

ActionId Domain::action_id(std::string_view name) const {
  if (auto a = find_action(name)) return *a;
  throw DomainIntegrityError("unknown action '" + std::string(name) + "'");
}

std::vector<PredicateId> Domain::visibility_predicates() const {
  std::set<PredicateId> out;
  for (const auto& a : actions_) {
    if (a.kind == ActionKind::Operational && a.visibility) out.insert(*a.visibility);
  }
  return {out.begin(), out.end()};
}

bool Domain::is_visibility_predicate(PredicateId p) const {
  return std::any_of(actions_.begin(), actions_.end(), [&](const Action& a) {
    return a.kind == ActionKind::Operational && a.visibility == p;
  });
}

std::string Domain::describe(const Literal& l) const {
  const std::string name = l.predicate.index < predicate_names_.size()
                               ? predicate_names_[l.predicate.index]
                               : "#" + std::to_string(l.predicate.index);
  return l.value ? name : "!" + name;
}

std::string Domain::describe(std::span<const Literal> ls) const {
  std::string out;
  for (const auto& l : ls) {
    if (!out.empty()) out += ',';
    out += describe(l);
  }
  return out;
}

std::vector<std::string> Domain::true_predicates(const State& s) const {
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < s.size(); ++i) {
    if (s.get(PredicateId{i})) out.push_back(predicate_name(PredicateId{i}));
  }
  return out;
}

// ActionSet

ActionSet::ActionSet(const Domain& domain, std::vector<ActionId> ids) : ids_(std::move(ids)) {
  for (auto id : ids_) (void)domain.action(id);
  std::sort(ids_.begin(), ids_.end(), [&](ActionId a, ActionId b) {
    return domain.name_rank(a) < domain.name_rank(b);
  });
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

ActionSet ActionSet::all(const Domain& domain) {
  const auto ordered = domain.actions_by_name();
  ActionSet set;
  set.ids_.assign(ordered.begin(), ordered.end());
  return set;
}

bool ActionSet::contains(ActionId id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

ActionSet ActionSet::united(const Domain& domain, const ActionSet& other) const {
  std::vector<ActionId> merged = ids_;
  merged.insert(merged.end(), other.ids_.begin(), other.ids_.end());
  return ActionSet(domain, std::move(merged));
}

std::vector<Condition> Environment::goals() const {
  std::vector<Condition> out;
  for (const auto& m : missions) out.push_back(m.goal);
  out.insert(out.end(), goal_patterns.begin(), goal_patterns.end());
  return out;
}

// Transition semantics

bool applicable(const State& s, const Action& a) { return satisfies(s, a.precondition); }

State apply(const State& s, const Action& a) {
  auto failing = violated_literals(s, a.precondition);
  if (!failing.empty()) throw PreconditionViolation(a.name, std::move(failing));
  return overridden(s, a.effect);
}

ActionPartition partition_actions(const State& s, const Domain& domain) {
  ActionPartition part;
  const auto actions = domain.actions();
  for (std::uint32_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    if (a.kind == ActionKind::Empowering) {
      part.empowering.push_back(ActionId{i});
    } else if (a.visibility && s.get(*a.visibility)) {
      part.visible.push_back(ActionId{i});
    } else {
      part.hidden.push_back(ActionId{i});
    }
  }
  return part;
}

// Validation

std::string_view rule_name(ValidationRule rule) {
  switch (rule) {
    case ValidationRule::VisibilityWrite: return "visibility-write";
    case ValidationRule::UnknownPredicate: return "unknown-predicate";
    case ValidationRule::ResetTotality: return "reset-totality";
    case ValidationRule::WaypointsInGoals: return "waypoints-in-goals";
    case ValidationRule::WellFormed: return "well-formed";
  }
  return "unknown";
}

namespace {

class Validator {
 public:
  Validator(const Domain& d, const Environment& e) : domain_(d), env_(e) {}

  std::vector<Violation> run() {
    check_names();
    for (const auto& a : domain_.actions()) check_action(a);
    for (const auto& h : env_.hazards) check_hazard(h);
    check_reset();
    check_goals();
    if (env_.initial_state.size() != domain_.predicate_count()) {
      add(ValidationRule::WellFormed, "initial_state", "initial state is not total over Q");
    }
    if (!env_.schedule.empty() && env_.schedule.size() != env_.hazards.size()) {
      add(ValidationRule::WellFormed, "schedule", "schedule does not cover every hazard rule");
    }
    for (std::size_t i = 0; i < env_.schedule.size(); ++i) {
      const auto& s = env_.schedule[i];
      if (s.trigger == TriggerKind::Probability && !(s.probability >= 0.0 && s.probability <= 1.0)) {
        add(ValidationRule::WellFormed, "schedule[" + std::to_string(i) + "]",
            "probability outside [0,1]");
      }
      if (s.trigger == TriggerKind::NthMatch && s.nth == 0) {
        add(ValidationRule::WellFormed, "schedule[" + std::to_string(i) + "]", "nth must be >= 1");
      }
    }
    return std::move(out_);
  }

 private:
  void add(ValidationRule rule, std::string entity, std::string message) {
    out_.push_back(Violation{rule, std::move(entity), std::move(message)});
  }

  bool known(PredicateId p) const { return p.index < domain_.predicate_count(); }

  void check_literals(std::span<const Literal> ls, const std::string& entity, std::string_view what) {
    for (const auto& l : ls) {
      if (!known(l.predicate)) {
        add(ValidationRule::UnknownPredicate, entity,
            std::string(what) + " references undeclared predicate #" + std::to_string(l.predicate.index));
      }
    }
  }

  void check_condition(const Condition& c, const std::string& entity, std::string_view what) {
    check_literals(c.literals, entity, what);
    for (std::size_t i = 1; i < c.literals.size(); ++i) {
      if (c.literals[i].predicate == c.literals[i - 1].predicate &&
          c.literals[i].value != c.literals[i - 1].value) {
        add(ValidationRule::WellFormed, entity,
            std::string(what) + " requires both polarities of " + domain_.describe(c.literals[i]));
      }
    }
  }

  void check_effect(const Effect& e, const std::string& entity, std::string_view what) {
    check_literals(e.literals, entity, what);
    for (std::size_t i = 1; i < e.literals.size(); ++i) {
      if (e.literals[i].predicate == e.literals[i - 1].predicate) {
        add(ValidationRule::WellFormed, entity,
            std::string(what) + " assigns predicate " + domain_.describe(Literal{e.literals[i].predicate, true}) +
                " twice");
      }
    }
  }

  void check_names() {
    std::set<std::string> seen;
    for (std::uint32_t i = 0; i < domain_.predicate_count(); ++i) {
      const auto& n = domain_.predicate_name(PredicateId{i});
      if (n.empty()) add(ValidationRule::WellFormed, "predicate #" + std::to_string(i), "empty name");
      if (!seen.insert(n).second) add(ValidationRule::WellFormed, "predicate " + n, "duplicate name");
    }
    std::set<std::string> actions;
    for (const auto& a : domain_.actions()) {
      if (a.name.empty()) add(ValidationRule::WellFormed, "action", "empty name");
      if (!actions.insert(a.name).second) add(ValidationRule::WellFormed, "action " + a.name, "duplicate name");
    }
    std::set<std::string> hazards;
    for (const auto& h : env_.hazards) {
      if (!hazards.insert(h.name).second) add(ValidationRule::WellFormed, "hazard " + h.name, "duplicate name");
    }
  }

  void check_action(const Action& a) {
    const std::string entity = "action " + a.name;
    check_condition(a.precondition, entity, "precondition");
    check_effect(a.effect, entity, "effect");
    if (a.kind == ActionKind::Operational) {
      if (!a.visibility) {
        add(ValidationRule::WellFormed, entity, "operational action without visibility predicate");
      } else if (!known(*a.visibility)) {
        add(ValidationRule::UnknownPredicate, entity, "visibility predicate is undeclared");
      }
      for (const auto& l : a.effect.literals) {
        if (l.value && known(l.predicate) && domain_.is_visibility_predicate(l.predicate)) {
          add(ValidationRule::VisibilityWrite, entity,
              "operational action raises visibility predicate " + domain_.describe(l));
        }
      }
    } else if (a.visibility) {
      add(ValidationRule::WellFormed, entity, "empowering action carries a visibility predicate");
    }
  }

  void check_hazard(const HazardRule& h) {
    const std::string entity = "hazard " + h.name;
    check_condition(h.source, entity, "source");
    check_effect(h.consequence, entity, "consequence");
    if (h.consequence.literals.empty()) add(ValidationRule::WellFormed, entity, "empty consequence");
  }

  void check_reset() {
    const auto waypoints = domain_.waypoints();
    if (waypoints.empty()) {
      add(ValidationRule::ResetTotality, "reset", "no waypoint declared; reset is not total");
      return;
    }
    for (auto p : domain_.reset_projection()) {
      if (!known(p)) add(ValidationRule::UnknownPredicate, "reset", "projection predicate is undeclared");
    }
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
      const std::string entity = "waypoint[" + std::to_string(i) + "]";
      check_condition(waypoints[i], entity, "pattern");
      const auto proj = domain_.reset_projection();
      for (const auto& l : waypoints[i].literals) {
        if (std::find(proj.begin(), proj.end(), l.predicate) == proj.end()) {
          add(ValidationRule::ResetTotality, entity,
              "pattern literal " + domain_.describe(l) + " lies outside the reset projection");
        }
      }
    }
  }

  void check_goals() {
    const auto goals = env_.goals();
    const auto waypoints = domain_.waypoints();
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
      const auto& w = waypoints[i].literals;
      const bool covered = std::any_of(goals.begin(), goals.end(), [&](const Condition& g) {
        return std::all_of(g.literals.begin(), g.literals.end(), [&](const Literal& l) {
          return std::find(w.begin(), w.end(), l) != w.end();
        });
      });
      if (!covered) {
        add(ValidationRule::WaypointsInGoals, "waypoint[" + std::to_string(i) + "]",
            "waypoint is not a goal state");
      }
    }
    for (std::size_t i = 0; i < env_.missions.size(); ++i) {
      const std::string entity = "mission[" + std::to_string(i) + "]";
      check_condition(env_.missions[i].goal, entity, "goal");
      if (env_.missions[i].start) check_condition(*env_.missions[i].start, entity, "start");
    }
    for (std::size_t i = 0; i < env_.goal_patterns.size(); ++i) {
      check_condition(env_.goal_patterns[i], "goal[" + std::to_string(i) + "]", "pattern");
    }
  }

  const Domain& domain_;
  const Environment& env_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_domain(const Domain& domain, const Environment& env) {
  return Validator(domain, env).run();
}

bool matches_source(const HazardRule& rule, const State& s) { return satisfies(s, rule.source); }

std::optional<State> hazard_consequence(const HazardRule& rule, const State& s) {
  if (!matches_source(rule, s)) return std::nullopt;
  return overridden(s, rule.consequence);
}

State reset_target(const State& s, const Domain& domain) {
  const auto waypoints = domain.waypoints();
  if (waypoints.empty()) throw DomainIntegrityError("reset policy has no waypoint");
  std::size_t best = 0;
  std::size_t best_distance = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    std::size_t d = 0;
    for (const auto& l : waypoints[i].literals) d += holds(s, l) ? 0 : 1;
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return overridden(s, Effect{waypoints[best].literals});
}

}  // namespace afp
