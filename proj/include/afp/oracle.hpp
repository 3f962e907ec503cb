#pragma once

// Independent ground truth for small domains: materializes the labeled state
// graph explicitly and evaluates the fragility definitions with set operations.
// Shares only the transition primitives of domain.hpp with the production path.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "afp/classifier.hpp"
#include "afp/domain.hpp"
#include "afp/planner.hpp"

namespace afp::oracle {

struct Limits {
  std::size_t full_enumeration_predicates = 14;  // |Q| at or below: all 2^|Q| valuations
  std::size_t max_states = 1u << 20;
};

class StateGraph {
 public:
  /// Every valuation over Q. Requires |Q| <= limits.full_enumeration_predicates.
  static StateGraph full(const Domain& domain, const ActionSet& actions, std::span<const HazardRule> hazards,
                         Limits limits = {});
  /// Closure of the seeds under action edges and hazard edges.
  static StateGraph closure(const Domain& domain, const ActionSet& actions, std::span<const HazardRule> hazards,
                            std::span<const State> seeds, Limits limits = {});
  /// full() when |Q| permits, else closure().
  static StateGraph materialize(const Domain& domain, const ActionSet& actions,
                                std::span<const HazardRule> hazards, std::span<const State> seeds,
                                Limits limits = {});

  std::size_t size() const { return states_.size(); }
  const State& state(std::size_t i) const { return states_[i]; }
  std::optional<std::size_t> find(const State& s) const;
  std::span<const std::size_t> successors(std::size_t i) const { return succ_[i]; }
  std::span<const std::size_t> hazard_consequences(std::size_t i) const { return hazard_[i]; }

  std::vector<bool> satisfying(const Condition& c) const;
  /// States with a path (possibly empty) into `targets`.
  std::vector<bool> backward(const std::vector<bool>& targets) const;
  /// States reachable from `from` through states with allowed[i] set (from included only if allowed).
  std::vector<bool> forward(std::size_t from, const std::vector<bool>& allowed) const;

 private:
  void build_edges(const Domain& domain, const ActionSet& actions, std::span<const HazardRule> hazards,
                   bool grow, Limits limits);
  std::size_t intern(const State& s);

  std::vector<State> states_;
  std::unordered_map<State, std::size_t, StateHash> index_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::vector<std::size_t>> pred_;
  std::vector<std::vector<std::size_t>> hazard_;
};

SystemVerdict classify(const Domain& domain, std::span<const GroundMission> missions, const ActionSet& allowed,
                       std::span<const HazardRule> hazards, Limits limits = {});

PlanVerdict classify_plan(const Domain& domain, const Plan& plan, const State& start, const Condition& goal,
                          std::span<const HazardRule> hazards, const ActionSet& actions, Limits limits = {});

/// Shortest-path distance by exhaustive breadth-first search of the materialized graph.
std::optional<std::size_t> distance(const Domain& domain, const State& start, const Condition& goal,
                                    const ActionSet& actions, Limits limits = {});

}  // namespace afp::oracle

namespace afp {

/// System verdict from the explicit-graph oracle.
inline SystemVerdict oracle_classify(const Domain& domain, std::span<const GroundMission> missions,
                                     const ActionSet& allowed, std::span<const HazardRule> hazards,
                                     oracle::Limits limits = {}) {
  return oracle::classify(domain, missions, allowed, hazards, limits);
}

}  // namespace afp
