#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afp/domain.hpp"
#include "afp/planner.hpp"

namespace afp {

struct HazardWitness {
  std::size_t path_index = 0;  // position of s on the path
  std::string rule;
  State consequence;
};

struct PlanVerdict {
  bool robust = true;
  bool resilient = true;
  bool fragile = false;
  std::optional<HazardWitness> first_hazard_source;  // set when not robust
  std::optional<HazardWitness> fragility;            // set when fragile
};

PlanVerdict classify_plan(const Domain& domain, const Plan& plan, const State& start, const Condition& goal,
                          std::span<const HazardRule> hazards, const ActionSet& actions,
                          SearchLimits limits = {});

/// A mission with its start condition grounded to concrete states.
struct GroundMission {
  std::vector<State> starts;
  Condition goal;
};

/// Grounds env missions against a snapshot state (see README for the rule).
std::vector<GroundMission> ground_missions(const Domain& domain, const Environment& env,
                                           const State& snapshot, const ActionSet& allowed,
                                           SearchLimits limits = {});

struct MissionEvidence {
  std::size_t mission = 0;
  std::size_t start = 0;
  bool achievable = false;
  bool has_robust_plan = false;
  bool has_resilient_plan = false;
  bool all_plans_resilient = false;
  std::optional<State> unrecoverable_source;  // some s on a plan path whose consequence is dead
};

struct SystemVerdict {
  bool fragile = false;
  bool robust = true;
  bool resilient = true;
  bool unachievable = false;  // some mission has no plan at all
  std::vector<MissionEvidence> evidence;
  friend bool operator==(const SystemVerdict& a, const SystemVerdict& b) {
    return a.fragile == b.fragile && a.robust == b.robust && a.resilient == b.resilient &&
           a.unachievable == b.unachievable;
  }
};

/// Caps the forward state enumeration used by the system-resilience check.
struct ClassifyLimits {
  SearchLimits search;
  std::size_t max_states = 2'000'000;
};

SystemVerdict classify_system(const Domain& domain, std::span<const GroundMission> missions,
                              const ActionSet& allowed, std::span<const HazardRule> hazards,
                              ClassifyLimits limits = {});

SystemVerdict classify_system(const Domain& domain, const Environment& env, const State& snapshot,
                              const ActionSet& allowed, std::span<const HazardRule> hazards,
                              ClassifyLimits limits = {});

struct AntifragilityVerdict {
  bool antifragile = false;
  bool never_fragile = false;
  std::optional<std::size_t> fragile_snapshot;
  std::optional<std::size_t> recovered_snapshot;
};

/// Over verdicts of consecutive snapshots: true iff no snapshot is fragile, or
/// a fragile one is later followed by a robust or resilient one.
AntifragilityVerdict check_antifragile(std::span<const SystemVerdict> snapshots);

struct StrengthReport {
  std::size_t bound = 0;
  std::size_t achievable_missions = 0;
  std::vector<std::uint64_t> plan_counts;  // per mission, summed over its start states
  std::uint64_t total_plans() const;
};

/// Plan counts saturate at UINT64_MAX.
StrengthReport strength_metric(const Domain& domain, const ActionSet& allowed,
                               std::span<const GroundMission> missions, std::size_t bound,
                               SearchLimits limits = {});

}  // namespace afp
