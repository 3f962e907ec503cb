#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "afp/classifier.hpp"
#include "afp/mape.hpp"
#include "afp/scenario.hpp"
#include "afp/trace.hpp"

namespace afp {

/// Injects scheduled hazards after each applied action. Every rule is tested
/// against the post-action state in declaration order.
class ScheduledHazards final : public StepHooks {
 public:
  ScheduledHazards(const Domain& domain, const Environment& env, std::uint64_t seed, Trace* trace = nullptr);
  Result after_step(const Action& action, const State& pre, const State& post) override;
  std::size_t injected() const { return injected_; }

 private:
  bool fires(std::size_t rule);

  const Domain& domain_;
  const Environment& env_;
  Trace* trace_;
  std::mt19937_64 rng_;
  std::vector<std::uint64_t> matches_;
  std::size_t injected_ = 0;
};

struct RunOptions {
  std::size_t max_missions = 16;
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  ManagerConfig manager;
  ClassifyLimits classify;
  bool classify_snapshots = true;
};

struct GameResult {
  Trace trace;
  bool pathological = false;
  std::size_t completed = 0;
  std::size_t aborted = 0;
};

/// Plays missions in order, cycling when the list is shorter than max_missions.
/// A Snapshot event is emitted at every mission boundary.
GameResult run_game(const Scenario& scenario, RunOptions options = {});

Json verdict_json(const SystemVerdict& v);
SystemVerdict verdict_from_json(const Json& j);
Json partition_json(const Domain& domain, const ActionPartition& p);

/// Rebuilds the scenario embedded in a trace's leading Scenario event.
Scenario scenario_from_trace(const Trace& trace);

/// World state after every event with step <= `step`, by replaying the trace.
State replay_state(const Scenario& scenario, const Trace& trace, std::uint64_t step);

class RenderUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Character grid: robot glyph (arrow when coarse, '@' on the fine grid),
/// scenario marks, and the latest plan's path ('o').
std::string render_grid(const Scenario& scenario, const Trace& trace, std::uint64_t step);
std::string render_state(const Scenario& scenario, const State& state, const std::vector<State>& path = {});

struct MetricsOptions {
  std::size_t strength_bound = 10;
  ClassifyLimits limits;
};

/// Per-snapshot strength and verdicts, mission outcomes, hazard counts, and
/// the antifragility verdict.
Json report_metrics(const Trace& trace, const Scenario& scenario, MetricsOptions options = {});

}  // namespace afp
