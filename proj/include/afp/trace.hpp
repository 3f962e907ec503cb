#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afp/domain.hpp"
#include "json.hpp"

namespace afp {

using Json = nlohmann::ordered_json;

namespace event {
inline constexpr std::string_view kScenario = "Scenario";
inline constexpr std::string_view kGoalIssued = "GoalIssued";
inline constexpr std::string_view kPlanSynthesized = "PlanSynthesized";
inline constexpr std::string_view kActionExecuted = "ActionExecuted";
inline constexpr std::string_view kHazardInjected = "HazardInjected";
inline constexpr std::string_view kHazardDetected = "HazardDetected";
inline constexpr std::string_view kRecommendationChosen = "RecommendationChosen";
inline constexpr std::string_view kVisibilityChanged = "VisibilityChanged";
inline constexpr std::string_view kResetIssued = "ResetIssued";
inline constexpr std::string_view kEmpowermentDeferred = "EmpowermentDeferred";
inline constexpr std::string_view kMissionCompleted = "MissionCompleted";
inline constexpr std::string_view kMissionAborted = "MissionAborted";
inline constexpr std::string_view kPathological = "Pathological";
inline constexpr std::string_view kSnapshot = "Snapshot";
}  // namespace event

namespace cause {
inline constexpr std::string_view kEmpoweringAction = "EmpoweringAction";
inline constexpr std::string_view kOperationalAction = "OperationalAction";
inline constexpr std::string_view kHazard = "Hazard";
inline constexpr std::string_view kManagerToggle = "ManagerToggle";
inline constexpr std::string_view kReset = "Reset";
}  // namespace cause

struct TraceEvent {
  std::uint64_t step = 0;
  std::string kind;
  Json data;  // kind-specific fields

  Json to_json() const;
};

/// Ordered event log of one game. Each event gets the next step number.
class Trace {
 public:
  TraceEvent& emit(std::string_view kind, Json data = Json::object());

  std::span<const TraceEvent> events() const { return events_; }
  std::vector<const TraceEvent*> of_kind(std::string_view kind) const;
  std::size_t size() const { return events_.size(); }

  /// Newline-delimited JSON, one event per line.
  std::string to_ndjson() const;
  void write_ndjson(std::ostream& out) const;
  static Trace from_ndjson(std::istream& in);
  static Trace from_ndjson(std::string_view text);

 private:
  std::vector<TraceEvent> events_;
};

std::string digest_hex(const State& s);

/// Emits one VisibilityChanged per visibility predicate whose value differs.
void emit_visibility_changes(Trace& trace, const Domain& domain, const State& before, const State& after,
                             std::string_view cause);

}  // namespace afp
