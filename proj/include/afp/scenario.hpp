#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "afp/domain.hpp"
#include "afp/mape.hpp"
#include "afp/trace.hpp"

namespace afp {

/// Grid drawing metadata. Patterns use {x} and {y} placeholders.
struct RenderSpec {
  struct Mark {
    char glyph = '~';
    std::string label;
    std::vector<std::pair<int, int>> cells;
  };
  int cols = 1;
  int rows = 1;
  int fine_factor = 1;
  std::string cell_pattern = "at_{x}_{y}";
  std::string fine_pattern = "fat_{x}_{y}";
  std::vector<std::string> heading_predicates;  // N, E, S, W
  std::vector<Mark> marks;
};

struct Scenario {
  std::string name;
  Domain domain;
  Environment env;
  AnalyzerPolicy policy;
  std::uint64_t seed = 0;
  std::optional<RenderSpec> render;
};

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ScenarioValidationError : public std::runtime_error {
 public:
  explicit ScenarioValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Builds the scenario without running validate_domain. Unknown predicate
/// names are collected into `violations` instead of aborting.
Scenario parse_scenario(const Json& doc, std::vector<Violation>& violations);

/// Parses and validates; every violation is reported in one exception.
Scenario load_scenario(std::string_view text);
Scenario load_scenario(const Json& doc);
Scenario load_scenario_file(const std::string& path);

Json save_scenario(const Scenario& scenario);

/// Parses "p" / "!p" literal strings; throws ScenarioParseError on unknown names.
std::vector<Literal> parse_literals(const Domain& domain, const std::vector<std::string>& items);
std::vector<Literal> parse_literal_list(const Domain& domain, std::string_view comma_separated);

/// Closed-world state: listed predicates true, all others false.
State parse_state(const Domain& domain, std::string_view comma_separated);

Recommendation parse_recommendation(const Json& j);
Json recommendation_json(const Recommendation& r);

}  // namespace afp
