#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afp/scenario.hpp"

namespace afp::gridbot {

enum class Heading { N, E, S, W };

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Slippery terrain. Each cell gets its own hazard rule, named prefix[x,y].
struct Region {
  std::string prefix = "oilSpill";
  std::vector<std::string> tags{"slippery"};
  std::vector<Cell> cells;
  char glyph = '~';
  std::string label = "oil spill";
};

struct GridSpec {
  std::string name = "gridbot";
  int cols = 6;
  int rows = 5;
  int fine_factor = 2;
  std::vector<Region> regions;
  Cell start{0, 0};
  Heading start_heading = Heading::E;
  Cell waypoint{0, 0};
  Heading waypoint_heading = Heading::E;
  std::vector<Cell> goals;
  AnalyzerPolicy policy;
  HazardSchedule schedule;
  std::uint64_t seed = 0;
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The built-in case study: 6x5 grid, spill wall across x = 2, ice at (4,3).
GridSpec case_study_spec();

/// 3x3 oracle-scale variant. With `wall` the spill blocks the whole x = 1 column.
GridSpec mini_spec(bool wall = false);

Scenario build(const GridSpec& spec);
Scenario build_mini(bool wall = false);

std::string heading_name(Heading h);
std::string at_name(Cell c);
std::string fine_name(int fx, int fy);

}  // namespace afp::gridbot
