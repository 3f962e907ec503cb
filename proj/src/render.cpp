#include <sstream>

#include "afp/sim.hpp"

namespace afp {

namespace {

std::string substitute(std::string pattern, int x, int y) {
  auto put = [&](std::string_view key, int v) {
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key)) {
      pattern.replace(pos, key.size(), std::to_string(v));
    }
  };
  put("{x}", x);
  put("{y}", y);
  return pattern;
}

struct Pose {
  std::optional<std::pair<int, int>> cell;
  std::optional<std::pair<int, int>> fine;
  std::optional<int> heading;
};

class Layout {
 public:
  Layout(const Domain& d, const RenderSpec& r) : d_(d), r_(r) {}

  Pose pose(const State& s) const {
    Pose p;
    const int ff = r_.fine_factor;
    for (int y = 0; y < r_.rows; ++y) {
      for (int x = 0; x < r_.cols; ++x) {
        if (is_true(s, substitute(r_.cell_pattern, x, y))) p.cell = {x, y};
      }
    }
    if (ff > 1) {
      for (int fy = 0; fy < r_.rows * ff; ++fy) {
        for (int fx = 0; fx < r_.cols * ff; ++fx) {
          if (is_true(s, substitute(r_.fine_pattern, fx, fy))) p.fine = {fx, fy};
        }
      }
    }
    for (int h = 0; h < static_cast<int>(r_.heading_predicates.size()); ++h) {
      if (is_true(s, r_.heading_predicates[h])) p.heading = h;
    }
    return p;
  }

 private:
  bool is_true(const State& s, const std::string& name) const {
    auto p = d_.find_predicate(name);
    return p && s.get(*p);
  }

  const Domain& d_;
  const RenderSpec& r_;
};

}  // namespace

std::string render_state(const Scenario& sc, const State& state, const std::vector<State>& path) {
  if (!sc.render) throw RenderUnsupported("scenario '" + sc.name + "' declares no grid rendering metadata");
  const RenderSpec& r = *sc.render;
  const int ff = r.fine_factor;
  const int width = r.cols * ff;
  const int height = r.rows * ff;
  std::vector<std::string> grid(height, std::string(width, '.'));
  auto at = [&](int fx, int fy) -> char& { return grid[height - 1 - fy][fx]; };
  auto fill_cell = [&](std::pair<int, int> c, char glyph) {
    for (int j = 0; j < ff; ++j) {
      for (int i = 0; i < ff; ++i) at(c.first * ff + i, c.second * ff + j) = glyph;
    }
  };
  auto in_bounds = [&](std::pair<int, int> c) { return c.first >= 0 && c.first < r.cols && c.second >= 0 && c.second < r.rows; };

  for (const auto& m : r.marks) {
    for (const auto& c : m.cells) {
      if (in_bounds(c)) fill_cell(c, m.glyph);
    }
  }
  const Layout layout(sc.domain, r);
  for (const auto& s : path) {
    const Pose p = layout.pose(s);
    if (p.fine) {
      at(p.fine->first, p.fine->second) = 'o';
    } else if (p.cell) {
      fill_cell(*p.cell, 'o');
    }
  }
  const Pose robot = layout.pose(state);
  static constexpr char kArrows[] = {'^', '>', 'v', '<'};
  if (robot.fine) {
    at(robot.fine->first, robot.fine->second) = '@';
  } else if (robot.cell) {
    fill_cell(*robot.cell, robot.heading ? kArrows[*robot.heading] : 'R');
  }

  std::ostringstream out;
  const std::string border = "+" + std::string(width, '-') + "+";
  out << border << '\n';
  for (const auto& row : grid) out << '|' << row << "|\n";
  out << border << '\n';
  static constexpr const char* kHeadings[] = {"N", "E", "S", "W"};
  out << "robot";
  if (robot.cell) out << " cell (" << robot.cell->first << ',' << robot.cell->second << ')';
  if (robot.heading) out << " heading " << kHeadings[*robot.heading];
  if (robot.fine) {
    out << " fine (" << robot.fine->first << ',' << robot.fine->second << ')';
  } else {
    out << " coarse";
  }
  out << '\n';
  for (const auto& m : r.marks) {
    if (!m.label.empty()) out << m.glyph << ' ' << m.label << '\n';
  }
  return out.str();
}

std::string render_grid(const Scenario& sc, const Trace& trace, std::uint64_t step) {
  if (!sc.render) throw RenderUnsupported("scenario '" + sc.name + "' declares no grid rendering metadata");
  const TraceEvent* plan_event = nullptr;
  for (const auto& e : trace.events()) {
    if (e.step > step) break;
    if (e.kind != event::kPlanSynthesized) continue;
    const auto purpose = e.data.value("purpose", std::string());
    if (purpose.find("empowerment") == std::string::npos) plan_event = &e;
  }
  std::vector<State> path;
  if (plan_event) {
    Plan plan;
    for (const auto& name : plan_event->data.at("plan")) {
      plan.steps.push_back(sc.domain.action_id(name.get<std::string>()));
    }
    try {
      path = path_of(sc.domain, plan, replay_state(sc, trace, plan_event->step));
    } catch (const PreconditionViolation&) {
      path.clear();
    }
  }
  return render_state(sc, replay_state(sc, trace, step), path);
}

}  // namespace afp
