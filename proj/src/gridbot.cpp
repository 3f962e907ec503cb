#include "afp/gridbot.hpp"

#include <algorithm>
#include <set>

namespace afp::gridbot {

namespace {

constexpr Heading kHeadings[] = {Heading::N, Heading::E, Heading::S, Heading::W};

int dx(Heading h) { return h == Heading::E ? 1 : h == Heading::W ? -1 : 0; }
int dy(Heading h) { return h == Heading::N ? 1 : h == Heading::S ? -1 : 0; }

Heading rotate(Heading h, int quarter_turns) {
  return kHeadings[(static_cast<int>(h) + quarter_turns + 4) % 4];
}

class Builder {
 public:
  explicit Builder(const GridSpec& spec) : spec_(spec) {}

  Scenario build() {
    check_spec();
    Scenario sc;
    sc.name = spec_.name;
    sc.seed = spec_.seed;
    sc.policy = spec_.policy;
    Domain& d = sc.domain;

    for (int y = 0; y < spec_.rows; ++y) {
      for (int x = 0; x < spec_.cols; ++x) d.add_predicate(at_name({x, y}));
    }
    for (auto h : kHeadings) d.add_predicate("heading_" + heading_name(h));
    in_spill_ = d.add_predicate("inSpill");
    for (const auto& c : region_cells_) {
      for (auto [fx, fy] : subcells(c)) d.add_predicate(fine_name(fx, fy));
    }
    d.add_predicate("vis_move");
    d.add_predicate("vis_smallMOVE");
    d.add_predicate("vis_smallTURN");
    d.add_predicate("sensorsCalibrated");

    add_coarse_actions(d);
    add_fine_actions(d);
    d.add_action(Action{"CALIBRATE_SENSORS", ActionKind::Empowering, std::nullopt, {}, {{lit(d, "sensorsCalibrated")}}});
    d.add_action(Action{"ENABLE_FINE_SENSORS",
                        ActionKind::Empowering,
                        std::nullopt,
                        {{lit(d, "sensorsCalibrated")}},
                        {{lit(d, "vis_smallMOVE"), lit(d, "vis_smallTURN")}}});

    std::vector<PredicateId> projection;
    for (std::uint32_t i = 0; i < d.predicate_count(); ++i) {
      const auto& n = d.predicate_name(PredicateId{i});
      if (n.starts_with("at_") || n.starts_with("heading_") || n.starts_with("fat_") || n == "inSpill") {
        projection.push_back(PredicateId{i});
      }
    }
    d.set_reset_projection(projection);
    const Condition waypoint{{lit(d, at_name(spec_.waypoint)), lit(d, "heading_" + heading_name(spec_.waypoint_heading))}};
    d.add_waypoint(waypoint);

    Environment& env = sc.env;
    env.initial_state = d.make_state();
    env.initial_state.set(d.predicate(at_name(spec_.start)), true);
    env.initial_state.set(d.predicate("heading_" + heading_name(spec_.start_heading)), true);
    env.initial_state.set(d.predicate("vis_move"), true);
    env.goal_patterns.push_back(d.waypoints().front());
    for (std::size_t i = 0; i < spec_.goals.size(); ++i) {
      Mission m;
      m.goal = Condition{{lit(d, at_name(spec_.goals[i]))}};
      if (i == 0) {
        m.start = Condition{{lit(d, at_name(spec_.start)), lit(d, "heading_" + heading_name(spec_.start_heading))}};
        normalize(m.start->literals);
      }
      env.missions.push_back(std::move(m));
    }
    for (const auto& r : spec_.regions) {
      for (const auto& c : r.cells) {
        HazardRule h;
        h.name = r.prefix + "[" + std::to_string(c.x) + "," + std::to_string(c.y) + "]";
        h.source.literals = {lit(d, at_name(c)), Literal{in_spill_, false}};
        const int f = spec_.fine_factor;
        h.consequence.literals = {Literal{in_spill_, true}, lit(d, fine_name(c.x * f, c.y * f))};
        h.tags = r.tags;
        normalize(h.source.literals);
        normalize(h.consequence.literals);
        env.hazards.push_back(std::move(h));
        env.schedule.push_back(spec_.schedule);
      }
    }

    RenderSpec render;
    render.cols = spec_.cols;
    render.rows = spec_.rows;
    render.fine_factor = spec_.fine_factor;
    render.cell_pattern = "at_{x}_{y}";
    render.fine_pattern = "fat_{x}_{y}";
    for (auto h : kHeadings) render.heading_predicates.push_back("heading_" + heading_name(h));
    for (const auto& r : spec_.regions) {
      RenderSpec::Mark m{r.glyph, r.label, {}};
      for (const auto& c : r.cells) m.cells.emplace_back(c.x, c.y);
      render.marks.push_back(std::move(m));
    }
    sc.render = std::move(render);

    if (auto violations = validate_domain(sc.domain, sc.env); !violations.empty()) {
      throw ScenarioValidationError(std::move(violations));
    }
    return sc;
  }

 private:
  void check_spec() {
    if (spec_.cols < 1 || spec_.rows < 1) throw SpecError("grid must have at least one cell");
    if (spec_.fine_factor < 1) throw SpecError("fine_factor must be positive");
    for (const auto& r : spec_.regions) {
      for (const auto& c : r.cells) {
        if (!in_bounds(c)) throw SpecError(r.prefix + " cell out of bounds");
        if (!region_cells_.insert(c).second) throw SpecError("cell listed in two regions");
      }
    }
    for (const Cell& c : {spec_.start, spec_.waypoint}) {
      if (!in_bounds(c)) throw SpecError("start or waypoint out of bounds");
      if (region_cells_.contains(c)) throw SpecError("start or waypoint lies in a slippery region");
    }
    for (const auto& g : spec_.goals) {
      if (!in_bounds(g)) throw SpecError("goal out of bounds");
    }
  }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.x < spec_.cols && c.y >= 0 && c.y < spec_.rows; }
  bool in_region(Cell c) const { return region_cells_.contains(c); }

  // Row-major over (fy, fx), lowest first.
  std::vector<std::pair<int, int>> subcells(Cell c) const {
    std::vector<std::pair<int, int>> out;
    const int f = spec_.fine_factor;
    for (int j = 0; j < f; ++j) {
      for (int i = 0; i < f; ++i) out.emplace_back(c.x * f + i, c.y * f + j);
    }
    return out;
  }

  static Literal lit(const Domain& d, const std::string& name, bool value = true) {
    return Literal{d.predicate(name), value};
  }

  void add(Domain& d, std::string name, const std::string& vis, std::vector<Literal> pre, std::vector<Literal> eff) {
    d.add_action(Action{std::move(name), ActionKind::Operational, d.predicate(vis), {std::move(pre)}, {std::move(eff)}});
  }

  void add_coarse_actions(Domain& d) {
    for (int y = 0; y < spec_.rows; ++y) {
      for (int x = 0; x < spec_.cols; ++x) {
        for (auto h : kHeadings) {
          const Cell from{x, y}, to{x + dx(h), y + dy(h)};
          if (!in_bounds(to)) continue;
          const auto hn = heading_name(h);
          const std::string suffix = hn + "_from_" + std::to_string(x) + "_" + std::to_string(y);
          add(d, "MOVE_" + suffix, "vis_move",
              {lit(d, at_name(from)), lit(d, "heading_" + hn), Literal{in_spill_, false}},
              {lit(d, at_name(from), false), lit(d, at_name(to))});
          if (!in_region(from) && in_region(to)) {
            const auto [fx, fy] = entry_subcell(to, h);
            add(d, "smallMOVE_" + hn + "_enter_" + std::to_string(x) + "_" + std::to_string(y), "vis_smallMOVE",
                {lit(d, at_name(from)), lit(d, "heading_" + hn), Literal{in_spill_, false}},
                {lit(d, at_name(from), false), lit(d, at_name(to)), Literal{in_spill_, true}, lit(d, fine_name(fx, fy))});
          }
        }
      }
    }
    for (auto h : kHeadings) {
      for (int q : {1, -1}) {
        const Heading to = rotate(h, q);
        const auto from_n = "heading_" + heading_name(h);
        const auto to_n = "heading_" + heading_name(to);
        const auto suffix = heading_name(h) + "_" + heading_name(to);
        add(d, "TURN_" + suffix, "vis_move", {lit(d, from_n), Literal{in_spill_, false}},
            {lit(d, from_n, false), lit(d, to_n)});
        add(d, "smallTURN_" + suffix, "vis_smallTURN", {lit(d, from_n), Literal{in_spill_, true}},
            {lit(d, from_n, false), lit(d, to_n)});
      }
    }
  }

  // First subcell of `cell` on the side the robot enters from.
  std::pair<int, int> entry_subcell(Cell cell, Heading moving) const {
    const int f = spec_.fine_factor;
    for (auto [fx, fy] : subcells(cell)) {
      const int i = fx - cell.x * f, j = fy - cell.y * f;
      if ((moving == Heading::E && i == 0) || (moving == Heading::W && i == f - 1) ||
          (moving == Heading::N && j == 0) || (moving == Heading::S && j == f - 1)) {
        return {fx, fy};
      }
    }
    return subcells(cell).front();
  }

  void add_fine_actions(Domain& d) {
    const int f = spec_.fine_factor;
    for (const auto& c : region_cells_) {
      for (auto [fx, fy] : subcells(c)) {
        for (auto h : kHeadings) {
          const int tx = fx + dx(h), ty = fy + dy(h);
          const Cell to{tx >= 0 ? tx / f : -1, ty >= 0 ? ty / f : -1};
          if (!in_bounds(to)) continue;
          const auto hn = heading_name(h);
          std::vector<Literal> pre{lit(d, fine_name(fx, fy)), lit(d, "heading_" + hn), Literal{in_spill_, true}};
          std::vector<Literal> eff{lit(d, fine_name(fx, fy), false)};
          if (in_region(to)) {
            eff.push_back(lit(d, fine_name(tx, ty)));
          } else {
            eff.push_back(Literal{in_spill_, false});
          }
          if (to != c) {
            eff.push_back(lit(d, at_name(c), false));
            eff.push_back(lit(d, at_name(to)));
          }
          add(d, "smallMOVE_" + hn + "_from_f" + std::to_string(fx) + "_" + std::to_string(fy), "vis_smallMOVE",
              std::move(pre), std::move(eff));
        }
      }
    }
  }

  const GridSpec& spec_;
  std::set<Cell> region_cells_;
  PredicateId in_spill_;
};

}  // namespace

std::string heading_name(Heading h) {
  switch (h) {
    case Heading::N:
      return "N";
    case Heading::E:
      return "E";
    case Heading::S:
      return "S";
    case Heading::W:
      return "W";
  }
  return "?";
}

std::string at_name(Cell c) { return "at_" + std::to_string(c.x) + "_" + std::to_string(c.y); }
std::string fine_name(int fx, int fy) { return "fat_" + std::to_string(fx) + "_" + std::to_string(fy); }

namespace {

AnalyzerPolicy slippery_policy() {
  AnalyzerPolicy p;
  p.by_tag["slippery"] = Recommendation{When::Now, Duration::All, PlanMode::Robust};
  return p;
}

}  // namespace

GridSpec case_study_spec() {
  GridSpec s;
  s.name = "gridbot";
  Region spill;
  spill.cells = {{2, 0}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 1}};
  Region ice{"iceSheet", {"slippery"}, {{4, 3}}, '*', "ice sheet"};
  s.regions = {spill, ice};
  s.goals = {{5, 2}, {0, 4}};
  s.policy = slippery_policy();
  return s;
}

GridSpec mini_spec(bool wall) {
  GridSpec s;
  s.name = wall ? "gridbot-mini-wall" : "gridbot-mini";
  s.cols = 3;
  s.rows = 3;
  Region spill;
  spill.cells = wall ? std::vector<Cell>{{1, 0}, {1, 1}, {1, 2}} : std::vector<Cell>{{1, 0}};
  s.regions = {spill};
  s.goals = {{2, 0}, {0, 2}};
  s.policy = slippery_policy();
  return s;
}

Scenario build(const GridSpec& spec) { return Builder(spec).build(); }
Scenario build_mini(bool wall) { return build(mini_spec(wall)); }

}  // namespace afp::gridbot
