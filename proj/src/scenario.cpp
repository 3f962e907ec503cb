#include "afp/scenario.hpp"

#include <fstream>
#include <sstream>

namespace afp {

ScenarioParseError::ScenarioParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message
                              : message),
      line_(line),
      column_(column) {}

namespace {

std::string summarize(const std::vector<Violation>& vs) {
  std::string out = std::to_string(vs.size()) + " validation violation(s)";
  for (const auto& v : vs) out += "\n  [" + std::string(rule_name(v.rule)) + "] " + v.entity + ": " + v.message;
  return out;
}

}  // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<Violation> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

namespace {

// Literal parsing that records unknown names as violations and drops them.
class LiteralReader {
 public:
  LiteralReader(const Domain& d, std::vector<Violation>& out) : domain_(d), violations_(out) {}

  std::vector<Literal> read(const Json& items, const std::string& entity) {
    if (!items.is_array()) throw ScenarioParseError(entity + ": literal list must be an array");
    std::vector<Literal> out;
    for (const auto& item : items) {
      if (!item.is_string()) throw ScenarioParseError(entity + ": literals must be strings");
      auto text = item.get<std::string>();
      const bool negated = !text.empty() && text.front() == '!';
      const std::string name = negated ? text.substr(1) : text;
      if (auto p = domain_.find_predicate(name)) {
        out.push_back(Literal{*p, !negated});
      } else {
        violations_.push_back({ValidationRule::UnknownPredicate, entity, "undeclared predicate '" + name + "'"});
      }
    }
    return out;
  }

 private:
  const Domain& domain_;
  std::vector<Violation>& violations_;
};

const Json& require(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw ScenarioParseError(std::string("missing key '") + key + "'");
  return doc.at(key);
}

When parse_when(const std::string& s) {
  if (s == "now" || s == "Now") return When::Now;
  if (s == "later" || s == "Later") return When::Later;
  throw ScenarioParseError("unknown 'when' value '" + s + "'");
}

Duration parse_duration(const std::string& s) {
  if (s == "current" || s == "Current") return Duration::Current;
  if (s == "all" || s == "All") return Duration::All;
  throw ScenarioParseError("unknown 'duration' value '" + s + "'");
}

PlanMode parse_mode(const std::string& s) {
  if (s == "robust" || s == "Robust") return PlanMode::Robust;
  if (s == "resilient" || s == "Resilient") return PlanMode::Resilient;
  throw ScenarioParseError("unknown 'mode' value '" + s + "'");
}

HazardSchedule parse_schedule(const Json& j) {
  HazardSchedule s;
  if (j.is_null()) return s;
  if (j.is_string()) {
    if (j.get<std::string>() != "always") throw ScenarioParseError("unknown schedule '" + j.get<std::string>() + "'");
    return s;
  }
  if (!j.is_object()) throw ScenarioParseError("schedule must be \"always\" or an object");
  if (j.contains("nth")) {
    s.trigger = TriggerKind::NthMatch;
    s.nth = j.at("nth").get<std::uint64_t>();
  } else if (j.contains("probability")) {
    s.trigger = TriggerKind::Probability;
    s.probability = j.at("probability").get<double>();
  } else {
    throw ScenarioParseError("schedule object needs 'nth' or 'probability'");
  }
  return s;
}

Json schedule_json(const HazardSchedule& s) {
  switch (s.trigger) {
    case TriggerKind::Always:
      return "always";
    case TriggerKind::NthMatch:
      return Json{{"nth", s.nth}};
    case TriggerKind::Probability:
      return Json{{"probability", s.probability}};
  }
  return "always";
}

RenderSpec parse_render(const Json& j) {
  RenderSpec r;
  r.cols = j.value("cols", 1);
  r.rows = j.value("rows", 1);
  r.fine_factor = j.value("fine_factor", 1);
  r.cell_pattern = j.value("cell_pattern", r.cell_pattern);
  r.fine_pattern = j.value("fine_pattern", r.fine_pattern);
  r.heading_predicates = j.value("headings", std::vector<std::string>{});
  if (r.cols < 1 || r.rows < 1 || r.fine_factor < 1) throw ScenarioParseError("render dimensions must be positive");
  if (!r.heading_predicates.empty() && r.heading_predicates.size() != 4) {
    throw ScenarioParseError("render headings must list N, E, S, W");
  }
  for (const auto& m : j.value("marks", Json::array())) {
    RenderSpec::Mark mark;
    const auto glyph = m.value("glyph", std::string("~"));
    if (glyph.size() != 1) throw ScenarioParseError("mark glyph must be one character");
    mark.glyph = glyph.front();
    mark.label = m.value("label", std::string());
    for (const auto& c : m.at("cells")) mark.cells.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    r.marks.push_back(std::move(mark));
  }
  return r;
}

Json render_json(const RenderSpec& r) {
  Json marks = Json::array();
  for (const auto& m : r.marks) {
    Json cells = Json::array();
    for (auto [x, y] : m.cells) cells.push_back(Json::array({x, y}));
    marks.push_back(Json{{"glyph", std::string(1, m.glyph)}, {"label", m.label}, {"cells", cells}});
  }
  return Json{{"cols", r.cols},
              {"rows", r.rows},
              {"fine_factor", r.fine_factor},
              {"cell_pattern", r.cell_pattern},
              {"fine_pattern", r.fine_pattern},
              {"headings", r.heading_predicates},
              {"marks", marks}};
}

Json literal_strings(const Domain& d, std::span<const Literal> ls) {
  Json out = Json::array();
  for (const auto& l : ls) out.push_back(d.describe(l));
  return out;
}

}  // namespace

Recommendation parse_recommendation(const Json& j) {
  Recommendation r;
  if (j.contains("when")) r.when = parse_when(j.at("when").get<std::string>());
  if (j.contains("duration")) r.duration = parse_duration(j.at("duration").get<std::string>());
  if (j.contains("mode")) r.mode = parse_mode(j.at("mode").get<std::string>());
  return r;
}

Json recommendation_json(const Recommendation& r) {
  return Json{{"when", to_string(r.when)}, {"duration", to_string(r.duration)}, {"mode", to_string(r.mode)}};
}

Scenario parse_scenario(const Json& doc, std::vector<Violation>& violations) {
  if (!doc.is_object()) throw ScenarioParseError("scenario document must be a JSON object");
  try {
    Scenario sc;
    sc.name = doc.value("name", std::string("scenario"));
    sc.seed = doc.value("seed", std::uint64_t{0});

    for (const auto& p : require(doc, "predicates")) sc.domain.add_predicate(p.get<std::string>());
    Domain& d = sc.domain;
    LiteralReader reader(d, violations);

    for (const auto& a : require(doc, "actions")) {
      Action act;
      act.name = a.at("name").get<std::string>();
      const auto kind = a.value("kind", std::string("operational"));
      if (kind == "empowering") {
        act.kind = ActionKind::Empowering;
      } else if (kind == "operational") {
        act.kind = ActionKind::Operational;
      } else {
        throw ScenarioParseError("action '" + act.name + "': unknown kind '" + kind + "'");
      }
      if (a.contains("visible_if") && !a.at("visible_if").is_null()) {
        const auto v = a.at("visible_if").get<std::string>();
        if (auto p = d.find_predicate(v)) {
          act.visibility = *p;
        } else {
          violations.push_back({ValidationRule::UnknownPredicate, act.name, "undeclared visibility predicate '" + v + "'"});
        }
      } else if (act.kind == ActionKind::Operational) {
        violations.push_back({ValidationRule::WellFormed, act.name, "operational action lacks visible_if"});
      }
      act.precondition.literals = reader.read(a.value("pre", Json::array()), act.name);
      act.effect.literals = reader.read(a.value("eff", Json::array()), act.name);
      d.add_action(std::move(act));
    }

    std::vector<PredicateId> projection;
    const Json reset = doc.value("reset", Json::object());
    if (reset.contains("projection")) {
      for (const auto& n : reset.at("projection")) {
        if (auto p = d.find_predicate(n.get<std::string>())) {
          projection.push_back(*p);
        } else {
          violations.push_back({ValidationRule::UnknownPredicate, "reset",
                                "undeclared projection predicate '" + n.get<std::string>() + "'"});
        }
      }
    } else {
      for (std::uint32_t i = 0; i < d.predicate_count(); ++i) projection.push_back(PredicateId{i});
    }
    d.set_reset_projection(std::move(projection));
    std::size_t w = 0;
    for (const auto& wp : require(doc, "waypoints")) {
      d.add_waypoint(Condition{reader.read(wp, "waypoint " + std::to_string(w++))});
    }

    Environment& env = sc.env;
    env.initial_state = d.make_state();
    for (const auto& n : doc.value("initial_state", Json::array())) {
      if (auto p = d.find_predicate(n.get<std::string>())) {
        env.initial_state.set(*p, true);
      } else {
        violations.push_back(
            {ValidationRule::UnknownPredicate, "initial_state", "undeclared predicate '" + n.get<std::string>() + "'"});
      }
    }
    std::size_t g = 0;
    for (const auto& gp : doc.value("goals", Json::array())) {
      env.goal_patterns.push_back(Condition{reader.read(gp, "goal " + std::to_string(g++))});
    }
    std::size_t m = 0;
    for (const auto& mj : require(doc, "missions")) {
      const std::string entity = "mission " + std::to_string(m++);
      Mission mission;
      if (mj.is_array()) {
        mission.goal.literals = reader.read(mj, entity);
      } else {
        mission.goal.literals = reader.read(mj.at("goal"), entity);
        if (mj.contains("start") && !mj.at("start").is_null()) {
          mission.start = Condition{reader.read(mj.at("start"), entity)};
        }
      }
      env.missions.push_back(std::move(mission));
    }
    for (const auto& hj : doc.value("hazards", Json::array())) {
      HazardRule h;
      h.name = hj.at("name").get<std::string>();
      h.source.literals = reader.read(hj.value("source", Json::array()), h.name);
      h.consequence.literals = reader.read(hj.value("effect", Json::array()), h.name);
      h.tags = hj.value("tags", std::vector<std::string>{});
      normalize(h.source.literals);
      normalize(h.consequence.literals);
      env.hazards.push_back(std::move(h));
      env.schedule.push_back(parse_schedule(hj.value("schedule", Json())));
    }
    for (auto& c : env.goal_patterns) normalize(c.literals);
    for (auto& mi : env.missions) {
      normalize(mi.goal.literals);
      if (mi.start) normalize(mi.start->literals);
    }

    const Json policy = doc.value("policy", Json::object());
    for (auto& [tag, rj] : policy.items()) {
      if (tag == "*") {
        sc.policy.fallback = parse_recommendation(rj);
      } else {
        sc.policy.by_tag[tag] = parse_recommendation(rj);
      }
    }
    if (doc.contains("render")) sc.render = parse_render(doc.at("render"));
    return sc;
  } catch (const Json::exception& e) {
    throw ScenarioParseError(std::string("schema error: ") + e.what());
  }
}

Scenario load_scenario(const Json& doc) {
  std::vector<Violation> violations;
  Scenario sc = parse_scenario(doc, violations);
  auto more = validate_domain(sc.domain, sc.env);
  violations.insert(violations.end(), more.begin(), more.end());
  if (!violations.empty()) throw ScenarioValidationError(std::move(violations));
  return sc;
}

Scenario load_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioParseError(e.what(), line, column);
  }
  return load_scenario(doc);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return load_scenario(std::string_view(text));
}

Json save_scenario(const Scenario& sc) {
  const Domain& d = sc.domain;
  Json doc;
  doc["name"] = sc.name;
  Json preds = Json::array();
  for (std::uint32_t i = 0; i < d.predicate_count(); ++i) preds.push_back(d.predicate_name(PredicateId{i}));
  doc["predicates"] = preds;
  Json actions = Json::array();
  for (const auto& a : d.actions()) {
    Json aj;
    aj["name"] = a.name;
    aj["kind"] = a.kind == ActionKind::Empowering ? "empowering" : "operational";
    if (a.visibility) aj["visible_if"] = d.predicate_name(*a.visibility);
    aj["pre"] = literal_strings(d, a.precondition.literals);
    aj["eff"] = literal_strings(d, a.effect.literals);
    actions.push_back(std::move(aj));
  }
  doc["actions"] = actions;
  Json wps = Json::array();
  for (const auto& w : d.waypoints()) wps.push_back(literal_strings(d, w.literals));
  doc["waypoints"] = wps;
  Json proj = Json::array();
  for (auto p : d.reset_projection()) proj.push_back(d.predicate_name(p));
  doc["reset"] = Json{{"projection", proj}};
  doc["initial_state"] = d.true_predicates(sc.env.initial_state);
  Json goals = Json::array();
  for (const auto& gp : sc.env.goal_patterns) goals.push_back(literal_strings(d, gp.literals));
  doc["goals"] = goals;
  Json missions = Json::array();
  for (const auto& m : sc.env.missions) {
    Json mj{{"goal", literal_strings(d, m.goal.literals)}};
    if (m.start) mj["start"] = literal_strings(d, m.start->literals);
    missions.push_back(std::move(mj));
  }
  doc["missions"] = missions;
  Json hazards = Json::array();
  for (std::size_t i = 0; i < sc.env.hazards.size(); ++i) {
    const auto& h = sc.env.hazards[i];
    hazards.push_back(Json{{"name", h.name},
                           {"source", literal_strings(d, h.source.literals)},
                           {"effect", literal_strings(d, h.consequence.literals)},
                           {"tags", h.tags},
                           {"schedule", i < sc.env.schedule.size() ? schedule_json(sc.env.schedule[i])
                                                                   : Json("always")}});
  }
  doc["hazards"] = hazards;
  Json policy = Json::object();
  policy["*"] = recommendation_json(sc.policy.fallback);
  for (const auto& [tag, r] : sc.policy.by_tag) policy[tag] = recommendation_json(r);
  doc["policy"] = policy;
  doc["seed"] = sc.seed;
  if (sc.render) doc["render"] = render_json(*sc.render);
  return doc;
}

std::vector<Literal> parse_literals(const Domain& domain, const std::vector<std::string>& items) {
  std::vector<Literal> out;
  for (const auto& text : items) {
    const bool negated = !text.empty() && text.front() == '!';
    const std::string name = negated ? text.substr(1) : text;
    auto p = domain.find_predicate(name);
    if (!p) throw ScenarioParseError("undeclared predicate '" + name + "'");
    out.push_back(Literal{*p, !negated});
  }
  normalize(out);
  return out;
}

namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char ch : text) {
    if (ch == ',') {
      flush();
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

}  // namespace

std::vector<Literal> parse_literal_list(const Domain& domain, std::string_view comma_separated) {
  return parse_literals(domain, split_list(comma_separated));
}

State parse_state(const Domain& domain, std::string_view comma_separated) {
  State s = domain.make_state();
  for (const auto& l : parse_literal_list(domain, comma_separated)) s.set(l.predicate, l.value);
  return s;
}

}  // namespace afp
