#include "afp/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace afp {

Json TraceEvent::to_json() const {
  Json j;
  j["step"] = step;
  j["kind"] = kind;
  for (auto it = data.begin(); it != data.end(); ++it) j[it.key()] = it.value();
  return j;
}

TraceEvent& Trace::emit(std::string_view kind, Json data) {
  events_.push_back(TraceEvent{events_.size(), std::string(kind), std::move(data)});
  return events_.back();
}

std::vector<const TraceEvent*> Trace::of_kind(std::string_view kind) const {
  std::vector<const TraceEvent*> out;
  for (const auto& e : events_) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

void Trace::write_ndjson(std::ostream& out) const {
  for (const auto& e : events_) out << e.to_json().dump() << '\n';
}

std::string Trace::to_ndjson() const {
  std::ostringstream out;
  write_ndjson(out);
  return out.str();
}

Trace Trace::from_ndjson(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("step") || !j.contains("kind")) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": missing step or kind");
    }
    TraceEvent ev;
    ev.step = j.at("step").get<std::uint64_t>();
    ev.kind = j.at("kind").get<std::string>();
    ev.data = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "step" && it.key() != "kind") ev.data[it.key()] = it.value();
    }
    if (ev.step != t.events_.size()) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": step counter out of order");
    }
    t.events_.push_back(std::move(ev));
  }
  return t;
}

Trace Trace::from_ndjson(std::string_view text) {
  std::istringstream in{std::string(text)};
  return from_ndjson(in);
}

std::string digest_hex(const State& s) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(s.digest()));
  return buf;
}

void emit_visibility_changes(Trace& trace, const Domain& domain, const State& before, const State& after,
                             std::string_view cause) {
  for (auto p : domain.visibility_predicates()) {
    if (before.get(p) == after.get(p)) continue;
    trace.emit(event::kVisibilityChanged,
               Json{{"predicate", domain.predicate_name(p)}, {"value", after.get(p)}, {"cause", cause}});
  }
}

}  // namespace afp
