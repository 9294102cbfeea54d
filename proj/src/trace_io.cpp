#include "defimc/trace_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace defimc {

using nlohmann::json;

namespace {

json event_to_json(const Event& e) { return json{{"name", e.name}, {"payload", e.payload}}; }

Event event_from_json(const json& j) {
  Event e;
  e.name = j.at("name").get<std::string>();
  e.payload = j.at("payload").get<std::vector<Int>>();
  return e;
}

}  // namespace

json trace_to_json(const Trace& t) {
  json steps = json::array();
  for (const TraceStep& s : t.steps) {
    json evs = json::array();
    for (const Event& e : s.events) evs.push_back(event_to_json(e));
    steps.push_back(json{{"user", s.user},
                         {"alt", s.alt},
                         {"step", s.step_name},
                         {"reverted", s.reverted},
                         {"events", evs}});
  }
  return json{{"steps", steps}, {"finalStateHash", t.final_state_hash}};
}

Trace trace_from_json(const json& j) {
  Trace t;
  for (const json& js : j.at("steps")) {
    TraceStep s;
    s.user = js.at("user").get<std::int32_t>();
    s.alt = js.at("alt").get<std::int32_t>();
    s.step_name = js.at("step").get<std::string>();
    s.reverted = js.at("reverted").get<bool>();
    for (const json& je : js.at("events")) s.events.push_back(event_from_json(je));
    t.steps.push_back(std::move(s));
  }
  t.final_state_hash = j.at("finalStateHash").get<std::uint64_t>();
  return t;
}

json witness_to_json(const WitnessFile& wf) {
  json j{{"version", wf.version},
         {"scenario", wf.scenario_text},
         {"property", wf.property_name},
         {"formula", wf.formula},
         {"status", wf.status},
         {"trace", trace_to_json(wf.trace)}};
  if (wf.extremum) j["extremum"] = *wf.extremum;
  return j;
}

WitnessFile witness_from_json(const json& j) {
  WitnessFile wf;
  wf.version = j.at("version").get<int>();
  if (wf.version != 1) throw ConfigError("unsupported witness file version");
  wf.scenario_text = j.at("scenario").get<std::string>();
  wf.property_name = j.at("property").get<std::string>();
  wf.formula = j.at("formula").get<std::string>();
  wf.status = j.at("status").get<std::string>();
  if (j.contains("extremum")) wf.extremum = j.at("extremum").get<Int>();
  wf.trace = trace_from_json(j.at("trace"));
  return wf;
}

WitnessFile load_witness_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  json j;
  try {
    in >> j;
    return witness_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError("malformed trace file '" + path + "': " + e.what());
  }
}

void save_witness_file(const std::string& path, const WitnessFile& wf) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace file '" + path + "'");
  out << witness_to_json(wf).dump(2) << "\n";
}

json verdict_to_json(const Verdict& v) {
  json j{{"property", v.property},
         {"status", to_string(v.status)},
         {"statesVisited", v.stats.states_visited},
         {"transitionsTaken", v.stats.transitions_taken},
         {"wallTime", v.stats.wall_seconds}};
  if (v.extremum) j["extremum"] = *v.extremum;
  if (v.witness) j["trace"] = trace_to_json(*v.witness);
  return j;
}

}  // namespace defimc
