#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "defimc/checker.hpp"

namespace defimc {

/// Saved counterexample: the scenario it was found in (embedded verbatim
/// so replay needs nothing else), the property, and the labeled steps.
struct WitnessFile {
  int version = 1;
  std::string scenario_text;
  std::string property_name;
  std::string formula;
  std::string status;
  std::optional<Int> extremum;
  Trace trace;
};

nlohmann::json trace_to_json(const Trace& t);
Trace trace_from_json(const nlohmann::json& j);

nlohmann::json witness_to_json(const WitnessFile& wf);
WitnessFile witness_from_json(const nlohmann::json& j);

WitnessFile load_witness_file(const std::string& path);
void save_witness_file(const std::string& path, const WitnessFile& wf);

/// Report object per verdict: status, property name, statesVisited,
/// transitionsTaken, wallTime, optional trace.
nlohmann::json verdict_to_json(const Verdict& v);

}  // namespace defimc
