#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "CLI11.hpp"
#include "defimc/harness.hpp"
#include "defimc/property_parser.hpp"
#include "defimc/trace_io.hpp"

namespace {

using namespace defimc;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonOpts {
  int workers = 1;
  std::uint64_t state_budget = 0;  // 0: take the scenario's budget
  std::uint64_t seed = 0;
  std::string format = "text";
  bool bitstate = false;
};

ExploreOptions explore_options(const CommonOpts& c, const ScenarioConfig& cfg) {
  ExploreOptions o;
  o.workers = c.workers;
  o.state_budget = c.state_budget ? c.state_budget : cfg.state_budget;
  o.seed = c.seed;
  o.bitstate = c.bitstate;
  if (c.bitstate)
    std::cerr << "warning: --bitstate dedupes by 64-bit hash alone; "
                 "a collision can hide reachable states (unsound)\n";
  return o;
}

void print_witness_text(const BuiltSystem& built, const Trace& trace) {
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    std::cout << "    " << i + 1 << ". " << built.system.programs[s.user].name << ": "
              << s.step_name;
    if (s.reverted) std::cout << "  [reverted]";
    for (const Event& e : s.events)
      if (e.name == kRevertEvent) {
        std::cout << "  [inner REVERT]";
        break;
      }
    std::cout << "\n";
  }
}

void print_verdict_text(const BuiltSystem& built, const Verdict& v) {
  std::ostringstream line;
  line << v.property << ": " << to_string(v.status);
  if (v.extremum) line << " value=" << *v.extremum;
  line << "  (states " << v.stats.states_visited << ", transitions " << v.stats.transitions_taken
       << ", " << v.stats.wall_seconds << "s)";
  std::cout << line.str() << "\n";
  if (v.witness && v.status == VerdictStatus::Invalid) {
    std::cout << "  counterexample (" << v.witness->steps.size() << " steps):\n";
    print_witness_text(built, *v.witness);
  }
}

void maybe_save_trace(const std::string& trace_dir, const BuiltSystem& built,
                      const PropertySpec& prop, const Verdict& v) {
  if (trace_dir.empty() || !v.witness) return;
  std::filesystem::create_directories(trace_dir);
  WitnessFile wf;
  wf.scenario_text = built.config.serialize();
  wf.property_name = prop.name;
  wf.formula = prop.text;
  wf.status = to_string(v.status);
  wf.extremum = v.extremum;
  wf.trace = *v.witness;
  save_witness_file(trace_dir + "/" + prop.name + ".trace.json", wf);
}

int run_verify(const std::string& scenario_path, const std::string& property_name,
               const CommonOpts& common, const std::string& trace_dir, bool redeem_supply_increment) {
  ScenarioConfig cfg = ScenarioConfig::parse(read_file(scenario_path));
  if (redeem_supply_increment) cfg.redeem_supply_increment = true;
  BuiltSystem built = build_system(cfg);

  std::vector<PropertySpec> props;
  if (property_name.empty()) {
    props = built.properties;
  } else {
    props.push_back(built.property(property_name));
  }
  if (props.empty()) throw ConfigError("scenario declares no properties");

  ExploreOptions opts = explore_options(common, cfg);
  std::vector<Verdict> verdicts = explore(built.system, props, opts);

  bool any_invalid = false, any_inconclusive = false;
  json results = json::array();
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const Verdict& v = verdicts[i];
    any_invalid |= v.status == VerdictStatus::Invalid;
    any_inconclusive |= v.status == VerdictStatus::Inconclusive;
    if (common.format == "json") results.push_back(verdict_to_json(v));
    else print_verdict_text(built, v);
    maybe_save_trace(trace_dir, built, props[i], v);
  }
  if (common.format == "json")
    std::cout << json{{"scenario", scenario_path}, {"results", results}}.dump(2) << "\n";
  if (any_inconclusive) return 2;
  return any_invalid ? 1 : 0;
}

int run_extremum(const std::string& scenario_path, const std::string& expr_text, bool want_max,
                 const CommonOpts& common, const std::string& trace_out) {
  ScenarioConfig cfg = ScenarioConfig::parse(read_file(scenario_path));
  BuiltSystem built = build_system(cfg);
  ExprPtr expr = parse_expression(expr_text, *built.system.schema);
  std::string name = std::string(want_max ? "max" : "min") + " " + expr_text;

  Verdict v = reach_extremum(built.system, name, expr, want_max ? ExtremumDir::Max : ExtremumDir::Min,
                             explore_options(common, cfg));
  if (common.format == "json") {
    std::cout << verdict_to_json(v).dump(2) << "\n";
  } else {
    print_verdict_text(built, v);
    if (v.witness && !v.witness->steps.empty()) {
      std::cout << "  witness (" << v.witness->steps.size() << " steps):\n";
      print_witness_text(built, *v.witness);
    }
  }
  if (v.status == VerdictStatus::Inconclusive) return 2;
  if (!trace_out.empty() && v.witness) {
    WitnessFile wf;
    wf.scenario_text = built.config.serialize();
    wf.property_name = name;
    wf.formula = name;
    wf.status = to_string(v.status);
    wf.extremum = v.extremum;
    wf.trace = *v.witness;
    save_witness_file(trace_out, wf);
  }
  return 0;
}

int run_replay(const std::string& trace_path, const CommonOpts& common) {
  WitnessFile wf = load_witness_file(trace_path);
  ReplayReport rep = replay_witness(wf);
  if (common.format == "json") {
    std::cout << json{{"property", wf.property_name},
                      {"replayed", rep.replayed},
                      {"violationReproduced", rep.violation_reproduced},
                      {"message", rep.message}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << wf.property_name << ": " << rep.message << "\n";
  }
  if (!rep.replayed) return 2;
  return rep.violation_reproduced ? 1 : 0;
}

int run_stats(const std::string& scenario_path, const CommonOpts& common) {
  ScenarioConfig cfg = ScenarioConfig::parse(read_file(scenario_path));
  BuiltSystem built = build_system(cfg);
  ExploreOptions opts = explore_options(common, cfg);
  std::vector<Verdict> verdicts = explore(built.system, built.properties, opts);

  int rc = 0;
  std::cout << "property                          result        states  transitions   time(s)\n";
  for (const Verdict& v : verdicts) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-32s  %-12s %7llu  %11llu  %8.3f", v.property.c_str(),
                  to_string(v.status), static_cast<unsigned long long>(v.stats.states_visited),
                  static_cast<unsigned long long>(v.stats.transitions_taken), v.stats.wall_seconds);
    std::cout << buf << "\n";
    if (v.status == VerdictStatus::Invalid) rc = std::max(rc, 1);
    if (v.status == VerdictStatus::Inconclusive) rc = 2;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit-state checker for the Curve-Compound composition model"};
  app.require_subcommand(1);

  CommonOpts common;
  auto add_common = [&common](CLI::App* cmd) {
    cmd->add_option("--workers", common.workers, "exploration worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--state-budget", common.state_budget, "max states before Inconclusive");
    cmd->add_option("--seed", common.seed, "parallel scheduling seed (never affects verdicts)");
    cmd->add_option("--format", common.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--bitstate", common.bitstate, "hash-only visited set (unsound, saves compares)");
  };

  std::string scenario_path, property_name, trace_dir, expr_text, trace_path, trace_out;
  bool all_props = false, want_max = false, want_min = false, redeem_supply_increment = false;

  CLI::App* verify = app.add_subcommand("verify", "check properties against a scenario");
  verify->add_option("scenario", scenario_path, "scenario file")->required();
  verify->add_option("--property", property_name, "single property name");
  verify->add_flag("--all", all_props, "check every declared property (default)");
  verify->add_option("--trace-dir", trace_dir, "write witness traces here");
  verify->add_flag("--redeem-supply-increment", redeem_supply_increment,
                   "redeem increments totalSupply (invariant-breaking study mode)");
  add_common(verify);

  CLI::App* extremum = app.add_subcommand("extremum", "reachable extremum of an expression");
  extremum->add_option("scenario", scenario_path, "scenario file")->required();
  extremum->add_option("--expr", expr_text, "expression over store cells")->required();
  extremum->add_flag("--max", want_max, "maximize");
  extremum->add_flag("--min", want_min, "minimize");
  extremum->add_option("--trace-out", trace_out, "write the witness trace here");
  add_common(extremum);

  CLI::App* replay = app.add_subcommand("replay", "re-execute and re-check a saved trace");
  replay->add_option("trace", trace_path, "trace file")->required();
  add_common(replay);

  CLI::App* stats = app.add_subcommand("stats", "per-property exploration statistics");
  stats->add_option("scenario", scenario_path, "scenario file")->required();
  add_common(stats);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(verify)) {
      if (all_props) property_name.clear();
      return run_verify(scenario_path, property_name, common, trace_dir, redeem_supply_increment);
    }
    if (app.got_subcommand(extremum)) {
      if (want_max == want_min) throw ConfigError("pass exactly one of --max/--min");
      return run_extremum(scenario_path, expr_text, want_max, common, trace_out);
    }
    if (app.got_subcommand(replay)) return run_replay(trace_path, common);
    if (app.got_subcommand(stats)) return run_stats(scenario_path, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
