#include "defimc/checker.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

namespace defimc {

const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Valid: return "Valid";
    case VerdictStatus::Invalid: return "Invalid";
    case VerdictStatus::Inconclusive: return "Inconclusive";
    case VerdictStatus::ExtremumResult: return "ExtremumResult";
  }
  return "?";
}

bool check_state(const SystemState& state, const PropertySpec& prop) {
  if (prop.kind != PropertyKind::GlobalInvariant && prop.kind != PropertyKind::AfterEventAlways)
    throw ConfigError("check_state wants a state formula");
  return eval_pred(*prop.pred, state.store);
}

namespace engine {

std::uint8_t Monitor::init_bits(const Store& s) const {
  if (prop->kind == PropertyKind::Response)
    return eval_pred(*prop->trigger, s) && !eval_pred(*prop->pred, s) ? 1 : 0;
  return 0;
}

std::uint8_t Monitor::next_bits(std::uint8_t bits, const TransitionLabel& label,
                                const Store& s) const {
  switch (prop->kind) {
    case PropertyKind::AfterEventAlways: {
      if (bits) return 1;
      for (const Event& e : label.events)
        if (e.name == prop->event) return 1;
      return 0;
    }
    case PropertyKind::Response: {
      if (eval_pred(*prop->pred, s)) return 0;  // goal settles every pending trigger
      return bits || eval_pred(*prop->trigger, s) ? 1 : 0;
    }
    default:
      return 0;
  }
}

bool Monitor::violated(std::uint8_t bits, const Store& s) const {
  switch (prop->kind) {
    case PropertyKind::GlobalInvariant: return !eval_pred(*prop->pred, s);
    case PropertyKind::AfterEventAlways: return bits && !eval_pred(*prop->pred, s);
    default: return false;
  }
}

bool Monitor::violated_terminal(std::uint8_t bits, const Store& s) const {
  (void)s;
  return prop->kind == PropertyKind::Response && bits != 0;
}

SystemState state_from_key(const System& sys, const std::uint8_t* key, std::uint8_t* bits_out) {
  std::size_t n_slots = sys.schema->slot_count();
  std::size_t n_users = sys.n_users();
  SystemState st{Store(sys.schema), std::vector<std::int32_t>(n_users)};
  std::vector<Int> slots(n_slots);
  std::memcpy(slots.data(), key, n_slots * sizeof(Int));
  st.store.overwrite_slots(slots);
  std::memcpy(st.pcs.data(), key + n_slots * sizeof(Int), n_users * sizeof(std::int32_t));
  if (bits_out) *bits_out = key[n_slots * sizeof(Int) + n_users * sizeof(std::int32_t)];
  return st;
}

Trace reconstruct_trace(const System& sys, const Graph& graph, std::uint32_t node) {
  std::vector<ActionRef> path;
  for (std::uint32_t n = node; graph.parent[n] != kNoNode; n = graph.parent[n])
    path.push_back(graph.action[n]);
  std::reverse(path.begin(), path.end());

  Trace trace;
  SystemState state = initial_state(sys);
  for (ActionRef a : path) {
    auto [label, succ] = apply_action(sys, state, a);
    trace.steps.push_back({label.user, a.alt, label.step_name, label.events, label.reverted});
    state = std::move(succ);
  }
  // Replay must land on the recorded witness bit-exactly (monitor byte aside).
  std::vector<std::uint8_t> key;
  state.append_key(key);
  if (std::memcmp(key.data(), graph.key(node), key.size()) != 0)
    throw ConfigError("trace replay diverged from the explored witness");
  trace.final_state_hash = state.canonical_hash();
  return trace;
}

}  // namespace engine

Verdict check_property(const System& sys, const PropertySpec& prop, const ExploreOptions& opts) {
  engine::Monitor mon{&prop};
  auto t0 = std::chrono::steady_clock::now();
  engine::Outcome out = opts.workers > 1 ? engine::explore_parallel(sys, mon, opts)
                                         : engine::explore_serial(sys, mon, opts);
  auto t1 = std::chrono::steady_clock::now();

  Verdict v;
  v.property = prop.name;
  v.stats.states_visited = out.states;
  v.stats.transitions_taken = out.transitions;
  v.stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  if (out.violated) {
    v.status = VerdictStatus::Invalid;
    v.witness = engine::reconstruct_trace(sys, out.graph, out.witness_node);
  } else if (out.budget_exceeded) {
    v.status = VerdictStatus::Inconclusive;
  } else if (mon.is_extremum()) {
    v.status = VerdictStatus::ExtremumResult;
    v.extremum = out.extremum;
    if (out.extremum_node != engine::kNoNode)
      v.witness = engine::reconstruct_trace(sys, out.graph, out.extremum_node);
  } else {
    v.status = VerdictStatus::Valid;
  }
  return v;
}

std::vector<Verdict> explore(const System& sys, const std::vector<PropertySpec>& props,
                             const ExploreOptions& opts) {
  std::vector<Verdict> out;
  out.reserve(props.size());
  for (const PropertySpec& p : props) out.push_back(check_property(sys, p, opts));
  return out;
}

Verdict reach_extremum(const System& sys, const std::string& name, ExprPtr expr, ExtremumDir dir,
                       const ExploreOptions& opts) {
  PropertySpec prop;
  prop.name = name;
  prop.kind = PropertyKind::ReachExtremum;
  prop.expr = std::move(expr);
  prop.dir = dir;
  return check_property(sys, prop, opts);
}

}  // namespace defimc
