#pragma once

#include <optional>

#include "defimc/expr.hpp"
#include "defimc/program.hpp"

namespace defimc {

/// The four checkable shapes: G p, G(p -> F q), G(e -> G p), max/min expr.
enum class PropertyKind { GlobalInvariant, Response, AfterEventAlways, ReachExtremum };
enum class ExtremumDir { Max, Min };

struct PropertySpec {
  std::string name;
  std::string text;
  PropertyKind kind = PropertyKind::GlobalInvariant;
  ExprPtr pred;         // invariant / goal of Response / predicate after event
  ExprPtr trigger;      // Response trigger
  std::string event;    // AfterEventAlways trigger event name
  ExprPtr expr;         // ReachExtremum expression
  ExtremumDir dir = ExtremumDir::Max;
};

enum class VerdictStatus { Valid, Invalid, Inconclusive, ExtremumResult };

const char* to_string(VerdictStatus s);

struct ExploreStats {
  std::uint64_t states_visited = 0;
  std::uint64_t transitions_taken = 0;
  double wall_seconds = 0.0;
};

struct TraceStep {
  std::int32_t user = -1;
  std::int32_t alt = 0;
  std::string step_name;
  std::vector<Event> events;
  bool reverted = false;
};

/// Replayable action sequence from the initial state to a witness state.
struct Trace {
  std::vector<TraceStep> steps;
  std::uint64_t final_state_hash = 0;
};

struct Verdict {
  std::string property;
  VerdictStatus status = VerdictStatus::Valid;
  std::optional<Int> extremum;
  std::optional<Trace> witness;
  ExploreStats stats;
};

struct ExploreOptions {
  int workers = 1;
  std::uint64_t state_budget = 2'000'000;
  std::uint64_t seed = 0;     // shuffles parallel chunking only, never results
  bool early_stop = true;
  // Hash-only visited set. Saves the full-state confirmation but a 64-bit
  // collision silently merges distinct states: unsound, opt-in only.
  bool bitstate = false;
};

/// Per-state check against a state formula: the invariant of G p, or the
/// predicate of an activated G(e -> G p).
bool check_state(const SystemState& state, const PropertySpec& prop);

/// Breadth-first exploration of one property. Invalid verdicts carry a
/// minimal-length, replay-verified witness; extremum queries explore the
/// whole reachable space and report value plus witness.
Verdict check_property(const System& sys, const PropertySpec& prop, const ExploreOptions& opts = {});

/// Checks each property in its own exploration run with its own stats.
std::vector<Verdict> explore(const System& sys, const std::vector<PropertySpec>& props,
                             const ExploreOptions& opts = {});

Verdict reach_extremum(const System& sys, const std::string& name, ExprPtr expr, ExtremumDir dir,
                       const ExploreOptions& opts = {});

// --- engine internals, shared by the serial and parallel explorers ---
namespace engine {

inline constexpr std::uint32_t kNoNode = 0xffffffffu;

/// Property compiled to a one-byte path monitor carried in the state key.
struct Monitor {
  const PropertySpec* prop = nullptr;

  std::uint8_t init_bits(const Store& s) const;
  std::uint8_t next_bits(std::uint8_t bits, const TransitionLabel& label, const Store& s) const;
  bool violated(std::uint8_t bits, const Store& s) const;
  bool violated_terminal(std::uint8_t bits, const Store& s) const;
  bool wants_terminals() const { return prop->kind == PropertyKind::Response; }
  bool is_extremum() const { return prop->kind == PropertyKind::ReachExtremum; }
};

/// BFS graph: fixed-width canonical keys in one arena plus parent links.
/// States are reconstructed from their keys when expanded or replayed.
struct Graph {
  std::size_t key_size = 0;
  std::vector<std::uint8_t> keys;
  std::vector<std::uint32_t> parent;
  std::vector<ActionRef> action;

  std::size_t size() const { return parent.size(); }
  const std::uint8_t* key(std::uint32_t i) const { return keys.data() + std::size_t(i) * key_size; }
};

struct Outcome {
  bool violated = false;
  std::uint32_t witness_node = kNoNode;
  bool budget_exceeded = false;
  std::optional<Int> extremum;
  std::uint32_t extremum_node = kNoNode;
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  Graph graph;
};

Outcome explore_serial(const System& sys, const Monitor& mon, const ExploreOptions& opts);
Outcome explore_parallel(const System& sys, const Monitor& mon, const ExploreOptions& opts);

/// Rebuilds the action path to `node`, replays it through the kernel and
/// checks the recorded final state matches bit-exactly.
Trace reconstruct_trace(const System& sys, const Graph& graph, std::uint32_t node);

SystemState state_from_key(const System& sys, const std::uint8_t* key, std::uint8_t* bits_out);

}  // namespace engine
}  // namespace defimc
