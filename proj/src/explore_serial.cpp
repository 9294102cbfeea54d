#include <cstring>
#include <unordered_map>

#include "defimc/checker.hpp"

namespace defimc {
namespace engine {

namespace {

// Visited set over fixed-width keys: hash buckets with full-key
// confirmation, so colliding states are never conflated. Bitstate mode
// trusts the hash alone.
struct VisitedSet {
  const Graph* graph;
  bool bitstate;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;

  std::uint32_t find(std::uint64_t h, const std::uint8_t* key) const {
    auto it = buckets.find(h);
    if (it == buckets.end()) return kNoNode;
    if (bitstate) return it->second.front();
    for (std::uint32_t n : it->second)
      if (std::memcmp(graph->key(n), key, graph->key_size) == 0) return n;
    return kNoNode;
  }

  void insert(std::uint64_t h, std::uint32_t node) { buckets[h].push_back(node); }
};

}  // namespace

Outcome explore_serial(const System& sys, const Monitor& mon, const ExploreOptions& opts) {
  Outcome out;
  const std::size_t slot_bytes = sys.schema->slot_count() * sizeof(Int);
  const std::size_t pc_bytes = sys.n_users() * sizeof(std::int32_t);
  out.graph.key_size = slot_bytes + pc_bytes + 1;

  VisitedSet visited{&out.graph, opts.bitstate, {}};

  auto push_node = [&](const SystemState& st, std::uint8_t bits, std::uint32_t parent,
                       ActionRef action) {
    std::size_t base = out.graph.keys.size();
    st.append_key(out.graph.keys);
    out.graph.keys.push_back(bits);
    out.graph.parent.push_back(parent);
    out.graph.action.push_back(action);
    std::uint32_t node = static_cast<std::uint32_t>(out.graph.size() - 1);
    visited.insert(fnv1a64(out.graph.keys.data() + base, out.graph.key_size), node);
    out.states += 1;
    return node;
  };

  auto consider_extremum = [&](const Store& s, std::uint32_t node) {
    if (!mon.is_extremum()) return;
    Int v = eval_expr(*mon.prop->expr, s);
    bool better = !out.extremum.has_value() ||
                  (mon.prop->dir == ExtremumDir::Max ? v > *out.extremum : v < *out.extremum);
    if (better) {
      out.extremum = v;
      out.extremum_node = node;
    }
  };

  SystemState init = initial_state(sys);
  std::uint8_t bits0 = mon.init_bits(init.store);
  push_node(init, bits0, kNoNode, {});
  consider_extremum(init.store, 0);
  if (mon.violated(bits0, init.store)) {
    out.violated = true;
    out.witness_node = 0;
    if (opts.early_stop) return out;
  }

  std::vector<std::uint8_t> succ_key;
  succ_key.reserve(out.graph.key_size);

  // Nodes are inserted in BFS order, so the insertion index doubles as
  // the FIFO frontier cursor.
  for (std::uint32_t cursor = 0; cursor < out.graph.size(); ++cursor) {
    std::uint8_t bits = 0;
    SystemState state = state_from_key(sys, out.graph.key(cursor), &bits);
    std::vector<ActionRef> actions = enabled_actions(sys, state);

    if (actions.empty()) {
      if (mon.violated_terminal(bits, state.store) && !out.violated) {
        out.violated = true;
        out.witness_node = cursor;
        if (opts.early_stop) return out;
      }
      continue;
    }

    for (ActionRef a : actions) {
      auto [label, succ] = apply_action(sys, state, a);
      std::uint8_t succ_bits = mon.next_bits(bits, label, succ.store);
      out.transitions += 1;

      succ_key.clear();
      succ.append_key(succ_key);
      succ_key.push_back(succ_bits);
      std::uint64_t h = fnv1a64(succ_key.data(), succ_key.size());
      if (visited.find(h, succ_key.data()) != kNoNode) continue;

      if (out.states >= opts.state_budget) {
        out.budget_exceeded = true;
        return out;
      }
      std::uint32_t node = push_node(succ, succ_bits, cursor, a);
      consider_extremum(succ.store, node);
      if (mon.violated(succ_bits, succ.store) && !out.violated) {
        out.violated = true;
        out.witness_node = node;
        if (opts.early_stop) return out;
      }
    }
  }
  return out;
}

}  // namespace engine
}  // namespace defimc
