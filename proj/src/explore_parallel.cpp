#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "defimc/checker.hpp"

namespace defimc {
namespace engine {

namespace {

struct SuccRec {
  ActionRef action;
  std::uint64_t hash = 0;
  std::uint8_t bits = 0;
  bool violated = false;
  bool known_duplicate = false;  // matched the visited set at expansion time
  Int ext_val = 0;
};

struct NodeExpansion {
  bool terminal = false;
  std::vector<SuccRec> succs;
  std::vector<std::uint8_t> keys;  // contiguous, key_size bytes per successor

  void reset() {
    terminal = false;
    succs.clear();
    keys.clear();
  }
};

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

constexpr std::uint32_t kChunk = 256;

}  // namespace

// Level-synchronous BFS: each frontier chunk is expanded by the OpenMP
// team into per-node successor lists, which are then merged one by one in
// frontier order. Workers read the visited set only while the merge is
// idle and the merge is its only writer, so the explored graph, the
// statistics and every witness are identical to the serial engine's for
// any worker count.
Outcome explore_parallel(const System& sys, const Monitor& mon, const ExploreOptions& opts) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, opts.workers));
#endif

  Outcome out;
  const std::size_t slot_bytes = sys.schema->slot_count() * sizeof(Int);
  const std::size_t pc_bytes = sys.n_users() * sizeof(std::int32_t);
  out.graph.key_size = slot_bytes + pc_bytes + 1;

  VisitedSet visited{&out.graph, opts.bitstate, {}};
  visited.buckets.reserve(1 << 16);

  auto push_node = [&](const std::uint8_t* key, std::uint64_t hash, std::uint32_t parent,
                       ActionRef action) {
    out.graph.keys.insert(out.graph.keys.end(), key, key + out.graph.key_size);
    out.graph.parent.push_back(parent);
    out.graph.action.push_back(action);
    std::uint32_t node = static_cast<std::uint32_t>(out.graph.size() - 1);
    visited.insert(hash, node);
    out.states += 1;
    return node;
  };

  auto consider_extremum = [&](Int v, std::uint32_t node) {
    bool better = !out.extremum.has_value() ||
                  (mon.prop->dir == ExtremumDir::Max ? v > *out.extremum : v < *out.extremum);
    if (better) {
      out.extremum = v;
      out.extremum_node = node;
    }
  };

  SystemState init = initial_state(sys);
  std::uint8_t bits0 = mon.init_bits(init.store);
  {
    std::vector<std::uint8_t> key;
    init.append_key(key);
    key.push_back(bits0);
    push_node(key.data(), fnv1a64(key.data(), key.size()), kNoNode, {});
  }
  if (mon.is_extremum()) consider_extremum(eval_expr(*mon.prop->expr, init.store), 0);
  if (mon.violated(bits0, init.store)) {
    out.violated = true;
    out.witness_node = 0;
    if (opts.early_stop) return out;
  }

  std::mt19937_64 rng(opts.seed);
  std::vector<NodeExpansion> exps(kChunk);
  std::vector<std::uint32_t> order(kChunk);
  std::uint32_t level_begin = 0;
  std::uint32_t level_end = 1;

  while (level_begin < level_end) {
    for (std::uint32_t chunk = level_begin; chunk < level_end; chunk += kChunk) {
      std::uint32_t chunk_end = std::min(chunk + kChunk, level_end);
      std::uint32_t n = chunk_end - chunk;

      // Seed-dependent work order inside the chunk; the ordered merge
      // below keeps results schedule-independent.
      order.resize(n);
      std::iota(order.begin(), order.end(), 0u);
      if (opts.seed != 0) std::shuffle(order.begin(), order.end(), rng);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 2)
#endif
      for (std::uint32_t k = 0; k < n; ++k) {
        std::uint32_t node = chunk + order[k];
        NodeExpansion& exp = exps[order[k]];
        exp.reset();
        std::uint8_t bits = 0;
        SystemState state = state_from_key(sys, out.graph.key(node), &bits);
        std::vector<ActionRef> actions = enabled_actions(sys, state);
        if (actions.empty()) {
          exp.terminal = mon.violated_terminal(bits, state.store);
          continue;
        }
        exp.succs.reserve(actions.size());
        exp.keys.reserve(actions.size() * out.graph.key_size);
        for (ActionRef a : actions) {
          auto [label, succ] = apply_action(sys, state, a);
          SuccRec rec;
          rec.action = a;
          rec.bits = mon.next_bits(bits, label, succ.store);
          std::size_t base = exp.keys.size();
          succ.append_key(exp.keys);
          exp.keys.push_back(rec.bits);
          rec.hash = fnv1a64(exp.keys.data() + base, out.graph.key_size);
          // Read-only probe of the visited set; anything missed here (a
          // state first reached within this very level) is caught at merge.
          rec.known_duplicate = visited.find(rec.hash, exp.keys.data() + base) != kNoNode;
          rec.violated = !rec.known_duplicate && mon.violated(rec.bits, succ.store);
          if (mon.is_extremum()) rec.ext_val = eval_expr(*mon.prop->expr, succ.store);
          exp.succs.push_back(std::move(rec));
        }
      }

      for (std::uint32_t i = 0; i < n; ++i) {
        const NodeExpansion& exp = exps[i];
        std::uint32_t parent = chunk + i;
        if (exp.terminal && !out.violated) {
          out.violated = true;
          out.witness_node = parent;
          if (opts.early_stop) return out;
        }
        for (std::size_t k = 0; k < exp.succs.size(); ++k) {
          const SuccRec& rec = exp.succs[k];
          out.transitions += 1;
          if (rec.known_duplicate) continue;
          const std::uint8_t* key = exp.keys.data() + k * out.graph.key_size;
          if (visited.find(rec.hash, key) != kNoNode) continue;
          if (out.states >= opts.state_budget) {
            out.budget_exceeded = true;
            return out;
          }
          std::uint32_t node = push_node(key, rec.hash, parent, rec.action);
          if (mon.is_extremum()) consider_extremum(rec.ext_val, node);
          if (rec.violated && !out.violated) {
            out.violated = true;
            out.witness_node = node;
            if (opts.early_stop) return out;
          }
        }
      }
    }
    level_begin = level_end;
    level_end = static_cast<std::uint32_t>(out.graph.size());
  }
  return out;
}

}  // namespace engine
}  // namespace defimc
