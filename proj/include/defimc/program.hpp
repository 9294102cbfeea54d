#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "defimc/kernel.hpp"

namespace defimc {

/// One way a user's next atomic step can fire. Steps with several
/// alternatives model finite menus (e.g. trade amount/direction choices).
struct StepAlternative {
  std::string name;      // process name recorded on transition labels
  Pred guard;            // empty = always enabled
  TermPtr body;          // executed under run_atomic
};

using Step = std::vector<StepAlternative>;

/// A user behavior: a sequence of atomic steps. Only `;` composition of
/// atomics appears in the modeled protocols, so a program counter fully
/// describes progress.
struct UserProgram {
  std::string name;
  int slot = -1;  // user index in balance arrays
  std::vector<Step> steps;
};

/// The interleaved composition: shared store plus one program per user.
struct System {
  SchemaPtr schema;
  ProcessRegistry registry;
  std::vector<UserProgram> programs;
  Store initial_store;

  std::size_t n_users() const { return programs.size(); }
};

/// One node of the explored graph: store plus per-user program counters.
struct SystemState {
  Store store;
  std::vector<std::int32_t> pcs;

  void append_key(std::vector<std::uint8_t>& out) const;
  std::uint64_t canonical_hash() const;
  bool operator==(const SystemState& rhs) const { return store == rhs.store && pcs == rhs.pcs; }
};

SystemState initial_state(const System& sys);

struct ActionRef {
  std::int32_t user = -1;
  std::int32_t alt = 0;
  bool operator==(const ActionRef&) const = default;
};

struct TransitionLabel {
  std::int32_t user = -1;
  std::string step_name;
  std::vector<Event> events;
  bool reverted = false;
};

/// Every (user, alternative) whose guard holds in the current store.
/// Interleaving happens only at these atomic-step boundaries.
std::vector<ActionRef> enabled_actions(const System& sys, const SystemState& state);

/// Executes one enabled step. Reverted steps leave the store bit-exact
/// and terminate the failing user's remaining program.
std::pair<TransitionLabel, SystemState> apply_action(const System& sys, const SystemState& state,
                                                     ActionRef action);

}  // namespace defimc
