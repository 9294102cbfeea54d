#include "defimc/program.hpp"

#include <cstring>

namespace defimc {

void SystemState::append_key(std::vector<std::uint8_t>& out) const {
  store.append_key(out);
  std::size_t base = out.size();
  out.resize(base + pcs.size() * sizeof(std::int32_t));
  std::memcpy(out.data() + base, pcs.data(), pcs.size() * sizeof(std::int32_t));
}

std::uint64_t SystemState::canonical_hash() const {
  std::vector<std::uint8_t> key;
  append_key(key);
  return fnv1a64(key.data(), key.size());
}

SystemState initial_state(const System& sys) {
  SystemState s{sys.initial_store, std::vector<std::int32_t>(sys.n_users(), 0)};
  return s;
}

std::vector<ActionRef> enabled_actions(const System& sys, const SystemState& state) {
  std::vector<ActionRef> out;
  for (std::size_t u = 0; u < sys.n_users(); ++u) {
    auto pc = state.pcs[u];
    if (pc < 0 || pc >= static_cast<std::int32_t>(sys.programs[u].steps.size())) continue;
    const Step& step = sys.programs[u].steps[pc];
    for (std::size_t a = 0; a < step.size(); ++a) {
      if (!step[a].guard || step[a].guard(state.store))
        out.push_back({static_cast<std::int32_t>(u), static_cast<std::int32_t>(a)});
    }
  }
  return out;
}

std::pair<TransitionLabel, SystemState> apply_action(const System& sys, const SystemState& state,
                                                     ActionRef action) {
  const UserProgram& prog = sys.programs.at(action.user);
  auto pc = state.pcs.at(action.user);
  if (pc < 0 || pc >= static_cast<std::int32_t>(prog.steps.size()))
    throw ConfigError("action on exhausted program '" + prog.name + "'");
  const StepAlternative& alt = prog.steps[pc].at(action.alt);

  SystemState next{state.store, state.pcs};
  AtomicOutcome outcome = run_atomic(next.store, alt.body, &sys.registry);
  if (outcome.committed) {
    next.pcs[action.user] = pc + 1;
  } else {
    // The failed user retries nothing.
    next.pcs[action.user] = static_cast<std::int32_t>(prog.steps.size());
  }

  TransitionLabel label{action.user, alt.name, std::move(outcome.events), !outcome.committed};
  return {std::move(label), std::move(next)};
}

}  // namespace defimc
