#pragma once

#include "defimc/checker.hpp"
#include "defimc/curve.hpp"
#include "defimc/scenario.hpp"

namespace defimc {

/// Instrumentation-only cells read by the property formulas. They
/// live in the store like any other cell and roll back with reverted
/// transactions; failed withdrawals record their outcome through a
/// sub-transaction so the bookkeeping survives the protocol rollback.
struct GhostCells {
  CellId supplied_tokens;
  CellId minted_ctokens;
  CellId minted_ccrv_tokens;
  CellId depositor_profit;
  CellId depositor_loss;
  CellId curve_deposited;
  CellId curve_withdrawn;
  CellId comp_deposited;
  CellId admissible_loss;
};

/// A scenario realized as an executable system: tokens, pools, programs,
/// initial store and the compiled properties.
struct BuiltSystem {
  System system;
  std::shared_ptr<const Ledger> ledger;
  TokenId usdc, dai, cusdc, cdai, ccrv;
  CTokenPool cusdc_pool, cdai_pool;
  SwapPool swap_pool;
  DepositZap zap;
  GhostCells ghosts;
  std::vector<PropertySpec> properties;
  ScenarioConfig config;

  /// Program index of the first user with this role, -1 when absent.
  int program_of(Role role) const;
  const PropertySpec& property(const std::string& name) const;
};

BuiltSystem build_system(const ScenarioConfig& cfg);

/// The step sequence for one role, with ghost instrumentation wired in.
std::vector<Step> build_user_program(const BuiltSystem& built, Role role, int slot);

/// Replay of a saved witness against its embedded scenario.
struct ReplayReport {
  bool replayed = false;        // every step re-executed with matching labels
  bool violation_reproduced = false;
  std::string message;
};

struct WitnessFile;
ReplayReport replay_witness(const WitnessFile& wf);

}  // namespace defimc
