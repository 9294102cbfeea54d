#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "defimc/store.hpp"

namespace defimc {

enum class Role {
  CurveDepositor,
  CurveExchanger,
  CompoundDepositor,
  CompoundBorrower,
  BlockProducer,
  Contract,  // balance slot only, no behavior
};

const char* to_string(Role r);
Role role_from_string(const std::string& s);

struct UserDef {
  int slot = -1;  // -1: program-only process without a balance slot
  std::string name;
  Role role = Role::Contract;
};

/// The five tokens of the modeled composition, in slot-layout order.
inline const std::array<const char*, 5> kTokenNames = {"USDC", "DAI", "cUSDC", "cDAI", "cCrv"};

/// Everything a run needs: participants, initial balances and allowances,
/// pool parameters, amount menus, bounds and the property formulas.
/// Parsed from the versioned line-oriented scenario format (`scnver 1`).
struct ScenarioConfig {
  Int scale = 10000;
  Int amp = 85;
  Int fee = 4;
  Int base_rate_per_block = 0;
  Int multiplier_per_block = 500;
  Int reserve_factor = 0;
  Int initial_exchange_rate = 10000;
  Int max_blocks = 3;
  Int admissible_loss_permille = 200;
  std::uint64_t state_budget = 2'000'000;
  bool redeem_supply_increment = false;

  std::vector<UserDef> users;
  std::string zap_name, swap_name, cusdc_pool_name, cdai_pool_name;

  std::vector<Int> curve_deposit_menu = {200};
  std::vector<Int> exchange_menu = {0, 1500};
  Int exchange_steps = 2;
  std::vector<Int> compound_deposit_menu = {200};

  struct AllowanceDef {
    std::string owner, spender;
    Int amount = 0;
  };

  // token -> (user name -> amount) / list of initial allowances
  std::map<std::string, std::map<std::string, Int>> balances;
  std::map<std::string, std::vector<AllowanceDef>> allowances;

  std::vector<std::pair<std::string, std::string>> properties;

  static ScenarioConfig parse(const std::string& text);
  std::string serialize() const;

  int slot_of(const std::string& user_name) const;
  int n_slots() const;

  /// The desk-scale Curve-Compound composition used throughout.
  static ScenarioConfig default_scenario();
};

}  // namespace defimc
