#include "defimc/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace defimc {

const char* to_string(Role r) {
  switch (r) {
    case Role::CurveDepositor: return "CurveDepositor";
    case Role::CurveExchanger: return "CurveExchanger";
    case Role::CompoundDepositor: return "CompoundDepositor";
    case Role::CompoundBorrower: return "CompoundBorrower";
    case Role::BlockProducer: return "BlockProducer";
    case Role::Contract: return "Contract";
  }
  return "?";
}

Role role_from_string(const std::string& s) {
  for (Role r : {Role::CurveDepositor, Role::CurveExchanger, Role::CompoundDepositor,
                 Role::CompoundBorrower, Role::BlockProducer, Role::Contract})
    if (s == to_string(r)) return r;
  throw ConfigError("unknown role '" + s + "'");
}

int ScenarioConfig::slot_of(const std::string& user_name) const {
  for (const UserDef& u : users)
    if (u.name == user_name) return u.slot;
  throw ConfigError("unknown user '" + user_name + "'");
}

int ScenarioConfig::n_slots() const {
  int n = 0;
  for (const UserDef& u : users) n = std::max(n, u.slot + 1);
  return n;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

Int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    Int v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer '" + s + "' for " + what);
  }
}

std::vector<Int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<Int> out;
  for (const std::string& w : split_ws(s)) out.push_back(parse_int(w, what));
  if (out.empty()) throw ConfigError("empty menu for " + what);
  return out;
}

std::string join_ints(const std::vector<Int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  ScenarioConfig cfg;
  cfg.curve_deposit_menu.clear();
  cfg.exchange_menu.clear();
  cfg.compound_deposit_menu.clear();

  std::istringstream is(text);
  std::string line;
  std::string section;
  bool versioned = false;
  int lineno = 0;

  auto err = [&](const std::string& msg) -> ConfigError {
    return ConfigError("scenario:" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!versioned) {
      if (line != "scnver 1") throw err("expected 'scnver 1' header");
      versioned = true;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw err("unterminated section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }

    if (section == "users") {
      auto parts = split_ws(line);
      if (parts.size() != 3) throw err("user rows are '<slot|-> <name> <role>'");
      UserDef u;
      u.slot = parts[0] == "-" ? -1 : static_cast<int>(parse_int(parts[0], "user slot"));
      u.name = parts[1];
      u.role = role_from_string(parts[2]);
      cfg.users.push_back(std::move(u));
      continue;
    }
    if (section.rfind("allowances.", 0) == 0) {
      std::string token = section.substr(11);
      auto parts = split_ws(line);
      if (parts.size() != 3) throw err("allowance rows are '<owner> <spender> <amount>'");
      cfg.allowances[token].push_back({parts[0], parts[1], parse_int(parts[2], "allowance")});
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) throw err("expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (section == "params") {
      if (key == "scale") cfg.scale = parse_int(value, key);
      else if (key == "amp") cfg.amp = parse_int(value, key);
      else if (key == "fee") cfg.fee = parse_int(value, key);
      else if (key == "baseRatePerBlock") cfg.base_rate_per_block = parse_int(value, key);
      else if (key == "multiplierPerBlock") cfg.multiplier_per_block = parse_int(value, key);
      else if (key == "reserveFactor") cfg.reserve_factor = parse_int(value, key);
      else if (key == "initialExchangeRate") cfg.initial_exchange_rate = parse_int(value, key);
      else if (key == "maxBlocks") cfg.max_blocks = parse_int(value, key);
      else if (key == "admissibleLossPermille") cfg.admissible_loss_permille = parse_int(value, key);
      else if (key == "stateBudget") cfg.state_budget = static_cast<std::uint64_t>(parse_int(value, key));
      else if (key == "redeemSupplyIncrement") cfg.redeem_supply_increment = parse_int(value, key) != 0;
      else throw err("unknown param '" + key + "'");
    } else if (section == "contracts") {
      if (key == "zap") cfg.zap_name = value;
      else if (key == "swap") cfg.swap_name = value;
      else if (key == "cusdcPool") cfg.cusdc_pool_name = value;
      else if (key == "cdaiPool") cfg.cdai_pool_name = value;
      else throw err("unknown contract '" + key + "'");
    } else if (section == "menus") {
      if (key == "curveDeposit") cfg.curve_deposit_menu = parse_int_list(value, key);
      else if (key == "exchange") cfg.exchange_menu = parse_int_list(value, key);
      else if (key == "exchangeSteps") cfg.exchange_steps = parse_int(value, key);
      else if (key == "compoundDeposit") cfg.compound_deposit_menu = parse_int_list(value, key);
      else throw err("unknown menu '" + key + "'");
    } else if (section.rfind("balances.", 0) == 0) {
      cfg.balances[section.substr(9)][key] = parse_int(value, "balance");
    } else if (section == "properties") {
      cfg.properties.emplace_back(key, value);
    } else {
      throw err("unknown section '" + section + "'");
    }
  }
  if (!versioned) throw ConfigError("scenario: missing 'scnver 1' header");

  // Basic shape checks; deeper validation happens at system build.
  std::vector<std::string> names;
  for (const UserDef& u : cfg.users) names.push_back(u.name);
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    throw ConfigError("scenario: duplicate user name");
  if (cfg.exchange_menu.empty() || cfg.curve_deposit_menu.empty() || cfg.compound_deposit_menu.empty())
    throw ConfigError("scenario: menus must be non-empty");
  return cfg;
}

std::string ScenarioConfig::serialize() const {
  std::ostringstream os;
  os << "scnver 1\n\n";
  os << "[params]\n";
  os << "scale = " << scale << "\n";
  os << "amp = " << amp << "\n";
  os << "fee = " << fee << "\n";
  os << "baseRatePerBlock = " << base_rate_per_block << "\n";
  os << "multiplierPerBlock = " << multiplier_per_block << "\n";
  os << "reserveFactor = " << reserve_factor << "\n";
  os << "initialExchangeRate = " << initial_exchange_rate << "\n";
  os << "maxBlocks = " << max_blocks << "\n";
  os << "admissibleLossPermille = " << admissible_loss_permille << "\n";
  os << "stateBudget = " << state_budget << "\n";
  os << "redeemSupplyIncrement = " << (redeem_supply_increment ? 1 : 0) << "\n";

  os << "\n[users]\n";
  for (const UserDef& u : users) {
    if (u.slot < 0) os << "-";
    else os << u.slot;
    os << " " << u.name << " " << to_string(u.role) << "\n";
  }

  os << "\n[contracts]\n";
  os << "zap = " << zap_name << "\n";
  os << "swap = " << swap_name << "\n";
  os << "cusdcPool = " << cusdc_pool_name << "\n";
  os << "cdaiPool = " << cdai_pool_name << "\n";

  os << "\n[menus]\n";
  os << "curveDeposit = " << join_ints(curve_deposit_menu) << "\n";
  os << "exchange = " << join_ints(exchange_menu) << "\n";
  os << "exchangeSteps = " << exchange_steps << "\n";
  os << "compoundDeposit = " << join_ints(compound_deposit_menu) << "\n";

  for (const char* token : kTokenNames) {
    auto it = balances.find(token);
    if (it == balances.end() || it->second.empty()) continue;
    os << "\n[balances." << token << "]\n";
    for (const auto& [user, amount] : it->second) os << user << " = " << amount << "\n";
  }
  for (const char* token : kTokenNames) {
    auto it = allowances.find(token);
    if (it == allowances.end() || it->second.empty()) continue;
    os << "\n[allowances." << token << "]\n";
    for (const AllowanceDef& a : it->second)
      os << a.owner << " " << a.spender << " " << a.amount << "\n";
  }

  if (!properties.empty()) {
    os << "\n[properties]\n";
    for (const auto& [name, formula] : properties) os << name << " = " << formula << "\n";
  }
  return os.str();
}

ScenarioConfig ScenarioConfig::default_scenario() {
  ScenarioConfig cfg;
  cfg.users = {
      {0, "curveDepositor", Role::CurveDepositor},
      {1, "curveExchanger", Role::CurveExchanger},
      {2, "compoundDepositor", Role::CompoundDepositor},
      {3, "compoundBorrower", Role::CompoundBorrower},
      {4, "curveDeposit", Role::Contract},
      {5, "curveSwap", Role::Contract},
      {6, "compCUSDC", Role::Contract},
      {7, "compCDAI", Role::Contract},
      {-1, "blockProducer", Role::BlockProducer},
  };
  cfg.zap_name = "curveDeposit";
  cfg.swap_name = "curveSwap";
  cfg.cusdc_pool_name = "compCUSDC";
  cfg.cdai_pool_name = "compCDAI";

  cfg.balances["USDC"] = {{"curveDepositor", 3000},
                          {"compoundDepositor", 3000},
                          {"compoundBorrower", 2000},
                          {"compCUSDC", 2000}};
  cfg.balances["DAI"] = {{"curveExchanger", 8000}, {"compCDAI", 2000}};
  cfg.balances["cUSDC"] = {{"curveExchanger", 2000}};
  cfg.balances["cDAI"] = {{"curveExchanger", 2000}};
  // The exchanger only trades; its swap allowances are part of the setup.
  cfg.allowances["cUSDC"] = {{"curveExchanger", "curveSwap", 1000000}};
  cfg.allowances["cDAI"] = {{"curveExchanger", "curveSwap", 1000000}};

  cfg.properties = {
      {"p1_balance_invariants",
       "G ((sum(USDC_balances) == USDC_totalSupply) && (sum(DAI_balances) == DAI_totalSupply) && "
       "(sum(cUSDC_balances) == cUSDC_totalSupply) && (sum(cDAI_accountTokens) == cDAI_totalSupply) && "
       "(sum(cCrv_balances) == cCrv_totalSupply))"},
      {"p2_proportional_token_exchange",
       "G ((suppliedTokens > 0) -> F ((mintedCTokens > 0) && (mintedCCrvTokens > 0)))"},
      {"p3_nondecreasing_exchange_rate", "G (prevExchangeRate <= newExchangeRate)"},
      {"p4_nonnegative_profit", "G (Mint.cUSDC -> G (depositorProfit >= 0))"},
      {"p5_bounded_loss", "G (AddLiquidity -> G (depositorLoss <= ADMISSIBLE_LOSS))"},
  };
  return cfg;
}

}  // namespace defimc
