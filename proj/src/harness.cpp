#include "defimc/harness.hpp"

#include <algorithm>

#include "defimc/property_parser.hpp"
#include "defimc/trace_io.hpp"

namespace defimc {

int BuiltSystem::program_of(Role role) const {
  for (std::size_t i = 0; i < config.users.size(); ++i) {
    // program order follows non-contract user rows
    if (config.users[i].role == role && role != Role::Contract) {
      int idx = 0;
      for (std::size_t j = 0; j < i; ++j)
        if (config.users[j].role != Role::Contract) ++idx;
      return idx;
    }
  }
  return -1;
}

const PropertySpec& BuiltSystem::property(const std::string& name) const {
  for (const PropertySpec& p : properties)
    if (p.name == name) return p;
  throw ConfigError("unknown property '" + name + "'");
}

namespace {

std::vector<Int> balance_vector(const ScenarioConfig& cfg, const std::string& token) {
  std::vector<Int> init(cfg.n_slots(), 0);
  auto it = cfg.balances.find(token);
  if (it == cfg.balances.end()) return init;
  for (const auto& [user, amount] : it->second) {
    int slot = cfg.slot_of(user);
    if (slot < 0) throw ConfigError("balance for slotless user '" + user + "'");
    init[slot] = amount;
  }
  return init;
}

std::string amount_suffix(const std::vector<Int>& menu, Int m) {
  return menu.size() > 1 ? "_" + std::to_string(m) : "";
}

}  // namespace

std::vector<Step> build_user_program(const BuiltSystem& built, Role role, int slot) {
  const ScenarioConfig& cfg = built.config;
  const auto ledger = built.ledger;
  const GhostCells g = built.ghosts;
  const DepositZap zap = built.zap;
  const CTokenPool pool = built.cusdc_pool;
  const TokenId usdc = built.usdc, cusdc = built.cusdc, ccrv = built.ccrv;
  const std::size_t zap_slot = zap.zap_slot;
  const std::size_t swap_slot = built.swap_pool.swap_slot;
  const Int u = slot;

  std::vector<Step> steps;
  switch (role) {
    case Role::CurveDepositor: {
      Step approve, deposit, approve_ccrv, withdraw;
      for (Int m : cfg.curve_deposit_menu) {
        std::string sfx = amount_suffix(cfg.curve_deposit_menu, m);
        approve.push_back({"USDC_approve" + sfx, {},
                           term::call("USDC_approve", {u, static_cast<Int>(zap_slot), m})});
        deposit.push_back(
            {"Curve_addLiquidity" + sfx, {}, term::tau([=](ExecCtx& ctx) {
               Store& s = ctx.store();
               s.set(g.curve_deposited, m);
               s.set(g.supplied_tokens, m);
               Int c0_before = ledger->balance(s, cusdc, swap_slot);
               Int minted = curve::zap_add_liquidity(ctx, *ledger, zap, {m, 0}, 0, u);
               s.set(g.minted_ctokens, ledger->balance(s, cusdc, swap_slot) - c0_before);
               s.set(g.minted_ccrv_tokens, minted);
             })});
      }
      approve_ccrv.push_back({"cCrv_approve", {}, term::tau([=](ExecCtx& ctx) {
                                Int all = ledger->balance(ctx.store(), ccrv, u);
                                ledger->approve(ctx, ccrv, u, zap_slot, all);
                              })});
      withdraw.push_back(
          {"Curve_remove_liquidity_one_coin", {}, term::tau([=](ExecCtx& ctx) {
             Store& s = ctx.store();
             Int tokens = ledger->balance(s, ccrv, u);
             Int usdc_before = ledger->balance(s, usdc, u);
             bool ok = ctx.attempt([&](ExecCtx& c) {
               curve::zap_remove_liquidity_one_coin(c, *ledger, zap, tokens, 0, u, true);
             });
             Int withdrawn = ok ? ledger->balance(s, usdc, u) - usdc_before : 0;
             s.set(g.curve_withdrawn, withdrawn);
             Int deposited = s.get(g.curve_deposited);
             Int loss = deposited > 0 ? std::max<Int>(0, deposited - withdrawn) * 1000 / deposited : 0;
             s.set(g.depositor_loss, loss);
           })});
      steps = {approve, deposit, approve_ccrv, withdraw};
      break;
    }
    case Role::CurveExchanger: {
      Step trade;
      for (Int m : cfg.exchange_menu) {
        if (m == 0) {
          trade.push_back({"Curve_exchange_skip", {}, term::skip()});
        } else {
          trade.push_back({"Curve_exchange_0_1_" + std::to_string(m), {},
                           term::call("Curve_exchange", {u, 0, 1, m, 0})});
          trade.push_back({"Curve_exchange_1_0_" + std::to_string(m), {},
                           term::call("Curve_exchange", {u, 1, 0, m, 0})});
        }
      }
      steps.assign(static_cast<std::size_t>(std::max<Int>(0, cfg.exchange_steps)), trade);
      break;
    }
    case Role::CompoundDepositor: {
      Step approve, mint, redeem;
      for (Int m : cfg.compound_deposit_menu) {
        std::string sfx = amount_suffix(cfg.compound_deposit_menu, m);
        approve.push_back({"USDC_approve" + sfx, {},
                           term::call("USDC_approve", {u, static_cast<Int>(pool.pool_slot), m})});
        mint.push_back({"cUSDC_mint" + sfx, {},
                        term::seq(term::tau([=](ExecCtx& ctx) { ctx.store().set(g.comp_deposited, m); }),
                                  term::call("cUSDC_mint", {u, m}))});
      }
      redeem.push_back({"cUSDC_redeem", {}, term::tau([=](ExecCtx& ctx) {
                          Store& s = ctx.store();
                          Int tokens = ledger->balance(s, cusdc, u);
                          Int usdc_before = ledger->balance(s, usdc, u);
                          bool ok = ctx.attempt([&](ExecCtx& c) {
                            compound::redeem_ctoken(c, *ledger, pool, u, tokens,
                                                    c.store().block_number());
                          });
                          Int got = ok ? ledger->balance(s, usdc, u) - usdc_before : 0;
                          s.set(g.depositor_profit, got - s.get(g.comp_deposited));
                        })});
      steps = {approve, mint, redeem};
      break;
    }
    case Role::CompoundBorrower: {
      steps.push_back({{"cUSDC_borrowAll", {}, term::call("cUSDC_borrowAll", {u})}});
      steps.push_back({{"cUSDC_repayBorrow", {}, term::call("cUSDC_repayBorrow", {u})}});
      break;
    }
    case Role::BlockProducer: {
      Step inc{{"IncreaseBlockNum", {}, term::call("IncreaseBlockNum", {})}};
      steps.assign(static_cast<std::size_t>(std::max<Int>(0, cfg.max_blocks)), inc);
      break;
    }
    case Role::Contract:
      throw ConfigError("contracts have no behavior");
  }
  return steps;
}

namespace {

// Protocol functions exposed as named processes so step bodies, traces
// and tests all speak the same vocabulary.
void register_processes(BuiltSystem& built) {
  ProcessRegistry& reg = built.system.registry;
  auto ledger = built.ledger;

  for (std::size_t i = 0; i < ledger->size(); ++i) {
    TokenId t{static_cast<std::int32_t>(i)};
    const std::string& name = ledger->token(t).name;
    reg.define(name + "_approve", [ledger, t](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) { ledger->approve(ctx, t, a[0], a[1], a[2]); });
    });
    reg.define(name + "_transfer", [ledger, t](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) { ledger->transfer(ctx, t, a[0], a[1], a[2]); });
    });
    reg.define(name + "_transferFrom", [ledger, t](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) { ledger->transfer_from(ctx, t, a[0], a[1], a[2], a[3]); });
    });
  }

  for (const CTokenPool* pool : {&built.cusdc_pool, &built.cdai_pool}) {
    CTokenPool p = *pool;
    const std::string& n = ledger->token(p.ctoken).name;
    reg.define(n + "_mint", [ledger, p](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) {
        compound::mint_ctoken(ctx, *ledger, p, a[0], a[1], ctx.store().block_number());
      });
    });
    reg.define(n + "_redeem", [ledger, p](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) {
        compound::redeem_ctoken(ctx, *ledger, p, a[0], a[1], ctx.store().block_number());
      });
    });
    reg.define(n + "_borrow", [ledger, p](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) {
        compound::borrow(ctx, *ledger, p, a[0], a[1], ctx.store().block_number());
      });
    });
    reg.define(n + "_borrowAll", [ledger, p](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) {
        Int amount = compound::cash(ctx.store(), *ledger, p);
        compound::borrow(ctx, *ledger, p, a[0], amount, ctx.store().block_number());
      });
    });
    reg.define(n + "_repayBorrow", [ledger, p](std::span<const Int> a) {
      return term::tau([=](ExecCtx& ctx) {
        compound::repay_borrow(ctx, *ledger, p, a[0], ctx.store().block_number());
      });
    });
  }

  SwapPool swap = built.swap_pool;
  reg.define("Curve_exchange", [ledger, swap](std::span<const Int> a) {
    return term::tau([=](ExecCtx& ctx) {
      curve::exchange(ctx, *ledger, swap, static_cast<int>(a[1]), static_cast<int>(a[2]), a[3],
                      a[4], a[0]);
    });
  });
  reg.define("Curve_swap_addLiquidity", [ledger, swap](std::span<const Int> a) {
    return term::tau([=](ExecCtx& ctx) {
      curve::swap_add_liquidity(ctx, *ledger, swap, {a[1], a[2]}, a[3], a[0]);
    });
  });

  DepositZap zap = built.zap;
  reg.define("Curve_addLiquidity", [ledger, zap](std::span<const Int> a) {
    return term::tau([=](ExecCtx& ctx) {
      curve::zap_add_liquidity(ctx, *ledger, zap, {a[1], a[2]}, a[3], a[0]);
    });
  });
  reg.define("Curve_remove_liquidity_one_coin", [ledger, zap](std::span<const Int> a) {
    return term::tau([=](ExecCtx& ctx) {
      curve::zap_remove_liquidity_one_coin(ctx, *ledger, zap, a[1], static_cast<int>(a[2]), a[0],
                                           a[3] != 0);
    });
  });

  reg.define("IncreaseBlockNum", [](std::span<const Int>) {
    return term::tau([](ExecCtx& ctx) { ctx.store().advance_block(ctx.store().block_number() + 1); });
  });
}

}  // namespace

BuiltSystem build_system(const ScenarioConfig& cfg) {
  for (const std::string* n : {&cfg.zap_name, &cfg.swap_name, &cfg.cusdc_pool_name, &cfg.cdai_pool_name})
    if (n->empty()) throw ConfigError("scenario lacks a contract assignment");

  BuiltSystem built;
  built.config = cfg;
  auto schema = std::make_shared<StoreSchema>();
  std::size_t n = cfg.n_slots();

  Ledger ledger;
  built.usdc = ledger.register_token(*schema, "USDC", n, balance_vector(cfg, "USDC"));
  built.dai = ledger.register_token(*schema, "DAI", n, balance_vector(cfg, "DAI"));
  built.cusdc = ledger.register_token(*schema, "cUSDC", n, balance_vector(cfg, "cUSDC"));
  built.cdai = ledger.register_token(*schema, "cDAI", n, balance_vector(cfg, "cDAI"));
  built.ccrv = ledger.register_token(*schema, "cCrv", n, balance_vector(cfg, "cCrv"));
  schema->alias("cCrv_accountTokens", "cCrv_balances");

  RateModel model{cfg.base_rate_per_block, cfg.multiplier_per_block, cfg.reserve_factor};
  built.cusdc_pool =
      compound::make_pool(*schema, ledger, built.usdc, built.cusdc, cfg.slot_of(cfg.cusdc_pool_name),
                          n, cfg.scale, cfg.initial_exchange_rate, model);
  built.cdai_pool =
      compound::make_pool(*schema, ledger, built.dai, built.cdai, cfg.slot_of(cfg.cdai_pool_name), n,
                          cfg.scale, cfg.initial_exchange_rate, model);
  built.cusdc_pool.redeem_supply_increment = cfg.redeem_supply_increment;
  built.cdai_pool.redeem_supply_increment = cfg.redeem_supply_increment;

  // Ghost cells read by the property formulas; the rate pair tracks the
  // cUSDC pool, the one the modeled flows exercise.
  GhostCells& g = built.ghosts;
  g.supplied_tokens = schema->cell("suppliedTokens", 0);
  g.minted_ctokens = schema->cell("mintedCTokens", 0);
  g.minted_ccrv_tokens = schema->cell("mintedCCrvTokens", 0);
  g.depositor_profit = schema->cell("depositorProfit", 0);
  g.depositor_loss = schema->cell("depositorLoss", 0);
  g.curve_deposited = schema->cell("curveDeposited", 0);
  g.curve_withdrawn = schema->cell("curveWithdrawn", 0);
  g.comp_deposited = schema->cell("compDeposited", 0);
  g.admissible_loss = schema->cell("ADMISSIBLE_LOSS", cfg.admissible_loss_permille);
  built.cusdc_pool.ghost_prev_rate = schema->cell("prevExchangeRate", cfg.initial_exchange_rate);
  built.cusdc_pool.ghost_new_rate = schema->cell("newExchangeRate", cfg.initial_exchange_rate);

  schema->cell(kBlockNumberCell, 0);
  schema->freeze();

  built.swap_pool = SwapPool{{built.cusdc, built.cdai}, built.ccrv,
                             static_cast<std::size_t>(cfg.slot_of(cfg.swap_name)), cfg.amp, cfg.fee,
                             cfg.scale};
  built.zap = DepositZap{{built.usdc, built.dai},
                         {built.cusdc_pool, built.cdai_pool},
                         built.swap_pool,
                         static_cast<std::size_t>(cfg.slot_of(cfg.zap_name))};

  built.ledger = std::make_shared<const Ledger>(std::move(ledger));
  built.system.schema = schema;

  Store init(schema);
  for (const auto& [token, rows] : cfg.allowances) {
    TokenId t = built.ledger->find(token);
    if (!t.valid()) throw ConfigError("allowances for unknown token '" + token + "'");
    for (const ScenarioConfig::AllowanceDef& a : rows) {
      if (a.amount < 0) throw ConfigError("negative initial allowance");
      init.set(built.ledger->token(t).allowed, cfg.slot_of(a.owner), cfg.slot_of(a.spender),
               a.amount);
    }
  }
  built.system.initial_store = std::move(init);

  register_processes(built);

  for (const UserDef& u : cfg.users) {
    if (u.role == Role::Contract) continue;
    UserProgram prog;
    prog.name = u.name;
    prog.slot = u.slot;
    prog.steps = build_user_program(built, u.role, u.slot);
    built.system.programs.push_back(std::move(prog));
  }

  for (const auto& [name, formula] : cfg.properties)
    built.properties.push_back(parse_property(name, formula, *schema));

  return built;
}

ReplayReport replay_witness(const WitnessFile& wf) {
  ReplayReport rep;
  ScenarioConfig cfg = ScenarioConfig::parse(wf.scenario_text);
  BuiltSystem built = build_system(cfg);
  const System& sys = built.system;

  PropertySpec prop = parse_property(wf.property_name, wf.formula, *sys.schema);
  engine::Monitor mon{&prop};

  SystemState state = initial_state(sys);
  std::uint8_t bits = mon.init_bits(state.store);

  for (std::size_t i = 0; i < wf.trace.steps.size(); ++i) {
    const TraceStep& step = wf.trace.steps[i];
    auto actions = enabled_actions(sys, state);
    ActionRef want{step.user, step.alt};
    if (std::find(actions.begin(), actions.end(), want) == actions.end()) {
      rep.message = "step " + std::to_string(i) + " not enabled on replay";
      return rep;
    }
    auto [label, succ] = apply_action(sys, state, want);
    if (label.step_name != step.step_name || label.reverted != step.reverted ||
        label.events != step.events) {
      rep.message = "step " + std::to_string(i) + " label mismatch on replay";
      return rep;
    }
    bits = mon.next_bits(bits, label, succ.store);
    state = std::move(succ);
  }
  if (state.canonical_hash() != wf.trace.final_state_hash) {
    rep.message = "final state hash mismatch on replay";
    return rep;
  }
  rep.replayed = true;

  switch (prop.kind) {
    case PropertyKind::GlobalInvariant:
    case PropertyKind::AfterEventAlways:
      rep.violation_reproduced = mon.violated(bits, state.store);
      break;
    case PropertyKind::Response:
      rep.violation_reproduced =
          enabled_actions(sys, state).empty() && mon.violated_terminal(bits, state.store);
      break;
    case PropertyKind::ReachExtremum:
      rep.violation_reproduced =
          wf.extremum.has_value() && eval_expr(*prop.expr, state.store) == *wf.extremum;
      break;
  }
  rep.message = rep.violation_reproduced ? "violation reproduced" : "property holds at trace end";
  return rep;
}

}  // namespace defimc
