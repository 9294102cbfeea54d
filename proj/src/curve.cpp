#include "defimc/curve.hpp"

#include <algorithm>

namespace defimc {
namespace curve {

namespace {

using U128 = unsigned __int128;
using I128 = __int128;

// Exact invariant relation cleared of divisions, for pinning the Newton
// result to the true integer root. Decreasing in D:
//   (Ann*(x+y) + D - Ann*D) * 4xy - D^3
I128 d_relation(Int x, Int y, Int amp, I128 D) {
  I128 ann = static_cast<I128>(amp) * 4;
  I128 t = ann * (static_cast<I128>(x) + y) + D - ann * D;
  return t * 4 * static_cast<I128>(x) * y - D * D * D;
}

// Same relation viewed as a function of one coin's balance; increasing.
I128 y_relation(Int x_other, Int amp, Int D, I128 y) {
  I128 ann = static_cast<I128>(amp) * 4;
  I128 t = ann * (static_cast<I128>(x_other) + y) + static_cast<I128>(D) - ann * D;
  return 4 * static_cast<I128>(x_other) * y * t - static_cast<I128>(D) * D * D;
}

constexpr int kPolishLimit = 64;

// Newton on y^2 + y*(b - D) = c with b = x_other + D/Ann and
// c = D^3/(4*x_other*Ann), Ann = A*n^n, then stepped to the exact floor
// of the root. Shared by get_y and get_y_D.
Int solve_other_coin(Int x_other, Int amp, Int D) {
  if (D == 0) return 0;
  if (x_other == 0) {
    // One-sided pool: the invariant degenerates to the constant sum, the
    // remaining coin carries all of D.
    return D;
  }
  U128 ann = static_cast<U128>(amp) * 4;
  U128 d = static_cast<U128>(D);
  U128 c = d * d / (static_cast<U128>(x_other) * 2);
  c = c * d / (ann * 2);
  U128 b = static_cast<U128>(x_other) + d / ann;
  U128 y = d;
  for (int it = 0; it < kMaxIter; ++it) {
    U128 y_prev = y;
    y = (y * y + c) / (2 * y + b - d);
    if ((y > y_prev ? y - y_prev : y_prev - y) <= 1) {
      // Largest y with the relation at or below zero.
      Int yi = static_cast<Int>(y);
      int walked = 0;
      while (y_relation(x_other, amp, D, static_cast<I128>(yi) + 1) <= 0 && walked++ < kPolishLimit)
        ++yi;
      while (yi > 0 && y_relation(x_other, amp, D, yi) > 0 && walked++ < kPolishLimit) --yi;
      if (walked > kPolishLimit) throw ConfigError("curve y solver did not settle");
      return yi;
    }
  }
  throw ConfigError("curve y solver did not converge");
}

}  // namespace

Int get_D(Int x, Int y, Int amp) {
  if (x < 0 || y < 0 || amp <= 0) throw ConfigError("get_D out of domain");
  Int S = x + y;
  if (S == 0) return 0;
  if (x == 0 || y == 0) return S;
  U128 ann = static_cast<U128>(amp) * 4;
  U128 s = static_cast<U128>(S);
  U128 D = s;
  for (int it = 0; it < kMaxIter; ++it) {
    U128 D_P = D * D / (static_cast<U128>(x) * 2);
    D_P = D_P * D / (static_cast<U128>(y) * 2);
    U128 D_prev = D;
    D = (ann * s + 2 * D_P) * D / ((ann - 1) * D + 3 * D_P);
    if ((D > D_prev ? D - D_prev : D_prev - D) <= 1) {
      // Largest D with the relation at or above zero.
      Int di = static_cast<Int>(D);
      int walked = 0;
      while (d_relation(x, y, amp, static_cast<I128>(di) + 1) >= 0 && walked++ < kPolishLimit) ++di;
      while (di > 0 && d_relation(x, y, amp, di) < 0 && walked++ < kPolishLimit) --di;
      if (walked > kPolishLimit) throw ConfigError("get_D did not settle");
      return di;
    }
  }
  throw ConfigError("get_D did not converge");
}

Int get_y(int i, int j, Int x_new, const std::array<Int, 2>& balances, Int amp, Int D) {
  if (i == j || i < 0 || j < 0 || i >= kNCoins || j >= kNCoins)
    throw ConfigError("get_y bad coin indices");
  if (x_new < 0 || D <= 0) throw ConfigError("get_y out of domain");
  (void)balances;  // with n = 2 the only other coin is i, already given as x_new
  return solve_other_coin(x_new, amp, D);
}

Int get_y_D(int i, const std::array<Int, 2>& balances, Int amp, Int D) {
  if (i < 0 || i >= kNCoins) throw ConfigError("get_y_D bad coin index");
  if (D < 0) throw ConfigError("get_y_D negative D");
  return solve_other_coin(balances[1 - i], amp, D);
}

std::array<Int, 2> pool_balances(const Store& s, const Ledger& ledger, const SwapPool& pool) {
  return {ledger.balance(s, pool.coins[0], pool.swap_slot),
          ledger.balance(s, pool.coins[1], pool.swap_slot)};
}

Int swap_add_liquidity(ExecCtx& ctx, const Ledger& ledger, const SwapPool& pool,
                       const std::array<Int, 2>& c_amounts, Int min_mint_amount,
                       std::size_t provider) {
  ctx.require_or_revert(c_amounts[0] >= 0 && c_amounts[1] >= 0);
  auto old_balances = pool_balances(ctx.store(), ledger, pool);
  Int D0 = get_D(old_balances[0], old_balances[1], pool.amp);
  for (int k = 0; k < kNCoins; ++k)
    if (c_amounts[k] > 0)
      ledger.transfer_from(ctx, pool.coins[k], provider, pool.swap_slot, c_amounts[k], pool.swap_slot);
  auto new_balances = pool_balances(ctx.store(), ledger, pool);
  Int D1 = get_D(new_balances[0], new_balances[1], pool.amp);
  Int ts = ledger.total_supply(ctx.store(), pool.pool_token);
  Int mint_amount = ts == 0 ? D1 : mul_div(ts, D1 - D0, D0);
  ctx.require_or_revert(mint_amount >= min_mint_amount);
  ledger.mint(ctx, pool.pool_token, provider, mint_amount);
  ctx.emit("transfer." + ledger.token(pool.pool_token).name,
           {static_cast<Int>(pool.swap_slot), static_cast<Int>(provider), mint_amount});
  return mint_amount;
}

Int exchange(ExecCtx& ctx, const Ledger& ledger, const SwapPool& pool, int i, int j, Int dx,
             Int min_dy, std::size_t trader) {
  ctx.require_or_revert(i != j && i >= 0 && j >= 0 && i < kNCoins && j < kNCoins);
  ctx.require_or_revert(dx >= 0);
  auto balances = pool_balances(ctx.store(), ledger, pool);
  Int D = get_D(balances[0], balances[1], pool.amp);
  Int dy = 0;
  if (D > 0) {
    Int y_new = get_y(i, j, balances[i] + dx, balances, pool.amp, D);
    Int dy_raw = std::max<Int>(0, balances[j] - y_new - 1);
    dy = dy_raw - mul_div(pool.fee, dy_raw, pool.scale);
  }
  ctx.require_or_revert(dy >= min_dy);
  ledger.transfer_from(ctx, pool.coins[i], trader, pool.swap_slot, dx, pool.swap_slot);
  ledger.transfer(ctx, pool.coins[j], pool.swap_slot, trader, dy);
  ctx.emit("exchange", {static_cast<Int>(trader), static_cast<Int>(i), static_cast<Int>(j), dx, dy});
  return dy;
}

Int swap_remove_liquidity_one_coin(ExecCtx& ctx, const Ledger& ledger, const SwapPool& pool,
                                   Int token_amount, int i, std::size_t provider) {
  ctx.require_or_revert(i >= 0 && i < kNCoins);
  ctx.require_or_revert(token_amount > 0);
  Int ts = ledger.total_supply(ctx.store(), pool.pool_token);
  ctx.require_or_revert(token_amount <= ts);
  auto balances = pool_balances(ctx.store(), ledger, pool);
  Int D0 = get_D(balances[0], balances[1], pool.amp);
  Int D1 = mul_div(D0, ts - token_amount, ts);
  Int y_new = get_y_D(i, balances, pool.amp, D1);
  Int dy_raw = balances[i] - y_new;
  ctx.require_or_revert(dy_raw >= 0);
  Int dy = dy_raw - mul_div(pool.fee, dy_raw, pool.scale);
  ledger.burn(ctx, pool.pool_token, provider, token_amount);
  ledger.transfer(ctx, pool.coins[i], pool.swap_slot, provider, dy);
  ctx.emit("remove_liquidity_one_coin",
           {static_cast<Int>(provider), static_cast<Int>(i), token_amount, dy});
  return dy;
}

Int zap_add_liquidity(ExecCtx& ctx, const Ledger& ledger, const DepositZap& zap,
                      const std::array<Int, 2>& u_amounts, Int min_mint_amount,
                      std::size_t sender) {
  ctx.require_or_revert(u_amounts[0] >= 0 && u_amounts[1] >= 0);
  ctx.require_or_revert(u_amounts[0] > 0 || u_amounts[1] > 0);
  Int current_block = ctx.store().block_number();
  std::array<Int, 2> c_amounts{0, 0};
  for (int k = 0; k < kNCoins; ++k) {
    if (u_amounts[k] == 0) continue;
    ledger.transfer_from(ctx, zap.underlyings[k], sender, zap.zap_slot, u_amounts[k], zap.zap_slot);
    ledger.approve(ctx, zap.underlyings[k], zap.zap_slot, zap.compound_pools[k].pool_slot,
                   u_amounts[k]);
    compound::mint_ctoken(ctx, ledger, zap.compound_pools[k], zap.zap_slot, u_amounts[k],
                          current_block);
    c_amounts[k] = ledger.balance(ctx.store(), zap.swap.coins[k], zap.zap_slot);
    ledger.approve(ctx, zap.swap.coins[k], zap.zap_slot, zap.swap.swap_slot, c_amounts[k]);
  }
  Int minted = swap_add_liquidity(ctx, ledger, zap.swap, c_amounts, min_mint_amount, zap.zap_slot);
  ledger.transfer(ctx, zap.swap.pool_token, zap.zap_slot, sender, minted);
  ctx.emit("AddLiquidity", {static_cast<Int>(sender), u_amounts[0], u_amounts[1], minted});
  return minted;
}

Int zap_remove_liquidity_one_coin(ExecCtx& ctx, const Ledger& ledger, const DepositZap& zap,
                                  Int token_amount, int i, std::size_t sender, bool donate_dust) {
  (void)donate_dust;  // dust stays in the pools either way
  ctx.require_or_revert(token_amount > 0);
  Int current_block = ctx.store().block_number();
  ledger.transfer_from(ctx, zap.swap.pool_token, sender, zap.zap_slot, token_amount, zap.zap_slot);
  Int ctokens_out =
      swap_remove_liquidity_one_coin(ctx, ledger, zap.swap, token_amount, i, zap.zap_slot);
  Int redeemed = compound::redeem_ctoken(ctx, ledger, zap.compound_pools[i], zap.zap_slot,
                                         ctokens_out, current_block);
  ledger.transfer(ctx, zap.underlyings[i], zap.zap_slot, sender, redeemed);
  ctx.emit("RemoveLiquidityOne", {static_cast<Int>(sender), static_cast<Int>(i), token_amount, redeemed});
  return redeemed;
}

}  // namespace curve
}  // namespace defimc
