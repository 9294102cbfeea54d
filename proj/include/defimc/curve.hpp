#pragma once

#include <array>

#include "defimc/compound.hpp"

namespace defimc {

/// Two-coin StableSwap pool over the cTokens (cUSDC, cDAI), minting cCrv
/// to liquidity providers. Reserves are the swap contract's own token
/// balances, so the pool's book and the ledger cannot diverge.
struct SwapPool {
  std::array<TokenId, 2> coins;
  TokenId pool_token;
  std::size_t swap_slot = 0;
  Int amp = 85;    // amplification coefficient A (raw, not pre-multiplied)
  Int fee = 0;     // scale-denominated swap fee
  Int scale = 10000;
};

/// Wrapper contract turning user-facing USDC/DAI into pooled cUSDC/cDAI
/// within one transaction. Holds nothing between transactions. Pool
/// members are copies of the pure configuration; mutable state lives in
/// the store, so copies never diverge.
struct DepositZap {
  std::array<TokenId, 2> underlyings;
  std::array<CTokenPool, 2> compound_pools;
  SwapPool swap;
  std::size_t zap_slot = 0;
};

namespace curve {

inline constexpr int kNCoins = 2;
inline constexpr int kMaxIter = 255;

/// StableSwap invariant solver: Newton iteration for D in
///   A*n^n*(x+y) + D = A*n^n*D + D^(n+1)/(n^n*x*y).
/// Degenerate pools (a zero balance) fall back to D = x + y.
Int get_D(Int x, Int y, Int amp);

/// Solves the invariant for coin j's balance after coin i's balance
/// becomes x_new, at fixed D.
Int get_y(int i, int j, Int x_new, const std::array<Int, 2>& balances, Int amp, Int D);

/// Withdrawal solver: coin i's balance at a reduced D with the other
/// coin's balance unchanged. Same Newton kernel, D overridden.
Int get_y_D(int i, const std::array<Int, 2>& balances, Int amp, Int D);

std::array<Int, 2> pool_balances(const Store& s, const Ledger& ledger, const SwapPool& pool);

/// Pull `c_amounts` of the coins from the provider, mint pool tokens by
/// D-growth: D1 on first deposit, else TS*(D1-D0)/D0. Reverts below
/// min_mint_amount.
Int swap_add_liquidity(ExecCtx& ctx, const Ledger& ledger, const SwapPool& pool,
                       const std::array<Int, 2>& c_amounts, Int min_mint_amount,
                       std::size_t provider);

/// Trade dx of coin i for coin j. Output carries Curve's defensive -1
/// rounding and the pool fee; reverts below min_dy.
Int exchange(ExecCtx& ctx, const Ledger& ledger, const SwapPool& pool, int i, int j, Int dx,
             Int min_dy, std::size_t trader);

/// Burn the trader's pool tokens and pay out a single coin.
Int swap_remove_liquidity_one_coin(ExecCtx& ctx, const Ledger& ledger, const SwapPool& pool,
                                   Int token_amount, int i, std::size_t provider);

/// Steps 1-6 of the deposit flow: pull underlying, mint cTokens at
/// Compound, pool them, hand all received cCrv to the sender.
/// `u_amounts` legs with zero are skipped; all-zero deposits revert.
Int zap_add_liquidity(ExecCtx& ctx, const Ledger& ledger, const DepositZap& zap,
                      const std::array<Int, 2>& u_amounts, Int min_mint_amount, std::size_t sender);

/// Burn `token_amount` cCrv pulled from the sender, withdraw coin i from
/// the swap, redeem it at Compound, send the underlying to the sender.
/// A Compound-side revert (overutilization) aborts the whole withdrawal.
/// Dust from rounding stays in the pool regardless of donate_dust.
Int zap_remove_liquidity_one_coin(ExecCtx& ctx, const Ledger& ledger, const DepositZap& zap,
                                  Int token_amount, int i, std::size_t sender, bool donate_dust);

}  // namespace curve
}  // namespace defimc
