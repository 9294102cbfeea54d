#pragma once

#include "defimc/ledger.hpp"

namespace defimc {

/// Linear per-block borrow rate: base + multiplier * utilization / scale.
/// All three parameters are scale-denominated.
struct RateModel {
  Int base_rate_per_block = 0;
  Int multiplier_per_block = 0;
  Int reserve_factor = 0;
};

/// One Compound-style lending pool: a cToken over an underlying token.
/// The pool contract occupies a user slot; its cash is its underlying
/// balance. Instantiated once per market (cUSDC over USDC, cDAI over DAI).
struct CTokenPool {
  TokenId underlying;
  TokenId ctoken;
  std::size_t pool_slot = 0;
  Int scale = 10000;
  Int initial_exchange_rate = 10000;
  RateModel model;

  CellId total_borrows;
  CellId reserves;
  CellId borrow_index;
  CellId accrual_block;
  ArrayId acc_borrows_principal;
  ArrayId acc_borrows_interest_index;

  // When set, mint/redeem record (previous, current) stored exchange rate
  // into these cells as a pair, one sample per rate read.
  CellId ghost_prev_rate;
  CellId ghost_new_rate;

  // Study knob: redeem increments totalSupply instead of decrementing it,
  // which breaks the balance invariant in a detectable way.
  bool redeem_supply_increment = false;
};

namespace compound {

/// Declares the pool's cells/arrays on the schema. Token registration is
/// the caller's job; `<ctoken>_accountTokens` is aliased to its balances.
CTokenPool make_pool(StoreSchema& schema, const Ledger& ledger, TokenId underlying, TokenId ctoken,
                     std::size_t pool_slot, std::size_t n_users, Int scale,
                     Int initial_exchange_rate, RateModel model);

Int cash(const Store& s, const Ledger& ledger, const CTokenPool& pool);

/// borrows * scale / (cash + borrows); 0 when the pool is empty,
/// exactly `scale` when all cash is lent out.
Int utilization(const Store& s, const Ledger& ledger, const CTokenPool& pool);

/// Advances interest from the pool's last accrual block to currentBlock:
/// compounds totalBorrows and borrowIndex, accrues reserves, stamps the
/// block. Same-block calls are no-ops.
void accrue_interest(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, Int current_block);

/// initialExchangeRate while no cTokens exist, else
/// (cash + totalBorrows - reserves) * scale / totalSupply.
Int exchange_rate_stored(const Store& s, const Ledger& ledger, const CTokenPool& pool);

/// Supply `mint_amount` underlying, receive floor(amount*scale/rate)
/// cTokens. Requires same-block accrual (the *_fresh variants revert on a
/// stale pool) and an underlying allowance for the pool.
Int mint_ctoken(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t minter,
                Int mint_amount, Int current_block);
Int mint_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t minter,
               Int mint_amount, Int current_block);

/// Burn cTokens for floor(tokens*rate/scale) underlying. Reverts when the
/// pool's cash does not strictly exceed the payout (overutilization).
Int redeem_ctoken(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t redeemer,
                  Int redeem_tokens_in, Int current_block);
Int redeem_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t redeemer,
                 Int redeem_tokens_in, Int current_block);

/// Uncollateralized borrow (collateral is out of model). Reverts when
/// cash < amount; borrowing every last unit is allowed.
void borrow(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t borrower,
            Int borrow_amount, Int current_block);
void borrow_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t borrower,
                  Int borrow_amount, Int current_block);

/// Index-scaled current debt: principal * borrowIndex / interestIndex.
Int borrow_balance_stored(const Store& s, const CTokenPool& pool, std::size_t borrower);

/// Full repayment of the stored balance; partial repays are not modeled.
Int repay_borrow(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t payer,
                 Int current_block);
Int repay_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t payer,
                Int current_block);

}  // namespace compound

/// floor(a * b / c) for non-negative a, b and positive c, computed in
/// 128-bit to avoid overflow.
Int mul_div(Int a, Int b, Int c);

}  // namespace defimc
