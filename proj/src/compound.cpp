#include "defimc/compound.hpp"

#include <algorithm>

namespace defimc {

Int mul_div(Int a, Int b, Int c) {
  if (a < 0 || b < 0 || c <= 0) throw ConfigError("mul_div out of domain");
  return static_cast<Int>(static_cast<__int128>(a) * b / c);
}

namespace compound {

CTokenPool make_pool(StoreSchema& schema, const Ledger& ledger, TokenId underlying, TokenId ctoken,
                     std::size_t pool_slot, std::size_t n_users, Int scale,
                     Int initial_exchange_rate, RateModel model) {
  CTokenPool p;
  p.underlying = underlying;
  p.ctoken = ctoken;
  p.pool_slot = pool_slot;
  p.scale = scale;
  p.initial_exchange_rate = initial_exchange_rate;
  p.model = model;
  const std::string& n = ledger.token(ctoken).name;
  p.total_borrows = schema.cell(n + "_totalBorrows", 0);
  p.reserves = schema.cell(n + "_reserves", 0);
  p.borrow_index = schema.cell(n + "_borrowIndex", scale);
  p.accrual_block = schema.cell(n + "_accrualBlockNumber", 0);
  p.acc_borrows_principal = schema.array(n + "_accBorrowsPrincipal", n_users);
  p.acc_borrows_interest_index = schema.array(n + "_accBorrowsInterestIndex", n_users);
  schema.alias(n + "_accountTokens", n + "_balances");
  return p;
}

Int cash(const Store& s, const Ledger& ledger, const CTokenPool& pool) {
  return ledger.balance(s, pool.underlying, pool.pool_slot);
}

Int utilization(const Store& s, const Ledger& ledger, const CTokenPool& pool) {
  Int borrows = s.get(pool.total_borrows);
  Int c = cash(s, ledger, pool);
  if (c + borrows == 0) return 0;
  return mul_div(borrows, pool.scale, c + borrows);
}

void accrue_interest(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, Int current_block) {
  Store& s = ctx.store();
  Int last = s.get(pool.accrual_block);
  if (current_block < last) throw ConfigError("accrue_interest: block went backwards");
  Int delta = current_block - last;
  if (delta == 0) return;

  Int borrow_rate = pool.model.base_rate_per_block +
                    mul_div(pool.model.multiplier_per_block, utilization(s, ledger, pool), pool.scale);
  Int borrows = s.get(pool.total_borrows);
  Int interest = static_cast<Int>(static_cast<__int128>(borrow_rate) * delta * borrows / pool.scale);
  s.add(pool.total_borrows, interest);
  Int index = s.get(pool.borrow_index);
  s.add(pool.borrow_index, static_cast<Int>(static_cast<__int128>(index) * borrow_rate * delta / pool.scale));
  s.add(pool.reserves, mul_div(pool.model.reserve_factor, interest, pool.scale));
  s.set(pool.accrual_block, current_block);
}

Int exchange_rate_stored(const Store& s, const Ledger& ledger, const CTokenPool& pool) {
  Int ts = ledger.total_supply(s, pool.ctoken);
  if (ts == 0) return pool.initial_exchange_rate;
  Int assets = cash(s, ledger, pool) + s.get(pool.total_borrows) - s.get(pool.reserves);
  if (assets < 0) throw ConfigError("negative pool assets");
  return mul_div(assets, pool.scale, ts);
}

namespace {

void require_fresh(ExecCtx& ctx, const CTokenPool& pool, Int current_block) {
  ctx.require_or_revert(ctx.store().get(pool.accrual_block) == current_block);
}

// mint/redeem read the stored rate; each read records the (prev, new)
// ghost pair when the pool is instrumented.
Int read_rate(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool) {
  Int rate = exchange_rate_stored(ctx.store(), ledger, pool);
  if (pool.ghost_prev_rate.valid()) {
    ctx.store().set(pool.ghost_prev_rate, ctx.store().get(pool.ghost_new_rate));
    ctx.store().set(pool.ghost_new_rate, rate);
  }
  return rate;
}

}  // namespace

Int mint_ctoken(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t minter,
                Int mint_amount, Int current_block) {
  accrue_interest(ctx, ledger, pool, current_block);
  return mint_fresh(ctx, ledger, pool, minter, mint_amount, current_block);
}

Int mint_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t minter,
               Int mint_amount, Int current_block) {
  require_fresh(ctx, pool, current_block);
  ctx.require_or_revert(mint_amount >= 0);
  Int rate = read_rate(ctx, ledger, pool);
  ctx.require_or_revert(rate > 0);
  Int mint_tokens = mul_div(mint_amount, pool.scale, rate);
  const std::string& n = ledger.token(pool.ctoken).name;
  ledger.mint(ctx, pool.ctoken, minter, mint_tokens);
  ledger.transfer_from(ctx, pool.underlying, minter, pool.pool_slot, mint_amount, pool.pool_slot);
  ctx.emit("Mint." + n);
  ctx.emit("mint." + n, {static_cast<Int>(minter), mint_amount, mint_tokens});
  ctx.emit("transfer." + n, {static_cast<Int>(pool.pool_slot), static_cast<Int>(minter), mint_tokens});
  return mint_tokens;
}

Int redeem_ctoken(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t redeemer,
                  Int redeem_tokens_in, Int current_block) {
  accrue_interest(ctx, ledger, pool, current_block);
  return redeem_fresh(ctx, ledger, pool, redeemer, redeem_tokens_in, current_block);
}

Int redeem_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t redeemer,
                 Int redeem_tokens_in, Int current_block) {
  require_fresh(ctx, pool, current_block);
  ctx.require_or_revert(redeem_tokens_in >= 0);
  ctx.require_or_revert(redeem_tokens_in <= ledger.balance(ctx.store(), pool.ctoken, redeemer));
  Int rate = read_rate(ctx, ledger, pool);
  Int redeem_amount = mul_div(redeem_tokens_in, rate, pool.scale);
  // Overutilization: paying out the pool's entire cash also fails.
  ctx.require_or_revert(cash(ctx.store(), ledger, pool) > redeem_amount);
  ledger.transfer(ctx, pool.underlying, pool.pool_slot, redeemer, redeem_amount);
  const Token& ct = ledger.token(pool.ctoken);
  if (pool.redeem_supply_increment) {
    ctx.store().add(ct.total_supply, redeem_tokens_in);
    ctx.store().add(ct.balances, redeemer, -redeem_tokens_in);
  } else {
    ledger.burn(ctx, pool.ctoken, redeemer, redeem_tokens_in);
  }
  ctx.emit("transfer." + ct.name, {static_cast<Int>(redeemer), static_cast<Int>(pool.pool_slot), redeem_tokens_in});
  ctx.emit("redeem." + ct.name, {static_cast<Int>(redeemer), static_cast<Int>(pool.pool_slot), redeem_amount});
  return redeem_amount;
}

void borrow(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t borrower,
            Int borrow_amount, Int current_block) {
  accrue_interest(ctx, ledger, pool, current_block);
  borrow_fresh(ctx, ledger, pool, borrower, borrow_amount, current_block);
}

void borrow_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t borrower,
                  Int borrow_amount, Int current_block) {
  require_fresh(ctx, pool, current_block);
  ctx.require_or_revert(borrow_amount >= 0);
  if (borrow_amount == 0) return;
  ctx.require_or_revert(cash(ctx.store(), ledger, pool) >= borrow_amount);
  Int stored = borrow_balance_stored(ctx.store(), pool, borrower);
  ctx.store().add(pool.total_borrows, borrow_amount);
  ctx.store().set(pool.acc_borrows_principal, borrower, stored + borrow_amount);
  ctx.store().set(pool.acc_borrows_interest_index, borrower, ctx.store().get(pool.borrow_index));
  ledger.transfer(ctx, pool.underlying, pool.pool_slot, borrower, borrow_amount);
  ctx.emit("borrow." + ledger.token(pool.ctoken).name, {static_cast<Int>(borrower), borrow_amount});
}

Int borrow_balance_stored(const Store& s, const CTokenPool& pool, std::size_t borrower) {
  Int principal = s.get(pool.acc_borrows_principal, borrower);
  if (principal == 0) return 0;
  return mul_div(principal, s.get(pool.borrow_index), s.get(pool.acc_borrows_interest_index, borrower));
}

Int repay_borrow(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t payer,
                 Int current_block) {
  accrue_interest(ctx, ledger, pool, current_block);
  return repay_fresh(ctx, ledger, pool, payer, current_block);
}

Int repay_fresh(ExecCtx& ctx, const Ledger& ledger, const CTokenPool& pool, std::size_t payer,
                Int current_block) {
  require_fresh(ctx, pool, current_block);
  Int repaid = borrow_balance_stored(ctx.store(), pool, payer);
  if (repaid == 0) return 0;
  ledger.transfer(ctx, pool.underlying, payer, pool.pool_slot, repaid);
  Int borrows = ctx.store().get(pool.total_borrows);
  ctx.store().set(pool.total_borrows, borrows - std::min(repaid, borrows));
  ctx.store().set(pool.acc_borrows_principal, payer, 0);
  ctx.store().set(pool.acc_borrows_interest_index, payer, ctx.store().get(pool.borrow_index));
  ctx.emit("repayBorrow." + ledger.token(pool.ctoken).name, {static_cast<Int>(payer), repaid});
  return repaid;
}

}  // namespace compound
}  // namespace defimc
