#include "defimc/ledger.hpp"

#include <numeric>

namespace defimc {

TokenId Ledger::register_token(StoreSchema& schema, const std::string& name, std::size_t n_users,
                               std::vector<Int> initial_balances) {
  Int ts = 0;
  for (Int b : initial_balances) {
    if (b < 0) throw ConfigError("negative initial balance for " + name);
    ts += b;
  }
  Token t;
  t.name = name;
  t.total_supply = schema.cell(name + "_totalSupply", ts);
  t.balances = schema.array(name + "_balances", n_users, std::move(initial_balances));
  t.allowed = schema.matrix(name + "_allowed", n_users);
  tokens_.push_back(std::move(t));
  return {static_cast<std::int32_t>(tokens_.size() - 1)};
}

TokenId Ledger::find(const std::string& name) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i].name == name) return {static_cast<std::int32_t>(i)};
  return {};
}

Int Ledger::balance(const Store& s, TokenId t, std::size_t user) const {
  return s.get(token(t).balances, user);
}

Int Ledger::total_supply(const Store& s, TokenId t) const { return s.get(token(t).total_supply); }

Int Ledger::allowance(const Store& s, TokenId t, std::size_t owner, std::size_t spender) const {
  return s.get(token(t).allowed, owner, spender);
}

void Ledger::approve(ExecCtx& ctx, TokenId t, std::size_t owner, std::size_t spender, Int value) const {
  if (value < 0) throw ConfigError("approve with negative value");
  const Token& tok = token(t);
  ctx.store().set(tok.allowed, owner, spender, value);
  ctx.emit("approve." + tok.name, {static_cast<Int>(owner), static_cast<Int>(spender), value});
}

void Ledger::transfer(ExecCtx& ctx, TokenId t, std::size_t from, std::size_t to, Int value) const {
  const Token& tok = token(t);
  ctx.require_or_revert(value >= 0);
  ctx.require_or_revert(value <= ctx.store().get(tok.balances, from));
  ctx.store().add(tok.balances, from, -value);
  ctx.store().add(tok.balances, to, value);
  ctx.emit("transfer." + tok.name, {static_cast<Int>(from), static_cast<Int>(to), value});
}

void Ledger::transfer_from(ExecCtx& ctx, TokenId t, std::size_t from, std::size_t to, Int value,
                           std::size_t sender) const {
  const Token& tok = token(t);
  ctx.require_or_revert(value >= 0);
  ctx.require_or_revert(value <= ctx.store().get(tok.allowed, from, sender));
  transfer(ctx, t, from, to, value);
  ctx.store().add(tok.allowed, from, sender, -value);
}

void Ledger::mint(ExecCtx& ctx, TokenId t, std::size_t to, Int value) const {
  const Token& tok = token(t);
  ctx.require_or_revert(value >= 0);
  ctx.store().add(tok.total_supply, value);
  ctx.store().add(tok.balances, to, value);
}

void Ledger::burn(ExecCtx& ctx, TokenId t, std::size_t from, Int value) const {
  const Token& tok = token(t);
  ctx.require_or_revert(value >= 0);
  ctx.require_or_revert(value <= ctx.store().get(tok.balances, from));
  ctx.store().add(tok.total_supply, -value);
  ctx.store().add(tok.balances, from, -value);
}

}  // namespace defimc
