#pragma once

#include <string>
#include <vector>

#include "defimc/kernel.hpp"

namespace defimc {

struct TokenId {
  std::int32_t idx = -1;
  bool valid() const { return idx >= 0; }
  bool operator==(const TokenId&) const = default;
};

/// Registered ERC20-style token: total supply cell, balance vector over
/// all user slots (humans and contracts alike), allowance grid.
struct Token {
  std::string name;
  CellId total_supply;
  ArrayId balances;
  MatrixId allowed;
};

/// Token registry over one schema. Maintains per-token the invariant
/// totalSupply == sum(balances) through every committed operation.
class Ledger {
 public:
  /// Declares <name>_totalSupply, <name>_balances[n], <name>_allowed[n][n].
  TokenId register_token(StoreSchema& schema, const std::string& name, std::size_t n_users,
                         std::vector<Int> initial_balances = {});

  const Token& token(TokenId id) const { return tokens_.at(id.idx); }
  TokenId find(const std::string& name) const;
  std::size_t size() const { return tokens_.size(); }

  Int balance(const Store& s, TokenId t, std::size_t user) const;
  Int total_supply(const Store& s, TokenId t) const;
  Int allowance(const Store& s, TokenId t, std::size_t owner, std::size_t spender) const;

  /// A(owner, spender) := value. Overwrite, not add.
  void approve(ExecCtx& ctx, TokenId t, std::size_t owner, std::size_t spender, Int value) const;

  /// Moves value from -> to; reverts the enclosing atomic when the sender
  /// balance is insufficient. Zero-value transfers succeed and emit.
  void transfer(ExecCtx& ctx, TokenId t, std::size_t from, std::size_t to, Int value) const;

  /// Allowance-checked transfer: requires A(from, sender) >= value, then
  /// transfers and decrements the allowance.
  void transfer_from(ExecCtx& ctx, TokenId t, std::size_t from, std::size_t to, Int value,
                     std::size_t sender) const;

  void mint(ExecCtx& ctx, TokenId t, std::size_t to, Int value) const;
  void burn(ExecCtx& ctx, TokenId t, std::size_t from, Int value) const;

 private:
  std::vector<Token> tokens_;
};

}  // namespace defimc
