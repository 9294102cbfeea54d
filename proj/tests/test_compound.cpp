#include <random>

#include "defimc/compound.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace defimc;

namespace {

constexpr Int kScale = 10000;

struct PoolFixture {
  SchemaPtr schema;
  Ledger ledger;
  TokenId usdc, cusdc;
  CTokenPool pool;
  // slots: 0 minter, 1 borrower, 2 bystander, 3 pool contract
  static constexpr std::size_t kMinter = 0, kBorrower = 1, kPool = 3;

  explicit PoolFixture(RateModel model = {0, 500, 0}, std::vector<Int> usdc_init = {1000, 1000, 0, 0},
                       std::vector<Int> cusdc_init = {}) {
    auto s = std::make_shared<StoreSchema>();
    s->cell(kBlockNumberCell, 0);
    usdc = ledger.register_token(*s, "USDC", 4, std::move(usdc_init));
    cusdc = ledger.register_token(*s, "cUSDC", 4, std::move(cusdc_init));
    pool = compound::make_pool(*s, ledger, usdc, cusdc, kPool, 4, kScale, kScale, model);
    s->freeze();
    schema = s;
  }

  Store store() const { return Store(schema); }

  AtomicOutcome run(Store& s, Block f) { return run_atomic(s, term::tau(std::move(f))); }

  void approve_pool(Store& s, std::size_t user, Int amount) {
    run(s, [&](ExecCtx& c) { ledger.approve(c, usdc, user, kPool, amount); });
  }
};

}  // namespace

TEST_CASE("utilization formula") {
  PoolFixture f;
  Store s = f.store();
  CHECK(compound::utilization(s, f.ledger, f.pool) == 0);  // no demand

  // cash 300, borrows 100 -> 2500 at scale 10^4
  f.run(s, [&](ExecCtx& c) {
    c.store().set(f.ledger.token(f.usdc).balances, PoolFixture::kPool, 300);
    c.store().set(f.pool.total_borrows, 100);
  });
  CHECK(compound::utilization(s, f.ledger, f.pool) == 2500);

  // cash 0, borrows > 0 -> exactly 100%
  f.run(s, [&](ExecCtx& c) {
    c.store().set(f.ledger.token(f.usdc).balances, PoolFixture::kPool, 0);
  });
  CHECK(compound::utilization(s, f.ledger, f.pool) == kScale);
}

TEST_CASE("accrue_interest is idempotent within a block") {
  PoolFixture f;
  Store s = f.store();
  f.run(s, [&](ExecCtx& c) { compound::accrue_interest(c, f.ledger, f.pool, 0); });
  Store before = s;
  f.run(s, [&](ExecCtx& c) { compound::accrue_interest(c, f.ledger, f.pool, 0); });
  CHECK(s == before);
}

TEST_CASE("accrue_interest without debt only stamps the block") {
  PoolFixture f;
  Store s = f.store();
  Store before = s;
  f.run(s, [&](ExecCtx& c) { compound::accrue_interest(c, f.ledger, f.pool, 5); });
  CHECK(s.get(f.pool.accrual_block) == 5);
  CHECK(s.get(f.pool.total_borrows) == before.get(f.pool.total_borrows));
  CHECK(s.get(f.pool.borrow_index) == before.get(f.pool.borrow_index));
  CHECK(s.get(f.pool.reserves) == 0);
}

TEST_CASE("accrual over three blocks matches the rational oracle") {
  PoolFixture f({7, 450, 100});
  Store s = f.store();
  f.run(s, [&](ExecCtx& c) {
    c.store().set(f.ledger.token(f.usdc).balances, PoolFixture::kPool, 800);
    c.store().set(f.pool.total_borrows, 350);
  });
  auto o = oracle::accrue(800, 350, 0, kScale, 7, 450, 100, 3, kScale);
  f.run(s, [&](ExecCtx& c) { compound::accrue_interest(c, f.ledger, f.pool, 3); });
  CHECK(s.get(f.pool.total_borrows) == o.total_borrows);
  CHECK(s.get(f.pool.borrow_index) == o.borrow_index);
  CHECK(s.get(f.pool.reserves) == o.reserves);
}

TEST_CASE("exchange rate of an empty pool is the initial rate") {
  PoolFixture f;
  Store s = f.store();
  CHECK(compound::exchange_rate_stored(s, f.ledger, f.pool) == kScale);
}

TEST_CASE("mint at the identity rate gives one cToken per unit") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 200);
  Int minted = -1;
  auto out = f.run(s, [&](ExecCtx& c) {
    minted = compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 200, 0);
  });
  CHECK(out.committed);
  CHECK(minted == 200);
  CHECK(f.ledger.balance(s, f.cusdc, PoolFixture::kMinter) == 200);
  CHECK(compound::cash(s, f.ledger, f.pool) == 200);
  // rate unchanged by a deposit with no accrual
  CHECK(compound::exchange_rate_stored(s, f.ledger, f.pool) == kScale);
  // event order per the modeled contract: underlying pull, Mint, mint, cToken transfer
  REQUIRE(out.events.size() == 4);
  CHECK(out.events[0].name == "transfer.USDC");
  CHECK(out.events[1].name == "Mint.cUSDC");
  CHECK(out.events[2].name == "mint.cUSDC");
  CHECK(out.events[3].name == "transfer.cUSDC");
}

TEST_CASE("mint of zero changes no balances") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 10);
  Int minted = -1;
  f.run(s, [&](ExecCtx& c) {
    minted = compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 0, 0);
  });
  CHECK(minted == 0);
  CHECK(f.ledger.balance(s, f.cusdc, PoolFixture::kMinter) == 0);
  CHECK(f.ledger.balance(s, f.usdc, PoolFixture::kMinter) == 1000);
}

TEST_CASE("mint at an accrued rate floors the cToken amount") {
  PoolFixture f;
  Store s = f.store();
  // seed: minter deposits 400, borrower takes 200, three blocks pass
  f.approve_pool(s, PoolFixture::kMinter, 600);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 400, 0);
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 200, 0);
  });
  f.run(s, [&](ExecCtx& c) { c.store().advance_block(3); });

  Int rate_before = -1, minted = -1;
  f.run(s, [&](ExecCtx& c) {
    compound::accrue_interest(c, f.ledger, f.pool, 3);
    rate_before = compound::exchange_rate_stored(c.store(), f.ledger, f.pool);
    minted = compound::mint_fresh(c, f.ledger, f.pool, PoolFixture::kMinter, 200, 3);
  });
  CHECK(rate_before > kScale);
  CHECK(minted == mul_div(200, kScale, rate_before));
  CHECK(minted < 200);
}

TEST_CASE("stale accrual reverts the fresh operations") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 100);
  f.run(s, [&](ExecCtx& c) { c.store().advance_block(2); });
  Store before = s;
  auto out = f.run(s, [&](ExecCtx& c) {
    // accrual stamp is still at block 0, current block is 2
    compound::mint_fresh(c, f.ledger, f.pool, PoolFixture::kMinter, 100, 2);
  });
  CHECK_FALSE(out.committed);
  CHECK(s == before);
}

TEST_CASE("redeem of zero on a funded pool is a no-op") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 200);
  f.run(s, [&](ExecCtx& c) { compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 200, 0); });
  Int amount = -1;
  f.run(s, [&](ExecCtx& c) {
    amount = compound::redeem_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 0, 0);
  });
  CHECK(amount == 0);
  CHECK(f.ledger.balance(s, f.cusdc, PoolFixture::kMinter) == 200);
}

TEST_CASE("mint then redeem round-trips the deposit up to one unit") {
  PoolFixture f;
  Store s = f.store();
  // other suppliers keep the pool liquid so the equality guard stays clear
  f.approve_pool(s, PoolFixture::kBorrower, 500);
  f.run(s, [&](ExecCtx& c) { compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kBorrower, 500, 0); });

  f.approve_pool(s, PoolFixture::kMinter, 200);
  Int minted = -1, redeemed = -1;
  f.run(s, [&](ExecCtx& c) {
    minted = compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 200, 0);
  });
  f.run(s, [&](ExecCtx& c) {
    redeemed = compound::redeem_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, minted, 0);
  });
  CHECK(redeemed >= 199);
  CHECK(redeemed <= 200);
}

TEST_CASE("overutilized pool rejects redemption") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 300);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 300, 0);
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 300, 0);
  });
  Store before = s;
  auto out = f.run(s, [&](ExecCtx& c) {
    compound::redeem_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 10, 0);
  });
  CHECK_FALSE(out.committed);
  CHECK(s == before);
}

TEST_CASE("paying out the pool's entire cash also reverts") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 300);
  f.run(s, [&](ExecCtx& c) { compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 300, 0); });
  auto out = f.run(s, [&](ExecCtx& c) {
    compound::redeem_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 300, 0);
  });
  CHECK_FALSE(out.committed);
}

TEST_CASE("supply-incrementing redeem breaks the balance invariant") {
  PoolFixture f;
  f.pool.redeem_supply_increment = true;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kBorrower, 500);
  f.approve_pool(s, PoolFixture::kMinter, 200);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kBorrower, 500, 0);
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 200, 0);
    compound::redeem_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 200, 0);
  });
  const Token& ct = f.ledger.token(f.cusdc);
  CHECK(s.sum(ct.balances) != s.get(ct.total_supply));
}

TEST_CASE("borrowing all available cash drives utilization to 100%") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 400);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 400, 0);
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 400, 0);
  });
  CHECK(compound::cash(s, f.ledger, f.pool) == 0);
  CHECK(compound::utilization(s, f.ledger, f.pool) == kScale);
}

TEST_CASE("borrow of zero is a no-op") {
  PoolFixture f;
  Store s = f.store();
  Store before = s;
  f.run(s, [&](ExecCtx& c) { compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 0, 0); });
  CHECK(s == before);
}

TEST_CASE("borrow beyond the cash reverts") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 100);
  f.run(s, [&](ExecCtx& c) { compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 100, 0); });
  Store before = s;
  auto out = f.run(s, [&](ExecCtx& c) {
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 101, 0);
  });
  CHECK_FALSE(out.committed);
  CHECK(s == before);
}

TEST_CASE("borrow balance grows with the index") {
  PoolFixture f;
  Store s = f.store();
  CHECK(compound::borrow_balance_stored(s, f.pool, PoolFixture::kBorrower) == 0);

  f.approve_pool(s, PoolFixture::kMinter, 400);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 400, 0);
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 100, 0);
  });
  CHECK(compound::borrow_balance_stored(s, f.pool, PoolFixture::kBorrower) == 100);

  f.run(s, [&](ExecCtx& c) {
    c.store().advance_block(2);
    compound::accrue_interest(c, f.ledger, f.pool, 2);
  });
  Int debt = compound::borrow_balance_stored(s, f.pool, PoolFixture::kBorrower);
  CHECK(debt > 100);
  Int principal = s.get(f.pool.acc_borrows_principal, PoolFixture::kBorrower);
  Int idx_then = s.get(f.pool.acc_borrows_interest_index, PoolFixture::kBorrower);
  CHECK(debt == mul_div(principal, s.get(f.pool.borrow_index), idx_then));
}

TEST_CASE("repay with no debt is a no-op") {
  PoolFixture f;
  Store s = f.store();
  Store before = s;
  Int repaid = -1;
  f.run(s, [&](ExecCtx& c) {
    repaid = compound::repay_borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 0);
  });
  CHECK(repaid == 0);
  CHECK(s == before);
}

TEST_CASE("borrow then repay without accrual returns exactly the principal") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 400);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 400, 0);
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 150, 0);
  });
  Int repaid = -1;
  f.run(s, [&](ExecCtx& c) {
    repaid = compound::repay_borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 0);
  });
  CHECK(repaid == 150);
  CHECK(s.get(f.pool.total_borrows) == 0);
}

TEST_CASE("repay after accrual returns principal plus interest and grows the pool") {
  PoolFixture f;
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 400);
  f.run(s, [&](ExecCtx& c) {
    compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 400, 0);
    compound::borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 400, 0);
  });
  Int cash_before = compound::cash(s, f.ledger, f.pool);
  f.run(s, [&](ExecCtx& c) { c.store().advance_block(4); });
  Int repaid = -1;
  f.run(s, [&](ExecCtx& c) {
    repaid = compound::repay_borrow(c, f.ledger, f.pool, PoolFixture::kBorrower, 4);
  });
  CHECK(repaid > 400);
  CHECK(compound::cash(s, f.ledger, f.pool) > cash_before + 400);
}

TEST_CASE("stored borrow balances add up to totalBorrows within accrual rounding") {
  PoolFixture f({0, 800, 0}, {2000, 2000, 2000, 0});
  Store s = f.store();
  f.approve_pool(s, PoolFixture::kMinter, 2000);
  f.run(s, [&](ExecCtx& c) { compound::mint_ctoken(c, f.ledger, f.pool, PoolFixture::kMinter, 2000, 0); });

  std::mt19937_64 rng(2468);
  Int block = 0;
  int accruals = 0;
  for (int step = 0; step < 120; ++step) {
    std::size_t who = 1 + rng() % 2;  // borrowers live in slots 1 and 2
    int action = static_cast<int>(rng() % 3);
    f.run(s, [&](ExecCtx& c) {
      switch (action) {
        case 0: {
          Int cash_now = compound::cash(c.store(), f.ledger, f.pool);
          compound::borrow(c, f.ledger, f.pool, who, std::min<Int>(cash_now, static_cast<Int>(rng() % 500)), block);
          break;
        }
        case 1:
          compound::repay_borrow(c, f.ledger, f.pool, who, block);
          break;
        case 2:
          c.store().advance_block(++block);
          compound::accrue_interest(c, f.ledger, f.pool, block);
          ++accruals;
          break;
      }
    });
    Int stored_sum = 0;
    for (std::size_t u = 0; u < 4; ++u) stored_sum += compound::borrow_balance_stored(s, f.pool, u);
    Int gap = std::abs(stored_sum - s.get(f.pool.total_borrows));
    REQUIRE(gap <= std::max(1, accruals));
  }
}

TEST_CASE("randomized accruals match the oracle and never lower the rate") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    Int cash0 = static_cast<Int>(rng() % 100000);
    Int borrows0 = static_cast<Int>(rng() % 100000);
    Int ts = 1 + static_cast<Int>(rng() % 100000);
    Int base = static_cast<Int>(rng() % 50);
    Int mult = static_cast<Int>(rng() % 2000);
    Int rf = static_cast<Int>(rng() % 2000);
    Int delta = static_cast<Int>(rng() % 10);

    PoolFixture f({base, mult, rf}, {0, 0, 0, cash0}, {ts, 0, 0, 0});
    Store s = f.store();
    f.run(s, [&](ExecCtx& c) { c.store().set(f.pool.total_borrows, borrows0); });

    Int rate0 = compound::exchange_rate_stored(s, f.ledger, f.pool);
    CHECK(rate0 == oracle::exchange_rate(cash0, borrows0, 0, ts, kScale, kScale));

    auto o = oracle::accrue(cash0, borrows0, 0, kScale, base, mult, rf, delta, kScale);
    f.run(s, [&](ExecCtx& c) {
      c.store().advance_block(delta);
      compound::accrue_interest(c, f.ledger, f.pool, delta);
    });
    REQUIRE(s.get(f.pool.total_borrows) == o.total_borrows);
    REQUIRE(s.get(f.pool.borrow_index) == o.borrow_index);
    REQUIRE(s.get(f.pool.reserves) == o.reserves);

    Int rate1 = compound::exchange_rate_stored(s, f.ledger, f.pool);
    REQUIRE(rate1 == oracle::exchange_rate(cash0, o.total_borrows, o.reserves, ts, kScale, kScale));
    REQUIRE(rate1 >= rate0);
  }
}
