#include <random>

#include "defimc/store.hpp"
#include "doctest.h"

using namespace defimc;

namespace {

SchemaPtr small_schema() {
  auto schema = std::make_shared<StoreSchema>();
  schema->cell(kBlockNumberCell, 0);
  schema->cell("x", 7);
  schema->array("bal", 4, {1, 2, 3, 4});
  schema->matrix("allow", 4);
  schema->alias("bal_alias", "bal");
  schema->freeze();
  return schema;
}

}  // namespace

TEST_CASE("snapshot round trip restores the original store") {
  Store s(small_schema());
  Store snap = s;  // snapshot is a plain copy
  s.set(s.schema().find_cell("x"), 99);
  s.set(s.schema().find_array("bal"), 2, 42);
  CHECK(s.get(s.schema().find_cell("x")) == 99);
  s = snap;
  CHECK(s.get(s.schema().find_cell("x")) == 7);
  CHECK(s.get(s.schema().find_array("bal"), 2) == 3);
}

TEST_CASE("snapshot of an empty store restores empty") {
  auto schema = std::make_shared<StoreSchema>();
  schema->cell(kBlockNumberCell, 0);
  schema->freeze();
  Store s(schema);
  Store snap = s;
  s.advance_block(5);
  s = snap;
  CHECK(s.block_number() == 0);
}

TEST_CASE("snapshots taken twice without mutation hash identically") {
  Store s(small_schema());
  Store a = s, b = s;
  CHECK(a.canonical_hash() == b.canonical_hash());
  CHECK(a == b);
}

TEST_CASE("aliases resolve to the same array") {
  auto schema = small_schema();
  CHECK(schema->find_array("bal_alias").idx == schema->find_array("bal").idx);
  CHECK(schema->has_name("bal_alias"));
}

TEST_CASE("blockNumber may not decrease") {
  Store s(small_schema());
  s.advance_block(3);
  CHECK_THROWS_AS(s.advance_block(2), ConfigError);
  CHECK(s.block_number() == 3);
}

TEST_CASE("duplicate names are rejected") {
  StoreSchema schema;
  schema.cell("x");
  CHECK_THROWS_AS(schema.cell("x"), ConfigError);
  CHECK_THROWS_AS(schema.array("x", 3), ConfigError);
}

TEST_CASE("text serialization round-trips to a fixpoint") {
  auto schema = small_schema();
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 50; ++round) {
    Store s(schema);
    s.set(schema->find_cell("x"), static_cast<Int>(rng() % 1000));
    for (std::size_t i = 0; i < 4; ++i) s.set(schema->find_array("bal"), i, static_cast<Int>(rng() % 500));
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) s.set(schema->find_matrix("allow"), r, c, static_cast<Int>(rng() % 100));

    std::string text = s.to_text();
    Store parsed = Store::from_text(schema, text);
    CHECK(parsed == s);
    CHECK(parsed.to_text() == text);
    CHECK(parsed.canonical_hash() == s.canonical_hash());
  }
}

TEST_CASE("sum aggregates an array") {
  Store s(small_schema());
  CHECK(s.sum(s.schema().find_array("bal")) == 10);
}
