#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace defimc {

using Int = std::int64_t;

/// Model bug: malformed scenario, unknown name, numeric non-convergence.
/// Aborts the run; never used for in-model reverts.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CellId { std::int32_t idx = -1; bool valid() const { return idx >= 0; } };
struct ArrayId { std::int32_t idx = -1; bool valid() const { return idx >= 0; } };
struct MatrixId { std::int32_t idx = -1; bool valid() const { return idx >= 0; } };

/// Fixed layout of the global state: scalar cells, per-user vectors and
/// N x N grids, all addressed by qualified name. The layout is frozen
/// before any Store is created; slots are assigned in sorted-name order
/// so the flat slot vector doubles as the canonical serialization.
class StoreSchema {
 public:
  CellId cell(const std::string& name, Int init = 0);
  ArrayId array(const std::string& name, std::size_t len, std::vector<Int> init = {});
  MatrixId matrix(const std::string& name, std::size_t n);
  void alias(const std::string& alt, const std::string& target);

  void freeze();
  bool frozen() const { return frozen_; }

  CellId find_cell(const std::string& name) const;
  ArrayId find_array(const std::string& name) const;
  MatrixId find_matrix(const std::string& name) const;
  bool has_name(const std::string& name) const;
  std::vector<std::string> all_names() const;

  std::size_t slot_count() const { return slot_count_; }
  std::size_t cell_offset(CellId id) const { return cells_.at(id.idx).offset; }
  std::size_t array_offset(ArrayId id) const { return arrays_.at(id.idx).offset; }
  std::size_t array_len(ArrayId id) const { return arrays_.at(id.idx).len; }
  std::size_t matrix_offset(MatrixId id) const { return matrices_.at(id.idx).offset; }
  std::size_t matrix_dim(MatrixId id) const { return matrices_.at(id.idx).n; }

  const std::string& cell_name(CellId id) const { return cells_.at(id.idx).name; }
  const std::string& array_name(ArrayId id) const { return arrays_.at(id.idx).name; }
  const std::string& matrix_name(MatrixId id) const { return matrices_.at(id.idx).name; }
  std::size_t n_cells() const { return cells_.size(); }
  std::size_t n_arrays() const { return arrays_.size(); }
  std::size_t n_matrices() const { return matrices_.size(); }

  std::vector<Int> initial_slots() const;

 private:
  struct CellDef { std::string name; Int init; std::size_t offset = 0; };
  struct ArrayDef { std::string name; std::size_t len; std::vector<Int> init; std::size_t offset = 0; };
  struct MatrixDef { std::string name; std::size_t n; std::size_t offset = 0; };

  void check_fresh_name(const std::string& name) const;

  std::vector<CellDef> cells_;
  std::vector<ArrayDef> arrays_;
  std::vector<MatrixDef> matrices_;
  std::map<std::string, std::string> aliases_;
  std::map<std::string, std::int32_t> cell_by_name_;
  std::map<std::string, std::int32_t> array_by_name_;
  std::map<std::string, std::int32_t> matrix_by_name_;
  std::size_t slot_count_ = 0;
  bool frozen_ = false;

  const std::string& resolve(const std::string& name) const;
};

using SchemaPtr = std::shared_ptr<const StoreSchema>;

/// The global state. A plain value: copying it is the snapshot operation,
/// assignment is restore. The distinguished `blockNumber` cell tracks the
/// mined block height.
class Store {
 public:
  Store() = default;
  explicit Store(SchemaPtr schema);

  const StoreSchema& schema() const { return *schema_; }
  SchemaPtr schema_ptr() const { return schema_; }

  Int get(CellId id) const { return slots_[schema_->cell_offset(id)]; }
  void set(CellId id, Int v) { slots_[schema_->cell_offset(id)] = v; }
  void add(CellId id, Int v) { slots_[schema_->cell_offset(id)] += v; }

  Int get(ArrayId id, std::size_t i) const;
  void set(ArrayId id, std::size_t i, Int v);
  void add(ArrayId id, std::size_t i, Int v);
  Int sum(ArrayId id) const;

  Int get(MatrixId id, std::size_t r, std::size_t c) const;
  void set(MatrixId id, std::size_t r, std::size_t c, Int v);
  void add(MatrixId id, std::size_t r, std::size_t c, Int v);

  Int block_number() const { return get(block_cell_); }
  /// Block height only moves forward.
  void advance_block(Int to);

  std::span<const Int> slots() const { return slots_; }
  void overwrite_slots(std::span<const Int> s);
  bool operator==(const Store& rhs) const { return slots_ == rhs.slots_; }

  /// Raw canonical bytes of the state (slot vector, little-endian).
  void append_key(std::vector<std::uint8_t>& out) const;
  std::uint64_t canonical_hash() const;

  /// Text form: one sorted "name = value" line per slot. Parseable back.
  std::string to_text() const;
  static Store from_text(SchemaPtr schema, const std::string& text);

 private:
  SchemaPtr schema_;
  std::vector<Int> slots_;
  CellId block_cell_;
};

/// Names the block-height cell every schema must declare.
inline constexpr const char* kBlockNumberCell = "blockNumber";

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len);

}  // namespace defimc
