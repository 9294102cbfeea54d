#include "defimc/store.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace defimc {

void StoreSchema::check_fresh_name(const std::string& name) const {
  if (frozen_) throw ConfigError("schema is frozen, cannot add '" + name + "'");
  if (has_name(name)) throw ConfigError("duplicate store name '" + name + "'");
}

CellId StoreSchema::cell(const std::string& name, Int init) {
  check_fresh_name(name);
  cells_.push_back({name, init});
  cell_by_name_[name] = static_cast<std::int32_t>(cells_.size() - 1);
  return {static_cast<std::int32_t>(cells_.size() - 1)};
}

ArrayId StoreSchema::array(const std::string& name, std::size_t len, std::vector<Int> init) {
  check_fresh_name(name);
  if (!init.empty() && init.size() != len)
    throw ConfigError("array '" + name + "' init length mismatch");
  arrays_.push_back({name, len, std::move(init)});
  array_by_name_[name] = static_cast<std::int32_t>(arrays_.size() - 1);
  return {static_cast<std::int32_t>(arrays_.size() - 1)};
}

MatrixId StoreSchema::matrix(const std::string& name, std::size_t n) {
  check_fresh_name(name);
  matrices_.push_back({name, n});
  matrix_by_name_[name] = static_cast<std::int32_t>(matrices_.size() - 1);
  return {static_cast<std::int32_t>(matrices_.size() - 1)};
}

void StoreSchema::alias(const std::string& alt, const std::string& target) {
  if (has_name(alt)) throw ConfigError("alias '" + alt + "' clashes with existing name");
  aliases_[alt] = target;
}

void StoreSchema::freeze() {
  if (frozen_) return;
  // Sorted-name slot layout so serialization order is canonical.
  std::vector<std::pair<std::string, std::pair<char, std::int32_t>>> entries;
  for (std::size_t i = 0; i < cells_.size(); ++i)
    entries.push_back({cells_[i].name, {'c', static_cast<std::int32_t>(i)}});
  for (std::size_t i = 0; i < arrays_.size(); ++i)
    entries.push_back({arrays_[i].name, {'a', static_cast<std::int32_t>(i)}});
  for (std::size_t i = 0; i < matrices_.size(); ++i)
    entries.push_back({matrices_[i].name, {'m', static_cast<std::int32_t>(i)}});
  std::sort(entries.begin(), entries.end());
  std::size_t off = 0;
  for (auto& [name, ref] : entries) {
    switch (ref.first) {
      case 'c': cells_[ref.second].offset = off; off += 1; break;
      case 'a': arrays_[ref.second].offset = off; off += arrays_[ref.second].len; break;
      case 'm': matrices_[ref.second].offset = off; off += matrices_[ref.second].n * matrices_[ref.second].n; break;
    }
  }
  slot_count_ = off;
  frozen_ = true;
}

const std::string& StoreSchema::resolve(const std::string& name) const {
  auto it = aliases_.find(name);
  return it == aliases_.end() ? name : it->second;
}

CellId StoreSchema::find_cell(const std::string& name) const {
  auto it = cell_by_name_.find(resolve(name));
  return it == cell_by_name_.end() ? CellId{} : CellId{it->second};
}

ArrayId StoreSchema::find_array(const std::string& name) const {
  auto it = array_by_name_.find(resolve(name));
  return it == array_by_name_.end() ? ArrayId{} : ArrayId{it->second};
}

MatrixId StoreSchema::find_matrix(const std::string& name) const {
  auto it = matrix_by_name_.find(resolve(name));
  return it == matrix_by_name_.end() ? MatrixId{} : MatrixId{it->second};
}

bool StoreSchema::has_name(const std::string& name) const {
  const std::string& n = resolve(name);
  return cell_by_name_.count(n) || array_by_name_.count(n) || matrix_by_name_.count(n);
}

std::vector<std::string> StoreSchema::all_names() const {
  std::vector<std::string> out;
  for (auto& c : cells_) out.push_back(c.name);
  for (auto& a : arrays_) out.push_back(a.name);
  for (auto& m : matrices_) out.push_back(m.name);
  for (auto& [alt, _] : aliases_) out.push_back(alt);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Int> StoreSchema::initial_slots() const {
  if (!frozen_) throw ConfigError("schema must be frozen before creating stores");
  std::vector<Int> slots(slot_count_, 0);
  for (auto& c : cells_) slots[c.offset] = c.init;
  for (auto& a : arrays_)
    for (std::size_t i = 0; i < a.init.size(); ++i) slots[a.offset + i] = a.init[i];
  return slots;
}

Store::Store(SchemaPtr schema) : schema_(std::move(schema)), slots_(schema_->initial_slots()) {
  block_cell_ = schema_->find_cell(kBlockNumberCell);
  if (!block_cell_.valid())
    throw ConfigError("schema lacks the required 'blockNumber' cell");
}

Int Store::get(ArrayId id, std::size_t i) const {
  if (i >= schema_->array_len(id)) throw ConfigError("array index out of range");
  return slots_[schema_->array_offset(id) + i];
}
void Store::set(ArrayId id, std::size_t i, Int v) {
  if (i >= schema_->array_len(id)) throw ConfigError("array index out of range");
  slots_[schema_->array_offset(id) + i] = v;
}
void Store::add(ArrayId id, std::size_t i, Int v) { set(id, i, get(id, i) + v); }

Int Store::sum(ArrayId id) const {
  Int s = 0;
  std::size_t off = schema_->array_offset(id), len = schema_->array_len(id);
  for (std::size_t i = 0; i < len; ++i) s += slots_[off + i];
  return s;
}

Int Store::get(MatrixId id, std::size_t r, std::size_t c) const {
  std::size_t n = schema_->matrix_dim(id);
  if (r >= n || c >= n) throw ConfigError("matrix index out of range");
  return slots_[schema_->matrix_offset(id) + r * n + c];
}
void Store::set(MatrixId id, std::size_t r, std::size_t c, Int v) {
  std::size_t n = schema_->matrix_dim(id);
  if (r >= n || c >= n) throw ConfigError("matrix index out of range");
  slots_[schema_->matrix_offset(id) + r * n + c] = v;
}
void Store::add(MatrixId id, std::size_t r, std::size_t c, Int v) { set(id, r, c, get(id, r, c) + v); }

void Store::overwrite_slots(std::span<const Int> s) {
  if (s.size() != slots_.size()) throw ConfigError("slot vector size mismatch");
  slots_.assign(s.begin(), s.end());
}

void Store::advance_block(Int to) {
  if (to < block_number()) throw ConfigError("blockNumber may not decrease");
  set(block_cell_, to);
}

void Store::append_key(std::vector<std::uint8_t>& out) const {
  std::size_t base = out.size();
  out.resize(base + slots_.size() * sizeof(Int));
  std::memcpy(out.data() + base, slots_.data(), slots_.size() * sizeof(Int));
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t Store::canonical_hash() const {
  return fnv1a64(reinterpret_cast<const std::uint8_t*>(slots_.data()),
                 slots_.size() * sizeof(Int));
}

std::string Store::to_text() const {
  // Slots are already laid out in sorted-name order; print each named
  // entry with explicit indices so the text parses back unambiguously.
  std::ostringstream os;
  std::vector<std::pair<std::size_t, std::string>> lines;
  for (std::size_t i = 0; i < schema_->n_cells(); ++i) {
    CellId id{static_cast<std::int32_t>(i)};
    lines.push_back({schema_->cell_offset(id), schema_->cell_name(id) + " = " + std::to_string(get(id))});
  }
  for (std::size_t i = 0; i < schema_->n_arrays(); ++i) {
    ArrayId id{static_cast<std::int32_t>(i)};
    for (std::size_t j = 0; j < schema_->array_len(id); ++j)
      lines.push_back({schema_->array_offset(id) + j,
                       schema_->array_name(id) + "[" + std::to_string(j) + "] = " + std::to_string(get(id, j))});
  }
  for (std::size_t i = 0; i < schema_->n_matrices(); ++i) {
    MatrixId id{static_cast<std::int32_t>(i)};
    std::size_t n = schema_->matrix_dim(id);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        lines.push_back({schema_->matrix_offset(id) + r * n + c,
                         schema_->matrix_name(id) + "[" + std::to_string(r) + "][" + std::to_string(c) +
                             "] = " + std::to_string(get(id, r, c))});
  }
  std::sort(lines.begin(), lines.end());
  for (auto& [off, text] : lines) os << text << "\n";
  return os.str();
}

Store Store::from_text(SchemaPtr schema, const std::string& text) {
  Store s(std::move(schema));
  std::istringstream is(text);
  std::string line;
  std::size_t slot = 0;
  while (std::getline(is, line)) {
    auto eq = line.rfind(" = ");
    if (eq == std::string::npos) throw ConfigError("bad store text line: " + line);
    if (slot >= s.slots_.size()) throw ConfigError("store text has too many lines");
    s.slots_[slot++] = std::stoll(line.substr(eq + 3));
  }
  if (slot != s.slots_.size()) throw ConfigError("store text has too few lines");
  return s;
}

}  // namespace defimc
