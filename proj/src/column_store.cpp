#include "hepkit/column_store.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <unordered_set>

namespace hepkit {

const char* to_string(ColumnKind kind) noexcept {
  switch (kind) {
    case ColumnKind::Real64: return "real64";
    case ColumnKind::Integer64: return "integer64";
    case ColumnKind::Boolean: return "boolean";
  }
  return "?";
}

ColumnSchema::ColumnSchema(std::initializer_list<ColumnSpec> columns) : columns_(columns) {
  validate();
}

ColumnSchema::ColumnSchema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  validate();
}

ColumnSchema ColumnSchema::homogeneous(const std::vector<std::string>& names, ColumnKind kind) {
  std::vector<ColumnSpec> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back({n, kind});
  return ColumnSchema(std::move(cols));
}

void ColumnSchema::validate() const {
  if (columns_.empty()) throw StoreError("schema needs at least one column");
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (c.name.empty() ||
        !std::all_of(c.name.begin(), c.name.end(), [](unsigned char ch) {
          return std::isalnum(ch) || ch == '_';
        }))
      throw StoreError("invalid column name '" + c.name + "'");
    if (!seen.insert(c.name).second) throw StoreError("duplicate column name '" + c.name + "'");
  }
}

std::size_t ColumnSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw StoreError("unknown column '" + std::string(name) + "'");
}

bool ColumnSchema::contains(std::string_view name) const noexcept {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const ColumnSpec& c) { return c.name == name; });
}

std::vector<std::string> ColumnSchema::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

ColumnStore::ColumnStore(ColumnSchema schema, std::size_t capacity_hint)
    : schema_(std::move(schema)) {
  if (schema_.size() == 0) throw StoreError("schema needs at least one column");
  data_.reserve(schema_.size());
  for (const auto& c : schema_) {
    switch (c.kind) {
      case ColumnKind::Real64: data_.emplace_back(std::vector<double>{}); break;
      case ColumnKind::Integer64: data_.emplace_back(std::vector<std::int64_t>{}); break;
      case ColumnKind::Boolean: data_.emplace_back(std::vector<bool8>{}); break;
    }
  }
  reserve(capacity_hint);
}

void ColumnStore::reserve(std::size_t n) {
  for (auto& d : data_) std::visit([n](auto& v) { v.reserve(n); }, d);
}

void ColumnStore::resize(std::size_t n) {
  for (auto& d : data_) std::visit([n](auto& v) { v.resize(n); }, d);
  length_ = n;
}

void ColumnStore::push(const Row& row) {
  if (row.size() != schema_.size())
    throw StoreError("row arity " + std::to_string(row.size()) + " does not match schema arity " +
                     std::to_string(schema_.size()));
  // Validate fully before mutating so a bad row leaves the store unchanged.
  for (std::size_t c = 0; c < row.size(); ++c) {
    const auto kind = schema_[c].kind;
    const bool ok = (kind == ColumnKind::Real64 &&
                     (std::holds_alternative<double>(row[c]) ||
                      std::holds_alternative<std::int64_t>(row[c]))) ||
                    (kind == ColumnKind::Integer64 && std::holds_alternative<std::int64_t>(row[c])) ||
                    (kind == ColumnKind::Boolean && std::holds_alternative<bool>(row[c]));
    if (!ok)
      throw StoreError("value kind mismatch in column '" + schema_[c].name + "' (expected " +
                       to_string(kind) + ")");
  }
  for (std::size_t c = 0; c < row.size(); ++c) {
    switch (schema_[c].kind) {
      case ColumnKind::Real64: {
        const double v = std::holds_alternative<double>(row[c])
                             ? std::get<double>(row[c])
                             : static_cast<double>(std::get<std::int64_t>(row[c]));
        std::get<std::vector<double>>(data_[c]).push_back(v);
        break;
      }
      case ColumnKind::Integer64:
        std::get<std::vector<std::int64_t>>(data_[c]).push_back(std::get<std::int64_t>(row[c]));
        break;
      case ColumnKind::Boolean:
        std::get<std::vector<bool8>>(data_[c]).push_back(std::get<bool>(row[c]) ? 1 : 0);
        break;
    }
  }
  ++length_;
}

Row ColumnStore::row(std::size_t i) const {
  if (i >= length_)
    throw StoreError("row index " + std::to_string(i) + " out of range (length " +
                     std::to_string(length_) + ")");
  Row out;
  out.reserve(data_.size());
  for (const auto& d : data_) {
    std::visit(
        [&](const auto& v) {
          using T = typename std::decay_t<decltype(v)>::value_type;
          if constexpr (std::is_same_v<T, bool8>)
            out.emplace_back(v[i] != 0);
          else
            out.emplace_back(v[i]);
        },
        d);
  }
  return out;
}

double ColumnStore::real_at(std::size_t column, std::size_t i) const {
  return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, data_.at(column));
}

ColumnStore ColumnStore::filter(const std::function<bool(const Row&)>& keep) const {
  ColumnStore out(schema_);
  for (std::size_t i = 0; i < length_; ++i) {
    Row r = row(i);
    if (keep(r)) out.push(r);
  }
  return out;
}

void ColumnStore::add_column(std::string name, std::vector<double> values) {
  if (values.size() != length_)
    throw StoreError("new column '" + name + "' has " + std::to_string(values.size()) +
                     " values, store has " + std::to_string(length_) + " rows");
  std::vector<ColumnSpec> cols(schema_.begin(), schema_.end());
  cols.push_back({std::move(name), ColumnKind::Real64});
  schema_ = ColumnSchema(std::move(cols));
  data_.emplace_back(std::move(values));
}

bool operator==(const ColumnStore& a, const ColumnStore& b) {
  if (!(a.schema_ == b.schema_) || a.length_ != b.length_) return false;
  for (std::size_t c = 0; c < a.data_.size(); ++c) {
    const bool same = std::visit(
        [&](const auto& va) {
          using V = std::decay_t<decltype(va)>;
          const auto& vb = std::get<V>(b.data_[c]);
          // Bitwise comparison so NaN payloads and signed zeros count.
          return std::memcmp(va.data(), vb.data(), a.length_ * sizeof(typename V::value_type)) == 0;
        },
        a.data_[c]);
    if (!same) return false;
  }
  return true;
}

}  // namespace hepkit
