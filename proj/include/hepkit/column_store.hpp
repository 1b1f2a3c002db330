#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "hepkit/error.hpp"

namespace hepkit {

enum class ColumnKind { Real64, Integer64, Boolean };

const char* to_string(ColumnKind kind) noexcept;

/// Boolean cells are stored one byte each so column views stay contiguous.
using bool8 = std::uint8_t;

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Real64;
  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

/// Ordered column names and kinds. Names are unique and match [A-Za-z0-9_]+.
class ColumnSchema {
 public:
  ColumnSchema() = default;
  ColumnSchema(std::initializer_list<ColumnSpec> columns);
  explicit ColumnSchema(std::vector<ColumnSpec> columns);

  /// Every column of the same kind (the homogeneous, multiarray-style table).
  static ColumnSchema homogeneous(const std::vector<std::string>& names,
                                  ColumnKind kind = ColumnKind::Real64);

  std::size_t size() const noexcept { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns_.at(i); }
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const noexcept;
  std::vector<std::string> names() const;

  auto begin() const { return columns_.begin(); }
  auto end() const { return columns_.end(); }

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;

 private:
  void validate() const;
  std::vector<ColumnSpec> columns_;
};

using Value = std::variant<double, std::int64_t, bool>;
using Row = std::vector<Value>;

/// Structure-of-arrays table: one contiguous vector per column, rows
/// materialized as tuples on access.
///
/// Single writer; any number of concurrent readers once filling is done.
/// Bulk producers call resize() and write disjoint index ranges of
/// mutable_column() spans.
class ColumnStore {
 public:
  ColumnStore() = default;
  explicit ColumnStore(ColumnSchema schema, std::size_t capacity_hint = 0);

  const ColumnSchema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  std::size_t column_count() const noexcept { return schema_.size(); }

  /// Appends a row; throws StoreError on arity or kind mismatch.
  /// Integer values are accepted for real columns; nothing else converts.
  void push(const Row& row);
  Row row(std::size_t i) const;

  void resize(std::size_t n);
  void reserve(std::size_t n);

  /// Read-only view of a column. T is double, std::int64_t or bool8 and
  /// must match the column kind.
  template <typename T>
  std::span<const T> column(std::string_view name) const {
    return column<T>(schema_.index_of(name));
  }
  template <typename T>
  std::span<const T> column(std::size_t index) const {
    const auto* v = std::get_if<std::vector<T>>(&data_.at(index));
    if (!v) throw StoreError("column '" + schema_[index].name + "' is not of the requested kind");
    return {v->data(), length_};
  }

  template <typename T>
  std::span<T> mutable_column(std::string_view name) {
    return mutable_column<T>(schema_.index_of(name));
  }
  template <typename T>
  std::span<T> mutable_column(std::size_t index) {
    auto* v = std::get_if<std::vector<T>>(&data_.at(index));
    if (!v) throw StoreError("column '" + schema_[index].name + "' is not of the requested kind");
    return {v->data(), length_};
  }

  /// Real column values of row i converted to double, whatever the kind.
  double real_at(std::size_t column, std::size_t i) const;

  /// Rows satisfying `keep`, in original order. The input is untouched.
  ColumnStore filter(const std::function<bool(const Row&)>& keep) const;

  /// Adds a real column, filled with `values` (size must match).
  void add_column(std::string name, std::vector<double> values);

  friend bool operator==(const ColumnStore& a, const ColumnStore& b);

 private:
  using ColumnData = std::variant<std::vector<double>, std::vector<std::int64_t>, std::vector<bool8>>;

  ColumnSchema schema_;
  std::vector<ColumnData> data_;
  std::size_t length_ = 0;
};

}  // namespace hepkit
