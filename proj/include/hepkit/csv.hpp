#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "hepkit/column_store.hpp"

namespace hepkit {

/// Shortest round-trip-safe decimal form used by every CSV writer (%.17g).
std::string format_real(double v);

/// Header row of column names, then one line per row. Reals are written
/// with 17 significant digits, booleans as 0/1.
void write_csv(std::ostream& out, const ColumnStore& store);
void write_csv_file(const std::string& path, const ColumnStore& store);

/// Without a schema every column is read as real64.
ColumnStore read_csv(std::istream& in, const std::optional<ColumnSchema>& schema = std::nullopt);
ColumnStore read_csv_file(const std::string& path,
                          const std::optional<ColumnSchema>& schema = std::nullopt);

}  // namespace hepkit
