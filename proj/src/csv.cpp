#include "hepkit/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hepkit {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const ColumnStore& store) {
  const auto& schema = store.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) out << (c ? "," : "") << schema[c].name;
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < store.size(); ++i) {
    line.clear();
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) line += ',';
      switch (schema[c].kind) {
        case ColumnKind::Real64: line += format_real(store.column<double>(c)[i]); break;
        case ColumnKind::Integer64: line += std::to_string(store.column<std::int64_t>(c)[i]); break;
        case ColumnKind::Boolean: line += store.column<bool8>(c)[i] ? '1' : '0'; break;
      }
    }
    line += '\n';
    out << line;
  }
}

void write_csv_file(const std::string& path, const ColumnStore& store) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw StoreError("cannot open '" + path + "' for writing");
  write_csv(f, store);
  if (!f) throw StoreError("write to '" + path + "' failed");
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw StoreError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(s) + "'");
  return v;
}

}  // namespace

ColumnStore read_csv(std::istream& in, const std::optional<ColumnSchema>& schema) {
  std::string line;
  if (!std::getline(in, line)) throw StoreError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> names;
  for (auto f : split(line)) names.emplace_back(f);

  ColumnSchema resolved = schema ? *schema : ColumnSchema::homogeneous(names);
  if (resolved.names() != names) throw StoreError("CSV header does not match the expected schema");

  ColumnStore store(resolved);
  std::size_t line_no = 1;
  Row row(resolved.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != resolved.size())
      throw StoreError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(resolved.size()) + " fields, got " +
                       std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      switch (resolved[c].kind) {
        case ColumnKind::Real64: row[c] = parse_number<double>(fields[c], line_no); break;
        case ColumnKind::Integer64: row[c] = parse_number<std::int64_t>(fields[c], line_no); break;
        case ColumnKind::Boolean: row[c] = parse_number<std::int64_t>(fields[c], line_no) != 0; break;
      }
    }
    store.push(row);
  }
  return store;
}

ColumnStore read_csv_file(const std::string& path, const std::optional<ColumnSchema>& schema) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw StoreError("cannot open '" + path + "'");
  return read_csv(f, schema);
}

}  // namespace hepkit
