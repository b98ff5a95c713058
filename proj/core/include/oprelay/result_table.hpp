#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace oprelay {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Tabular experiment output plus a free-form metadata block.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<Cell> row);
  void set_meta(const std::string& key, std::string value);
  /// Value of a metadata key, or empty string.
  std::string meta(const std::string& key) const;
};

/// Shortest decimal form that still round-trips: "%.17g", with ".0" appended
/// when the result would otherwise read back as an integer.
std::string format_double(double v);

/// CSV layout: '#'-prefixed "key=value" metadata lines, one header row, then
/// data rows. Strings are quoted when they contain separators or would parse
/// as a number.
void write_csv(const ResultTable& table, std::ostream& out);

/// Writes `write_csv` output to `path`; failures throw std::runtime_error
/// naming the path.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);

/// Inverse of write_csv.
ResultTable parse_csv(std::istream& in);

/// Data rows only (no metadata), as written by write_csv.
std::string rows_as_csv(const ResultTable& table);

}  // namespace oprelay
