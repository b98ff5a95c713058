#include "oprelay/result_table.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace oprelay {
namespace {

bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  if (s.find_first_of(",\"\r\n") != std::string::npos) return true;
  if (s.front() == '#' || s.front() == ' ' || s.back() == ' ') return true;
  std::int64_t i;
  double d;
  return parse_int(s, i) || parse_double(s, d);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string render(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  const auto& s = std::get<std::string>(cell);
  return needs_quotes(s) ? quote(s) : s;
}

void write_row(std::ostream& out, const std::vector<Cell>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << render(row[i]);
  }
  out << '\n';
}

// Splits one CSV record; `quoted` marks fields that were enclosed in quotes.
std::vector<std::pair<std::string, bool>> split_record(std::istream& in, const std::string& first_line) {
  std::vector<std::pair<std::string, bool>> fields;
  std::string line = first_line;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (in_quotes) {
        std::string next;
        if (!std::getline(in, next)) throw std::runtime_error("csv: unterminated quoted field");
        field += '\n';
        line = next;
        i = 0;
        continue;
      }
      fields.emplace_back(field, was_quoted);
      break;
    }
    const char ch = line[i++];
    if (in_quotes) {
      if (ch == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(field, was_quoted);
      field.clear();
      was_quoted = false;
    } else {
      field += ch;
    }
  }
  return fields;
}

Cell to_cell(const std::string& text, bool quoted) {
  if (quoted) return text;
  std::int64_t i;
  if (parse_int(text, i)) return i;
  double d;
  if (parse_double(text, d)) return d;
  return text;
}

}  // namespace

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("ResultTable: row width does not match header");
  rows.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata)
    if (k == key) {
      v = std::move(value);
      return;
    }
  metadata.emplace_back(key, std::move(value));
}

std::string ResultTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write_csv(const ResultTable& table, std::ostream& out) {
  for (const auto& [k, v] : table.metadata) {
    std::string value = v;
    for (auto& ch : value)
      if (ch == '\n' || ch == '\r') ch = ' ';
    out << "# " << k << '=' << value << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << (needs_quotes(table.columns[i]) ? quote(table.columns[i]) : table.columns[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) write_row(out, row);
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing: " +
                                     std::strerror(errno));
  write_csv(table, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string rows_as_csv(const ResultTable& table) {
  std::ostringstream out;
  for (const auto& row : table.rows) write_row(out, row);
  return out.str();
}

ResultTable parse_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line.front() == '#') {
      const std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        table.metadata.emplace_back(body, "");
      else
        table.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_record(in, line);
    if (!have_header) {
      for (auto& [text, quoted] : fields) table.columns.push_back(text);
      have_header = true;
      continue;
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (auto& [text, quoted] : fields) row.push_back(to_cell(text, quoted));
    if (row.size() != table.columns.size())
      throw std::runtime_error("csv: row width does not match header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace oprelay
