#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dcl {

/// One cell of a result table. Empty cells stand for fields a run mode did not produce.
using Cell = std::variant<std::monostate, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Appends a row given as column -> value; missing columns become empty cells.
  void add(const std::map<std::string, Cell>& row);
  std::size_t column(const std::string& name) const;  // throws std::out_of_range
  const Cell& at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

  bool operator==(const Table&) const = default;
};

enum class Format { csv, json };

Format parse_format(const std::string& s);

/// CSV with a header row, or a JSON array of row objects. Doubles carry
/// 17 significant digits; non-finite doubles are written as inf / -inf / nan.
void emit(const Table& table, Format format, const std::string& path);
std::string to_string(const Table& table, Format format);

Table parse_csv(const std::string& text);
Table parse_json(const std::string& text);
Table read_table(const std::string& path, Format format);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace dcl
