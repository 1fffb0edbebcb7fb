#include "dcl/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dcl/errors.hpp"

namespace dcl {

void Table::add(const std::map<std::string, Cell>& row) {
  std::vector<Cell> cells(columns.size());
  for (const auto& [name, value] : row) cells.at(column(name)) = value;
  rows.push_back(std::move(cells));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("table has no column '" + name + "'");
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ConfigError("format", "expected csv or json, got '" + s + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::optional<double> parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::string csv_field(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<V, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        }
      },
      c);
}

std::string json_value(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return "null";
        } else if constexpr (std::is_same_v<V, double>) {
          return std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else {
          return nlohmann::json(v).dump();
        }
      },
      c);
}

Cell cell_from_text(const std::string& s) {
  if (s.empty()) return std::monostate{};
  if (s == "true") return true;
  if (s == "false") return false;
  if (auto d = parse_double(s)) return *d;
  return s;
}

// Splits CSV text into records; quoted fields may contain commas, quotes and newlines.
std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  auto end_record = [&] {
    fields.push_back(std::move(cur));
    cur.clear();
    if (!(fields.size() == 1 && fields[0].empty())) records.push_back(std::move(fields));
    fields.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch == '\n') {
      end_record();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  if (!cur.empty() || !fields.empty()) end_record();
  return records;
}

}  // namespace

std::string to_string(const Table& table, Format format) {
  std::ostringstream os;
  if (format == Format::csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << csv_field(table.columns[i]);
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
      os << '\n';
    }
    return os.str();
  }
  os << '[';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    os << (r ? ",\n " : "\n ") << '{';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      os << (i ? ", " : "") << nlohmann::json(table.columns[i]).dump() << ": " << json_value(table.rows[r][i]);
    os << '}';
  }
  os << (table.rows.empty() ? "]\n" : "\n]\n");
  return os.str();
}

void emit(const Table& table, Format format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << to_string(table, format);
  if (!out) throw IoError(path, "write failed");
}

Table parse_csv(const std::string& text) {
  Table t;
  auto records = split_csv(text);
  if (records.empty()) return t;
  t.columns = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.columns.size()) throw std::runtime_error("csv: row width does not match header");
    std::vector<Cell> row;
    row.reserve(records[r].size());
    for (const auto& f : records[r]) row.push_back(cell_from_text(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table parse_json(const std::string& text) {
  const auto doc = nlohmann::ordered_json::parse(text);
  if (!doc.is_array()) throw std::runtime_error("json: expected an array of row objects");
  Table t;
  for (const auto& obj : doc) {
    if (t.columns.empty())
      for (const auto& [key, _] : obj.items()) t.columns.push_back(key);
    std::vector<Cell> row;
    for (const auto& name : t.columns) {
      const auto& v = obj.at(name);
      if (v.is_null()) {
        row.emplace_back(std::monostate{});
      } else if (v.is_boolean()) {
        row.emplace_back(v.get<bool>());
      } else if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else {
        const auto s = v.get<std::string>();
        const auto d = (s == "inf" || s == "-inf" || s == "nan") ? parse_double(s) : std::nullopt;
        row.emplace_back(d ? Cell(*d) : Cell(s));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_table(const std::string& path, Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return format == Format::csv ? parse_csv(ss.str()) : parse_json(ss.str());
}

}  // namespace dcl
