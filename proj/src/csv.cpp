#include "riskcard/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "riskcard/error.hpp"

namespace riskcard {

namespace {

// Splits one logical record; quoted fields may contain separators, doubled
// quotes, and newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("line " + std::to_string(line), "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

RawValue parse_cell(const std::string& s) {
  if (s.empty() || s == "NA") return std::monostate{};
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(d)) return d;
  return s;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::size_t line = 1;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line)) throw ParseError("line 1", "empty CSV, header expected");
  table.header = fields;
  while (true) {
    const std::size_t start = line;
    if (!read_record(in, fields, line)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != table.header.size()) {
      throw ParseError("line " + std::to_string(start),
                       "expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    }
    table.rows.push_back(fields);
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.location(), e.what());
  }
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (needs_quotes(row[k])) {
        out << '"';
        for (char c : row[k]) {
          if (c == '"') out << '"';
          out << c;
        }
        out << '"';
      } else {
        out << row[k];
      }
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
}

RawDataset to_raw_dataset(const CsvTable& table,
                          const std::optional<std::string>& label_column) {
  std::optional<std::size_t> label_idx;
  if (label_column) {
    for (std::size_t k = 0; k < table.header.size(); ++k) {
      if (table.header[k] == *label_column) label_idx = k;
    }
    if (!label_idx) throw SchemaMismatch(*label_column, "label column '" + *label_column + "' not found");
  }
  std::vector<std::string> names;
  std::vector<std::vector<RawValue>> columns;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (label_idx && k == *label_idx) continue;
    names.push_back(table.header[k]);
    std::vector<RawValue> col;
    col.reserve(table.rows.size());
    for (const auto& row : table.rows) col.push_back(parse_cell(row[k]));
    columns.push_back(std::move(col));
  }
  const std::size_t n = table.rows.size();
  RawDataset raw(std::move(names), std::move(columns));
  if (label_idx) {
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = table.rows[i][*label_idx];
      if (t.empty() || t == "NA") {
        throw DataError("missing label on data row " + std::to_string(i + 1));
      }
      tokens.push_back(t);
    }
    raw.set_labels(tokens);
  }
  return raw;
}

}  // namespace riskcard
