#pragma once

// CSV ingestion and output. Dialect: comma-separated, first non-comment row is
// the header, '#' lines are comments, double quotes with "" escapes, LF or
// CRLF line endings. Written files start with a "# schema=1" line.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "clda/core.hpp"

namespace clda {

inline constexpr const char* kSchemaLine = "# schema=1";

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw Error(ErrorCode::Parse, "unterminated quote on line " + std::to_string(line_no));
  out.push_back(std::move(field));
  return out;
}

inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& source = "<stream>") {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = detail::split_csv_line(line, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::Parse, source + ": line " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " fields, header has " +
                                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw Error(ErrorCode::Parse, source + ": no header row");
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_csv(in, path);
}

inline double parse_double(const std::string& text, const std::string& where) {
  const std::string s = detail::trim(text);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, where + ": not a number: '" + text + "'");
  }
  return v;
}

/// Shortest text that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct LoadedData {
  Dataset data;
  CsvTable table;
  int label_column = 0;
  std::vector<std::string> feature_names;
};

/// label_col is a header name or a 0-based column index; empty selects the
/// last column. Every other column must be numeric.
inline LoadedData load_dataset(const std::string& path, const std::string& label_col = {}) {
  CsvTable table = read_csv(path);
  const int cols = static_cast<int>(table.header.size());
  int label = cols - 1;
  if (!label_col.empty()) {
    label = -1;
    for (int j = 0; j < cols; ++j)
      if (detail::trim(table.header[static_cast<std::size_t>(j)]) == label_col) label = j;
    if (label < 0 && label_col.find_first_not_of("0123456789") == std::string::npos) label = std::stoi(label_col);
    if (label < 0 || label >= cols) throw Error(ErrorCode::Parse, path + ": no label column '" + label_col + "'");
  }
  if (cols < 2) throw Error(ErrorCode::Parse, path + ": need at least one feature column and a label column");
  if (table.rows.empty()) throw Error(ErrorCode::Parse, path + ": no data rows");

  Matrix x(cols - 1, static_cast<Eigen::Index>(table.rows.size()));
  std::vector<std::string> labels;
  labels.reserve(table.rows.size());
  std::vector<std::string> names;
  for (int j = 0; j < cols; ++j)
    if (j != label) names.push_back(table.header[static_cast<std::size_t>(j)]);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Eigen::Index f = 0;
    for (int j = 0; j < cols; ++j) {
      if (j == label) continue;
      x(f++, static_cast<Eigen::Index>(r)) =
          parse_double(row[static_cast<std::size_t>(j)], path + " row " + std::to_string(r + 1) + " column " +
                                                              table.header[static_cast<std::size_t>(j)]);
    }
    labels.push_back(detail::trim(row[static_cast<std::size_t>(label)]));
  }
  return {validate_dataset(std::move(x), labels), std::move(table), label, std::move(names)};
}

inline void write_rows(std::ostream& out, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  out << kSchemaLine << '\n';
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j) out << ',';
      out << detail::quote_field(fields[j]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_rows(out, header, rows);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

/// One CSV row per matrix row, columns named prefix0, prefix1, ...
inline void write_matrix(const std::string& path, const Matrix& m, const std::string& prefix = "w") {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back(prefix + std::to_string(j));
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

}  // namespace clda
