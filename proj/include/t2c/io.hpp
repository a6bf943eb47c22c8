#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "t2c/core.hpp"
#include "t2c/eval.hpp"

namespace t2c {

// Locale-independent shortest round-trip formatting; all CSV output goes
// through here so files are byte-stable across runs and machines.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

inline bool parse_double(const std::string& s, double& out) {
  const std::string t = s;
  const char* b = t.c_str();
  char* end = nullptr;
  out = std::strtod(b, &end);
  if (end == b) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

inline bool parse_int(const std::string& s, long& out) {
  const char* b = s.c_str();
  char* end = nullptr;
  out = std::strtol(b, &end, 10);
  if (end == b) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

inline bool is_index(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace detail

struct IngestResult {
  TimeSeries series;
  std::optional<std::vector<int>> labels;
  bool had_header = false;
};

// Reads one value column (by 0-based index or header name) and an optional
// integer label column. The first row is a header when any of its cells is
// non-numeric. NaN/Inf and non-numeric cells fail with row context. Path "-"
// reads stdin.
inline IngestResult ingest_csv(const std::string& path, const std::string& value_col,
                               const std::string& label_col = "") {
  std::ifstream file;
  std::istream* in = nullptr;
  if (path == "-") {
    in = &std::cin;
  } else {
    file.open(path);
    if (!file) throw std::invalid_argument("ingest_csv: cannot open '" + path + "'");
    in = &file;
  }

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(*in, line)) {
    if (line.empty()) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw std::invalid_argument("ingest_csv: '" + path + "' is empty");

  bool header = false;
  for (const auto& cell : rows[0]) {
    double tmp;
    if (!detail::parse_double(cell, tmp)) {
      header = true;
      break;
    }
  }

  auto resolve = [&](const std::string& col, const char* what) -> std::size_t {
    if (detail::is_index(col)) {
      const std::size_t idx = std::stoul(col);
      if (idx >= rows[0].size()) {
        throw std::invalid_argument(std::string("ingest_csv: ") + what + " column index " +
                                    col + " out of range (" +
                                    std::to_string(rows[0].size()) + " columns)");
      }
      return idx;
    }
    if (!header) {
      throw std::invalid_argument(std::string("ingest_csv: ") + what + " column '" + col +
                                  "' requested by name but the file has no header row");
    }
    for (std::size_t j = 0; j < rows[0].size(); ++j) {
      if (rows[0][j] == col) return j;
    }
    throw std::invalid_argument(std::string("ingest_csv: no '") + col + "' " + what +
                                " column in header");
  };

  const std::size_t vcol = resolve(value_col, "value");
  std::optional<std::size_t> lcol;
  if (!label_col.empty()) lcol = resolve(label_col, "label");

  IngestResult out;
  out.had_header = header;
  std::vector<double> values;
  std::vector<int> labels;
  for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (vcol >= cells.size() || (lcol && *lcol >= cells.size())) {
      throw std::invalid_argument("ingest_csv: row " + std::to_string(r) +
                                  " has too few columns");
    }
    double v;
    if (!detail::parse_double(cells[vcol], v)) {
      throw std::invalid_argument("ingest_csv: non-numeric value '" + cells[vcol] +
                                  "' at row " + std::to_string(r) + ", column " +
                                  std::to_string(vcol));
    }
    if (!std::isfinite(v)) {
      throw std::invalid_argument("ingest_csv: non-finite value at row " +
                                  std::to_string(r) + ", column " +
                                  std::to_string(vcol));
    }
    values.push_back(v);
    if (lcol) {
      long l;
      if (!detail::parse_int(cells[*lcol], l)) {
        throw std::invalid_argument("ingest_csv: non-integer label '" + cells[*lcol] +
                                    "' at row " + std::to_string(r) + ", column " +
                                    std::to_string(*lcol));
      }
      labels.push_back(static_cast<int>(l));
    }
  }
  if (values.empty()) {
    throw std::invalid_argument("ingest_csv: '" + path + "' has no data rows");
  }
  out.series = TimeSeries(std::move(values), path);
  if (lcol) out.labels = std::move(labels);
  return out;
}

class CsvWriter {
public:
  explicit CsvWriter(const std::string& path) {
    if (path == "-") {
      out_ = &std::cout;
    } else {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open '" + path + "' for writing");
      out_ = &file_;
    }
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) *out_ << ',';
      *out_ << cells[i];
    }
    *out_ << '\n';
  }

private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

}  // namespace t2c
