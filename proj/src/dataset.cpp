/*
 * Copyright 2026 The urtree Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "urtree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>

#include "urtree/error.hpp"

namespace urtree {

Dataset Dataset::Rows(std::span<const int> rows) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.target_name = target_name;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= X.rows()) throw Error("row index out of range");
    out.X.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
    out.y(static_cast<Eigen::Index>(r)) = y(rows[r]);
  }
  return out;
}

Dataset Dataset::Columns(std::span<const int> features) const {
  Dataset out;
  out.name = name;
  out.target_name = target_name;
  out.y = y;
  out.X.resize(X.rows(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t c = 0; c < features.size(); ++c) {
    if (features[c] < 0 || features[c] >= X.cols()) {
      throw Error("feature index out of range");
    }
    out.X.col(static_cast<Eigen::Index>(c)) = X.col(features[c]);
    if (static_cast<std::size_t>(features[c]) < feature_names.size()) {
      out.feature_names.push_back(feature_names[features[c]]);
    }
  }
  return out;
}

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> SplitLine(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      cell.push_back(c);
    } else if (c == delim && !quoted) {
      cells.push_back(Trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(Trim(cell));
  return cells;
}

std::optional<double> ParseNumber(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table ReadTable(std::istream& in) {
  Table t;
  std::string line;
  bool have_header = false;
  char delim = ',';
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    if (!have_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      const auto tabs = std::count(line.begin(), line.end(), '\t');
      const auto commas = std::count(line.begin(), line.end(), ',');
      delim = tabs > commas ? '\t' : ',';
      t.header = SplitLine(line, delim);
      have_header = true;
      continue;
    }
    auto cells = SplitLine(line, delim);
    cells.resize(t.header.size());
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw Error("missing header row");
  return t;
}

// Numeric when a strict majority of non-empty cells parse.
bool IsNumericColumn(const Table& t, std::size_t c) {
  std::size_t parsed = 0;
  std::size_t nonempty = 0;
  for (const auto& row : t.rows) {
    if (row[c].empty()) continue;
    ++nonempty;
    if (ParseNumber(row[c])) ++parsed;
  }
  return nonempty > 0 && 2 * parsed > nonempty;
}

}  // namespace

CsvLoad load_csv(std::istream& in, const TargetColumn& target,
                 bool drop_non_numeric, std::string name) {
  const Table t = ReadTable(in);
  std::size_t target_index = 0;
  if (const auto* label = std::get_if<std::string>(&target)) {
    const auto it = std::find(t.header.begin(), t.header.end(), *label);
    if (it == t.header.end()) throw Error("missing target column: " + *label);
    target_index = static_cast<std::size_t>(it - t.header.begin());
  } else {
    const int idx = std::get<int>(target);
    if (idx < 0 || static_cast<std::size_t>(idx) >= t.header.size()) {
      throw Error("missing target column: index " + std::to_string(idx));
    }
    target_index = static_cast<std::size_t>(idx);
  }
  if (!IsNumericColumn(t, target_index)) {
    throw Error("target column is not numeric: " + t.header[target_index]);
  }

  CsvLoad out;
  std::vector<std::size_t> features;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == target_index) continue;
    if (IsNumericColumn(t, c)) {
      features.push_back(c);
    } else if (drop_non_numeric) {
      out.dropped_columns.push_back(t.header[c]);
    } else {
      throw Error("non-numeric column: " + t.header[c]);
    }
  }
  if (features.empty()) throw Error("zero numeric features");

  std::vector<std::vector<double>> kept;
  for (const auto& row : t.rows) {
    std::vector<double> values;
    values.reserve(features.size() + 1);
    bool ok = true;
    for (std::size_t c : features) {
      const auto v = ParseNumber(row[c]);
      if (!v) {
        ok = false;
        break;
      }
      values.push_back(*v);
    }
    const auto yv = ok ? ParseNumber(row[target_index]) : std::nullopt;
    if (!yv) {
      ++out.rejected_rows;
      continue;
    }
    values.push_back(*yv);
    kept.push_back(std::move(values));
  }
  if (kept.empty()) throw Error("zero usable rows");

  Dataset& d = out.dataset;
  d.name = std::move(name);
  d.target_name = t.header[target_index];
  for (std::size_t c : features) d.feature_names.push_back(t.header[c]);
  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto p = static_cast<Eigen::Index>(features.size());
  d.X.resize(n, p);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) d.X(i, j) = kept[i][j];
    d.y(i) = kept[i][p];
  }
  return out;
}

CsvLoad load_csv(const std::string& path, const TargetColumn& target,
                 bool drop_non_numeric) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_csv(in, target, drop_non_numeric,
                  std::filesystem::path(path).stem().string());
}

Dataset load_features_csv(std::istream& in,
                          const std::vector<std::string>& columns) {
  const Table t = ReadTable(in);
  std::vector<std::size_t> picked;
  if (columns.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (IsNumericColumn(t, c)) picked.push_back(c);
    }
  } else {
    for (const auto& name : columns) {
      const auto it = std::find(t.header.begin(), t.header.end(), name);
      if (it == t.header.end()) throw Error("missing feature column: " + name);
      picked.push_back(static_cast<std::size_t>(it - t.header.begin()));
    }
  }
  if (picked.empty()) throw Error("zero numeric features");
  Dataset d;
  d.name = "input";
  for (std::size_t c : picked) d.feature_names.push_back(t.header[c]);
  d.X.resize(static_cast<Eigen::Index>(t.rows.size()),
             static_cast<Eigen::Index>(picked.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t c = 0; c < picked.size(); ++c) {
      const auto v = ParseNumber(t.rows[i][picked[c]]);
      if (!v) {
        throw Error("unparseable value in row " + std::to_string(i + 1) +
                    ", column " + t.header[picked[c]]);
      }
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = *v;
    }
  }
  d.y = Vector::Zero(d.X.rows());
  return d;
}

}  // namespace urtree
