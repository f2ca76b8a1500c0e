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

#ifndef URTREE_DATASET_HPP_
#define URTREE_DATASET_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "urtree/linalg.hpp"

namespace urtree {

// Numeric regression table: n observations of p features plus a target.
struct Dataset {
  std::string name;
  Matrix X;
  Vector y;
  std::vector<std::string> feature_names;
  std::string target_name;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  // Copy of the given rows, in the given order.
  Dataset Rows(std::span<const int> rows) const;
  // Copy restricted to the given feature columns.
  Dataset Columns(std::span<const int> features) const;
};

// Target column by header name or by zero-based column index.
using TargetColumn = std::variant<std::string, int>;

struct CsvLoad {
  Dataset dataset;
  // Rows dropped because a kept numeric cell was empty or unparseable.
  std::size_t rejected_rows = 0;
  // Text columns removed when drop_non_numeric is set.
  std::vector<std::string> dropped_columns;
};

// Reads a comma or tab separated table with a header row. A column is
// numeric when most of its non-empty cells parse as numbers; the others are
// text columns, which are dropped if drop_non_numeric is set and rejected
// otherwise.
CsvLoad load_csv(const std::string& path, const TargetColumn& target,
                 bool drop_non_numeric = true);
CsvLoad load_csv(std::istream& in, const TargetColumn& target,
                 bool drop_non_numeric = true, std::string name = "stdin");

// Same format, without a target: every numeric column becomes a feature.
// When `columns` is non-empty, exactly those columns are taken, in order.
Dataset load_features_csv(std::istream& in,
                          const std::vector<std::string>& columns = {});

}  // namespace urtree

#endif  // URTREE_DATASET_HPP_
