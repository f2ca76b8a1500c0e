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

#ifndef URTREE_BENCH_HPP_
#define URTREE_BENCH_HPP_

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urtree/dataset.hpp"
#include "urtree/forest.hpp"
#include "urtree/linalg.hpp"
#include "urtree/prob.hpp"
#include "urtree/tree.hpp"

namespace urtree {

// Per-feature sample standard deviation (denominator n - 1).
std::vector<double> empirical_std(const Matrix& X);

struct SigmaPolicy {
  enum class Kind { kEmpiricalStd, kHalfEmpiricalStd, kFixed };
  Kind kind = Kind::kEmpiricalStd;
  std::vector<double> fixed;

  static SigmaPolicy EmpiricalStd() { return {Kind::kEmpiricalStd, {}}; }
  static SigmaPolicy HalfEmpiricalStd() { return {Kind::kHalfEmpiricalStd, {}}; }
  static SigmaPolicy Fixed(std::vector<double> v) { return {Kind::kFixed, std::move(v)}; }

  std::string Name() const;
  friend bool operator==(const SigmaPolicy&, const SigmaPolicy&) = default;
};

SigmaVector sigma_from_policy(const SigmaPolicy& policy, const Matrix& X);

// Rademacher x Uniform[lo_frac * s_j, hi_frac * s_j] perturbation, s_j the
// sample standard deviation of feature j.
struct NoiseSpec {
  double lo_frac = 0.1;
  double hi_frac = 0.25;
  std::uint64_t seed = 0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// Returns a noised copy. Each column draws from a stream keyed by
// (seed, column name), so noising commutes with reordering columns.
Dataset inject_noise(const Dataset& data, const NoiseSpec& spec);

// k disjoint folds covering {0, ..., n - 1} after a seeded shuffle; sizes
// differ by at most one and each fold is sorted.
std::vector<std::vector<int>> kfold_indices(int n, int k, std::uint64_t seed);

double rmse(const Vector& prediction, const Vector& truth);

struct MethodSpec {
  enum class Kind {
    kStandardTree,
    kStandardForest,
    kHybridTree,
    kUncertainTree,
    kUncertainForest
  };
  Kind kind = Kind::kStandardTree;
  int tau = 0;  // forests only

  // standard_tree, standard_rf(100), hybrid_tree, uncertain_tree,
  // uncertain_rf(15). A forest without "(tau)" gets 100 or 15 trees.
  static MethodSpec Parse(const std::string& text);
  std::string Name() const;
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

struct BenchConfig {
  std::vector<MethodSpec> methods;
  SigmaPolicy sigma_policy;
  std::optional<NoiseSpec> noise;
  int folds = 5;
  std::uint64_t cv_seed = 0;
  TreeConfig tree_config;
  std::optional<int> mtry;
  bool bootstrap = true;
  FeatureSampling feature_sampling = FeatureSampling::kPerSplit;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

struct MethodResult {
  std::string method;
  std::vector<double> fold_rmse;
  double mean = 0.0;
  // Standard deviation of the k fold scores (denominator k).
  double std = 0.0;
};

struct CVReport {
  std::string dataset;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  BenchConfig config;
  std::vector<std::vector<int>> folds;
  std::vector<MethodResult> results;

  const MethodResult& Result(const std::string& method) const;
};

// Records which dataset rows each phase of each fold touched.
class RowAccessAudit {
 public:
  enum class Phase { kFit, kScore };
  void Record(Phase phase, int fold, std::span<const int> rows);
  // Rows of `fold` recorded under `phase`, sorted and deduplicated.
  std::vector<int> Rows(Phase phase, int fold) const;

 private:
  struct Entry {
    Phase phase;
    int fold;
    std::vector<int> rows;
  };
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
};

// k-fold cross-validation of each method. Optional noise is applied once to
// the full table before folding; sigma is computed from each training fold.
CVReport run_benchmark(const Dataset& data, const BenchConfig& config,
                       int threads = 1, RowAccessAudit* audit = nullptr);

// Aligned method x "mean (std)" table.
std::string format_report_table(const CVReport& report);

}  // namespace urtree

#endif  // URTREE_BENCH_HPP_
