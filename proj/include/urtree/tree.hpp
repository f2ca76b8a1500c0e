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

#ifndef URTREE_TREE_HPP_
#define URTREE_TREE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "urtree/linalg.hpp"
#include "urtree/partition.hpp"
#include "urtree/prob.hpp"

namespace urtree {

// Stopping rules shared by the standard and the uncertain tree. Regions are
// expanded depth-first (last split region first).
struct TreeConfig {
  // Each child must keep at least ceil(min_leaf_fraction * n) training points.
  double min_leaf_fraction = 0.1;
  std::optional<int> max_leaves;
  std::optional<int> max_depth;
  // When set, each expanded region only scans this many features, drawn
  // without replacement from a stream seeded by `seed`.
  std::optional<int> features_per_split;
  std::uint64_t seed = 0;

  void Validate() const;
  // ceil(min_leaf_fraction * n), throwing "stopping rule vacuous" when the
  // product is below one.
  int MinLeafCount(Eigen::Index n) const;

  friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

// One applied split: region `region` was cut on `feature` at `threshold`;
// `risk` is the training sum of squared errors right after the split.
struct SplitRecord {
  int region = 0;
  int feature = 0;
  double threshold = 0.0;
  double risk = 0.0;

  friend bool operator==(const SplitRecord&, const SplitRecord&) = default;
};

// Tree whose regions hold every observation with a Gaussian probability.
// Predicts sum_k gamma_k P(U in R_k | X = x).
class UncertainTree {
 public:
  UncertainTree(Partition partition, Vector gamma, SigmaVector sigma,
                std::vector<SplitRecord> split_log, int n_train,
                TreeConfig config);

  double Predict(std::span<const double> x) const;
  Vector Predict(const Matrix& X) const;

  const Partition& partition() const { return partition_; }
  const Vector& gamma() const { return gamma_; }
  const SigmaVector& sigma() const { return sigma_; }
  const std::vector<SplitRecord>& split_log() const { return split_log_; }
  int n_train() const { return n_train_; }
  const TreeConfig& config() const { return config_; }
  std::size_t num_leaves() const { return partition_.size(); }
  std::size_t num_features() const { return partition_.dim(); }

 private:
  Partition partition_;
  Vector gamma_;
  SigmaVector sigma_;
  std::vector<SplitRecord> split_log_;
  int n_train_;
  TreeConfig config_;
};

// Classical least-squares regression tree: hard regions, leaf value = mean
// of the training targets falling in the leaf.
class StandardTree {
 public:
  StandardTree(Partition partition, Vector leaf_values,
               std::vector<SplitRecord> split_log, int n_train,
               TreeConfig config);

  double Predict(std::span<const double> x) const;
  Vector Predict(const Matrix& X) const;

  const Partition& partition() const { return partition_; }
  const Vector& leaf_values() const { return leaf_values_; }
  const std::vector<SplitRecord>& split_log() const { return split_log_; }
  int n_train() const { return n_train_; }
  const TreeConfig& config() const { return config_; }
  std::size_t num_leaves() const { return partition_.size(); }
  std::size_t num_features() const { return partition_.dim(); }

 private:
  Partition partition_;
  Vector leaf_values_;
  std::vector<SplitRecord> split_log_;
  int n_train_;
  TreeConfig config_;
};

// Indices of the rows of X contained in `region` (point estimates).
std::vector<int> members_of(const Matrix& X, const Region& region);

// Midpoints between consecutive distinct values of feature j over `rows`.
std::vector<double> candidate_splits(const Matrix& X, std::span<const int> rows,
                                     int feature);
std::vector<double> candidate_splits(const Matrix& X, const Region& region,
                                     int feature);

struct SplitEvaluation {
  double risk = 0.0;
  Vector gamma;
};

// Risk over all n observations of splitting region k on (feature, threshold):
// builds the (K+1)-column membership matrix and solves for gamma from
// scratch. Nothing passed in is modified.
SplitEvaluation evaluate_split(const Matrix& X, const Vector& y,
                               const SigmaVector& sigma,
                               const Partition& partition,
                               const MembershipMatrix& P, int k, int feature,
                               double threshold);

UncertainTree fit_uncertain_tree(const Matrix& X, const Vector& y,
                                 const SigmaVector& sigma,
                                 const TreeConfig& config = {});

double predict_uncertain(const UncertainTree& tree, std::span<const double> x);

StandardTree fit_standard_tree(const Matrix& X, const Vector& y,
                               const TreeConfig& config = {});

// Keeps the partition of a standard tree and refits the weights once with
// the soft membership matrix of (X, sigma).
UncertainTree uncertainize(const StandardTree& tree, const Matrix& X,
                           const Vector& y, const SigmaVector& sigma);

}  // namespace urtree

#endif  // URTREE_TREE_HPP_
