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

#include "urtree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "urtree/error.hpp"
#include "urtree/rng.hpp"

namespace urtree {

void TreeConfig::Validate() const {
  if (!(min_leaf_fraction > 0.0 && min_leaf_fraction <= 0.5)) {
    throw UsageError("min_leaf_fraction must lie in (0, 0.5]");
  }
  if (max_leaves && *max_leaves < 1) throw UsageError("max_leaves must be >= 1");
  if (max_depth && *max_depth < 0) throw UsageError("max_depth must be >= 0");
  if (features_per_split && *features_per_split < 1) {
    throw UsageError("features_per_split must be >= 1");
  }
}

int TreeConfig::MinLeafCount(Eigen::Index n) const {
  Validate();
  const double raw = min_leaf_fraction * static_cast<double>(n);
  if (raw < 1.0) throw Error("stopping rule vacuous");
  // Guard against 0.1 * 50 = 5.000000000000001 style rounding.
  return static_cast<int>(std::ceil(raw - 1e-9));
}

namespace {

void CheckTrainingData(const Matrix& X, const Vector& y) {
  if (X.rows() == 0 || y.size() == 0) throw Error("empty dataset");
  if (X.rows() != y.size()) throw Error("dimension mismatch");
  if (X.cols() < 1) throw Error("need at least one feature");
  if (X.rows() < 2) throw Error("need at least two observations");
  if (!X.allFinite() || !y.allFinite()) throw Error("non-finite entries");
}

double CenteredSumOfSquares(const Vector& y) {
  return (y.array() - y.mean()).square().sum();
}

std::span<const double> RowOf(const Matrix& X, Eigen::Index i,
                              std::vector<double>& buffer) {
  buffer.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) buffer[j] = X(i, j);
  return buffer;
}

// Rows of `rows` sorted by feature j, ties kept in input order.
std::vector<int> SortedBy(const Matrix& X, std::span<const int> rows, int j) {
  std::vector<int> order(rows.begin(), rows.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return X(a, j) < X(b, j); });
  return order;
}

// An admissible threshold together with the number of rows on its left.
struct Candidate {
  double threshold;
  int left_count;
};

std::vector<Candidate> AdmissibleCandidates(const Matrix& X,
                                            const std::vector<int>& sorted,
                                            int j, int min_count) {
  std::vector<Candidate> out;
  const int r = static_cast<int>(sorted.size());
  for (int m = 1; m < r; ++m) {
    const double lo = X(sorted[m - 1], j);
    const double hi = X(sorted[m], j);
    if (lo == hi) continue;
    if (m < min_count || r - m < min_count) continue;
    out.push_back({0.5 * (lo + hi), m});
  }
  return out;
}

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double risk = std::numeric_limits<double>::infinity();
};

// Keeps the first candidate in scan order among risks equal up to `tie_tol`.
void Offer(BestSplit& best, int feature, double threshold, double risk,
           double tie_tol) {
  if (!best.found || risk < best.risk - tie_tol) {
    best = {true, feature, threshold, risk};
  }
}

void PartitionRows(const Matrix& X, const std::vector<int>& rows, int feature,
                   double threshold, std::vector<int>& left,
                   std::vector<int>& right) {
  left.clear();
  right.clear();
  for (int i : rows) (X(i, feature) <= threshold ? left : right).push_back(i);
}

// Features scanned for one region: all of them, or a sorted random subset.
class FeatureScan {
 public:
  FeatureScan(const TreeConfig& config, int p)
      : p_(p),
        take_(config.features_per_split ? std::min(*config.features_per_split, p) : p),
        rng_(config.seed) {}

  std::vector<int> Next() {
    std::vector<int> pool(p_);
    std::iota(pool.begin(), pool.end(), 0);
    if (take_ < p_) {
      for (int c = 0; c < take_; ++c) {
        const auto pick = c + static_cast<int>(rng_.Below(static_cast<std::uint64_t>(p_ - c)));
        std::swap(pool[c], pool[pick]);
      }
      pool.resize(take_);
      std::sort(pool.begin(), pool.end());
    }
    return pool;
  }

 private:
  int p_;
  int take_;
  Rng rng_;
};

struct FrontierEntry {
  int region;
  int depth;
};

// Per-feature membership factors of every row in one region (n x p).
Matrix RegionFactors(const Matrix& X, const SigmaVector& sigma,
                     const Region& region) {
  Matrix F = Matrix::Ones(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const Interval& b = region[j];
    if (b.lo == -kInf && b.hi == kInf) continue;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      F(i, j) = interval_prob_half_open(X(i, j), sigma[j], b.lo, b.hi);
    }
  }
  return F;
}

Vector ProductExcept(const Matrix& F, Eigen::Index skip) {
  Vector out = Vector::Ones(F.rows());
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    if (j != skip) out.array() *= F.col(j).array();
  }
  return out;
}

void FillChildColumn(const Matrix& X, const SigmaVector& sigma, int j,
                     const Vector& other, double lo, double hi, Vector& out) {
  out.resize(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out(i) = other(i) == 0.0
                 ? 0.0
                 : other(i) * interval_prob_half_open(X(i, j), sigma[j], lo, hi);
  }
}

}  // namespace

std::vector<int> members_of(const Matrix& X, const Region& region) {
  std::vector<int> rows;
  std::vector<double> buffer;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (region.Contains(RowOf(X, i, buffer))) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

std::vector<double> candidate_splits(const Matrix& X, std::span<const int> rows,
                                     int feature) {
  if (feature < 0 || feature >= X.cols()) throw Error("feature index out of range");
  std::vector<double> values;
  values.reserve(rows.size());
  for (int i : rows) values.push_back(X(i, feature));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> mids;
  for (std::size_t l = 1; l < values.size(); ++l) {
    mids.push_back(0.5 * (values[l - 1] + values[l]));
  }
  return mids;
}

std::vector<double> candidate_splits(const Matrix& X, const Region& region,
                                     int feature) {
  const std::vector<int> rows = members_of(X, region);
  return candidate_splits(X, rows, feature);
}

SplitEvaluation evaluate_split(const Matrix& X, const Vector& y,
                               const SigmaVector& sigma,
                               const Partition& partition,
                               const MembershipMatrix& P, int k, int feature,
                               double threshold) {
  if (X.rows() != y.size() || X.rows() != P.rows()) {
    throw Error("dimension mismatch");
  }
  if (k < 0 || static_cast<std::size_t>(k) >= partition.size() ||
      P.cols() != static_cast<Eigen::Index>(partition.size())) {
    throw Error("region index out of range");
  }
  const auto [left, right] = split_region(partition[k], feature, threshold);
  const MembershipMatrix next =
      update_membership_for_split(P, k, region_column(X, sigma, left),
                                  region_column(X, sigma, right));
  SplitEvaluation out;
  out.gamma = solve_least_squares(next.matrix(), y);
  out.risk = sse(next.matrix(), out.gamma, y);
  return out;
}

UncertainTree fit_uncertain_tree(const Matrix& X, const Vector& y,
                                 const SigmaVector& sigma,
                                 const TreeConfig& config) {
  CheckTrainingData(X, y);
  if (sigma.size() != static_cast<std::size_t>(X.cols())) {
    throw Error("dimension mismatch");
  }
  const Eigen::Index n = X.rows();
  const int p = static_cast<int>(X.cols());
  const int min_count = config.MinLeafCount(n);

  const double root_risk = CenteredSumOfSquares(y);
  const double floor = 1e-12 * root_risk;
  // The all-ones vector always lies in the column space of P (rows sum to
  // one), so projecting the centered targets gives the same residuals.
  const Vector centered = y.array() - y.mean();

  Partition partition = Partition::Root(p);
  MembershipMatrix P(Matrix::Ones(n, 1));
  std::vector<std::vector<int>> members(1);
  members[0].resize(n);
  std::iota(members[0].begin(), members[0].end(), 0);

  double current_risk = root_risk;
  std::vector<SplitRecord> log;
  std::vector<FrontierEntry> frontier{{0, 0}};
  FeatureScan scan(config, p);

  Vector q_left;
  Vector q_right;
  std::vector<int> left_rows;
  std::vector<int> right_rows;
  while (!frontier.empty()) {
    if (config.max_leaves && static_cast<int>(partition.size()) >= *config.max_leaves) {
      break;
    }
    const FrontierEntry entry = frontier.back();
    frontier.pop_back();
    const int k = entry.region;
    if (config.max_depth && entry.depth >= *config.max_depth) continue;
    const std::vector<int>& rows = members[k];
    if (static_cast<int>(rows.size()) < 2 * min_count) continue;

    // Residual of the current fit and an orthonormal basis of span(P).
    // Splitting column k into (left, right) with left + right = column k
    // spans span(P) + {left}, so the candidate risk is the current risk
    // minus the squared projection of the residual on the new direction.
    const Matrix basis = orthonormal_basis(P.matrix());
    const Vector residual = centered - basis * (basis.transpose() * centered);
    const double base = residual.squaredNorm();
    const Region& region = partition[k];
    const Matrix factors = RegionFactors(X, sigma, region);

    BestSplit best;
    for (int j : scan.Next()) {
      const std::vector<int> sorted = SortedBy(X, rows, j);
      const std::vector<Candidate> candidates =
          AdmissibleCandidates(X, sorted, j, min_count);
      if (candidates.empty()) continue;
      const Vector other = ProductExcept(factors, j);
      for (const Candidate& c : candidates) {
        FillChildColumn(X, sigma, j, other, region[j].lo, c.threshold, q_left);
        Vector q = q_left - basis * (basis.transpose() * q_left);
        q -= basis * (basis.transpose() * q);
        const double qq = q.squaredNorm();
        double risk = base;
        if (qq > 1e-18 * q_left.squaredNorm()) {
          const double qe = q.dot(residual);
          risk = std::max(0.0, base - qe * qe / qq);
        }
        Offer(best, j, c.threshold, risk, floor);
      }
    }
    if (!best.found || base - best.risk <= floor) continue;

    const Vector other = ProductExcept(factors, best.feature);
    FillChildColumn(X, sigma, best.feature, other, region[best.feature].lo,
                    best.threshold, q_left);
    FillChildColumn(X, sigma, best.feature, other, best.threshold,
                    region[best.feature].hi, q_right);
    MembershipMatrix next = update_membership_for_split(P, k, q_left, q_right);
    const Vector gamma = solve_least_squares(next.matrix(), y);
    const double risk = sse(next.matrix(), gamma, y);
    if (risk > current_risk) continue;

    partition = partition.Split(k, best.feature, best.threshold);
    P = std::move(next);
    PartitionRows(X, rows, best.feature, best.threshold, left_rows, right_rows);
    members[k] = left_rows;
    members.push_back(right_rows);
    current_risk = risk;
    const int right_index = static_cast<int>(partition.size()) - 1;
    log.push_back({k, best.feature, best.threshold, risk});
    frontier.push_back({k, entry.depth + 1});
    frontier.push_back({right_index, entry.depth + 1});
  }

  const MembershipMatrix final_P = build_membership(X, sigma, partition);
  Vector gamma = solve_least_squares(final_P.matrix(), y);
  return UncertainTree(std::move(partition), std::move(gamma), sigma,
                       std::move(log), static_cast<int>(n), config);
}

StandardTree fit_standard_tree(const Matrix& X, const Vector& y,
                               const TreeConfig& config) {
  CheckTrainingData(X, y);
  const Eigen::Index n = X.rows();
  const int p = static_cast<int>(X.cols());
  const int min_count = config.MinLeafCount(n);

  const double root_risk = CenteredSumOfSquares(y);
  const double floor = 1e-12 * root_risk;

  auto group_sse = [&](const std::vector<int>& rows) {
    double mean = 0.0;
    for (int i : rows) mean += y(i);
    mean /= static_cast<double>(rows.size());
    double s = 0.0;
    for (int i : rows) s += (y(i) - mean) * (y(i) - mean);
    return s;
  };

  Partition partition = Partition::Root(p);
  std::vector<std::vector<int>> members(1);
  members[0].resize(n);
  std::iota(members[0].begin(), members[0].end(), 0);
  std::vector<double> leaf_sse{root_risk};

  double current_risk = root_risk;
  std::vector<SplitRecord> log;
  std::vector<FrontierEntry> frontier{{0, 0}};
  FeatureScan scan(config, p);
  std::vector<int> left_rows;
  std::vector<int> right_rows;
  while (!frontier.empty()) {
    if (config.max_leaves && static_cast<int>(partition.size()) >= *config.max_leaves) {
      break;
    }
    const FrontierEntry entry = frontier.back();
    frontier.pop_back();
    const int k = entry.region;
    if (config.max_depth && entry.depth >= *config.max_depth) continue;
    const std::vector<int>& rows = members[k];
    const int r = static_cast<int>(rows.size());
    if (r < 2 * min_count) continue;

    double mean = 0.0;
    for (int i : rows) mean += y(i);
    mean /= r;
    const double rest = current_risk - leaf_sse[k];

    BestSplit best;
    for (int j : scan.Next()) {
      const std::vector<int> sorted = SortedBy(X, rows, j);
      const std::vector<Candidate> candidates =
          AdmissibleCandidates(X, sorted, j, min_count);
      if (candidates.empty()) continue;
      // Prefix sums of the region-centered targets.
      std::vector<double> sum(r + 1, 0.0);
      std::vector<double> sq(r + 1, 0.0);
      for (int m = 0; m < r; ++m) {
        const double v = y(sorted[m]) - mean;
        sum[m + 1] = sum[m] + v;
        sq[m + 1] = sq[m] + v * v;
      }
      for (const Candidate& c : candidates) {
        const int m = c.left_count;
        const double sum_r = sum[r] - sum[m];
        const double sse_l = sq[m] - sum[m] * sum[m] / m;
        const double sse_r = (sq[r] - sq[m]) - sum_r * sum_r / (r - m);
        Offer(best, j, c.threshold, rest + sse_l + sse_r, floor);
      }
    }
    if (!best.found || current_risk - best.risk <= floor) continue;

    PartitionRows(X, rows, best.feature, best.threshold, left_rows, right_rows);
    const double sse_l = group_sse(left_rows);
    const double sse_r = group_sse(right_rows);
    partition = partition.Split(k, best.feature, best.threshold);
    members[k] = left_rows;
    members.push_back(right_rows);
    leaf_sse[k] = sse_l;
    leaf_sse.push_back(sse_r);
    current_risk = std::min(current_risk, rest + sse_l + sse_r);
    const int right_index = static_cast<int>(partition.size()) - 1;
    log.push_back({k, best.feature, best.threshold, current_risk});
    frontier.push_back({k, entry.depth + 1});
    frontier.push_back({right_index, entry.depth + 1});
  }

  Vector leaf_values(static_cast<Eigen::Index>(partition.size()));
  for (std::size_t k = 0; k < partition.size(); ++k) {
    double s = 0.0;
    for (int i : members[k]) s += y(i);
    leaf_values(static_cast<Eigen::Index>(k)) = s / static_cast<double>(members[k].size());
  }
  return StandardTree(std::move(partition), std::move(leaf_values),
                      std::move(log), static_cast<int>(n), config);
}

UncertainTree uncertainize(const StandardTree& tree, const Matrix& X,
                           const Vector& y, const SigmaVector& sigma) {
  CheckTrainingData(X, y);
  if (static_cast<std::size_t>(X.cols()) != tree.num_features() ||
      sigma.size() != tree.num_features()) {
    throw Error("dimension mismatch");
  }
  const MembershipMatrix P = build_membership(X, sigma, tree.partition());
  Vector gamma = solve_least_squares(P.matrix(), y);
  return UncertainTree(tree.partition(), std::move(gamma), sigma,
                       tree.split_log(), static_cast<int>(X.rows()),
                       tree.config());
}

UncertainTree::UncertainTree(Partition partition, Vector gamma,
                             SigmaVector sigma,
                             std::vector<SplitRecord> split_log, int n_train,
                             TreeConfig config)
    : partition_(std::move(partition)),
      gamma_(std::move(gamma)),
      sigma_(std::move(sigma)),
      split_log_(std::move(split_log)),
      n_train_(n_train),
      config_(config) {
  if (static_cast<std::size_t>(gamma_.size()) != partition_.size()) {
    throw Error("gamma length must equal the number of regions");
  }
  if (sigma_.size() != partition_.dim()) throw Error("dimension mismatch");
  if (!gamma_.allFinite()) throw Error("non-finite entries");
}

double UncertainTree::Predict(std::span<const double> x) const {
  if (x.size() != partition_.dim()) throw Error("dimension mismatch");
  double out = 0.0;
  for (std::size_t k = 0; k < partition_.size(); ++k) {
    out += gamma_(static_cast<Eigen::Index>(k)) *
           region_membership(x, sigma_, partition_[k]);
  }
  return out;
}

Vector UncertainTree::Predict(const Matrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != partition_.dim()) {
    throw Error("dimension mismatch");
  }
  return build_membership(X, sigma_, partition_).matrix() * gamma_;
}

double predict_uncertain(const UncertainTree& tree, std::span<const double> x) {
  return tree.Predict(x);
}

StandardTree::StandardTree(Partition partition, Vector leaf_values,
                           std::vector<SplitRecord> split_log, int n_train,
                           TreeConfig config)
    : partition_(std::move(partition)),
      leaf_values_(std::move(leaf_values)),
      split_log_(std::move(split_log)),
      n_train_(n_train),
      config_(config) {
  if (static_cast<std::size_t>(leaf_values_.size()) != partition_.size()) {
    throw Error("leaf value count must equal the number of regions");
  }
}

double StandardTree::Predict(std::span<const double> x) const {
  if (x.size() != partition_.dim()) throw Error("dimension mismatch");
  for (double v : x) {
    if (std::isnan(v)) throw Error("invalid argument");
  }
  const int k = partition_.Locate(x);
  if (k < 0) throw Error("point outside every region");
  return leaf_values_(k);
}

Vector StandardTree::Predict(const Matrix& X) const {
  Vector out(X.rows());
  std::vector<double> buffer;
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = Predict(RowOf(X, i, buffer));
  return out;
}

}  // namespace urtree
