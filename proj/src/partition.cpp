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

#include "urtree/partition.hpp"

#include <algorithm>
#include <cmath>

#include "urtree/error.hpp"

namespace urtree {

Region::Region(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  for (const Interval& b : bounds_) {
    if (std::isnan(b.lo) || std::isnan(b.hi)) throw Error("invalid argument");
    if (b.lo > b.hi) throw Error("empty interval");
  }
}

bool Region::Contains(std::span<const double> x) const {
  if (x.size() != bounds_.size()) throw Error("dimension mismatch");
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Interval& b = bounds_[j];
    const bool above = b.lo == -kInf || b.lo < x[j];
    if (!above || x[j] > b.hi) return false;
  }
  return true;
}

double region_membership(std::span<const double> x, const SigmaVector& sigma,
                         const Region& region) {
  if (x.size() != sigma.size() || x.size() != region.dim()) {
    throw Error("dimension mismatch");
  }
  double prob = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    prob *= interval_prob_half_open(x[j], sigma[j], region[j].lo, region[j].hi);
  }
  return prob;
}

std::pair<Region, Region> split_region(const Region& region, int feature,
                                       double threshold) {
  if (feature < 0 || static_cast<std::size_t>(feature) >= region.dim()) {
    throw Error("feature index out of range");
  }
  const Interval& b = region[feature];
  if (!(b.lo < threshold && threshold < b.hi)) {
    throw Error("split outside region");
  }
  std::vector<Interval> left = region.bounds();
  std::vector<Interval> right = region.bounds();
  left[feature].hi = threshold;
  right[feature].lo = threshold;
  return {Region(std::move(left)), Region(std::move(right))};
}

Partition::Partition(std::vector<Region> regions) : regions_(std::move(regions)) {
  if (regions_.empty()) throw Error("partition needs at least one region");
  const std::size_t p = regions_.front().dim();
  for (const Region& r : regions_) {
    if (r.dim() != p) throw Error("dimension mismatch");
  }
}

Partition Partition::Split(int k, int feature, double threshold) const {
  if (k < 0 || static_cast<std::size_t>(k) >= regions_.size()) {
    throw Error("region index out of range");
  }
  auto [left, right] = split_region(regions_[k], feature, threshold);
  std::vector<Region> next = regions_;
  next[k] = std::move(left);
  next.push_back(std::move(right));
  return Partition(std::move(next));
}

int Partition::Locate(std::span<const double> x) const {
  for (std::size_t k = 0; k < regions_.size(); ++k) {
    if (regions_[k].Contains(x)) return static_cast<int>(k);
  }
  return -1;
}

MembershipMatrix::MembershipMatrix(Matrix P) : P_(std::move(P)) {
  if (!P_.allFinite() || (P_.array() < 0.0).any() || (P_.array() > 1.0).any()) {
    throw Error("membership entries must lie in [0, 1]");
  }
}

double MembershipMatrix::MaxRowSumDeviation() const {
  if (P_.rows() == 0) return 0.0;
  return (P_.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

Vector region_column(const Matrix& X, const SigmaVector& sigma,
                     const Region& region) {
  const Eigen::Index p = X.cols();
  if (static_cast<std::size_t>(p) != sigma.size() ||
      static_cast<std::size_t>(p) != region.dim()) {
    throw Error("dimension mismatch");
  }
  Vector column = Vector::Ones(X.rows());
  for (Eigen::Index j = 0; j < p; ++j) {
    const Interval& b = region[j];
    if (b.lo == -kInf && b.hi == kInf) continue;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      column(i) *= interval_prob_half_open(X(i, j), sigma[j], b.lo, b.hi);
    }
  }
  return column;
}

MembershipMatrix build_membership(const Matrix& X, const SigmaVector& sigma,
                                  const Partition& partition) {
  if (static_cast<std::size_t>(X.cols()) != partition.dim()) {
    throw Error("dimension mismatch");
  }
  Matrix P(X.rows(), static_cast<Eigen::Index>(partition.size()));
  for (std::size_t k = 0; k < partition.size(); ++k) {
    P.col(static_cast<Eigen::Index>(k)) = region_column(X, sigma, partition[k]);
  }
  return MembershipMatrix(std::move(P));
}

MembershipMatrix update_membership_for_split(const MembershipMatrix& P, int k,
                                             const Vector& left,
                                             const Vector& right) {
  const Matrix& old = P.matrix();
  if (k < 0 || k >= old.cols()) throw Error("region index out of range");
  if (left.size() != old.rows() || right.size() != old.rows()) {
    throw Error("dimension mismatch");
  }
  if (((left + right) - old.col(k)).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error("split mass mismatch");
  }
  Matrix next(old.rows(), old.cols() + 1);
  next.leftCols(old.cols()) = old;
  next.col(k) = left;
  next.col(old.cols()) = right;
  return MembershipMatrix(std::move(next));
}

std::vector<double> invertibility_bound(const Partition& partition, int p) {
  if (p < 1 || static_cast<std::size_t>(p) != partition.dim()) {
    throw Error("dimension mismatch");
  }
  const double level = 0.5 * (1.0 + std::pow(0.5, 1.0 / p));
  const double q = std_normal_quantile(level);
  std::vector<double> bound(p, kInf);
  for (int j = 0; j < p; ++j) {
    double min_width = kInf;
    for (const Region& r : partition.regions()) {
      min_width = std::min(min_width, r[j].width());
    }
    if (std::isfinite(min_width)) bound[j] = min_width / (2.0 * q);
  }
  return bound;
}

bool check_theorem(const SigmaVector& sigma, const Partition& partition) {
  const int p = static_cast<int>(partition.dim());
  if (sigma.size() != partition.dim()) throw Error("dimension mismatch");
  const std::vector<double> bound = invertibility_bound(partition, p);
  for (int j = 0; j < p; ++j) {
    if (!(sigma[j] < bound[j])) return false;
  }
  return true;
}

}  // namespace urtree
