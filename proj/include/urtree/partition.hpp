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

#ifndef URTREE_PARTITION_HPP_
#define URTREE_PARTITION_HPP_

#include <span>
#include <utility>
#include <vector>

#include "urtree/linalg.hpp"
#include "urtree/prob.hpp"

namespace urtree {

// Closed interval with +/-infinity allowed at either end.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned hyper-rectangle, one interval per feature.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Interval> bounds);

  // All of R^p.
  static Region Whole(std::size_t p) {
    return Region(std::vector<Interval>(p, Interval{}));
  }

  std::size_t dim() const { return bounds_.size(); }
  const Interval& operator[](std::size_t j) const { return bounds_[j]; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  // Point-estimate containment with the half-open (lo, hi] convention used by
  // partitions: a point on a split threshold belongs to the left child.
  bool Contains(std::span<const double> x) const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<Interval> bounds_;
};

// P(U in R | X = x) as a product of per-feature Gaussian masses. Features
// with sigma 0 use the (lo, hi] indicator.
double region_membership(std::span<const double> x, const SigmaVector& sigma,
                         const Region& region);

// Splits R on feature j at s: the left child keeps [lo, s], the right child
// [s, hi]. Requires lo < s < hi.
std::pair<Region, Region> split_region(const Region& region, int feature,
                                       double threshold);

// Ordered list of regions; the order is the column order of the membership
// matrix. A partition grown from Root() by Split() always tiles R^p.
class Partition {
 public:
  static Partition Root(std::size_t p) { return Partition({Region::Whole(p)}); }

  // Wraps an arbitrary list of regions. No tiling check is made, which lets
  // callers work with bounded partitions of a box.
  static Partition FromRegions(std::vector<Region> regions) {
    return Partition(std::move(regions));
  }

  std::size_t size() const { return regions_.size(); }
  std::size_t dim() const { return regions_.front().dim(); }
  const Region& operator[](std::size_t k) const { return regions_[k]; }
  const std::vector<Region>& regions() const { return regions_; }

  // Replaces region k by its left child and appends the right child.
  Partition Split(int k, int feature, double threshold) const;

  // Index of the region containing x under the (lo, hi] convention, or -1.
  int Locate(std::span<const double> x) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  explicit Partition(std::vector<Region> regions);
  std::vector<Region> regions_;
};

// n x K matrix of membership probabilities, columns aligned with a partition.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;
  explicit MembershipMatrix(Matrix P);

  const Matrix& matrix() const { return P_; }
  Eigen::Index rows() const { return P_.rows(); }
  Eigen::Index cols() const { return P_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index k) const { return P_(i, k); }

  // Largest |row sum - 1|.
  double MaxRowSumDeviation() const;

 private:
  Matrix P_;
};

// One row per observation of X (n x p), one column per region.
MembershipMatrix build_membership(const Matrix& X, const SigmaVector& sigma,
                                  const Partition& partition);

// Membership of every row of X in a single region.
Vector region_column(const Matrix& X, const SigmaVector& sigma,
                     const Region& region);

// Column k is replaced by left; right is appended as a new last column.
// left + right must equal the old column k within 1e-12.
MembershipMatrix update_membership_for_split(const MembershipMatrix& P, int k,
                                             const Vector& left,
                                             const Vector& right);

// Per-feature bound on sigma under which P^T P is guaranteed invertible:
// min_k width_k^j / (2 q_{(1 + 0.5^{1/p}) / 2}). Regions with infinite
// width on a feature do not constrain it; the bound is +inf when no region
// has finite width on that feature.
std::vector<double> invertibility_bound(const Partition& partition, int p);

// True when sigma_j < bound_j for every feature.
bool check_theorem(const SigmaVector& sigma, const Partition& partition);

}  // namespace urtree

#endif  // URTREE_PARTITION_HPP_
