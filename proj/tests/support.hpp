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


// Shared generators and reference implementations for the test binaries.
// The reference code deliberately avoids the library's own numerics: long
// double quadrature, a hand-rolled Jacobi SVD, a brute-force CART.

#ifndef URTREE_TESTS_SUPPORT_HPP_
#define URTREE_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "urtree/dataset.hpp"
#include "urtree/linalg.hpp"
#include "urtree/partition.hpp"
#include "urtree/rng.hpp"
#include "urtree/tree.hpp"

namespace support {

using urtree::Matrix;
using urtree::Vector;

inline Matrix RandomMatrix(urtree::Rng& rng, int n, int p, double lo = 0.0,
                           double hi = 1.0) {
  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.Uniform(lo, hi);
  }
  return X;
}

// Integer-valued features, so that ties and repeated values are common.
inline Matrix GridMatrix(urtree::Rng& rng, int n, int p, int levels) {
  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      X(i, j) = static_cast<double>(rng.Below(static_cast<std::uint64_t>(levels)));
    }
  }
  return X;
}

inline Vector RandomVector(urtree::Rng& rng, int n, double lo = -1.0,
                           double hi = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.Uniform(lo, hi);
  return v;
}

// Composite Simpson rule for the standard normal density over [a, b].
inline long double NormalMass(long double a, long double b, int panels = 20000) {
  const long double h = (b - a) / panels;
  const long double c = 0.39894228040143267793994605993438187L;
  auto f = [&](long double t) { return c * std::exp(-0.5L * t * t); };
  long double s = f(a) + f(b);
  for (int m = 1; m < panels; ++m) s += (m % 2 ? 4.0L : 2.0L) * f(a + m * h);
  return s * h / 3.0L;
}

inline double QuadratureCdf(double z) {
  const long double half = NormalMass(0.0L, std::fabs(static_cast<long double>(z)));
  return static_cast<double>(z >= 0 ? 0.5L + half : 0.5L - half);
}

inline double BisectionQuantile(double alpha) {
  double lo = -10.0;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (QuadratureCdf(mid) < alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Minimum-norm least squares through a one-sided Jacobi SVD in long double.
// Singular values below 1e-10 * max are dropped.
inline Vector OracleLeastSquares(const Matrix& P, const Vector& y) {
  const int n = static_cast<int>(P.rows());
  const int k = static_cast<int>(P.cols());
  using LMat = std::vector<std::vector<long double>>;
  LMat A(k, std::vector<long double>(n));  // column-major copy
  LMat V(k, std::vector<long double>(k, 0.0L));
  for (int c = 0; c < k; ++c) {
    V[c][c] = 1.0L;
    for (int i = 0; i < n; ++i) A[c][i] = P(i, c);
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        long double alpha = 0, beta = 0, gamma = 0;
        for (int i = 0; i < n; ++i) {
          alpha += A[a][i] * A[a][i];
          beta += A[b][i] * A[b][i];
          gamma += A[a][i] * A[b][i];
        }
        if (std::fabs(gamma) <= 1e-30L * std::sqrt(alpha * beta) || gamma == 0) continue;
        rotated = true;
        const long double zeta = (beta - alpha) / (2 * gamma);
        const long double t = (zeta >= 0 ? 1.0L : -1.0L) /
                              (std::fabs(zeta) + std::sqrt(1 + zeta * zeta));
        const long double cs = 1 / std::sqrt(1 + t * t);
        const long double sn = cs * t;
        for (int i = 0; i < n; ++i) {
          const long double u = A[a][i];
          const long double v = A[b][i];
          A[a][i] = cs * u - sn * v;
          A[b][i] = sn * u + cs * v;
        }
        for (int i = 0; i < k; ++i) {
          const long double u = V[a][i];
          const long double v = V[b][i];
          V[a][i] = cs * u - sn * v;
          V[b][i] = sn * u + cs * v;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<long double> sv(k);
  long double smax = 0;
  for (int c = 0; c < k; ++c) {
    long double s = 0;
    for (int i = 0; i < n; ++i) s += A[c][i] * A[c][i];
    sv[c] = std::sqrt(s);
    smax = std::max(smax, sv[c]);
  }
  std::vector<long double> gamma(k, 0.0L);
  for (int c = 0; c < k; ++c) {
    if (sv[c] <= 1e-10L * smax || sv[c] == 0) continue;
    long double uty = 0;  // u_c = A_c / sv_c
    for (int i = 0; i < n; ++i) uty += A[c][i] * y(i);
    const long double coef = uty / (sv[c] * sv[c]);
    for (int r = 0; r < k; ++r) gamma[r] += V[c][r] * coef;
  }
  Vector out(k);
  for (int r = 0; r < k; ++r) out(r) = static_cast<double>(gamma[r]);
  return out;
}

// Partition of the unit box [0, 1]^p into `k` regions by random splits.
// Thresholds stay in the middle 80% of the cut interval.
inline urtree::Partition RandomBoxPartition(urtree::Rng& rng, int p, int k) {
  std::vector<urtree::Region> regions{
      urtree::Region(std::vector<urtree::Interval>(p, urtree::Interval{0.0, 1.0}))};
  while (static_cast<int>(regions.size()) < k) {
    const int r = static_cast<int>(rng.Below(regions.size()));
    const int j = static_cast<int>(rng.Below(static_cast<std::uint64_t>(p)));
    const urtree::Interval b = regions[r][j];
    const double s = b.lo + (b.hi - b.lo) * rng.Uniform(0.1, 0.9);
    auto [left, right] = urtree::split_region(regions[r], j, s);
    regions[r] = left;
    regions.push_back(right);
  }
  return urtree::Partition::FromRegions(std::move(regions));
}

inline std::vector<double> Center(const urtree::Region& region) {
  std::vector<double> c;
  for (const auto& b : region.bounds()) c.push_back(0.5 * (b.lo + b.hi));
  return c;
}

// Known generator with input noise: u ~ U[0, 1]^p, y = f(u) + N(0, 0.1^2),
// x = u + N(0, sigma_true^2) per coordinate.
enum class Shape { kStep, kSmooth };

inline double Truth(Shape shape, const double* u, int p) {
  if (shape == Shape::kStep) {
    return (u[0] > 0.5 ? 2.0 : 0.0) + (p > 1 && u[1] > 0.3 ? 1.0 : 0.0);
  }
  // Increasing in every coordinate on the unit box.
  return 3.0 * u[0] + (p > 1 ? u[1] * u[1] : 0.0);
}

struct Synthetic {
  urtree::Dataset train;
  urtree::Dataset test;
};

inline urtree::Dataset Draw(urtree::Rng& rng, Shape shape, int n, int p,
                            double sigma_true) {
  urtree::Dataset d;
  d.name = shape == Shape::kStep ? "synthetic_step" : "synthetic_smooth";
  d.X.resize(n, p);
  d.y.resize(n);
  std::vector<double> u(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      u[j] = rng.Uniform();
      d.X(i, j) = u[j] + sigma_true * rng.Normal();
    }
    d.y(i) = Truth(shape, u.data(), p) + 0.1 * rng.Normal();
  }
  for (int j = 0; j < p; ++j) d.feature_names.push_back("x" + std::to_string(j));
  d.target_name = "y";
  return d;
}

inline Synthetic MakeSynthetic(std::uint64_t seed, Shape shape, int n_train = 300,
                               int n_test = 2000, int p = 2, double sigma_true = 0.1) {
  urtree::Rng rng(seed);
  Synthetic s;
  s.train = Draw(rng, shape, n_train, p, sigma_true);
  s.test = Draw(rng, shape, n_test, p, sigma_true);
  return s;
}

struct NaiveSplit {
  int region;
  int feature;
  double threshold;
};

// Brute-force CART: every feature, every midpoint, total SSE recomputed from
// scratch. Same frontier order, admissibility and tie rules as the library.
inline std::vector<NaiveSplit> NaiveCart(const Matrix& X, const Vector& y,
                                         const urtree::TreeConfig& config) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const int min_count = static_cast<int>(std::ceil(config.min_leaf_fraction * n - 1e-9));
  auto group_sse = [&](const std::vector<int>& rows) {
    double mean = 0;
    for (int i : rows) mean += y(i);
    mean /= static_cast<double>(rows.size());
    double s = 0;
    for (int i : rows) s += (y(i) - mean) * (y(i) - mean);
    return s;
  };
  std::vector<std::vector<int>> leaves(1, std::vector<int>(n));
  std::iota(leaves[0].begin(), leaves[0].end(), 0);
  auto total = [&](const std::vector<std::vector<int>>& ls) {
    double s = 0;
    for (const auto& l : ls) s += group_sse(l);
    return s;
  };
  const double floor = 1e-12 * group_sse(leaves[0]);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  std::vector<NaiveSplit> log;
  while (!stack.empty()) {
    if (config.max_leaves && static_cast<int>(leaves.size()) >= *config.max_leaves) break;
    const auto [k, depth] = stack.back();
    stack.pop_back();
    if (config.max_depth && depth >= *config.max_depth) continue;
    const double current = total(leaves);
    bool found = false;
    NaiveSplit best{k, -1, 0.0};
    double best_risk = 0;
    for (int j = 0; j < p; ++j) {
      std::vector<double> vals;
      for (int i : leaves[k]) vals.push_back(X(i, j));
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (std::size_t m = 1; m < vals.size(); ++m) {
        const double s = 0.5 * (vals[m - 1] + vals[m]);
        std::vector<int> l, r;
        for (int i : leaves[k]) (X(i, j) <= s ? l : r).push_back(i);
        if (static_cast<int>(l.size()) < min_count || static_cast<int>(r.size()) < min_count) {
          continue;
        }
        auto trial = leaves;
        trial[k] = l;
        trial.push_back(r);
        const double risk = total(trial);
        if (!found || risk < best_risk - floor) {
          found = true;
          best = {k, j, s};
          best_risk = risk;
        }
      }
    }
    if (!found || current - best_risk <= floor) continue;
    std::vector<int> l, r;
    for (int i : leaves[k]) (X(i, best.feature) <= best.threshold ? l : r).push_back(i);
    leaves[k] = l;
    leaves.push_back(r);
    log.push_back(best);
    stack.push_back({k, depth + 1});
    stack.push_back({static_cast<int>(leaves.size()) - 1, depth + 1});
  }
  return log;
}

}  // namespace support

#endif  // URTREE_TESTS_SUPPORT_HPP_
