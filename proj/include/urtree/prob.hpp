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

#ifndef URTREE_PROB_HPP_
#define URTREE_PROB_HPP_

#include <limits>
#include <span>
#include <vector>

namespace urtree {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-feature standard deviations of the latent true input given the
// observation. An entry of 0 marks a feature observed without error.
class SigmaVector {
 public:
  SigmaVector() = default;
  explicit SigmaVector(std::vector<double> sigma);

  static SigmaVector Zeros(std::size_t p) {
    return SigmaVector(std::vector<double>(p, 0.0));
  }

  std::size_t size() const { return sigma_.size(); }
  double operator[](std::size_t j) const { return sigma_[j]; }
  const std::vector<double>& values() const { return sigma_; }

  // Sub-vector over the given feature indices.
  SigmaVector Select(std::span<const int> features) const;

  friend bool operator==(const SigmaVector&, const SigmaVector&) = default;

 private:
  std::vector<double> sigma_;
};

// Standard normal cumulative distribution function. NaN throws.
double std_normal_cdf(double z);

// Upper tail 1 - Phi(z), accurate in the far tail.
double std_normal_sf(double z);

// Inverse of std_normal_cdf on (0, 1).
double std_normal_quantile(double alpha);

// P(U in [a, b]) for U ~ N(x, sigma^2). sigma == 0 gives the indicator of
// the closed interval.
double interval_prob(double x, double sigma, double a, double b);

// Same mass, except that a point sitting exactly on the lower bound is
// excluded when sigma == 0, i.e. the interval is (a, b]. Used for regions of
// a partition so that ties on a split threshold go to the left child.
double interval_prob_half_open(double x, double sigma, double a, double b);

}  // namespace urtree

#endif  // URTREE_PROB_HPP_
