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

#include "urtree/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "urtree/error.hpp"

namespace urtree {

SigmaVector::SigmaVector(std::vector<double> sigma) : sigma_(std::move(sigma)) {
  for (double s : sigma_) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error("sigma entries must be finite and non-negative");
    }
  }
}

SigmaVector SigmaVector::Select(std::span<const int> features) const {
  std::vector<double> out;
  out.reserve(features.size());
  for (int j : features) {
    if (j < 0 || static_cast<std::size_t>(j) >= sigma_.size()) {
      throw Error("feature index out of range");
    }
    out.push_back(sigma_[j]);
  }
  return SigmaVector(std::move(out));
}

double std_normal_cdf(double z) {
  if (std::isnan(z)) throw Error("invalid argument");
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double std_normal_sf(double z) {
  if (std::isnan(z)) throw Error("invalid argument");
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation of the normal quantile (relative error
// below 1.15e-9), polished afterwards with one Halley step.
double AcklamQuantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  constexpr double kHigh = 1.0 - kLow;

  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= kHigh) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double std_normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("invalid quantile level");
  double x = AcklamQuantile(alpha);
  // Halley refinement; the residual is taken on whichever tail keeps precision.
  const double e = alpha < 0.5 ? std_normal_cdf(x) - alpha
                               : (1.0 - alpha) - std_normal_sf(x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

namespace {

double GaussianMass(double x, double sigma, double a, double b) {
  const double za = (a - x) / sigma;
  const double zb = (b - x) / sigma;
  double mass;
  if (za >= 0.0) {
    mass = std_normal_sf(za) - std_normal_sf(zb);
  } else if (zb <= 0.0) {
    mass = std_normal_cdf(zb) - std_normal_cdf(za);
  } else {
    mass = 1.0 - std_normal_cdf(za) - std_normal_sf(zb);
  }
  return std::clamp(mass, 0.0, 1.0);
}

void CheckIntervalArgs(double x, double sigma, double a, double b) {
  if (std::isnan(x) || std::isnan(sigma) || std::isnan(a) || std::isnan(b)) {
    throw Error("invalid argument");
  }
  if (sigma < 0.0) throw Error("invalid argument");
  if (a > b) throw Error("empty interval");
}

}  // namespace

double interval_prob(double x, double sigma, double a, double b) {
  CheckIntervalArgs(x, sigma, a, b);
  if (sigma == 0.0) return (a <= x && x <= b) ? 1.0 : 0.0;
  return GaussianMass(x, sigma, a, b);
}

double interval_prob_half_open(double x, double sigma, double a, double b) {
  CheckIntervalArgs(x, sigma, a, b);
  if (sigma == 0.0) {
    // (-inf, b] must still contain every finite x.
    const bool above_lower = a == -kInf || a < x;
    return (above_lower && x <= b) ? 1.0 : 0.0;
  }
  return GaussianMass(x, sigma, a, b);
}

}  // namespace urtree
