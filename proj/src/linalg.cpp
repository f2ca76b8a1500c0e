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

#include "urtree/linalg.hpp"

#include <algorithm>
#include <limits>

#include "urtree/error.hpp"

namespace urtree {
namespace {

void CheckFinite(const Matrix& m) {
  if (!m.allFinite()) throw Error("non-finite entries");
}

Eigen::JacobiSVD<Matrix> ThinSvd(const Matrix& P) {
  return Eigen::JacobiSVD<Matrix>(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

double ToleranceFor(const Matrix& P, const Vector& singular_values) {
  const double largest = singular_values.size() > 0 ? singular_values(0) : 0.0;
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(P.rows(), P.cols())) * largest;
}

}  // namespace

Vector solve_least_squares(const Matrix& P, const Vector& y) {
  if (P.rows() == 0 || P.cols() == 0) throw Error("empty matrix");
  if (P.rows() != y.size()) throw Error("dimension mismatch");
  CheckFinite(P);
  if (!y.allFinite()) throw Error("non-finite entries");

  const auto svd = ThinSvd(P);
  const Vector& s = svd.singularValues();
  const double tol = ToleranceFor(P, s);
  const Vector uty = svd.matrixU().transpose() * y;
  Vector scaled = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) scaled(i) = uty(i) / s(i);
  }
  return svd.matrixV() * scaled;
}

double default_rank_tolerance(const Matrix& P) {
  CheckFinite(P);
  return ToleranceFor(P, ThinSvd(P).singularValues());
}

int numerical_rank(const Matrix& P, std::optional<double> tol) {
  if (P.rows() == 0 || P.cols() == 0) throw Error("empty matrix");
  CheckFinite(P);
  if (tol && !(*tol >= 0.0)) throw Error("tolerance must be non-negative");
  const Vector s = Eigen::JacobiSVD<Matrix>(P).singularValues();
  const double cut = tol ? *tol : ToleranceFor(P, s);
  return static_cast<int>((s.array() > cut).count());
}

double sse(const Matrix& P, const Vector& gamma, const Vector& y) {
  if (P.cols() != gamma.size() || P.rows() != y.size()) {
    throw Error("shape mismatch");
  }
  return (y - P * gamma).squaredNorm();
}

Matrix orthonormal_basis(const Matrix& P) {
  if (P.rows() == 0 || P.cols() == 0) throw Error("empty matrix");
  CheckFinite(P);
  const auto svd = ThinSvd(P);
  const Vector& s = svd.singularValues();
  const double tol = ToleranceFor(P, s);
  const auto rank = (s.array() > tol).count();
  return svd.matrixU().leftCols(rank);
}

}  // namespace urtree
