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

#ifndef URTREE_LINALG_HPP_
#define URTREE_LINALG_HPP_

#include <optional>

#include <Eigen/Dense>

namespace urtree {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Minimum-norm minimizer of ||y - P gamma||^2, computed through the SVD
// pseudo-inverse. Singular values at or below the default rank tolerance are
// treated as zero.
Vector solve_least_squares(const Matrix& P, const Vector& y);

// eps * max(n, K) * largest singular value.
double default_rank_tolerance(const Matrix& P);

// Number of singular values strictly above `tol` (default tolerance when
// absent).
int numerical_rank(const Matrix& P, std::optional<double> tol = std::nullopt);

// sum_i (y_i - (P gamma)_i)^2.
double sse(const Matrix& P, const Vector& gamma, const Vector& y);

// Orthonormal basis (n x r) of the column space of P, r = numerical_rank(P).
Matrix orthonormal_basis(const Matrix& P);

}  // namespace urtree

#endif  // URTREE_LINALG_HPP_
