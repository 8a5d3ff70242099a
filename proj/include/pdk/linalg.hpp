// Copyright 2026 The pdk authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense double-precision kernels used everywhere else: a Cholesky
// factorization with an explicit pivot test, SVD-based rank-revealing
// helpers, and a power-iteration estimate of the spectral norm. All
// functions are pure; none of them keeps hidden state.

#ifndef PDK_LINALG_HPP_
#define PDK_LINALG_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "pdk/errors.hpp"

namespace pdk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NonFiniteValue(std::string(what) + " contains NaN or Inf");
  }
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw NonFiniteValue(std::string(what) + " contains NaN or Inf");
  }
}

// Lower-triangular Cholesky factor of a symmetric positive definite matrix,
// M = L L^T.
struct SpdFactor {
  Matrix lower;

  Index order() const { return lower.rows(); }
};

// Factors a symmetric positive definite matrix. Symmetry is checked up to a
// relative tolerance of 1e-12; positive definiteness is decided by the
// pivots themselves: a pivot d_j <= n * eps * max_i M_ii rejects the matrix.
// The pivot threshold scales with the diagonal so that well conditioned
// matrices of any magnitude pass and indefinite or semidefinite ones fail.
inline SpdFactor spd_factor(const Matrix& m) {
  require_finite(m, "spd_factor input");
  const Index n = m.rows();
  if (n != m.cols()) {
    throw DimensionMismatch("spd_factor needs a square matrix, got " +
                            std::to_string(n) + "x" + std::to_string(m.cols()));
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw NotSymmetric("spd_factor input is asymmetric: max |M - M^T| = " +
                       std::to_string(asym));
  }

  const double eps = std::numeric_limits<double>::epsilon();
  const double max_diag = n > 0 ? m.diagonal().maxCoeff() : 0.0;
  const double pivot_floor = static_cast<double>(n) * eps * max_diag;

  Matrix lower = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = m(j, j) - lower.row(j).head(j).squaredNorm();
    if (d <= pivot_floor) {
      throw NotPositiveDefinite("pivot " + std::to_string(d) + " at column " +
                                std::to_string(j) + " is below threshold " +
                                std::to_string(pivot_floor));
    }
    lower(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      lower(i, j) =
          (m(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) /
          lower(j, j);
    }
  }
  return SpdFactor{std::move(lower)};
}

// Solves M x = rhs given the factor of M, by forward and back substitution.
inline Vector spd_solve(const SpdFactor& factor, const Vector& rhs) {
  if (rhs.size() != factor.order()) {
    throw DimensionMismatch("spd_solve rhs has size " +
                            std::to_string(rhs.size()) + ", factor order is " +
                            std::to_string(factor.order()));
  }
  require_finite(rhs, "spd_solve rhs");
  Vector y = factor.lower.triangularView<Eigen::Lower>().solve(rhs);
  return factor.lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

namespace detail {

// Rank cutoff shared by the SVD-based helpers: singular values at or below
// max(m, n) * eps * sigma_max are treated as zero.
inline double rank_cutoff(Index rows, Index cols, double sigma_max) {
  const double eps = std::numeric_limits<double>::epsilon();
  return static_cast<double>(std::max(rows, cols)) * eps * sigma_max;
}

}  // namespace detail

// Minimum-norm solution of min_x |A x - b|_2. For rank-deficient A this is
// the least-squares solution with smallest Euclidean norm.
inline Vector lstsq_min_norm(const Matrix& a, const Vector& b) {
  require_finite(a, "lstsq_min_norm matrix");
  require_finite(b, "lstsq_min_norm rhs");
  if (a.rows() != b.size()) {
    throw DimensionMismatch("lstsq_min_norm: matrix has " +
                            std::to_string(a.rows()) + " rows, rhs has " +
                            std::to_string(b.size()));
  }
  if (a.cols() == 0) return Vector::Zero(0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff =
      s.size() > 0 ? detail::rank_cutoff(a.rows(), a.cols(), s(0)) : 0.0;
  Vector coeff = svd.matrixU().transpose() * b;
  for (Index i = 0; i < s.size(); ++i) {
    coeff(i) = s(i) > cutoff ? coeff(i) / s(i) : 0.0;
  }
  return svd.matrixV() * coeff;
}

// Orthonormal basis F of the null space of A: columns satisfy A F = 0 and
// F^T F = I. Returns an n x 0 matrix when A has full column rank.
inline Matrix null_space_basis(const Matrix& a) {
  require_finite(a, "null_space_basis input");
  if (a.cols() == 0) return Matrix::Zero(0, 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = detail::rank_cutoff(a.rows(), a.cols(), smax);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(a.cols() - rank);
}

// Moore-Penrose pseudoinverse with the same rank cutoff as the other
// SVD helpers.
inline Matrix pinv(const Matrix& a) {
  require_finite(a, "pinv input");
  if (a.rows() == 0 || a.cols() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff =
      s.size() > 0 ? detail::rank_cutoff(a.rows(), a.cols(), s(0)) : 0.0;
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    inv(i) = s(i) > cutoff ? 1.0 / s(i) : 0.0;
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Estimate of the spectral norm |A|_2 by power iteration on A^T A. The
// start vector is deterministic and slightly graded so it is never
// orthogonal to the leading singular subspace in practice.
inline double op_norm_est(const Matrix& a, int iters = 50) {
  require_finite(a, "op_norm_est input");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const Index n = a.cols();
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = 1.0 + static_cast<double>(i) / (10.0 * static_cast<double>(n));
  }
  v.normalize();
  double sigma = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    sigma = std::sqrt(norm);
  }
  return sigma;
}

}  // namespace pdk

#endif  // PDK_LINALG_HPP_
