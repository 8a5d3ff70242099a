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

#include "pdk/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

namespace pdk {
namespace {

Matrix random_matrix(Index rows, Index cols, std::mt19937_64* rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(*rng);
  }
  return m;
}

Vector random_vector(Index n, std::mt19937_64* rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(*rng);
  return v;
}

// Unnormalized Laplacian of a cycle over n nodes plus one chord, connected
// by construction.
Matrix ring_laplacian(Index n) {
  Matrix l = Matrix::Zero(n, n);
  auto add_edge = [&](Index i, Index j, double w) {
    l(i, i) += w;
    l(j, j) += w;
    l(i, j) -= w;
    l(j, i) -= w;
  };
  for (Index i = 0; i < n; ++i) add_edge(i, (i + 1) % n, 1.0 + 0.1 * double(i));
  add_edge(0, n / 2, 0.7);
  return l;
}

TEST_CASE("spd_factor handles the diagonal case") {
  Matrix m(2, 2);
  m << 4, 0, 0, 9;
  const SpdFactor f = spd_factor(m);
  CHECK(f.lower(0, 0) == 2.0);
  CHECK(f.lower(1, 1) == 3.0);
  CHECK(f.lower(1, 0) == 0.0);
}

TEST_CASE("spd_factor of the identity is the identity") {
  const SpdFactor f = spd_factor(Matrix::Identity(3, 3));
  CHECK((f.lower - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spd_factor reconstructs I + rho A A^T") {
  std::mt19937_64 rng(11);
  const Matrix a = random_matrix(5, 8, &rng);
  const Matrix m = Matrix::Identity(5, 5) + a * a.transpose();
  const SpdFactor f = spd_factor(m);
  const Matrix rebuilt = f.lower * f.lower.transpose();
  CHECK((rebuilt - m).norm() <= 1e-12 * m.norm());
}

TEST_CASE("spd_factor rejects bad inputs") {
  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(spd_factor(asym), NotSymmetric);

  Matrix indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(spd_factor(indefinite), NotPositiveDefinite);

  // Rank-one symmetric matrix: the second pivot is exactly zero.
  Matrix semidefinite(2, 2);
  semidefinite << 1, 1, 1, 1;
  CHECK_THROWS_AS(spd_factor(semidefinite), NotPositiveDefinite);

  CHECK_THROWS_AS(spd_factor(Matrix::Zero(1, 1)), NotPositiveDefinite);
  CHECK_THROWS_AS(spd_factor(Matrix::Identity(2, 3)), DimensionMismatch);

  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(spd_factor(bad), NonFiniteValue);
}

TEST_CASE("spd_solve on diagonal and identity systems") {
  Matrix m(2, 2);
  m << 4, 0, 0, 9;
  Vector rhs(2);
  rhs << 8, 27;
  const Vector x = spd_solve(spd_factor(m), rhs);
  CHECK(x(0) == Catch::Approx(2.0).margin(1e-14));
  CHECK(x(1) == Catch::Approx(3.0).margin(1e-14));

  std::mt19937_64 rng(3);
  const Vector v = random_vector(4, &rng);
  const Vector same = spd_solve(spd_factor(Matrix::Identity(4, 4)), v);
  CHECK((same - v).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("spd_solve residual on random systems") {
  std::mt19937_64 rng(17);
  const Matrix a = random_matrix(6, 6, &rng);
  const Matrix m = a * a.transpose() + 0.5 * Matrix::Identity(6, 6);
  const Vector rhs = random_vector(6, &rng);
  const Vector x = spd_solve(spd_factor(m), rhs);
  CHECK((m * x - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));

  CHECK_THROWS_AS(spd_solve(spd_factor(m), random_vector(5, &rng)),
                  DimensionMismatch);
}

TEST_CASE("factor-solve acts as a left inverse up to order 200") {
  std::mt19937_64 rng(29);
  for (const Index n : {20, 80, 200}) {
    const Matrix g = random_matrix(n, n, &rng);
    const Matrix m =
        g * g.transpose() + double(n) * Matrix::Identity(n, n);
    const SpdFactor f = spd_factor(m);
    const Vector v = random_vector(n, &rng);
    const Vector back = spd_solve(f, m * v);
    CHECK((back - v).norm() <= 1e-10 * (1.0 + v.norm()));
  }
}

TEST_CASE("lstsq_min_norm basic fits") {
  Matrix a(2, 1);
  a << 1, 1;
  Vector b(2);
  b << 1, 3;
  const Vector x = lstsq_min_norm(a, b);
  REQUIRE(x.size() == 1);
  CHECK(x(0) == Catch::Approx(2.0).margin(1e-14));

  std::mt19937_64 rng(5);
  const Vector v = random_vector(3, &rng);
  CHECK((lstsq_min_norm(Matrix::Identity(3, 3), v) - v).norm() <= 1e-14);

  CHECK_THROWS_AS(lstsq_min_norm(a, random_vector(3, &rng)),
                  DimensionMismatch);
}

TEST_CASE("lstsq_min_norm satisfies the normal equations") {
  std::mt19937_64 rng(7);
  const Matrix a = random_matrix(8, 4, &rng);
  const Vector b = random_vector(8, &rng);
  const Vector x = lstsq_min_norm(a, b);
  CHECK((a.transpose() * (a * x - b)).norm() <= 1e-9);
}

TEST_CASE("lstsq_min_norm picks the shortest solution when rank deficient") {
  Matrix a(1, 2);
  a << 1, 1;
  Vector b(1);
  b << 2;
  const Vector x = lstsq_min_norm(a, b);
  // All solutions are (t, 2 - t); the shortest is (1, 1).
  CHECK(x(0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(x(1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("null_space_basis spans the kernel") {
  Matrix a(1, 2);
  a << 1, 1;
  const Matrix f = null_space_basis(a);
  REQUIRE(f.cols() == 1);
  CHECK((a * f).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((f.transpose() * f - Matrix::Identity(1, 1)).cwiseAbs().maxCoeff() <=
        1e-12);

  CHECK(null_space_basis(Matrix::Identity(2, 2)).cols() == 0);

  std::mt19937_64 rng(13);
  const Matrix wide = random_matrix(3, 7, &rng);
  const Matrix basis = null_space_basis(wide);
  REQUIRE(basis.cols() == 4);
  CHECK((wide * basis).norm() <= 1e-10 * (1.0 + wide.norm()));
  CHECK((basis.transpose() * basis - Matrix::Identity(4, 4)).norm() <= 1e-10);
}

TEST_CASE("null_space_basis of a Laplacian contains the constant vector") {
  const Matrix l = ring_laplacian(6);
  const Matrix f = null_space_basis(l);
  REQUIRE(f.cols() == 1);
  // The kernel of a connected graph Laplacian is spanned by the ones vector.
  const Vector ones = Vector::Ones(6) / std::sqrt(6.0);
  CHECK(std::abs(std::abs(f.col(0).dot(ones)) - 1.0) <= 1e-12);
}

TEST_CASE("pinv matches the rank-one spectral case") {
  Matrix l(2, 2);
  l << 1, -1, -1, 1;
  const Matrix p = pinv(l);
  Matrix expected(2, 2);
  expected << 0.25, -0.25, -0.25, 0.25;
  CHECK((p - expected).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK((pinv(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
}

TEST_CASE("pinv satisfies the Penrose identities on a Laplacian") {
  const Matrix l = ring_laplacian(6);
  const Matrix p = pinv(l);
  CHECK((l * p * l - l).norm() <= 1e-8);
  CHECK((p * l * p - p).norm() <= 1e-8);
  CHECK(((l * p).transpose() - l * p).norm() <= 1e-8);
  CHECK(((p * l).transpose() - p * l).norm() <= 1e-8);
  CHECK((p * Vector::Ones(6)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("pinv of a rectangular matrix") {
  std::mt19937_64 rng(19);
  const Matrix a = random_matrix(5, 3, &rng);
  const Matrix p = pinv(a);
  REQUIRE(p.rows() == 3);
  REQUIRE(p.cols() == 5);
  CHECK((a * p * a - a).norm() <= 1e-8);
  CHECK((p * a * p - p).norm() <= 1e-8);
}

TEST_CASE("op_norm_est tracks the top singular value") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(op_norm_est(d) == Catch::Approx(3.0).margin(1e-10));
  CHECK(op_norm_est(Matrix::Zero(3, 4)) == 0.0);

  std::mt19937_64 rng(23);
  const Matrix a = random_matrix(12, 7, &rng);
  Eigen::JacobiSVD<Matrix> svd(a);
  CHECK(op_norm_est(a) ==
        Catch::Approx(svd.singularValues()(0)).epsilon(1e-6));
}

}  // namespace
}  // namespace pdk
