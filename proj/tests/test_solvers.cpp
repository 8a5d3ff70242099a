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

#include "pdk/solvers.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

namespace pdk {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

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

SaddleProblem nnls_saddle(const Matrix& a, const Vector& b) {
  return SaddleProblem{a, IndicatorCone{NonnegOrthant{a.cols()}},
                       QuadLin{1.0, b}};
}

TEST_CASE("projected gradient solves the two-pixel problem") {
  const Matrix a = Matrix::Identity(2, 2);
  const Vector b = vec2(1, -1);
  const SolveReport rep = solve_pdg(a, b);
  CHECK(rep.termination == Termination::kConverged);
  CHECK((rep.state.x - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((rep.state.mu - vec2(0, 1)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.certificate.rel_gap <= 1e-6);
}

TEST_CASE("projected gradient keeps interior solutions") {
  const Matrix a = Matrix::Identity(3, 3);
  Vector b(3);
  b << 0.2, 1.4, 0.0;
  const SolveReport rep = solve_pdg(a, b);
  CHECK(rep.termination == Termination::kConverged);
  CHECK((rep.state.x - b).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.state.mu.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("projected gradient iterates stay feasible") {
  std::mt19937_64 rng(3);
  const Matrix a = random_matrix(6, 4, &rng);
  const Vector b = random_vector(6, &rng);
  StepConfig cfg;
  cfg.max_iters = 200;
  bool all_nonneg = true;
  int rows_seen = 0;
  solve_pdg(a, b, cfg, [&](int iter, const IterateState& s) {
    all_nonneg = all_nonneg && (s.x.array() >= 0.0).all();
    ++rows_seen;
    CHECK(iter == rows_seen);
  });
  CHECK(all_nonneg);
  CHECK(rows_seen == 200);
}

TEST_CASE("splitting method on the two-pixel problem") {
  const SplitProblem split{Matrix::Identity(2, 2), vec2(1, -1)};
  const SolveReport rep = solve_admm(split);
  CHECK(rep.termination == Termination::kConverged);
  CHECK((rep.state.x - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-6);
  // The multiplier converges to the dual optimum (0, 1).
  CHECK((rep.state.lambda - vec2(0, 1)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("splitting method fixes the zero problem instantly") {
  const SplitProblem split{Matrix::Identity(2, 2), Vector::Zero(2)};
  const SolveReport rep = solve_admm(split);
  CHECK(rep.termination == Termination::kConverged);
  CHECK(rep.state.x.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(rep.state.y.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(rep.state.lambda.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("splitting residuals drop below 1e-8 on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix a = random_matrix(30, 10, &rng);
    const Vector b = random_vector(30, &rng);
    StepConfig cfg;
    cfg.max_iters = 10000;
    const SolveReport rep = solve_admm(SplitProblem{a, b}, cfg);
    CHECK(rep.termination == Termination::kConverged);
    CHECK(rep.certificate.rel_gap <= 1e-6);
  }
}

TEST_CASE("dual splitting reaches the known dual optimum") {
  const Matrix a = Matrix::Identity(2, 2);
  const Vector b = vec2(1, -1);
  const SolveReport rep = solve_admm_dual_nnls(a, b);
  CHECK(rep.termination == Termination::kConverged);
  CHECK((rep.state.lambda - vec2(0, 1)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.certificate.dual_obj == Catch::Approx(0.5).margin(1e-6));
  CHECK((rep.state.x - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("dual splitting handles a fully inactive primal") {
  const Matrix a = Matrix::Identity(3, 3);
  Vector b(3);
  b << -1, -2, -0.5;
  const SolveReport rep = solve_admm_dual_nnls(a, b);
  CHECK(rep.termination == Termination::kConverged);
  CHECK((rep.state.lambda + b).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.state.x.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("primal recovery modes agree at an exact dual optimum") {
  const Matrix a = Matrix::Identity(2, 2);
  const Vector b = vec2(1, -1);
  const Vector lambda = vec2(0, 1);
  const Vector support = nnls_recover_primal(a, b, lambda, Recovery::kSupport);
  const Vector direct = nnls_recover_primal(a, b, lambda, Recovery::kDirect);
  CHECK((support - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-12);
  // The clamp shortcut returns the multiplier instead of the primal point;
  // on this instance the two coincide only by accident of A = I.
  CHECK((direct - vec2(0, 1)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hybrid gradient solves the two-pixel saddle") {
  const SolveReport rep = solve_pdhg(nnls_saddle(Matrix::Identity(2, 2),
                                                 vec2(1, -1)));
  CHECK(rep.termination == Termination::kConverged);
  CHECK((rep.state.x - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((rep.state.y - vec2(0, 1)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("hybrid gradient with a zero coupling decouples immediately") {
  SaddleProblem p{Matrix::Zero(2, 2), IndicatorCone{NonnegOrthant{2}},
                  ZeroFn{2}};
  Vector x = vec2(-3, 5), y = vec2(1, 1), xbar = x;
  pdhg_step(p, 1.0, 1.0, 1.0, &x, &y, &xbar);
  CHECK((x - vec2(0, 5)).cwiseAbs().maxCoeff() == 0.0);
  Vector x2 = x, y2 = y, xbar2 = x;
  pdhg_step(p, 1.0, 1.0, 1.0, &x2, &y2, &xbar2);
  CHECK((x2 - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hybrid gradient rejects oversized steps") {
  StepConfig cfg;
  cfg.tau = 10.0;
  cfg.sigma = 10.0;
  CHECK_THROWS_AS(
      solve_pdhg(nnls_saddle(Matrix::Identity(2, 2), vec2(1, -1)), cfg),
      StepSizeViolation);
}

TEST_CASE("specialized and generic hybrid gradient steps coincide") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = random_matrix(5, 3, &rng);
    const Vector b = random_vector(5, &rng);
    const SaddleProblem p = nnls_saddle(a, b);
    Vector x = random_vector(3, &rng), y = random_vector(5, &rng);
    Vector xbar = random_vector(3, &rng);
    Vector xs = x, ys = y, xbars = xbar;
    const double tau = 0.4, sigma = 0.6, theta = 0.8;
    pdhg_step(p, tau, sigma, theta, &x, &y, &xbar);
    pdhg_step_nnls(a, b, tau, sigma, theta, &xs, &ys, &xbars);
    CHECK((x - xs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((y - ys).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((xbar - xbars).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("descent-ascent stays put on the zero instance") {
  const SolveReport rep = solve_gda(Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(rep.termination == Termination::kConverged);
  CHECK(rep.iterations == 1);
  CHECK(rep.state.lambda.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("descent-ascent learns the two-pixel dual") {
  StepConfig cfg;
  cfg.max_iters = 30000;
  const SolveReport rep = solve_gda(Matrix::Identity(2, 2), vec2(1, -1), cfg);
  CHECK((rep.state.lambda - vec2(0, 1)).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK((rep.state.x - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("consensus with one block matches the dual splitting") {
  std::mt19937_64 rng(23);
  const Matrix a = random_matrix(8, 5, &rng);
  const Vector b = random_vector(8, &rng);
  StepConfig cfg;
  cfg.max_iters = 20000;
  const SolveReport mono = solve_admm_dual_nnls(a, b, cfg);
  const SolveReport cons = solve_consensus_admm({SplitProblem{a, b}}, cfg);
  CHECK((mono.state.x - cons.state.x).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("consensus with two identical blocks recovers the primal") {
  const SplitProblem blk{Matrix::Identity(2, 2), vec2(1, -1)};
  StepConfig cfg;
  cfg.max_iters = 20000;
  const SolveReport rep = solve_consensus_admm({blk, blk}, cfg);
  CHECK((rep.state.x - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(rep.state.z.size() == 2);
}

TEST_CASE("consensus parallel execution equals serial execution") {
  std::mt19937_64 rng(31);
  std::vector<SplitProblem> blocks;
  for (int i = 0; i < 4; ++i) {
    blocks.push_back({random_matrix(6, 4, &rng), random_vector(6, &rng)});
  }
  StepConfig serial;
  serial.max_iters = 300;
  StepConfig parallel = serial;
  parallel.parallel_blocks = true;
  const SolveReport rs = solve_consensus_admm(blocks, serial);
  const SolveReport rp = solve_consensus_admm(blocks, parallel);
  CHECK((rs.state.z - rp.state.z).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((rs.state.lambda - rp.state.lambda).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("consensus rejects inconsistent blocks") {
  const SplitProblem a{Matrix::Identity(2, 2), vec2(1, -1)};
  const SplitProblem b{Matrix::Identity(3, 3), Vector::Zero(3)};
  CHECK_THROWS_AS(solve_consensus_admm({a, b}), DimensionMismatch);
  CHECK_THROWS_AS(solve_consensus_admm({}), DimensionMismatch);
}

TEST_CASE("divergence guard trips on an explosive step") {
  std::mt19937_64 rng(41);
  const Matrix a = random_matrix(4, 4, &rng);
  const Vector b = random_vector(4, &rng);
  StepConfig cfg;
  cfg.tau = 1e6;
  cfg.sigma = 1e6;
  cfg.max_iters = 2000;
  const SolveReport rep = solve_pdg(a, b, cfg);
  CHECK(rep.termination == Termination::kDiverged);
}

TEST_CASE("step configuration is validated") {
  StepConfig bad_theta;
  bad_theta.theta = 1.5;
  CHECK_THROWS_AS(validate(bad_theta), Error);

  StepConfig bad_rho;
  bad_rho.rho = 0.0;
  CHECK_THROWS_AS(validate(bad_rho), Error);

  StepConfig bad_tol;
  bad_tol.tol_primal = 0.0;
  CHECK_THROWS_AS(validate(bad_tol), Error);
}

TEST_CASE("converged reports meet their tolerances") {
  std::mt19937_64 rng(53);
  const Matrix a = random_matrix(12, 5, &rng);
  const Vector b = random_vector(12, &rng);
  for (const SolveReport& rep :
       {solve_pdg(a, b), solve_admm(SplitProblem{a, b}),
        solve_admm_dual_nnls(a, b), solve_pdhg(nnls_saddle(a, b))}) {
    REQUIRE(rep.termination == Termination::kConverged);
    CHECK(rep.certificate.rel_gap <= 1e-6);
  }
}

}  // namespace
}  // namespace pdk
