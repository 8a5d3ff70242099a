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

// Lowest-cost diet linear program: min c^T x s.t. Ax >= b, x >= 0, where
// rows of A are nutrients, columns are foods, and b holds the daily
// requirements. Solved through its saddle-point form
//   min_x max_{lambda >= 0, nu >= 0} c^T x + lambda^T (b - Ax) - nu^T x
// by an extrapolated primal-dual iteration, with an exhaustive
// basic-feasible-solution oracle for ground truth at desk scale.

#ifndef PDK_DIET_HPP_
#define PDK_DIET_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pdk/certificates.hpp"
#include "pdk/convex.hpp"
#include "pdk/errors.hpp"
#include "pdk/linalg.hpp"
#include "pdk/solvers.hpp"

namespace pdk {

struct DietInstance {
  Vector cost;          // c, one entry per food
  Matrix nutrients;     // A, nutrient content per unit of food
  Vector requirements;  // b, minimum daily amounts
};

inline void validate(const DietInstance& inst) {
  require_finite(inst.cost, "diet costs");
  require_finite(inst.nutrients, "diet nutrient matrix");
  require_finite(inst.requirements, "diet requirements");
  const Index m = inst.nutrients.rows();
  const Index n = inst.nutrients.cols();
  if (m < 1 || n < 1 || inst.cost.size() != n ||
      inst.requirements.size() != m) {
    throw DimensionMismatch("diet instance dimensions are inconsistent");
  }
  if (inst.cost.minCoeff() < 0.0 || inst.nutrients.minCoeff() < 0.0 ||
      inst.requirements.minCoeff() < 0.0) {
    throw Error("diet instance requires nonnegative costs, nutrient "
                "contents, and requirements");
  }
  for (Index i = 0; i < m; ++i) {
    if (inst.nutrients.row(i).maxCoeff() <= 0.0) {
      throw Error("diet nutrient " + std::to_string(i) +
                  " is not obtainable from any food");
    }
  }
}

inline ConeProgram diet_as_cone_program(const DietInstance& inst) {
  validate(inst);
  return ConeProgram{inst.cost, inst.nutrients, inst.requirements,
                     NonnegOrthant{inst.cost.size()}};
}

// Extrapolated primal-dual iteration on the Lagrangian: ascend both
// multiplier blocks at the extrapolated primal point, then descend x along
// the updated stationarity defect:
//   lambda <- P+(lambda + sigma (b - A xbar))
//   nu     <- P+(nu - sigma xbar)
//   x      <- x - tau (c - A^T lambda - nu)
//   xbar   <- x + theta (x - x_prev)
// Steps default to 0.99 / |K| with K the stacked (-A; -I) coupling, so
// tau sigma |K|^2 < 1. Iterate blow-up flags an unbounded or infeasible
// program as Diverged.
inline SolveReport lp_primal_dual(const DietInstance& inst,
                                  StepConfig cfg = {},
                                  const Observer& observer = {}) {
  validate(inst);
  validate(cfg);
  const Matrix& a = inst.nutrients;
  const Index m = a.rows();
  const Index n = a.cols();
  const double k_norm = std::sqrt(op_norm_est(a) * op_norm_est(a) + 1.0);
  const double tau = cfg.tau > 0.0 ? cfg.tau : 0.99 / k_norm;
  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : 0.99 / k_norm;
  if (tau * sigma * k_norm * k_norm > 1.0 + 1e-12) {
    throw StepSizeViolation("lp_primal_dual: tau*sigma*|K|^2 exceeds 1");
  }
  const ConeProgram lp = diet_as_cone_program(inst);

  Vector x = Vector::Zero(n);
  Vector xbar = x;
  Vector lambda = Vector::Zero(m);
  Vector nu = Vector::Zero(n);

  SolveReport report;
  report.solver = "lp-pd";
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    lambda = (lambda + sigma * (inst.requirements - a * xbar)).cwiseMax(0.0);
    nu = (nu - sigma * xbar).cwiseMax(0.0);
    const Vector x_prev = x;
    x -= tau * (inst.cost - a.transpose() * lambda - nu);
    xbar = x + cfg.theta * (x - x_prev);

    report.iterations = iter;
    report.state =
        IterateState{x, Vector(), Vector(), lambda, nu, Vector(), Vector(),
                     xbar, iter};
    if (observer) observer(iter, report.state);
    if (detail::diverged(x) || detail::diverged(lambda)) {
      report.termination = Termination::kDiverged;
      break;
    }
    report.certificate = lp_certificate(lp, x, lambda, nu);
    report.objective = report.certificate.primal_obj;
    if (detail::certified_stop(report.certificate, cfg)) {
      report.termination = Termination::kConverged;
      break;
    }
  }
  return report;
}

struct LpVertexSolution {
  Vector x;
  Vector lambda;
  Vector nu;
  double cost = 0.0;
};

// Enumerates every basis of the standard form min c^T x s.t. Ax - s = b,
// (x, s) >= 0. A basis is m columns of [A, -I]; the cheapest feasible one
// whose multipliers satisfy dual feasibility is the LP optimum. Intended
// for n + m <= 16.
inline LpVertexSolution diet_vertex_oracle(const DietInstance& inst) {
  validate(inst);
  const Index m = inst.nutrients.rows();
  const Index n = inst.nutrients.cols();
  if (n + m > 16) {
    throw OracleFailure("vertex oracle enumerates C(n+m, m) bases; n + m = " +
                        std::to_string(n + m) + " exceeds the 16 budget");
  }
  constexpr double kTol = 1e-9;
  Matrix standard(m, n + m);
  standard.leftCols(n) = inst.nutrients;
  standard.rightCols(m) = -Matrix::Identity(m, m);
  Vector standard_cost = Vector::Zero(n + m);
  standard_cost.head(n) = inst.cost;

  std::vector<Index> basis(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) basis[static_cast<size_t>(i)] = i;
  bool found = false;
  double best_cost = 0.0;
  LpVertexSolution best;

  auto consider = [&](const std::vector<Index>& cols) {
    Matrix basis_mat(m, m);
    Vector basis_cost(m);
    for (Index j = 0; j < m; ++j) {
      basis_mat.col(j) = standard.col(cols[static_cast<size_t>(j)]);
      basis_cost(j) = standard_cost(cols[static_cast<size_t>(j)]);
    }
    Eigen::FullPivLU<Matrix> lu(basis_mat);
    if (!lu.isInvertible()) return;
    const Vector xb = lu.solve(inst.requirements);
    if (xb.minCoeff() < -kTol) return;
    const double cost = basis_cost.dot(xb);
    if (found && cost >= best_cost - kTol) return;
    // Multipliers of the candidate basis; keep it only if they certify
    // optimality (all reduced costs nonnegative).
    const Vector lambda = lu.transpose().solve(basis_cost);
    if (lambda.minCoeff() < -kTol) return;
    const Vector nu = inst.cost - inst.nutrients.transpose() * lambda;
    if (nu.minCoeff() < -kTol) return;
    Vector x = Vector::Zero(n);
    for (Index j = 0; j < m; ++j) {
      const Index col = cols[static_cast<size_t>(j)];
      if (col < n) x(col) = std::max(xb(j), 0.0);
    }
    found = true;
    best_cost = cost;
    best = LpVertexSolution{x, lambda.cwiseMax(0.0), nu.cwiseMax(0.0), cost};
  };

  // Lexicographic subset walk over all m-column bases.
  while (true) {
    consider(basis);
    Index pos = m - 1;
    while (pos >= 0 &&
           basis[static_cast<size_t>(pos)] == n + m - (m - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++basis[static_cast<size_t>(pos)];
    for (Index j = pos + 1; j < m; ++j) {
      basis[static_cast<size_t>(j)] = basis[static_cast<size_t>(j - 1)] + 1;
    }
  }
  if (!found) {
    throw OracleFailure(
        "vertex oracle: no basis certified optimality; the program is "
        "infeasible or numerically degenerate");
  }
  return best;
}

// Synthetic instance with guaranteed feasibility: costs in [1, 10],
// nutrient densities in [0, 1], and requirements set to 80% of what a
// strictly positive reference diet provides.
inline DietInstance gen_random_diet(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) {
    throw DimensionMismatch("gen_random_diet: dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost_dist(1.0, 10.0);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  std::uniform_real_distribution<double> ref_diet(0.5, 1.5);
  DietInstance inst;
  inst.cost = Vector(n);
  for (Index j = 0; j < n; ++j) inst.cost(j) = cost_dist(rng);
  inst.nutrients = Matrix(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) inst.nutrients(i, j) = density(rng);
  }
  Vector x_ref(n);
  for (Index j = 0; j < n; ++j) x_ref(j) = ref_diet(rng);
  inst.requirements = 0.8 * (inst.nutrients * x_ref);
  return inst;
}

}  // namespace pdk

#endif  // PDK_DIET_HPP_
