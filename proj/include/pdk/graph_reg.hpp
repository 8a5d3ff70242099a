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

// Graph-smoothed quadratic minimization in two flavors.
//
// Unconstrained: min_z q |y - z|^2 + z^T L z, whose dual
//   max_l -|l|^2 / (4q) - l^T Ldag l / 4 + l^T y
// trades the (possibly singular) Laplacian for its pseudoinverse; the
// primal point returns as z = y - l / (2q).
//
// Constrained: min_{x >= 0} 1/2 |Ax - b|^2 + 1/2 x^T L x, whose dual
//   max -1/2 |l|^2 - l^T b - 1/2 (A^T l - m)^T Ldag (A^T l - m)
// over l free, m >= 0 carries an implicit domain restriction: the dual
// value is -inf unless A^T l - m is orthogonal to ker(L). Ascent iterates
// are therefore projected jointly onto {m >= 0} intersected with that
// subspace condition. The primal recovery x = Ldag(m - A^T l) only fixes x
// up to ker(L); the support-restricted solve of the regularized normal
// equations supplies the missing kernel component.

#ifndef PDK_GRAPH_REG_HPP_
#define PDK_GRAPH_REG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pdk/certificates.hpp"
#include "pdk/errors.hpp"
#include "pdk/linalg.hpp"
#include "pdk/solvers.hpp"

namespace pdk {

inline void validate_graph_matrix(const Matrix& laplacian) {
  require_finite(laplacian, "graph matrix");
  const Index n = laplacian.rows();
  if (n < 1 || laplacian.cols() != n) {
    throw DimensionMismatch("graph matrix must be square");
  }
  const double scale = std::max(1.0, laplacian.cwiseAbs().maxCoeff());
  if ((laplacian - laplacian.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale) {
    throw NotSymmetric("graph matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian,
                                            Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw NotPositiveDefinite("graph matrix is not positive semidefinite");
  }
}

struct LrmpUnconstrained {
  double q = 1.0;
  Vector y;
  Matrix laplacian;
};

inline void validate(const LrmpUnconstrained& inst) {
  validate_graph_matrix(inst.laplacian);
  require_finite(inst.y, "fidelity target");
  if (!(inst.q > 0.0) || !std::isfinite(inst.q)) {
    throw Error("fidelity weight q must be positive");
  }
  if (inst.y.size() != inst.laplacian.rows()) {
    throw DimensionMismatch("fidelity target does not match the graph size");
  }
}

struct LrmpConstrained {
  Matrix a;
  Vector b;
  Matrix laplacian;
};

inline void validate(const LrmpConstrained& inst) {
  validate_graph_matrix(inst.laplacian);
  require_finite(inst.a, "data matrix");
  require_finite(inst.b, "observations");
  if (inst.a.rows() != inst.b.size() || inst.a.rows() < 1 ||
      inst.a.cols() != inst.laplacian.rows()) {
    throw DimensionMismatch("constrained instance dimensions are "
                            "inconsistent");
  }
}

inline double lrmp_objective(const LrmpUnconstrained& inst, const Vector& z) {
  return inst.q * (inst.y - z).squaredNorm() + z.dot(inst.laplacian * z);
}

inline double lr_nnls_objective(const LrmpConstrained& inst,
                                const Vector& x) {
  return 0.5 * (inst.a * x - inst.b).squaredNorm() +
         0.5 * x.dot(inst.laplacian * x);
}

// z* = (qI + L)^{-1} q y; the shifted matrix is positive definite for any
// positive q, so a Cholesky solve settles it.
inline Vector lrmp_closed_form(const LrmpUnconstrained& inst) {
  validate(inst);
  const Index n = inst.y.size();
  const Matrix shifted =
      inst.q * Matrix::Identity(n, n) + inst.laplacian;
  return spd_solve(spd_factor(shifted), inst.q * inst.y);
}

inline double lrmp_dual_value(const LrmpUnconstrained& inst,
                              const Matrix& lap_pinv, const Vector& lambda) {
  return -lambda.squaredNorm() / (4.0 * inst.q) -
         0.25 * lambda.dot(lap_pinv * lambda) + lambda.dot(inst.y);
}

// Residuals for a candidate pair: the primal gradient at z, the kernel
// component of lambda (the dual value is finite only on the range of L,
// so that component is a dual feasibility violation), and the gap between
// the two objective values evaluated on the feasible part of lambda.
inline Certificate lrmp_certificate(const LrmpUnconstrained& inst,
                                    const Matrix& lap_pinv,
                                    const Matrix& kernel, const Vector& z,
                                    const Vector& lambda) {
  if (z.size() != inst.y.size() || lambda.size() != inst.y.size()) {
    throw DimensionMismatch("lrmp_certificate: inconsistent dimensions");
  }
  Certificate cert;
  cert.primal_obj = lrmp_objective(inst, z);
  Vector lam_range = lambda;
  if (kernel.cols() > 0) {
    lam_range -= kernel * (kernel.transpose() * lambda);
  }
  cert.dual_obj = lrmp_dual_value(inst, lap_pinv, lam_range);
  cert.stationarity = detail::inf_norm(2.0 * inst.q * (z - inst.y) +
                                       2.0 * (inst.laplacian * z));
  cert.dual_feasibility = detail::inf_norm(lambda - lam_range);
  detail::finish_gap(&cert);
  return cert;
}

inline Certificate lrmp_certificate(const LrmpUnconstrained& inst,
                                    const Vector& z, const Vector& lambda) {
  validate(inst);
  return lrmp_certificate(inst, pinv(inst.laplacian),
                          null_space_basis(inst.laplacian), z, lambda);
}

struct LrmpDualRun {
  SolveReport report;
  Vector lambda;
  Vector z;  // recovered primal point y - lambda / (2q)
};

// Gradient ascent on the strictly concave dual. The quadratic dual model
// is only the true dual on range(L): along ker(L) the conjugate of the
// smoothing term is +inf, which the pseudoinverse formula cannot see. The
// ascent therefore projects every gradient onto range(L); the multiplier
// stays dual-feasible and the recovery y - lambda/(2q) then carries the
// correct kernel component of the primal optimum. The curvature on the
// feasible subspace is bounded by 1/(2q) + |Ldag|/2, giving a safe
// constant step; the run stops once the projected gradient is below
// tol_dual in the max norm.
inline LrmpDualRun lrmp_dual_solve(const LrmpUnconstrained& inst,
                                   StepConfig cfg = {},
                                   const Observer& observer = {}) {
  validate(inst);
  validate(cfg);
  const Matrix lap_pinv = pinv(inst.laplacian);
  const Matrix kernel = null_space_basis(inst.laplacian);
  const double lipschitz =
      1.0 / (2.0 * inst.q) + 0.5 * op_norm_est(lap_pinv);
  const double step = cfg.tau > 0.0 ? cfg.tau : 1.0 / lipschitz;

  auto range_grad = [&](const Vector& lambda) {
    Vector g = inst.y - lambda / (2.0 * inst.q) - 0.5 * (lap_pinv * lambda);
    if (kernel.cols() > 0) g -= kernel * (kernel.transpose() * g);
    return g;
  };

  Vector lambda = Vector::Zero(inst.y.size());
  LrmpDualRun run;
  run.report.solver = "lrmp-dual";
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Vector grad = range_grad(lambda);
    lambda += step * grad;
    run.report.iterations = iter;
    if (observer) {
      IterateState state;
      state.lambda = lambda;
      state.iter = iter;
      observer(iter, state);
    }
    if (detail::diverged(lambda)) {
      run.report.termination = Termination::kDiverged;
      break;
    }
    if (detail::inf_norm(grad) <= cfg.tol_dual) {
      run.report.termination = Termination::kConverged;
      break;
    }
  }
  run.lambda = lambda;
  run.z = inst.y - lambda / (2.0 * inst.q);

  Certificate cert = lrmp_certificate(inst, lap_pinv, kernel, run.z, lambda);
  run.report.certificate = cert;
  run.report.objective = cert.primal_obj;
  run.report.state.lambda = lambda;
  run.report.state.z = run.z;
  run.report.state.iter = run.report.iterations;
  return run;
}

namespace detail {

// Projection of the stacked dual pair (lambda, mu) onto
//   {mu >= 0} int {F^T (mu - A^T lambda) = 0},
// where the columns of F span ker(L). An empty kernel reduces to a clamp.
// A one-dimensional kernel admits an exact solve: parameterizing the
// optimality system by the multiplier t of the linear constraint gives
//   lambda(t) = lambda0 + t A f,  mu(t) = clamp(mu0 - t f, 0),
// and the constraint value is monotone in t, so bisection pins it down.
// Larger kernels fall back to alternating projections with Dykstra
// corrections, which converge to the exact joint projection.
class DualFeasibleProjector {
 public:
  DualFeasibleProjector(const Matrix& a, const Matrix& kernel)
      : a_(a), kernel_(kernel) {
    if (kernel_.cols() == 1) {
      f_ = kernel_.col(0);
      if (f_.sum() < 0.0) f_ = -f_;
      af_ = a_ * f_;
    } else if (kernel_.cols() > 1) {
      const Index k = kernel_.cols();
      const Matrix af = a_ * kernel_;
      gram_ = spd_factor(af.transpose() * af + Matrix::Identity(k, k));
    }
  }

  void project(Vector* lambda, Vector* mu) const {
    if (kernel_.cols() == 0) {
      *mu = mu->cwiseMax(0.0);
      return;
    }
    if (kernel_.cols() == 1) {
      project_bisect(lambda, mu);
      return;
    }
    project_dykstra(lambda, mu);
  }

 private:
  double constraint_value(double t, const Vector& lambda0,
                          const Vector& mu0) const {
    const Vector mu = (mu0 - t * f_).cwiseMax(0.0);
    return f_.dot(mu) - af_.dot(lambda0) - t * af_.squaredNorm();
  }

  void project_bisect(Vector* lambda, Vector* mu) const {
    const Vector lambda0 = *lambda;
    const Vector mu0 = *mu;
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 200 && constraint_value(lo, lambda0, mu0) < 0.0;
         ++i) {
      lo *= 2.0;
    }
    for (int i = 0; i < 200 && constraint_value(hi, lambda0, mu0) > 0.0;
         ++i) {
      hi *= 2.0;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (constraint_value(mid, lambda0, mu0) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    *lambda = lambda0 + t * af_;
    *mu = (mu0 - t * f_).cwiseMax(0.0);
  }

  void project_dykstra(Vector* lambda, Vector* mu) const {
    const Index m = lambda->size();
    const Index n = mu->size();
    Vector lam = *lambda, muv = *mu;
    Vector p_lam = Vector::Zero(m), p_mu = Vector::Zero(n);
    Vector q_mu = Vector::Zero(n);
    const Matrix af = a_ * kernel_;
    for (int iter = 0; iter < 2000; ++iter) {
      // Subspace step on (lam + p_lam, muv + p_mu).
      const Vector cl = lam + p_lam;
      const Vector cm = muv + p_mu;
      const Vector defect = kernel_.transpose() * cm - af.transpose() * cl;
      const Vector mult = spd_solve(gram_, defect);
      const Vector nl = cl + af * mult;
      const Vector nm = cm - kernel_ * mult;
      p_lam = cl - nl;
      p_mu = cm - nm;
      // Orthant step on (nm + q_mu); lambda is free there.
      const Vector dm = nm + q_mu;
      const Vector om = dm.cwiseMax(0.0);
      q_mu = dm - om;
      const double moved =
          (lam - nl).cwiseAbs().maxCoeff() + (muv - om).cwiseAbs().maxCoeff();
      lam = nl;
      muv = om;
      if (moved <= 1e-15) break;
    }
    *lambda = lam;
    *mu = muv;
  }

  Matrix a_;
  Matrix kernel_;
  Vector f_;
  Vector af_;
  SpdFactor gram_;
};

}  // namespace detail

inline double lr_nnls_dual_value(const LrmpConstrained& inst,
                                 const Matrix& lap_pinv, const Vector& lambda,
                                 const Vector& mu) {
  const Vector r = inst.a.transpose() * lambda - mu;
  return -0.5 * lambda.squaredNorm() - lambda.dot(inst.b) -
         0.5 * r.dot(lap_pinv * r);
}

// Full KKT residual set for a candidate triple. Dual feasibility covers
// both the sign constraint on mu and the kernel-alignment constraint
// F^T (mu - A^T lambda) = 0 that keeps the dual value finite.
inline Certificate lr_nnls_certificate(const LrmpConstrained& inst,
                                       const Matrix& lap_pinv,
                                       const Matrix& kernel, const Vector& x,
                                       const Vector& lambda,
                                       const Vector& mu) {
  if (x.size() != inst.a.cols() || mu.size() != inst.a.cols() ||
      lambda.size() != inst.a.rows()) {
    throw DimensionMismatch("lr_nnls_certificate: inconsistent dimensions");
  }
  Certificate cert;
  cert.primal_obj = lr_nnls_objective(inst, x);
  cert.dual_obj = lr_nnls_dual_value(inst, lap_pinv, lambda, mu);
  cert.stationarity = detail::inf_norm(
      inst.a.transpose() * (inst.a * x - inst.b) + inst.laplacian * x - mu);
  cert.primal_feasibility = detail::neg_part_inf_norm(x);
  cert.dual_feasibility = detail::neg_part_inf_norm(mu);
  if (kernel.cols() > 0) {
    cert.dual_feasibility = std::max(
        cert.dual_feasibility,
        detail::inf_norm(kernel.transpose() *
                         (mu - inst.a.transpose() * lambda)));
  }
  cert.complementarity = detail::inf_norm(x.cwiseProduct(mu));
  detail::finish_gap(&cert);
  return cert;
}

inline Certificate lr_nnls_certificate(const LrmpConstrained& inst,
                                       const Vector& x, const Vector& lambda,
                                       const Vector& mu) {
  validate(inst);
  return lr_nnls_certificate(inst, pinv(inst.laplacian),
                             null_space_basis(inst.laplacian), x, lambda, mu);
}

// Projected gradient ascent on the constrained dual, followed by primal
// recovery. Support mode rebuilds x from the regularized normal equations
// restricted to the columns the multiplier leaves free; direct mode clamps
// the pseudoinverse expression, which misses any kernel component.
inline SolveReport lr_nnls_dual_solve(const LrmpConstrained& inst,
                                      StepConfig cfg = {},
                                      const Observer& observer = {}) {
  validate(inst);
  validate(cfg);
  const Index m = inst.a.rows();
  const Index n = inst.a.cols();
  const Matrix normal =
      inst.a.transpose() * inst.a + inst.laplacian;
  try {
    spd_factor(normal);
  } catch (const Error&) {
    throw SingularComposite(
        "A^T A + L is not positive definite; the dual recovery is "
        "ill-posed");
  }
  const Matrix lap_pinv = pinv(inst.laplacian);
  const Matrix kernel = null_space_basis(inst.laplacian);
  const detail::DualFeasibleProjector projector(inst.a, kernel);

  const double a_norm = op_norm_est(inst.a);
  const double pinv_norm = op_norm_est(lap_pinv);
  const double lipschitz = 1.0 + pinv_norm * (1.0 + a_norm) * (1.0 + a_norm);
  const double step = cfg.tau > 0.0 ? cfg.tau : 1.0 / lipschitz;

  Vector lambda = Vector::Zero(m);
  Vector mu = Vector::Zero(n);
  projector.project(&lambda, &mu);

  SolveReport report;
  report.solver = "lr-nnls-dual";
  double residual = 0.0;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Vector t = lap_pinv * (inst.a.transpose() * lambda - mu);
    Vector next_lambda = lambda + step * (-lambda - inst.b - inst.a * t);
    Vector next_mu = mu + step * t;
    projector.project(&next_lambda, &next_mu);
    residual = std::max((next_lambda - lambda).cwiseAbs().maxCoeff(),
                        (next_mu - mu).cwiseAbs().maxCoeff()) /
               step;
    lambda = next_lambda;
    mu = next_mu;
    report.iterations = iter;
    if (observer) {
      IterateState state;
      state.lambda = lambda;
      state.mu = mu;
      state.iter = iter;
      observer(iter, state);
    }
    if (detail::diverged(lambda) || detail::diverged(mu)) {
      report.termination = Termination::kDiverged;
      break;
    }
    if (residual <= cfg.tol_dual) {
      report.termination = Termination::kConverged;
      break;
    }
  }

  Vector x;
  if (cfg.recovery == Recovery::kDirect) {
    x = (lap_pinv * (mu - inst.a.transpose() * lambda)).cwiseMax(0.0);
  } else {
    const double tol_active = 1e-6 * (1.0 + detail::inf_norm(mu));
    std::vector<Index> support;
    for (Index i = 0; i < n; ++i) {
      if (mu(i) <= tol_active) support.push_back(i);
    }
    x = Vector::Zero(n);
    if (!support.empty()) {
      const Index s = static_cast<Index>(support.size());
      Matrix normal_ss(s, s);
      Vector rhs(s);
      const Vector atb = inst.a.transpose() * inst.b;
      for (Index i = 0; i < s; ++i) {
        rhs(i) = atb(support[static_cast<size_t>(i)]);
        for (Index j = 0; j < s; ++j) {
          normal_ss(i, j) = normal(support[static_cast<size_t>(i)],
                                   support[static_cast<size_t>(j)]);
        }
      }
      const Vector x_s = spd_solve(spd_factor(normal_ss), rhs);
      for (Index i = 0; i < s; ++i) {
        x(support[static_cast<size_t>(i)]) = std::max(x_s(i), 0.0);
      }
    }
  }

  const Certificate cert =
      lr_nnls_certificate(inst, lap_pinv, kernel, x, lambda, mu);
  report.certificate = cert;
  report.objective = cert.primal_obj;
  report.state.x = x;
  report.state.lambda = lambda;
  report.state.mu = mu;
  report.state.iter = report.iterations;
  return report;
}

// Laplacian of a random connected graph: a random attachment tree plus
// optional extra edges. Weights are multiples of 1/64 drawn from
// [0.5, 2.0], so every entry and row sum is exact in double precision and
// L 1 = 0 holds bit-for-bit regardless of summation order.
inline Matrix random_connected_laplacian(Index n, std::uint64_t seed,
                                         double extra_edge_prob = 0.3) {
  if (n < 1) throw DimensionMismatch("graph needs at least one vertex");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight_ticks(32, 128);  // 0.5 .. 2.0
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix lap = Matrix::Zero(n, n);
  auto add_edge = [&](Index i, Index j) {
    const double w = static_cast<double>(weight_ticks(rng)) / 64.0;
    lap(i, j) -= w;
    lap(j, i) -= w;
    lap(i, i) += w;
    lap(j, j) += w;
  };
  for (Index i = 1; i < n; ++i) {
    std::uniform_int_distribution<Index> parent(0, i - 1);
    add_edge(parent(rng), i);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (lap(i, j) == 0.0 && unif(rng) < extra_edge_prob) add_edge(i, j);
    }
  }
  return lap;
}

}  // namespace pdk

#endif  // PDK_GRAPH_REG_HPP_
