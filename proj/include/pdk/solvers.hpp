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

// First-order iterative schemes sharing one report shape:
//
//   solve_pdg             projected gradient descent/ascent on the
//                         nonnegative least-squares saddle
//   solve_admm            primal splitting of least squares with an inner
//                         projected-gradient x step
//   solve_admm_dual_nnls  scaled-form splitting on the dual, one SPD factor
//   solve_pdhg            primal-dual hybrid gradient on a generic saddle
//   solve_gda             alternating descent/ascent on the dual Lagrangian
//                         via the computation-graph gradients
//   solve_consensus_admm  block-separable dual splitting with a global
//                         consensus variable (optionally multithreaded)
//
// Convergence is certificate-gated: a solver reports Converged only when
// its KKT residuals meet the tolerances and the relative duality gap is at
// or below tol_gap.

#ifndef PDK_SOLVERS_HPP_
#define PDK_SOLVERS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pdk/autodiff.hpp"
#include "pdk/certificates.hpp"
#include "pdk/convex.hpp"
#include "pdk/linalg.hpp"

namespace pdk {

enum class Termination { kConverged, kMaxIters, kDiverged };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "Converged";
    case Termination::kMaxIters:
      return "MaxIters";
    case Termination::kDiverged:
      return "Diverged";
  }
  return "Unknown";
}

// How to map dual iterates back to a primal point for the dual-side
// methods. kSupport solves a least-squares system on the inactive set;
// kDirect clamps A^T lambda, the shortcut some references use even though
// that expression is the multiplier on x >= 0, not x itself.
enum class Recovery { kSupport, kDirect };

struct StepConfig {
  double tau = 0.0;    // primal step; 0 selects the method's safe default
  double sigma = 0.0;  // dual step; 0 selects the method's safe default
  double theta = 1.0;  // extrapolation weight in [0, 1]
  double rho = 1.0;    // splitting penalty
  double rho_consensus = 1.0;
  double lr = 1e-2;    // descent/ascent learning rate
  int max_iters = 10000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  double tol_gap = 1e-6;
  int inner_max_iters = 500;
  double inner_tol = 1e-10;
  Recovery recovery = Recovery::kSupport;
  bool parallel_blocks = false;
};

inline void validate(const StepConfig& cfg) {
  if (cfg.tau < 0.0 || cfg.sigma < 0.0) {
    throw Error("step sizes must be nonnegative (0 selects the default)");
  }
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
    throw Error("extrapolation weight must lie in [0, 1]");
  }
  if (!(cfg.rho > 0.0) || !(cfg.rho_consensus > 0.0)) {
    throw Error("penalty parameters must be positive");
  }
  if (!(cfg.lr > 0.0)) throw Error("learning rate must be positive");
  if (cfg.max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(cfg.tol_primal > 0.0) || !(cfg.tol_dual > 0.0) ||
      !(cfg.tol_gap > 0.0)) {
    throw Error("tolerances must be positive");
  }
}

// min_x G(x) + F(Kx) written as min_x max_y <Kx, y> + G(x) - F*(y).
struct SaddleProblem {
  Matrix k;
  SeparableFn g;
  SeparableFn fstar;
};

inline void validate(const SaddleProblem& p) {
  require_finite(p.k, "saddle coupling matrix");
  validate(p.g);
  validate(p.fstar);
  if (fn_dim(p.g) != p.k.cols() || fn_dim(p.fstar) != p.k.rows()) {
    throw DimensionMismatch("saddle problem dimensions are inconsistent");
  }
}

// min 1/2 |y|^2 over x >= 0 with the splitting constraint Ax - b = y.
struct SplitProblem {
  Matrix a;
  Vector b;
};

inline void validate(const SplitProblem& p) {
  require_finite(p.a, "split problem matrix");
  require_finite(p.b, "split problem rhs");
  if (p.a.rows() != p.b.size() || p.a.rows() < 1 || p.a.cols() < 1) {
    throw DimensionMismatch("split problem dimensions are inconsistent");
  }
}

// Snapshot of whatever iterates a method maintains; unused fields stay
// empty. Consensus runs stack their per-block vectors in block order.
struct IterateState {
  Vector x;
  Vector y;
  Vector z;
  Vector lambda;
  Vector mu;
  Vector u;
  Vector v;
  Vector xbar;
  int iter = 0;
};

struct SolveReport {
  std::string solver;
  Termination termination = Termination::kMaxIters;
  int iterations = 0;
  double objective = 0.0;
  IterateState state;
  Certificate certificate;
};

using Observer = std::function<void(int, const IterateState&)>;

namespace detail {

constexpr double kDivergenceGuard = 1e12;

inline bool diverged(const Vector& v) {
  return v.size() > 0 && (!v.allFinite() || v.cwiseAbs().maxCoeff() >
                                                kDivergenceGuard);
}

// Certificate-backed stop: feasibility and slackness on the primal side,
// stationarity and sign feasibility on the dual side, plus the gap.
inline bool certified_stop(const Certificate& cert, const StepConfig& cfg) {
  const StopRule rule{StopMode::kBoth, cfg.tol_primal, cfg.tol_dual,
                      cfg.tol_gap};
  const double primal_res =
      std::max(cert.primal_feasibility, cert.complementarity);
  const double dual_res = std::max(cert.stationarity, cert.dual_feasibility);
  return check_stop(rule, primal_res, dual_res, cert.rel_gap);
}

}  // namespace detail

// Maps a dual iterate of the nonnegative least-squares problem to a primal
// candidate. Support mode: complementary slackness pins x to zero wherever
// the multiplier estimate A^T lambda is active, and y* = lambda turns the
// constraint into A x = b + lambda on the remaining columns, solved in the
// least-squares sense. Direct mode: clamp(A^T lambda, 0) verbatim.
inline Vector nnls_recover_primal(const Matrix& a, const Vector& b,
                                  const Vector& lambda,
                                  Recovery mode = Recovery::kSupport) {
  const Vector atl = a.transpose() * lambda;
  if (mode == Recovery::kDirect) {
    return atl.cwiseMax(0.0);
  }
  const double tol_active = 1e-6 * (1.0 + detail::inf_norm(atl));
  std::vector<Index> support;
  for (Index i = 0; i < atl.size(); ++i) {
    if (atl(i) <= tol_active) support.push_back(i);
  }
  Vector x = Vector::Zero(a.cols());
  if (support.empty()) return x;
  Matrix a_s(a.rows(), static_cast<Index>(support.size()));
  for (size_t j = 0; j < support.size(); ++j) {
    a_s.col(static_cast<Index>(j)) = a.col(support[j]);
  }
  const Vector x_s = lstsq_min_norm(a_s, b + lambda);
  for (size_t j = 0; j < support.size(); ++j) {
    x(support[j]) = std::max(x_s(static_cast<Index>(j)), 0.0);
  }
  return x;
}

// Projected gradient descent on x interleaved with projected ascent on the
// multiplier of x >= 0:
//   x   <- P+(x - tau (A^T (A x - b) - mu))
//   mu  <- P+(mu - sigma x)
// From a cold start the mu iterate can never leave the origin (x >= 0 after
// projection keeps the ascent direction nonpositive), so the report carries
// the certificate-implied duals lambda = A x - b and mu = A^T lambda
// instead of the raw ascent variable.
inline SolveReport solve_pdg(const Matrix& a, const Vector& b,
                             StepConfig cfg = {},
                             const Observer& observer = {}) {
  require_finite(a, "matrix");
  require_finite(b, "rhs");
  if (a.rows() != b.size()) {
    throw DimensionMismatch("solve_pdg: A rows != b size");
  }
  validate(cfg);
  const double norm_a = op_norm_est(a);
  const double tau =
      cfg.tau > 0.0 ? cfg.tau : (norm_a > 0.0 ? 1.0 / (norm_a * norm_a) : 1.0);
  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : tau;

  SolveReport report;
  report.solver = "pdg";
  Vector x = Vector::Zero(a.cols());
  Vector mu_iter = Vector::Zero(a.cols());
  for (int k = 1; k <= cfg.max_iters; ++k) {
    x = (x - tau * (a.transpose() * (a * x - b) - mu_iter)).cwiseMax(0.0);
    mu_iter = (mu_iter - sigma * x).cwiseMax(0.0);

    const Vector lambda = a * x - b;
    report.certificate = nnls_certificate(a, b, x, lambda);
    report.iterations = k;
    report.state.x = x;
    report.state.lambda = lambda;
    report.state.mu = a.transpose() * lambda;
    report.state.iter = k;
    if (observer) observer(k, report.state);
    if (detail::diverged(x)) {
      report.termination = Termination::kDiverged;
      break;
    }
    if (detail::certified_stop(report.certificate, cfg)) {
      report.termination = Termination::kConverged;
      break;
    }
  }
  report.objective = report.certificate.primal_obj;
  return report;
}

namespace detail {

// Inner solver for the splitting x step:
//   min_{x >= 0} lambda^T A x + (rho/2) |A x - b - y|^2.
// Plain projected gradient with the safe 1/(rho |A|^2) step, run until the
// unit-step projected-gradient residual drops below inner_tol.
inline Vector admm_x_update(const Matrix& a, const Vector& b, const Vector& y,
                            const Vector& lambda, double rho, Vector x,
                            double inv_lipschitz, const StepConfig& cfg) {
  for (int it = 0; it < cfg.inner_max_iters; ++it) {
    const Vector grad =
        a.transpose() * (lambda + rho * (a * x - b - y));
    x = (x - inv_lipschitz * grad).cwiseMax(0.0);
    const double residual = (x - (x - grad).cwiseMax(0.0)).cwiseAbs().maxCoeff();
    if (residual <= cfg.inner_tol) break;
  }
  return x;
}

}  // namespace detail

// Splitting method on min 1/2 |y|^2 s.t. Ax - b = y, x >= 0:
//   x      argmin of the augmented Lagrangian over x >= 0 (inner loop)
//   y      (rho (A x - b) + lambda) / (1 + rho)       closed form
//   lambda lambda + rho (A x - b - y)
// Stops when the splitting residuals r = Ax - b - y and s = rho A^T dy meet
// the tolerances and the certificate gap closes.
inline SolveReport solve_admm(const SplitProblem& split, StepConfig cfg = {},
                              const Observer& observer = {}) {
  validate(split);
  validate(cfg);
  const Matrix& a = split.a;
  const Vector& b = split.b;
  const double norm_a = op_norm_est(a);
  const double inner_step =
      norm_a > 0.0 ? 1.0 / (cfg.rho * norm_a * norm_a) : 1.0;

  SolveReport report;
  report.solver = "admm";
  Vector x = Vector::Zero(a.cols());
  Vector y = Vector::Zero(b.size());
  Vector lambda = Vector::Zero(b.size());
  for (int k = 1; k <= cfg.max_iters; ++k) {
    x = detail::admm_x_update(a, b, y, lambda, cfg.rho, std::move(x),
                              inner_step, cfg);
    const Vector y_prev = y;
    y = (cfg.rho * (a * x - b) + lambda) / (1.0 + cfg.rho);
    lambda += cfg.rho * (a * x - b - y);

    const auto [r, s] = admm_residuals(a, b, x, y, y_prev, cfg.rho);
    report.certificate = nnls_certificate(a, b, x, lambda);
    report.iterations = k;
    report.state.x = x;
    report.state.y = y;
    report.state.lambda = lambda;
    report.state.iter = k;
    if (observer) observer(k, report.state);
    if (detail::diverged(x) || detail::diverged(lambda)) {
      report.termination = Termination::kDiverged;
      break;
    }
    if (r.norm() <= cfg.tol_primal && s.norm() <= cfg.tol_dual &&
        report.certificate.rel_gap <= cfg.tol_gap) {
      report.termination = Termination::kConverged;
      break;
    }
  }
  report.objective = report.certificate.primal_obj;
  return report;
}

// Splitting method on the dual
//   min 1/2 |lambda|^2 + b^T lambda  s.t.  A^T lambda = mu, mu >= 0
// in scaled form with running sum upsilon:
//   lambda  solves (I + rho A A^T) lambda = -b + rho A (mu - upsilon),
//           factored once
//   mu      clamp(A^T lambda + upsilon, 0)
//   upsilon upsilon + A^T lambda - mu
// The primal candidate is recovered from lambda on demand.
inline SolveReport solve_admm_dual_nnls(const Matrix& a, const Vector& b,
                                        StepConfig cfg = {},
                                        const Observer& observer = {}) {
  require_finite(a, "matrix");
  require_finite(b, "rhs");
  if (a.rows() != b.size()) {
    throw DimensionMismatch("solve_admm_dual_nnls: A rows != b size");
  }
  validate(cfg);
  const Index m = a.rows();
  const SpdFactor factor =
      spd_factor(Matrix::Identity(m, m) + cfg.rho * (a * a.transpose()));

  SolveReport report;
  report.solver = "admm-dual";
  Vector lambda = Vector::Zero(m);
  Vector mu = Vector::Zero(a.cols());
  Vector upsilon = Vector::Zero(a.cols());
  for (int k = 1; k <= cfg.max_iters; ++k) {
    lambda = spd_solve(factor, -b + cfg.rho * (a * (mu - upsilon)));
    const Vector mu_prev = mu;
    const Vector t = a.transpose() * lambda + upsilon;
    mu = t.cwiseMax(0.0);
    upsilon = t - mu;

    const double r = (a.transpose() * lambda - mu).norm();
    const double s = cfg.rho * (a * (mu - mu_prev)).norm();
    report.iterations = k;
    report.state.lambda = lambda;
    report.state.mu = mu;
    report.state.v = upsilon;
    report.state.iter = k;
    if (observer) {
      report.state.x = nnls_recover_primal(a, b, lambda, cfg.recovery);
      observer(k, report.state);
    }
    if (detail::diverged(lambda)) {
      report.termination = Termination::kDiverged;
      break;
    }
    if (r <= cfg.tol_primal && s <= cfg.tol_dual) {
      report.state.x = nnls_recover_primal(a, b, lambda, cfg.recovery);
      report.certificate = nnls_certificate(a, b, report.state.x, lambda);
      if (report.certificate.rel_gap <= cfg.tol_gap) {
        report.termination = Termination::kConverged;
        break;
      }
    }
  }
  if (report.state.x.size() == 0) {
    report.state.x = nnls_recover_primal(a, b, lambda, cfg.recovery);
  }
  report.certificate = nnls_certificate(a, b, report.state.x, lambda);
  report.objective = report.certificate.primal_obj;
  return report;
}

// One primal-dual hybrid gradient step through the generic prox operators:
//   y    <- prox_{sigma F*}(y + sigma K xbar)
//   x    <- prox_{tau G}(x - tau K^T y)
//   xbar <- x+ + theta (x+ - x)
inline void pdhg_step(const SaddleProblem& p, double tau, double sigma,
                      double theta, Vector* x, Vector* y, Vector* xbar) {
  *y = prox(p.fstar, *y + sigma * (p.k * *xbar), sigma);
  const Vector x_new = prox(p.g, *x - tau * (p.k.transpose() * *y), tau);
  *xbar = x_new + theta * (x_new - *x);
  *x = x_new;
}

// The same step with the least-squares saddle's closed forms substituted:
// the y prox collapses to (y + sigma (A xbar - b)) / (1 + sigma) and the x
// prox to a nonnegative clamp.
inline void pdhg_step_nnls(const Matrix& a, const Vector& b, double tau,
                           double sigma, double theta, Vector* x, Vector* y,
                           Vector* xbar) {
  *y = (*y + sigma * (a * *xbar - b)) / (1.0 + sigma);
  const Vector x_new = (*x - tau * (a.transpose() * *y)).cwiseMax(0.0);
  *xbar = x_new + theta * (x_new - *x);
  *x = x_new;
}

// Primal-dual hybrid gradient on a generic saddle problem. Step sizes
// default to 0.95/|K| each, and the contraction requirement
// tau sigma |K|^2 <= 1 is enforced up front. Convergence is certified only
// for the least-squares saddle shape (indicator-of-orthant G against a
// unit-quadratic F*); other shapes run for the configured budget.
inline SolveReport solve_pdhg(const SaddleProblem& p, StepConfig cfg = {},
                              const Observer& observer = {}) {
  validate(p);
  validate(cfg);
  const double norm_k = op_norm_est(p.k);
  const double tau =
      cfg.tau > 0.0 ? cfg.tau : (norm_k > 0.0 ? 0.95 / norm_k : 1.0);
  const double sigma =
      cfg.sigma > 0.0 ? cfg.sigma : (norm_k > 0.0 ? 0.95 / norm_k : 1.0);
  if (tau * sigma * norm_k * norm_k > 1.0 + 1e-9) {
    throw StepSizeViolation("tau * sigma * |K|^2 = " +
                            std::to_string(tau * sigma * norm_k * norm_k) +
                            " exceeds 1");
  }

  const auto* g_ind = std::get_if<IndicatorCone>(&p.g);
  const auto* f_quad = std::get_if<QuadLin>(&p.fstar);
  const bool nnls_shape = g_ind != nullptr &&
                          std::holds_alternative<NonnegOrthant>(g_ind->cone) &&
                          f_quad != nullptr && f_quad->alpha == 1.0;

  SolveReport report;
  report.solver = "pdhg";
  Vector x = Vector::Zero(p.k.cols());
  Vector y = Vector::Zero(p.k.rows());
  Vector xbar = x;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    pdhg_step(p, tau, sigma, cfg.theta, &x, &y, &xbar);

    report.iterations = k;
    report.state.x = x;
    report.state.y = y;
    report.state.xbar = xbar;
    report.state.iter = k;
    if (nnls_shape) {
      report.certificate = nnls_certificate(p.k, f_quad->linear, x, y);
      report.state.lambda = y;
    }
    if (observer) observer(k, report.state);
    if (detail::diverged(x) || detail::diverged(y)) {
      report.termination = Termination::kDiverged;
      break;
    }
    if (nnls_shape && detail::certified_stop(report.certificate, cfg)) {
      report.termination = Termination::kConverged;
      break;
    }
  }
  report.objective = nnls_shape ? report.certificate.primal_obj : 0.0;
  return report;
}

// Alternating descent/ascent on the dual Lagrangian
//   L(lambda, mu; z) = 1/2 |lambda|^2 + b^T lambda + z^T (A^T lambda - mu)
// with gradients taken from the computation graph. Descent on (lambda, mu)
// with a clamp keeping mu >= 0, then ascent on z at the refreshed point.
// The exit test is feasibility of the dualized constraint A^T lambda = mu.
inline SolveReport solve_gda(const Matrix& a, const Vector& b,
                             StepConfig cfg = {},
                             const Observer& observer = {}) {
  require_finite(a, "matrix");
  require_finite(b, "rhs");
  if (a.rows() != b.size()) {
    throw DimensionMismatch("solve_gda: A rows != b size");
  }
  validate(cfg);
  const Index m = a.rows();
  const Index n = a.cols();

  CompGraph graph;
  const int n_lambda = graph.input(m);
  const int n_mu = graph.input(n);
  const int n_z = graph.input(n);
  const int n_b = graph.input(m);
  const int n_quad = graph.half_sqnorm(n_lambda);
  const int n_blam = graph.dot(n_b, n_lambda);
  const int n_atl = graph.matvec(a.transpose(), n_lambda);
  const int n_residual = graph.sub(n_atl, n_mu);
  const int n_coupling = graph.dot(n_z, n_residual);
  graph.set_output(graph.add(graph.add(n_quad, n_blam), n_coupling));

  const auto grad_of = [&](const Vector& lambda, const Vector& mu,
                           const Vector& z, int wanted) -> Vector {
    const Bindings bindings{{n_lambda, lambda}, {n_mu, mu}, {n_z, z}, {n_b, b}};
    for (const auto& [id, g] : grad_chain(graph, bindings)) {
      if (id == wanted) return g;
    }
    throw Error("gradient for requested node not found");
  };

  SolveReport report;
  report.solver = "gda";
  Vector lambda = Vector::Zero(m);
  Vector mu = Vector::Zero(n);
  Vector z = Vector::Zero(n);
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const Vector g_lambda = grad_of(lambda, mu, z, n_lambda);
    const Vector g_mu = grad_of(lambda, mu, z, n_mu);
    lambda -= cfg.lr * g_lambda;
    mu = (mu - cfg.lr * g_mu).cwiseMax(0.0);
    z += cfg.lr * grad_of(lambda, mu, z, n_z);

    report.iterations = k;
    report.state.lambda = lambda;
    report.state.mu = mu;
    report.state.z = z;
    report.state.x = (-z).cwiseMax(0.0);
    report.state.iter = k;
    if (observer) observer(k, report.state);
    if (detail::diverged(lambda) || detail::diverged(z)) {
      report.termination = Termination::kDiverged;
      break;
    }
    if ((a.transpose() * lambda - mu).norm() <= cfg.tol_dual) {
      report.certificate = nnls_certificate(a, b, report.state.x, lambda);
      if (report.certificate.rel_gap <= cfg.tol_gap) {
        report.termination = Termination::kConverged;
        break;
      }
    }
  }
  report.certificate = nnls_certificate(a, b, report.state.x, lambda);
  report.objective = report.certificate.primal_obj;
  return report;
}

// Block-separable dual splitting with a global consensus variable. Each
// block keeps its own multiplier system (factored once); an iteration runs
//   lambda_i  solves (I + rho A_i A_i^T) lambda_i = -b_i + rho A_i (z_i - u_i)
//   z_i       alpha (A_i^T lambda_i + u_i) + beta (z - v_i)
//   z         clamp(mean_i(z_i + v_i), 0)
//   u_i       u_i + A_i^T lambda_i - z_i
//   v_i       v_i + z_i - z
// with alpha = rho/(rho+rho_c), beta = rho_c/(rho+rho_c). Block updates are
// independent within an iteration and may run on threads; the consensus
// mean is always reduced in block order so parallel and serial execution
// agree to the last bit modulo scheduling-free summation.
inline SolveReport solve_consensus_admm(const std::vector<SplitProblem>& blocks,
                                        StepConfig cfg = {},
                                        const Observer& observer = {}) {
  if (blocks.empty()) {
    throw DimensionMismatch("consensus solve needs at least one block");
  }
  const Index n = blocks.front().a.cols();
  for (const SplitProblem& blk : blocks) {
    validate(blk);
    if (blk.a.cols() != n) {
      throw DimensionMismatch("consensus blocks must share column count");
    }
  }
  validate(cfg);
  const size_t nblocks = blocks.size();
  const double alpha = cfg.rho / (cfg.rho + cfg.rho_consensus);
  const double beta = cfg.rho_consensus / (cfg.rho + cfg.rho_consensus);

  std::vector<SpdFactor> factors;
  factors.reserve(nblocks);
  for (const SplitProblem& blk : blocks) {
    const Index m = blk.a.rows();
    factors.push_back(spd_factor(Matrix::Identity(m, m) +
                                 cfg.rho * (blk.a * blk.a.transpose())));
  }

  std::vector<Vector> lambda(nblocks), zi(nblocks), u(nblocks), v(nblocks);
  std::vector<Vector> atl(nblocks);
  for (size_t i = 0; i < nblocks; ++i) {
    lambda[i] = Vector::Zero(blocks[i].a.rows());
    zi[i] = Vector::Zero(n);
    u[i] = Vector::Zero(n);
    v[i] = Vector::Zero(n);
    atl[i] = Vector::Zero(n);
  }
  Vector z = Vector::Zero(n);

  // Stacked system used for primal recovery and the certificate.
  Index total_rows = 0;
  for (const SplitProblem& blk : blocks) total_rows += blk.a.rows();
  Matrix a_stacked(total_rows, n);
  Vector b_stacked(total_rows);
  {
    Index row = 0;
    for (const SplitProblem& blk : blocks) {
      a_stacked.middleRows(row, blk.a.rows()) = blk.a;
      b_stacked.segment(row, blk.a.rows()) = blk.b;
      row += blk.a.rows();
    }
  }
  const auto stack_duals = [&]() {
    Vector out(total_rows);
    Index row = 0;
    for (size_t i = 0; i < nblocks; ++i) {
      out.segment(row, lambda[i].size()) = lambda[i];
      row += lambda[i].size();
    }
    return out;
  };

  const auto block_update = [&](size_t i) {
    lambda[i] = spd_solve(factors[i],
                          -blocks[i].b + cfg.rho * (blocks[i].a * (zi[i] - u[i])));
    atl[i] = blocks[i].a.transpose() * lambda[i];
    zi[i] = alpha * (atl[i] + u[i]) + beta * (z - v[i]);
  };

  SolveReport report;
  report.solver = "consensus";
  for (int k = 1; k <= cfg.max_iters; ++k) {
    if (cfg.parallel_blocks && nblocks > 1) {
      std::vector<std::thread> workers;
      workers.reserve(nblocks);
      for (size_t i = 0; i < nblocks; ++i) {
        workers.emplace_back(block_update, i);
      }
      for (std::thread& w : workers) w.join();
    } else {
      for (size_t i = 0; i < nblocks; ++i) block_update(i);
    }

    // Fixed-order reduction: the mean is summed by ascending block index
    // regardless of which thread finished first.
    Vector mean = Vector::Zero(n);
    for (size_t i = 0; i < nblocks; ++i) mean += zi[i] + v[i];
    z = (mean / static_cast<double>(nblocks)).cwiseMax(0.0);
    double consensus_res = 0.0;
    double fit_res = 0.0;
    for (size_t i = 0; i < nblocks; ++i) {
      u[i] += atl[i] - zi[i];
      v[i] += zi[i] - z;
      fit_res = std::max(fit_res, detail::inf_norm(atl[i] - zi[i]));
      consensus_res = std::max(consensus_res, detail::inf_norm(zi[i] - z));
    }

    report.iterations = k;
    report.state.z = z;
    report.state.iter = k;
    if (observer) {
      const Vector stacked = stack_duals();
      report.state.lambda = stacked;
      report.state.x =
          nnls_recover_primal(a_stacked, b_stacked, stacked, cfg.recovery);
      observer(k, report.state);
    }
    bool blown = detail::diverged(z);
    for (size_t i = 0; i < nblocks && !blown; ++i) {
      blown = detail::diverged(lambda[i]);
    }
    if (blown) {
      report.termination = Termination::kDiverged;
      break;
    }
    if (fit_res <= cfg.tol_primal && consensus_res <= cfg.tol_dual) {
      const Vector stacked = stack_duals();
      report.state.x =
          nnls_recover_primal(a_stacked, b_stacked, stacked, cfg.recovery);
      report.certificate =
          nnls_certificate(a_stacked, b_stacked, report.state.x, stacked);
      if (report.certificate.rel_gap <= cfg.tol_gap) {
        report.state.lambda = stacked;
        report.termination = Termination::kConverged;
        break;
      }
    }
  }
  if (report.state.lambda.size() == 0) report.state.lambda = stack_duals();
  if (report.state.x.size() == 0) {
    report.state.x = nnls_recover_primal(a_stacked, b_stacked,
                                         report.state.lambda, cfg.recovery);
  }
  report.certificate = nnls_certificate(a_stacked, b_stacked, report.state.x,
                                        report.state.lambda);
  report.objective = report.certificate.primal_obj;
  return report;
}

}  // namespace pdk

#endif  // PDK_SOLVERS_HPP_
