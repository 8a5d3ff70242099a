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

// Optimality evidence for candidate primal/dual pairs: objective values on
// both sides, the duality gap, and the four KKT residual groups in the
// infinity norm. A solver's "converged" claim is always backed by one of
// these certificates rather than by iterate stagnation.

#ifndef PDK_CERTIFICATES_HPP_
#define PDK_CERTIFICATES_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "pdk/convex.hpp"
#include "pdk/linalg.hpp"

namespace pdk {

struct Certificate {
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;       // primal_obj - dual_obj
  double rel_gap = 0.0;   // |gap| / (1 + |primal_obj|)
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double complementarity = 0.0;

  double max_residual() const {
    return std::max({stationarity, primal_feasibility, dual_feasibility,
                     complementarity});
  }
};

namespace detail {

inline void finish_gap(Certificate* cert) {
  cert->gap = cert->primal_obj - cert->dual_obj;
  cert->rel_gap = std::abs(cert->gap) / (1.0 + std::abs(cert->primal_obj));
}

inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double neg_part_inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : inf_norm(v.cwiseMin(0.0));
}

}  // namespace detail

enum class StopMode { kResidualsOnly, kGapOnly, kBoth };

struct StopRule {
  StopMode mode = StopMode::kBoth;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  double tol_gap = 1e-6;
};

// All comparisons are inclusive so a residual exactly at its tolerance
// stops the run.
inline bool check_stop(const StopRule& rule, double primal_res,
                       double dual_res, double rel_gap) {
  const bool residuals_ok =
      primal_res <= rule.tol_primal && dual_res <= rule.tol_dual;
  const bool gap_ok = rel_gap <= rule.tol_gap;
  switch (rule.mode) {
    case StopMode::kResidualsOnly:
      return residuals_ok;
    case StopMode::kGapOnly:
      return gap_ok;
    case StopMode::kBoth:
      return residuals_ok && gap_ok;
  }
  return false;
}

// Certificate for min 1/2 |Ax - b|^2 over x >= 0 and its dual
// max -1/2 |l|^2 - b^T l over A^T l >= 0. The multiplier on x >= 0 defaults
// to A^T l, the value complementary slackness forces at an optimum.
inline Certificate nnls_certificate(const Matrix& a, const Vector& b,
                                    const Vector& x, const Vector& lambda,
                                    const std::optional<Vector>& mu = {}) {
  if (a.rows() != b.size() || a.cols() != x.size() ||
      lambda.size() != b.size() || (mu && mu->size() != x.size())) {
    throw DimensionMismatch("nnls_certificate: inconsistent dimensions");
  }
  const Vector residual = a * x - b;
  const Vector atl = a.transpose() * lambda;
  const Vector multiplier = mu ? *mu : atl;

  Certificate cert;
  cert.primal_obj = 0.5 * residual.squaredNorm();
  cert.dual_obj = -0.5 * lambda.squaredNorm() - b.dot(lambda);
  cert.stationarity =
      detail::inf_norm(a.transpose() * residual - multiplier);
  cert.primal_feasibility = detail::neg_part_inf_norm(x);
  cert.dual_feasibility = detail::neg_part_inf_norm(atl);
  cert.complementarity = detail::inf_norm(x.cwiseProduct(atl));
  detail::finish_gap(&cert);
  return cert;
}

// Splitting residuals for the consensus pair (x, y) with y tracking Ax - b:
// r is the constraint violation, s the dual movement induced by the y step.
inline std::pair<Vector, Vector> admm_residuals(const Matrix& a,
                                                const Vector& b,
                                                const Vector& x,
                                                const Vector& y,
                                                const Vector& y_prev,
                                                double rho) {
  if (a.rows() != b.size() || a.cols() != x.size() || y.size() != b.size() ||
      y_prev.size() != b.size()) {
    throw DimensionMismatch("admm_residuals: inconsistent dimensions");
  }
  if (!(rho > 0.0)) throw Error("admm_residuals: rho must be positive");
  Vector r = a * x - b - y;
  Vector s = rho * (a.transpose() * (y - y_prev));
  return {std::move(r), std::move(s)};
}

// Certificate for min c^T x s.t. Ax >= b, x >= 0 against the dual
// max b^T l s.t. A^T l + n = c, l >= 0, n >= 0. Stationarity is the dual
// equality defect; both feasibility fields fold in their sign constraints.
inline Certificate lp_certificate(const ConeProgram& lp, const Vector& x,
                                  const Vector& lambda, const Vector& nu) {
  validate(lp);
  if (x.size() != lp.c.size() || lambda.size() != lp.b.size() ||
      nu.size() != lp.c.size()) {
    throw DimensionMismatch("lp_certificate: inconsistent dimensions");
  }
  const Vector slack = lp.a * x - lp.b;

  Certificate cert;
  cert.primal_obj = lp.c.dot(x);
  cert.dual_obj = lp.b.dot(lambda);
  cert.stationarity =
      detail::inf_norm(lp.a.transpose() * lambda + nu - lp.c);
  cert.primal_feasibility = std::max(detail::neg_part_inf_norm(slack),
                                     detail::neg_part_inf_norm(x));
  cert.dual_feasibility = std::max(detail::neg_part_inf_norm(lambda),
                                   detail::neg_part_inf_norm(nu));
  cert.complementarity = std::max(detail::inf_norm(lambda.cwiseProduct(slack)),
                                  detail::inf_norm(nu.cwiseProduct(x)));
  detail::finish_gap(&cert);
  return cert;
}

}  // namespace pdk

#endif  // PDK_CERTIFICATES_HPP_
