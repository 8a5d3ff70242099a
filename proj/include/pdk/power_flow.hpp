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

// Resistive loss minimization on a small DC grid surrogate:
//   min v^T G v  over the voltage box, subject to nodal power floors at
// load buses, power caps at generator buses, and thermal current limits
// per line, with the nodal power surrogate p_i(v) = v_i (Gv)_i and line
// current i_ij(v) = g_ij (v_i - v_j). Solved by a projected saddle-point
// iteration on the Lagrangian; a dense grid scan over the voltage box
// serves as the two-bus ground truth.

#ifndef PDK_POWER_FLOW_HPP_
#define PDK_POWER_FLOW_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pdk/certificates.hpp"
#include "pdk/errors.hpp"
#include "pdk/linalg.hpp"
#include "pdk/solvers.hpp"

namespace pdk {

struct OpfLine {
  Index from = 0;
  Index to = 0;
  double conductance = 0.0;
  double i_max = 0.0;
};

struct OpfInstance {
  Matrix g;  // conductance Laplacian
  Vector v_lo;
  Vector v_hi;
  std::vector<Index> loads;
  Vector demands;  // aligned with loads
  std::vector<Index> generators;
  Vector caps;  // aligned with generators
  std::vector<OpfLine> lines;
};

inline void validate(const OpfInstance& inst) {
  require_finite(inst.g, "conductance matrix");
  require_finite(inst.v_lo, "voltage lower bounds");
  require_finite(inst.v_hi, "voltage upper bounds");
  require_finite(inst.demands, "demands");
  require_finite(inst.caps, "generation caps");
  const Index n = inst.g.rows();
  if (n < 1 || inst.g.cols() != n) {
    throw DimensionMismatch("conductance matrix must be square");
  }
  const double scale = std::max(1.0, inst.g.cwiseAbs().maxCoeff());
  if ((inst.g - inst.g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NotSymmetric("conductance matrix is not symmetric");
  }
  if ((inst.g * Vector::Ones(n)).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error("conductance matrix rows must sum to zero");
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && inst.g(i, j) > 0.0) {
        throw Error("conductance matrix off-diagonals must be <= 0");
      }
    }
  }
  if (inst.v_lo.size() != n || inst.v_hi.size() != n ||
      (inst.v_lo.array() > inst.v_hi.array()).any()) {
    throw DimensionMismatch("voltage box is inconsistent");
  }
  if (static_cast<Index>(inst.loads.size()) != inst.demands.size() ||
      static_cast<Index>(inst.generators.size()) != inst.caps.size()) {
    throw DimensionMismatch("bus lists do not match their value vectors");
  }
  for (Index bus : inst.loads) {
    if (bus < 0 || bus >= n) throw DimensionMismatch("load bus out of range");
  }
  for (Index bus : inst.generators) {
    if (bus < 0 || bus >= n) {
      throw DimensionMismatch("generator bus out of range");
    }
  }
  if (inst.demands.size() > 0 && inst.demands.minCoeff() < 0.0) {
    throw Error("demands must be nonnegative");
  }
  if (inst.caps.size() > 0 && inst.caps.minCoeff() < 0.0) {
    throw Error("generation caps must be nonnegative");
  }
  for (const OpfLine& line : inst.lines) {
    if (line.from < 0 || line.from >= n || line.to < 0 || line.to >= n ||
        line.from == line.to) {
      throw DimensionMismatch("line endpoints out of range");
    }
    if (!(line.conductance > 0.0) || line.i_max < 0.0) {
      throw Error("line conductances must be positive and limits >= 0");
    }
  }
}

inline double opf_losses(const OpfInstance& inst, const Vector& v) {
  return v.dot(inst.g * v);
}

inline Vector opf_power(const OpfInstance& inst, const Vector& v) {
  return v.cwiseProduct(inst.g * v);
}

inline double opf_line_current(const OpfInstance& inst, const OpfLine& line,
                               const Vector& v) {
  return line.conductance * (v(line.from) - v(line.to));
}

struct OpfDuals {
  Vector lambda;  // load power floors
  Vector gamma;   // generation caps
  Vector mu;      // line current limits
};

inline double opf_lagrangian(const OpfInstance& inst, const Vector& v,
                             const OpfDuals& duals) {
  const Vector power = opf_power(inst, v);
  double value = opf_losses(inst, v);
  for (size_t i = 0; i < inst.loads.size(); ++i) {
    const Index k = static_cast<Index>(i);
    value += duals.lambda(k) * (inst.demands(k) - power(inst.loads[i]));
  }
  for (size_t i = 0; i < inst.generators.size(); ++i) {
    const Index k = static_cast<Index>(i);
    value += duals.gamma(k) * (power(inst.generators[i]) - inst.caps(k));
  }
  for (size_t i = 0; i < inst.lines.size(); ++i) {
    const Index k = static_cast<Index>(i);
    value += duals.mu(k) * (std::abs(opf_line_current(inst, inst.lines[i], v)) -
                            inst.lines[i].i_max);
  }
  return value;
}

namespace detail {

inline double sign_or_zero(double t) {
  return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
}

// grad p_i(v) = (Gv)_i e_i + v_i G e_i, the product rule on v_i (Gv)_i.
inline Vector opf_power_grad(const OpfInstance& inst, const Vector& v,
                             const Vector& gv, Index bus) {
  Vector grad = v(bus) * inst.g.col(bus);
  grad(bus) += gv(bus);
  return grad;
}

}  // namespace detail

inline Vector opf_lagrangian_grad_v(const OpfInstance& inst, const Vector& v,
                                    const OpfDuals& duals) {
  const Vector gv = inst.g * v;
  Vector grad = 2.0 * gv;
  for (size_t i = 0; i < inst.loads.size(); ++i) {
    grad -= duals.lambda(static_cast<Index>(i)) *
            detail::opf_power_grad(inst, v, gv, inst.loads[i]);
  }
  for (size_t i = 0; i < inst.generators.size(); ++i) {
    grad += duals.gamma(static_cast<Index>(i)) *
            detail::opf_power_grad(inst, v, gv, inst.generators[i]);
  }
  for (size_t i = 0; i < inst.lines.size(); ++i) {
    const OpfLine& line = inst.lines[i];
    const double current = opf_line_current(inst, line, v);
    const double weight = duals.mu(static_cast<Index>(i)) *
                          detail::sign_or_zero(current) * line.conductance;
    grad(line.from) += weight;
    grad(line.to) -= weight;
  }
  return grad;
}

// Constraint values, written so that a feasible point is <= 0 everywhere:
// demand shortfalls, cap excesses, and current overloads.
struct OpfViolations {
  Vector load_shortfall;
  Vector cap_excess;
  Vector line_overload;

  double max_violation() const {
    double worst = 0.0;
    if (load_shortfall.size() > 0) {
      worst = std::max(worst, load_shortfall.maxCoeff());
    }
    if (cap_excess.size() > 0) worst = std::max(worst, cap_excess.maxCoeff());
    if (line_overload.size() > 0) {
      worst = std::max(worst, line_overload.maxCoeff());
    }
    return worst;
  }
};

inline OpfViolations opf_violations(const OpfInstance& inst,
                                    const Vector& v) {
  const Vector power = opf_power(inst, v);
  OpfViolations out;
  out.load_shortfall = Vector(static_cast<Index>(inst.loads.size()));
  for (size_t i = 0; i < inst.loads.size(); ++i) {
    out.load_shortfall(static_cast<Index>(i)) =
        inst.demands(static_cast<Index>(i)) - power(inst.loads[i]);
  }
  out.cap_excess = Vector(static_cast<Index>(inst.generators.size()));
  for (size_t i = 0; i < inst.generators.size(); ++i) {
    out.cap_excess(static_cast<Index>(i)) =
        power(inst.generators[i]) - inst.caps(static_cast<Index>(i));
  }
  out.line_overload = Vector(static_cast<Index>(inst.lines.size()));
  for (size_t i = 0; i < inst.lines.size(); ++i) {
    out.line_overload(static_cast<Index>(i)) =
        std::abs(opf_line_current(inst, inst.lines[i], v)) -
        inst.lines[i].i_max;
  }
  return out;
}

// The Lagrangian value never exceeds the objective at a feasible point, so
// f(v) - L(v, duals) >= 0 plays the role of a duality gap: it shrinks to
// zero exactly when every multiplier is complementary with its constraint.
inline Certificate opf_certificate(const OpfInstance& inst, const Vector& v,
                                   const OpfDuals& duals) {
  const OpfViolations viol = opf_violations(inst, v);
  Certificate cert;
  cert.primal_obj = opf_losses(inst, v);
  cert.dual_obj = opf_lagrangian(inst, v, duals);
  cert.primal_feasibility = viol.max_violation();
  cert.dual_feasibility =
      std::max({detail::neg_part_inf_norm(duals.lambda),
                detail::neg_part_inf_norm(duals.gamma),
                detail::neg_part_inf_norm(duals.mu)});
  double compl_res = 0.0;
  for (Index i = 0; i < duals.lambda.size(); ++i) {
    compl_res = std::max(compl_res,
                         std::abs(duals.lambda(i) * viol.load_shortfall(i)));
  }
  for (Index i = 0; i < duals.gamma.size(); ++i) {
    compl_res =
        std::max(compl_res, std::abs(duals.gamma(i) * viol.cap_excess(i)));
  }
  for (Index i = 0; i < duals.mu.size(); ++i) {
    compl_res =
        std::max(compl_res, std::abs(duals.mu(i) * viol.line_overload(i)));
  }
  cert.complementarity = compl_res;
  const Vector grad = opf_lagrangian_grad_v(inst, v, duals);
  const Vector stepped =
      (v - grad).cwiseMax(inst.v_lo).cwiseMin(inst.v_hi);
  cert.stationarity = detail::inf_norm(v - stepped);
  detail::finish_gap(&cert);
  return cert;
}

struct OpfRun {
  SolveReport report;
  Vector v;
  OpfDuals duals;
};

// Projected saddle-point iteration: voltage descent on the Lagrangian
// clipped to the box, then multiplier ascent along each constraint value.
inline OpfRun opf_primal_dual(const OpfInstance& inst, StepConfig cfg = {},
                              const Vector& v_start = Vector(),
                              const Observer& observer = {}) {
  validate(inst);
  validate(cfg);
  const Index n = inst.g.rows();
  Vector v = v_start.size() > 0
                 ? v_start
                 : Vector(0.5 * (inst.v_lo + inst.v_hi));
  if (v.size() != n) {
    throw DimensionMismatch("starting voltages have the wrong size");
  }
  if ((v.array() < inst.v_lo.array()).any() ||
      (v.array() > inst.v_hi.array()).any()) {
    throw InfeasibleStart("starting voltages violate the voltage box");
  }
  const double tau = cfg.tau > 0.0 ? cfg.tau : 2e-3;
  const double eta = cfg.sigma > 0.0 ? cfg.sigma : 2e-3;

  OpfDuals duals;
  duals.lambda = Vector::Zero(static_cast<Index>(inst.loads.size()));
  duals.gamma = Vector::Zero(static_cast<Index>(inst.generators.size()));
  duals.mu = Vector::Zero(static_cast<Index>(inst.lines.size()));

  OpfRun run;
  run.report.solver = "opf-pd";
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    v = (v - tau * opf_lagrangian_grad_v(inst, v, duals))
            .cwiseMax(inst.v_lo)
            .cwiseMin(inst.v_hi);
    const OpfViolations viol = opf_violations(inst, v);
    duals.lambda = (duals.lambda + eta * viol.load_shortfall).cwiseMax(0.0);
    duals.gamma = (duals.gamma + eta * viol.cap_excess).cwiseMax(0.0);
    duals.mu = (duals.mu + eta * viol.line_overload).cwiseMax(0.0);

    run.report.iterations = iter;
    if (observer) {
      IterateState state;
      state.x = v;
      state.lambda = duals.lambda;
      state.z = duals.gamma;
      state.mu = duals.mu;
      state.iter = iter;
      observer(iter, state);
    }
    if (detail::diverged(duals.lambda) || detail::diverged(duals.gamma) ||
        detail::diverged(duals.mu)) {
      run.report.termination = Termination::kDiverged;
      break;
    }
    run.report.certificate = opf_certificate(inst, v, duals);
    run.report.objective = run.report.certificate.primal_obj;
    if (detail::certified_stop(run.report.certificate, cfg)) {
      run.report.termination = Termination::kConverged;
      break;
    }
  }
  run.v = v;
  run.duals = duals;
  run.report.state.x = v;
  run.report.state.lambda = duals.lambda;
  run.report.state.z = duals.gamma;
  run.report.state.mu = duals.mu;
  run.report.state.iter = run.report.iterations;
  return run;
}

// Dense scan of the voltage box at the given resolution; ground truth for
// two-bus instances. Returns the best feasible voltages and their losses.
inline std::pair<Vector, double> opf_grid_oracle(const OpfInstance& inst,
                                                 double step = 1e-3,
                                                 double feas_tol = 1e-9) {
  validate(inst);
  if (inst.g.rows() != 2) {
    throw DimensionMismatch("grid oracle supports two-bus grids only");
  }
  if (!(step > 0.0)) throw Error("grid step must be positive");
  const Index n0 =
      static_cast<Index>(std::lround((inst.v_hi(0) - inst.v_lo(0)) / step));
  const Index n1 =
      static_cast<Index>(std::lround((inst.v_hi(1) - inst.v_lo(1)) / step));
  bool found = false;
  Vector best(2);
  double best_losses = 0.0;
  Vector v(2);
  for (Index i = 0; i <= n0; ++i) {
    v(0) = std::min(inst.v_lo(0) + step * static_cast<double>(i),
                    inst.v_hi(0));
    for (Index j = 0; j <= n1; ++j) {
      v(1) = std::min(inst.v_lo(1) + step * static_cast<double>(j),
                      inst.v_hi(1));
      if (opf_violations(inst, v).max_violation() > feas_tol) continue;
      const double losses = opf_losses(inst, v);
      if (!found || losses < best_losses) {
        found = true;
        best = v;
        best_losses = losses;
      }
    }
  }
  if (!found) {
    throw OracleFailure("grid oracle found no feasible voltage profile");
  }
  return {best, best_losses};
}

// Two-bus fixture: one generator, one load, one line whose limit is
// deliberately binding. Meeting the demand needs the full thermal
// capacity at the highest admissible voltage, so the optimum pins
// v = (1.05, 1.1) with the line multiplier strictly positive.
inline OpfInstance opf_two_bus_toy() {
  OpfInstance inst;
  inst.g = Matrix(2, 2);
  inst.g << 1.0, -1.0, -1.0, 1.0;
  inst.v_lo = Vector::Constant(2, 0.9);
  inst.v_hi = Vector::Constant(2, 1.1);
  inst.loads = {1};
  inst.demands = Vector::Constant(1, 0.055);
  inst.generators = {0};
  inst.caps = Vector::Constant(1, 1.0);
  inst.lines = {OpfLine{0, 1, 1.0, 0.05}};
  return inst;
}

}  // namespace pdk

#endif  // PDK_POWER_FLOW_HPP_
