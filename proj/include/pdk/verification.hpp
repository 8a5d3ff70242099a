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

// Robustness verification for small feed-forward networks. The question:
// does c^T f(x0) + d stay nonpositive for every input within an l-inf ball
// of radius eps around a nominal point? Casting the counterexample search
//   max c^T x_K + d  s.t.  x_{k+1} = h_k(x_k),  |x_0 - x_nom|_inf <= eps
// into its Lagrangian dual yields a certified upper bound that is cheap to
// evaluate in closed form once every chain variable carries an interval
// box. A projected primal-dual iteration sharpens both sides at once: the
// primal sweep pushes a concrete counterexample candidate uphill, the dual
// step tightens the bound. The run is decided once either side resolves
// the question (bound < 0 certifies; candidate > 0 refutes) and the sweep
// has stopped moving, so a reported counterexample is a local maximizer of
// the search rather than the first sign crossing.
//
// Each layer is split into an affine stage and, when present, a ReLU
// stage, so every per-stage supremum in the dual separates coordinatewise:
// affine stages reduce to interval support functions, ReLU stages to a
// three-breakpoint scan of a piecewise-linear 1-D function.

#ifndef PDK_VERIFICATION_HPP_
#define PDK_VERIFICATION_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pdk/errors.hpp"
#include "pdk/linalg.hpp"
#include "pdk/solvers.hpp"

namespace pdk {

enum class Activation { kIdentity, kRelu };

struct NnvLayer {
  Matrix weight;
  Vector bias;
  Activation activation = Activation::kIdentity;
};

struct NnvSpec {
  Vector c;
  double d = 0.0;
};

struct NnvInstance {
  std::vector<NnvLayer> layers;
  Vector x_nom;
  double eps = 0.0;
  NnvSpec spec;
};

inline void validate(const NnvInstance& inst) {
  if (inst.layers.empty()) throw DimensionMismatch("network has no layers");
  require_finite(inst.x_nom, "nominal input");
  require_finite(inst.spec.c, "specification vector");
  if (!std::isfinite(inst.spec.d)) {
    throw NonFiniteValue("specification offset is not finite");
  }
  if (inst.eps < 0.0 || !std::isfinite(inst.eps)) {
    throw Error("perturbation radius must be finite and nonnegative");
  }
  Index dim = inst.x_nom.size();
  for (size_t k = 0; k < inst.layers.size(); ++k) {
    const NnvLayer& layer = inst.layers[k];
    require_finite(layer.weight, "layer weight");
    require_finite(layer.bias, "layer bias");
    if (layer.weight.cols() != dim ||
        layer.weight.rows() != layer.bias.size()) {
      throw DimensionMismatch("layer " + std::to_string(k) +
                              " does not chain with the preceding width");
    }
    dim = layer.weight.rows();
  }
  if (inst.spec.c.size() != dim) {
    throw DimensionMismatch("specification vector does not match the "
                            "network output width");
  }
}

// Affine and ReLU stages of the unrolled network; stage s maps chain
// variable y_s to y_{s+1}.
struct NnvStage {
  bool relu = false;
  Matrix weight;  // affine stages only
  Vector bias;
  Index in_dim = 0;
  Index out_dim = 0;
};

inline std::vector<NnvStage> nnv_stages(const NnvInstance& inst) {
  validate(inst);
  std::vector<NnvStage> stages;
  for (const NnvLayer& layer : inst.layers) {
    NnvStage affine;
    affine.weight = layer.weight;
    affine.bias = layer.bias;
    affine.in_dim = layer.weight.cols();
    affine.out_dim = layer.weight.rows();
    stages.push_back(std::move(affine));
    if (layer.activation == Activation::kRelu) {
      NnvStage relu;
      relu.relu = true;
      relu.in_dim = layer.weight.rows();
      relu.out_dim = layer.weight.rows();
      stages.push_back(std::move(relu));
    }
  }
  return stages;
}

inline Vector nnv_stage_apply(const NnvStage& stage, const Vector& y) {
  if (y.size() != stage.in_dim) {
    throw DimensionMismatch("stage input width mismatch");
  }
  if (stage.relu) return y.cwiseMax(0.0);
  return stage.weight * y + stage.bias;
}

inline Vector nnv_forward(const NnvInstance& inst, const Vector& x0) {
  validate(inst);
  Vector y = x0;
  for (const NnvLayer& layer : inst.layers) {
    y = layer.weight * y + layer.bias;
    if (layer.activation == Activation::kRelu) y = y.cwiseMax(0.0);
  }
  return y;
}

inline double nnv_value(const NnvInstance& inst, const Vector& x0) {
  return inst.spec.c.dot(nnv_forward(inst, x0)) + inst.spec.d;
}

// Interval boxes for every chain variable, propagated by interval
// arithmetic from the input ball. boxes.lower[s], boxes.upper[s] bound the
// stage variable y_s; index 0 is the input, index S the network output.
struct NnvBoxes {
  std::vector<Vector> lower;
  std::vector<Vector> upper;
};

inline NnvBoxes nnv_boxes(const NnvInstance& inst) {
  const std::vector<NnvStage> stages = nnv_stages(inst);
  NnvBoxes boxes;
  boxes.lower.push_back((inst.x_nom.array() - inst.eps).matrix());
  boxes.upper.push_back((inst.x_nom.array() + inst.eps).matrix());
  for (const NnvStage& stage : stages) {
    // Copies, not references: the push_backs below may reallocate.
    const Vector lo = boxes.lower.back();
    const Vector hi = boxes.upper.back();
    if (stage.relu) {
      boxes.lower.push_back(lo.cwiseMax(0.0));
      boxes.upper.push_back(hi.cwiseMax(0.0));
    } else {
      const Matrix pos = stage.weight.cwiseMax(0.0);
      const Matrix neg = stage.weight.cwiseMin(0.0);
      boxes.lower.push_back(stage.bias + pos * lo + neg * hi);
      boxes.upper.push_back(stage.bias + pos * hi + neg * lo);
    }
  }
  return boxes;
}

namespace detail {

// sup over [lo, hi] of alpha t - beta max(t, 0): piecewise linear with a
// single breakpoint at 0, so the maximum sits at an interval end or at the
// clamped origin.
inline double relu_pair_sup(double alpha, double beta, double lo,
                            double hi) {
  const double mid = std::max(lo, std::min(0.0, hi));
  auto value = [&](double t) { return alpha * t - beta * std::max(t, 0.0); };
  return std::max({value(lo), value(mid), value(hi)});
}

}  // namespace detail

// Certified upper bound on the counterexample value: the dual function
//   d + psi0(lambda_0) + sum_s phi_s(lambda_{s-1}, lambda_s)
// with one multiplier per stage constraint y_{s+1} = h_s(y_s) and the last
// multiplier pinned to -c. psi0 resolves the input ball against the first
// affine stage exactly; every other stage takes its supremum over the
// propagated box.
inline double nnv_dual_bound(const NnvInstance& inst, const NnvBoxes& boxes,
                             const std::vector<Vector>& lambdas) {
  const std::vector<NnvStage> stages = nnv_stages(inst);
  const size_t s_count = stages.size();
  if (lambdas.size() != s_count) {
    throw DimensionMismatch("expected one multiplier per stage");
  }
  for (size_t s = 0; s < s_count; ++s) {
    if (lambdas[s].size() != stages[s].out_dim) {
      throw DimensionMismatch("multiplier " + std::to_string(s) +
                              " width mismatch");
    }
  }
  if (!((lambdas.back().array() == (-inst.spec.c).array()).all())) {
    throw SpecMismatch("the last multiplier must equal -c for the bound "
                       "to be valid");
  }
  if (boxes.lower.size() != s_count + 1) {
    throw DimensionMismatch("boxes do not match the stage count");
  }

  const Matrix& w0 = stages[0].weight;
  double bound = inst.spec.d;
  bound += -lambdas[0].dot(w0 * inst.x_nom + stages[0].bias) +
           inst.eps * (w0.transpose() * lambdas[0]).lpNorm<1>();
  for (size_t s = 1; s < s_count; ++s) {
    const Vector& lo = boxes.lower[s];
    const Vector& hi = boxes.upper[s];
    if (stages[s].relu) {
      for (Index i = 0; i < lo.size(); ++i) {
        bound += detail::relu_pair_sup(lambdas[s - 1](i), lambdas[s](i),
                                       lo(i), hi(i));
      }
    } else {
      const Vector slope =
          lambdas[s - 1] - stages[s].weight.transpose() * lambdas[s];
      bound -= lambdas[s].dot(stages[s].bias);
      for (Index i = 0; i < lo.size(); ++i) {
        bound += std::max(slope(i) * lo(i), slope(i) * hi(i));
      }
    }
  }
  return bound;
}

// Outcome of the primal-dual search. The run counts as Converged once the
// question is decided and the iteration has stalled: a negative dual bound
// certifies the specification, a positive counterexample value refutes it,
// and stalling (per-iteration movement at or below tol_primal) keeps the
// search from quitting while the candidate is still climbing. An undecided
// run exhausts the iteration budget and reports MaxIters.
struct NnvRun {
  SolveReport report;
  std::vector<Vector> chain;    // final primal chain variables y_0..y_S
  std::vector<Vector> lambdas;  // final stage multipliers
  double candidate_value = 0.0;  // best concrete c^T f(y_0) + d found
  Vector candidate_input;
  double dual_bound = 0.0;  // best certified upper bound found
  bool certified = false;
  bool falsified = false;
};

// Projected primal-dual search over the chain formulation. The primal
// sweep ascends the Lagrangian stage by stage from the output down to the
// input, clipping each variable to its box (the input additionally to the
// perturbation ball); the dual step moves every multiplier along its
// constraint residual. The last multiplier is reset to -c whenever the
// bound is evaluated so every reported bound is valid. The run converges
// once a decision is in hand (negative certified bound, or a concrete
// input with positive value) and the search has stalled: the iterates
// stop moving, or neither record improves for a whole window. A reported
// counterexample is therefore the best point the search settles on, not
// the first sign crossing.
inline NnvRun nnv_primal_dual(const NnvInstance& inst, StepConfig cfg = {},
                              const Observer& observer = {}) {
  validate(cfg);
  const std::vector<NnvStage> stages = nnv_stages(inst);
  const NnvBoxes boxes = nnv_boxes(inst);
  const size_t s_count = stages.size();
  const double tau = cfg.tau > 0.0 ? cfg.tau : 0.05;
  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : 0.05;

  std::vector<Vector> chain;
  chain.push_back(inst.x_nom);
  for (size_t s = 0; s < s_count; ++s) {
    chain.push_back(nnv_stage_apply(stages[s], chain.back()));
  }
  std::vector<Vector> lambdas(s_count);
  for (size_t s = 0; s < s_count; ++s) {
    lambdas[s] = Vector::Zero(stages[s].out_dim);
  }
  lambdas.back() = -inst.spec.c;

  NnvRun run;
  run.report.solver = "nnv-pd";
  run.candidate_input = inst.x_nom;
  run.candidate_value = nnv_value(inst, inst.x_nom);
  run.dual_bound = nnv_dual_bound(inst, boxes, lambdas);

  auto clip = [](const Vector& v, const Vector& lo, const Vector& hi) {
    return v.cwiseMax(lo).cwiseMin(hi);
  };

  // The fixed-step saddle dynamics need not come to an exact standstill,
  // so besides the movement test the run also watches whether either
  // record (best bound, best candidate) still improves materially.
  constexpr int kStallWindow = 500;
  int last_progress = 0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double movement = 0.0;
    auto track = [&movement](const Vector& before, const Vector& after) {
      movement = std::max(movement, detail::inf_norm(after - before));
    };

    Vector next = clip(
        chain[s_count] + tau * (inst.spec.c + lambdas[s_count - 1]),
        boxes.lower[s_count], boxes.upper[s_count]);
    track(chain[s_count], next);
    chain[s_count] = next;
    for (size_t s = s_count - 1; s >= 1; --s) {
      Vector pull;
      if (stages[s].relu) {
        pull = (chain[s].array() > 0.0)
                   .select(lambdas[s].array(), 0.0)
                   .matrix();
      } else {
        pull = stages[s].weight.transpose() * lambdas[s];
      }
      next = clip(chain[s] + tau * (lambdas[s - 1] - pull),
                  boxes.lower[s], boxes.upper[s]);
      track(chain[s], next);
      chain[s] = next;
    }
    next = clip(chain[0] - tau * (stages[0].weight.transpose() * lambdas[0]),
                boxes.lower[0], boxes.upper[0]);
    track(chain[0], next);
    chain[0] = next;
    for (size_t s = 0; s < s_count; ++s) {
      const Vector defect =
          chain[s + 1] - nnv_stage_apply(stages[s], chain[s]);
      track(lambdas[s], lambdas[s] - sigma * defect);
      lambdas[s] -= sigma * defect;
    }

    const double value = nnv_value(inst, chain[0]);
    if (value > run.candidate_value) {
      if (value > run.candidate_value +
                      cfg.tol_gap * (1.0 + std::abs(value))) {
        last_progress = iter;
      }
      run.candidate_value = value;
      run.candidate_input = chain[0];
    }
    std::vector<Vector> pinned = lambdas;
    pinned.back() = -inst.spec.c;
    const double bound = nnv_dual_bound(inst, boxes, pinned);
    if (bound < run.dual_bound) {
      if (bound < run.dual_bound - cfg.tol_gap * (1.0 + std::abs(bound))) {
        last_progress = iter;
      }
      run.dual_bound = bound;
    }

    run.report.iterations = iter;
    if (observer) {
      IterateState state;
      state.x = chain[0];
      state.iter = iter;
      observer(iter, state);
    }
    bool blown_up = false;
    for (const Vector& l : lambdas) blown_up = blown_up || detail::diverged(l);
    if (blown_up) {
      run.report.termination = Termination::kDiverged;
      break;
    }
    run.certified = run.dual_bound < 0.0;
    run.falsified = run.candidate_value > 0.0;
    const bool stalled = movement <= cfg.tol_primal ||
                         iter - last_progress >= kStallWindow;
    if ((run.certified || run.falsified) && stalled) {
      run.report.termination = Termination::kConverged;
      break;
    }
  }

  run.chain = chain;
  run.lambdas = lambdas;
  run.lambdas.back() = -inst.spec.c;
  run.report.objective = run.candidate_value;
  double chain_residual = 0.0;
  for (size_t s = 0; s < s_count; ++s) {
    const Vector defect = chain[s + 1] - nnv_stage_apply(stages[s], chain[s]);
    chain_residual = std::max(chain_residual, detail::inf_norm(defect));
  }
  Certificate cert;
  cert.primal_obj = run.candidate_value;
  cert.dual_obj = run.dual_bound;
  cert.primal_feasibility = chain_residual;
  cert.gap = run.dual_bound - run.candidate_value;
  cert.rel_gap = std::abs(cert.gap) / (1.0 + std::abs(cert.primal_obj));
  run.report.certificate = cert;
  IterateState state;
  state.x = chain[0];
  state.iter = run.report.iterations;
  run.report.state = state;
  return run;
}

// Exact maximum of the verification objective over a dense grid of the
// input ball; the ground-truth oracle for two-input networks.
inline double nnv_grid_max(const NnvInstance& inst, Index points = 201) {
  validate(inst);
  if (inst.x_nom.size() != 2) {
    throw DimensionMismatch("grid oracle supports two-input networks only");
  }
  if (points < 2) throw Error("grid oracle needs at least 2 points per axis");
  double best = -std::numeric_limits<double>::infinity();
  const double step = 2.0 * inst.eps / static_cast<double>(points - 1);
  for (Index i = 0; i < points; ++i) {
    for (Index j = 0; j < points; ++j) {
      Vector x0(2);
      x0(0) = inst.x_nom(0) - inst.eps + step * static_cast<double>(i);
      x0(1) = inst.x_nom(1) - inst.eps + step * static_cast<double>(j);
      best = std::max(best, nnv_value(inst, x0));
    }
  }
  return best;
}

// Random 2-2-1 ReLU network whose specification offset is calibrated so
// the box-propagated bound already sits at -0.5: certifiably safe, with
// room for the dual iteration to tighten further.
inline NnvInstance gen_random_nnv(std::uint64_t seed, double eps = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  NnvInstance inst;
  NnvLayer hidden;
  hidden.weight = Matrix(2, 2);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) hidden.weight(i, j) = normal(rng);
  }
  hidden.bias = Vector(2);
  for (Index i = 0; i < 2; ++i) hidden.bias(i) = 0.5 * normal(rng);
  hidden.activation = Activation::kRelu;
  NnvLayer out;
  out.weight = Matrix(1, 2);
  out.weight(0, 0) = normal(rng);
  out.weight(0, 1) = normal(rng);
  out.bias = Vector(1);
  out.bias(0) = 0.5 * normal(rng);
  inst.layers = {hidden, out};
  inst.x_nom = Vector(2);
  inst.x_nom(0) = normal(rng);
  inst.x_nom(1) = normal(rng);
  inst.eps = eps;
  inst.spec.c = Vector::Ones(1);
  inst.spec.d = 0.0;
  const NnvBoxes boxes = nnv_boxes(inst);
  const double out_max = boxes.upper.back()(0);
  inst.spec.d = -out_max - 0.5;
  return inst;
}

}  // namespace pdk

#endif  // PDK_VERIFICATION_HPP_
