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

// Reverse-mode differentiation over an explicit computation graph, with two
// interchangeable backward engines. The first is the usual adjoint sweep
// (chain rule applied along the graph). The second treats every non-input
// node value as an equality constraint, introduces one multiplier vector
// per constraint, and solves the resulting stationarity system by
// back-substitution; the gradient then falls out of the input rows. Both
// must agree to roundoff and the second one additionally exposes its
// multipliers, which for the least-squares graph are the residual itself.

#ifndef PDK_AUTODIFF_HPP_
#define PDK_AUTODIFF_HPP_

#include <string>
#include <utility>
#include <vector>

#include "pdk/linalg.hpp"

namespace pdk {

enum class OpKind {
  kInput,
  kMatVec,      // M * a
  kAdd,         // a + b
  kSub,         // a - b
  kScale,       // s * a
  kDot,         // a . b, scalar
  kHalfSqNorm,  // 1/2 |a|^2, scalar
  kAddConst,    // a + constant
};

struct GraphNode {
  OpKind kind;
  int a = -1;
  int b = -1;
  Index dim = 0;
  Matrix matrix;    // kMatVec only
  double scalar = 0.0;  // kScale only
  Vector constant;  // kAddConst only
};

// A DAG built bottom-up; parents always precede children, so node order is
// a topological order and both backward engines can walk it in reverse.
class CompGraph {
 public:
  int input(Index dim) {
    if (dim <= 0) throw DimensionMismatch("input dimension must be positive");
    return push({OpKind::kInput, -1, -1, dim, {}, 0.0, {}});
  }

  int matvec(Matrix m, int a) {
    require_finite(m, "matvec matrix");
    check(a);
    if (m.cols() != node(a).dim) {
      throw DimensionMismatch("matvec: matrix has " + std::to_string(m.cols()) +
                              " columns, operand has dimension " +
                              std::to_string(node(a).dim));
    }
    const Index dim = m.rows();
    return push({OpKind::kMatVec, a, -1, dim, std::move(m), 0.0, {}});
  }

  int add(int a, int b) { return binary(OpKind::kAdd, a, b); }
  int sub(int a, int b) { return binary(OpKind::kSub, a, b); }

  int scale(double s, int a) {
    check(a);
    return push({OpKind::kScale, a, -1, node(a).dim, {}, s, {}});
  }

  int dot(int a, int b) {
    check(a);
    check(b);
    if (node(a).dim != node(b).dim) {
      throw DimensionMismatch("dot: operand dimensions differ");
    }
    return push({OpKind::kDot, a, b, 1, {}, 0.0, {}});
  }

  int half_sqnorm(int a) {
    check(a);
    return push({OpKind::kHalfSqNorm, a, -1, 1, {}, 0.0, {}});
  }

  int add_const(int a, Vector c) {
    require_finite(c, "add_const vector");
    check(a);
    if (c.size() != node(a).dim) {
      throw DimensionMismatch("add_const: vector size differs from operand");
    }
    return push({OpKind::kAddConst, a, -1, node(a).dim, {}, 0.0, std::move(c)});
  }

  void set_output(int id) {
    check(id);
    if (node(id).dim != 1) {
      throw DimensionMismatch("output node must be scalar");
    }
    output_ = id;
  }

  int output() const {
    if (output_ < 0) throw Error("graph has no output node");
    return output_;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const GraphNode& node(int id) const { return nodes_[static_cast<size_t>(id)]; }

 private:
  int binary(OpKind kind, int a, int b) {
    check(a);
    check(b);
    if (node(a).dim != node(b).dim) {
      throw DimensionMismatch("binary op: operand dimensions differ");
    }
    return push({kind, a, b, node(a).dim, {}, 0.0, {}});
  }

  int push(GraphNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void check(int id) const {
    if (id < 0 || id >= size()) {
      throw Error("node id " + std::to_string(id) + " out of range");
    }
  }

  std::vector<GraphNode> nodes_;
  int output_ = -1;
};

// Values for the input nodes, keyed by node id.
using Bindings = std::vector<std::pair<int, Vector>>;

struct Evaluation {
  double value = 0.0;
  std::vector<Vector> node_values;
};

// Gradient of the output with respect to each input node, keyed by id.
using Gradients = std::vector<std::pair<int, Vector>>;

namespace detail {

inline const Vector* find_binding(const Bindings& inputs, int id) {
  for (const auto& [bid, v] : inputs) {
    if (bid == id) return &v;
  }
  return nullptr;
}

}  // namespace detail

inline Evaluation forward(const CompGraph& g, const Bindings& inputs) {
  Evaluation eval;
  eval.node_values.resize(static_cast<size_t>(g.size()));
  for (int id = 0; id < g.size(); ++id) {
    const GraphNode& n = g.node(id);
    Vector& out = eval.node_values[static_cast<size_t>(id)];
    switch (n.kind) {
      case OpKind::kInput: {
        const Vector* bound = detail::find_binding(inputs, id);
        if (bound == nullptr) {
          throw UnboundInput("no value bound for input node " +
                             std::to_string(id));
        }
        if (bound->size() != n.dim) {
          throw DimensionMismatch("binding for node " + std::to_string(id) +
                                  " has wrong size");
        }
        require_finite(*bound, "input binding");
        out = *bound;
        break;
      }
      case OpKind::kMatVec:
        out = n.matrix * eval.node_values[static_cast<size_t>(n.a)];
        break;
      case OpKind::kAdd:
        out = eval.node_values[static_cast<size_t>(n.a)] +
              eval.node_values[static_cast<size_t>(n.b)];
        break;
      case OpKind::kSub:
        out = eval.node_values[static_cast<size_t>(n.a)] -
              eval.node_values[static_cast<size_t>(n.b)];
        break;
      case OpKind::kScale:
        out = n.scalar * eval.node_values[static_cast<size_t>(n.a)];
        break;
      case OpKind::kDot: {
        out = Vector::Constant(
            1, eval.node_values[static_cast<size_t>(n.a)].dot(
                   eval.node_values[static_cast<size_t>(n.b)]));
        break;
      }
      case OpKind::kHalfSqNorm:
        out = Vector::Constant(
            1, 0.5 * eval.node_values[static_cast<size_t>(n.a)].squaredNorm());
        break;
      case OpKind::kAddConst:
        out = eval.node_values[static_cast<size_t>(n.a)] + n.constant;
        break;
    }
  }
  eval.value = eval.node_values[static_cast<size_t>(g.output())](0);
  return eval;
}

namespace detail {

// Accumulates J^T * seed into the parents of node id, where J is the
// Jacobian of the node with respect to each parent at the given values.
// Shared by both engines; they differ in bookkeeping, not in local algebra.
inline void pull_back(const CompGraph& g, const std::vector<Vector>& values,
                      int id, const Vector& seed, std::vector<Vector>* acc) {
  const GraphNode& n = g.node(id);
  auto& accum = *acc;
  switch (n.kind) {
    case OpKind::kInput:
      break;
    case OpKind::kMatVec:
      accum[static_cast<size_t>(n.a)].noalias() += n.matrix.transpose() * seed;
      break;
    case OpKind::kAdd:
      accum[static_cast<size_t>(n.a)] += seed;
      accum[static_cast<size_t>(n.b)] += seed;
      break;
    case OpKind::kSub:
      accum[static_cast<size_t>(n.a)] += seed;
      accum[static_cast<size_t>(n.b)] -= seed;
      break;
    case OpKind::kScale:
      accum[static_cast<size_t>(n.a)] += n.scalar * seed;
      break;
    case OpKind::kDot:
      accum[static_cast<size_t>(n.a)] +=
          seed(0) * values[static_cast<size_t>(n.b)];
      accum[static_cast<size_t>(n.b)] +=
          seed(0) * values[static_cast<size_t>(n.a)];
      break;
    case OpKind::kHalfSqNorm:
      accum[static_cast<size_t>(n.a)] +=
          seed(0) * values[static_cast<size_t>(n.a)];
      break;
    case OpKind::kAddConst:
      accum[static_cast<size_t>(n.a)] += seed;
      break;
  }
}

inline std::vector<Vector> zero_like(const CompGraph& g) {
  std::vector<Vector> acc(static_cast<size_t>(g.size()));
  for (int id = 0; id < g.size(); ++id) {
    acc[static_cast<size_t>(id)] = Vector::Zero(g.node(id).dim);
  }
  return acc;
}

}  // namespace detail

// Backward engine 1: reverse chain-rule sweep. Seeds the output adjoint
// with 1 and pulls it back through every node in reverse order.
inline Gradients grad_chain(const CompGraph& g, const Bindings& inputs) {
  const Evaluation eval = forward(g, inputs);
  std::vector<Vector> adjoint = detail::zero_like(g);
  adjoint[static_cast<size_t>(g.output())](0) = 1.0;
  for (int id = g.size() - 1; id >= 0; --id) {
    detail::pull_back(g, eval.node_values, id,
                      adjoint[static_cast<size_t>(id)], &adjoint);
  }
  Gradients grads;
  for (int id = 0; id < g.size(); ++id) {
    if (g.node(id).kind == OpKind::kInput) {
      grads.emplace_back(id, adjoint[static_cast<size_t>(id)]);
    }
  }
  return grads;
}

// Multipliers of the constraint system, one per non-input node, plus the
// verified stationarity defect of the solved system.
struct AdjointSystem {
  std::vector<Vector> multipliers;
  bool solved = false;
  double max_residual = 0.0;
};

struct AdjointResult {
  Gradients gradients;
  AdjointSystem system;
};

// Backward engine 2: Lagrangian view. Write the forward pass as equality
// constraints v_i = op_i(parents), form
//   L = v_out - sum_i m_i^T (v_i - op_i(parents)),
// and require stationarity in every intermediate v_i. The system is
// triangular in reverse topological order, so each multiplier is obtained
// by substituting the already-known multipliers of its children:
//   m_i = sum_{j : i is a parent of j} J_{j,i}^T m_j,  m_out = 1.
// The gradient with respect to an input is the same sum taken at the input
// rows. After the sweep, every stationarity equation is re-evaluated and
// the largest defect is reported.
inline AdjointResult grad_adjoint(const CompGraph& g, const Bindings& inputs) {
  const Evaluation eval = forward(g, inputs);
  const int out = g.output();

  // child_contrib[i] accumulates sum_j J_{j,i}^T m_j as multipliers become
  // known; m_i is then read off its own row.
  std::vector<Vector> child_contrib = detail::zero_like(g);
  std::vector<Vector> multipliers(static_cast<size_t>(g.size()));
  for (int id = g.size() - 1; id >= 0; --id) {
    Vector m;
    if (id == out) {
      m = Vector::Constant(1, 1.0);
    } else {
      m = child_contrib[static_cast<size_t>(id)];
    }
    if (g.node(id).kind != OpKind::kInput) {
      multipliers[static_cast<size_t>(id)] = m;
    }
    detail::pull_back(g, eval.node_values, id, m, &child_contrib);
  }

  AdjointResult result;
  for (int id = 0; id < g.size(); ++id) {
    if (g.node(id).kind == OpKind::kInput) {
      // A graph whose output is a bare input has gradient 1 by definition.
      result.gradients.emplace_back(
          id, id == out ? Vector::Constant(1, 1.0)
                        : child_contrib[static_cast<size_t>(id)]);
    }
  }

  // Verify the solved system: recompute each right-hand side from the
  // stored multipliers and compare against the multiplier itself.
  std::vector<Vector> check = detail::zero_like(g);
  for (int id = g.size() - 1; id >= 0; --id) {
    if (g.node(id).kind != OpKind::kInput) {
      detail::pull_back(g, eval.node_values, id,
                        multipliers[static_cast<size_t>(id)], &check);
    }
  }
  double defect = 0.0;
  for (int id = 0; id < g.size(); ++id) {
    if (g.node(id).kind == OpKind::kInput || id == out) continue;
    defect = std::max(defect, (multipliers[static_cast<size_t>(id)] -
                               check[static_cast<size_t>(id)])
                                  .cwiseAbs()
                                  .maxCoeff());
  }
  result.system.multipliers = std::move(multipliers);
  result.system.solved = true;
  result.system.max_residual = defect;
  return result;
}

// The least-squares graph f(x) = 1/2 |A x - b|^2 used by the equivalence
// tests and the dual learning loop. Node layout: x, z = A x, y = z - b,
// f = 1/2 |y|^2.
struct NnlsGraph {
  CompGraph graph;
  int x = -1;
  int z = -1;
  int y = -1;
  int f = -1;
};

inline NnlsGraph make_nnls_graph(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw DimensionMismatch("least-squares graph: A rows != b size");
  }
  NnlsGraph g;
  g.x = g.graph.input(a.cols());
  g.z = g.graph.matvec(a, g.x);
  g.y = g.graph.add_const(g.z, -b);
  g.f = g.graph.half_sqnorm(g.y);
  g.graph.set_output(g.f);
  return g;
}

}  // namespace pdk

#endif  // PDK_AUTODIFF_HPP_
