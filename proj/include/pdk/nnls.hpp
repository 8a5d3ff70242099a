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

// Nonnegative least squares: min 1/2 |Ax - b|^2 over x >= 0, the running
// example every solver in this library accepts. Provides the saddle-point
// and splitting views plus an exhaustive active-set oracle used as ground
// truth in tests.

#ifndef PDK_NNLS_HPP_
#define PDK_NNLS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pdk/convex.hpp"
#include "pdk/errors.hpp"
#include "pdk/linalg.hpp"
#include "pdk/solvers.hpp"

namespace pdk {

struct NnlsInstance {
  Matrix a;
  Vector b;
};

inline void validate(const NnlsInstance& inst) {
  require_finite(inst.a, "nnls matrix");
  require_finite(inst.b, "nnls rhs");
  if (inst.a.rows() < 1 || inst.a.cols() < 1 ||
      inst.a.rows() != inst.b.size()) {
    throw DimensionMismatch("nnls instance: A is " +
                            std::to_string(inst.a.rows()) + "x" +
                            std::to_string(inst.a.cols()) + " but b has " +
                            std::to_string(inst.b.size()) + " entries");
  }
}

inline double nnls_objective(const NnlsInstance& inst, const Vector& x) {
  return 0.5 * (inst.a * x - inst.b).squaredNorm();
}

// min_x max_y <Ax, y> + i_{x >= 0} - (1/2 |y|^2 + b^T y), whose proximal
// updates reduce to clamp and scale steps.
inline SaddleProblem nnls_as_saddle(const NnlsInstance& inst) {
  validate(inst);
  return SaddleProblem{inst.a, IndicatorCone{NonnegOrthant{inst.a.cols()}},
                       QuadLin{1.0, inst.b}};
}

inline SplitProblem nnls_as_split(const NnlsInstance& inst) {
  validate(inst);
  return SplitProblem{inst.a, inst.b};
}

struct NnlsSolution {
  Vector x;
  Vector lambda;  // residual Ax - b, the dual optimum
  Vector mu;      // multiplier on x >= 0, equal to A^T lambda
};

// Exhaustive support enumeration. For each candidate support S the
// equality-restricted least-squares solution is tested against the full
// KKT system (nonnegative x, nonnegative gradient, complementary
// slackness) at an absolute 1e-9 residual. Intended for n <= 16.
inline NnlsSolution nnls_active_set_oracle(const NnlsInstance& inst) {
  validate(inst);
  const Index n = inst.a.cols();
  if (n > 16) {
    throw OracleFailure("active-set oracle enumerates 2^n supports; n = " +
                        std::to_string(n) + " exceeds the n <= 16 budget");
  }
  constexpr double kTol = 1e-9;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<Index> support;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    Vector x = Vector::Zero(n);
    if (!support.empty()) {
      Matrix a_s(inst.a.rows(), static_cast<Index>(support.size()));
      for (size_t j = 0; j < support.size(); ++j) {
        a_s.col(static_cast<Index>(j)) = inst.a.col(support[j]);
      }
      const Vector x_s = lstsq_min_norm(a_s, inst.b);
      if (x_s.minCoeff() < -kTol) continue;
      for (size_t j = 0; j < support.size(); ++j) {
        x(support[j]) = std::max(x_s(static_cast<Index>(j)), 0.0);
      }
    }
    const Vector lambda = inst.a * x - inst.b;
    const Vector grad = inst.a.transpose() * lambda;
    const double residual =
        std::max({detail::neg_part_inf_norm(grad),
                  detail::inf_norm(x.cwiseProduct(grad))});
    if (residual <= kTol) {
      return NnlsSolution{x, lambda, grad};
    }
  }
  throw OracleFailure(
      "active-set oracle: no support satisfied the KKT system at 1e-9; "
      "the instance is numerically degenerate");
}

}  // namespace pdk

#endif  // PDK_NNLS_HPP_
