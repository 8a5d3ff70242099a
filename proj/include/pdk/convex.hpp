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

// Cones with Euclidean projections, a small family of prox-friendly
// separable functions, their Fenchel conjugates, and the Fenchel-Young
// residual. Every solver builds its updates from these pieces.

#ifndef PDK_CONVEX_HPP_
#define PDK_CONVEX_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "pdk/linalg.hpp"

namespace pdk {

// ---------------------------------------------------------------------------
// Cones.

struct NonnegOrthant {
  Index dim;
};

struct Box {
  Vector lower;
  Vector upper;
};

struct LinfBall {
  Vector center;
  double radius;
};

struct FreeCone {
  Index dim;
};

using Cone = std::variant<NonnegOrthant, Box, LinfBall, FreeCone>;

inline Index cone_dim(const Cone& cone) {
  return std::visit(
      [](const auto& c) -> Index {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NonnegOrthant> ||
                      std::is_same_v<T, FreeCone>) {
          return c.dim;
        } else if constexpr (std::is_same_v<T, Box>) {
          return c.lower.size();
        } else {
          return c.center.size();
        }
      },
      cone);
}

inline void validate(const Cone& cone) {
  if (const auto* box = std::get_if<Box>(&cone)) {
    require_finite(box->lower, "box lower bound");
    require_finite(box->upper, "box upper bound");
    if (box->lower.size() != box->upper.size()) {
      throw DimensionMismatch("box bounds have different lengths");
    }
    if ((box->lower.array() > box->upper.array()).any()) {
      throw Error("box has lower > upper in some coordinate");
    }
  } else if (const auto* ball = std::get_if<LinfBall>(&cone)) {
    require_finite(ball->center, "ball center");
    if (!(ball->radius >= 0.0)) {
      throw Error("ball radius must be nonnegative");
    }
  }
}

// Euclidean projection onto the cone. All supported sets are coordinatewise
// boxes, so the projection is an elementwise clamp.
inline Vector project(const Cone& cone, const Vector& v) {
  if (v.size() != cone_dim(cone)) {
    throw DimensionMismatch("project: vector size " + std::to_string(v.size()) +
                            " does not match cone dimension " +
                            std::to_string(cone_dim(cone)));
  }
  return std::visit(
      [&](const auto& c) -> Vector {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NonnegOrthant>) {
          return v.cwiseMax(0.0);
        } else if constexpr (std::is_same_v<T, Box>) {
          return v.cwiseMax(c.lower).cwiseMin(c.upper);
        } else if constexpr (std::is_same_v<T, LinfBall>) {
          return v.array()
              .max(c.center.array() - c.radius)
              .min(c.center.array() + c.radius)
              .matrix();
        } else {
          return v;
        }
      },
      cone);
}

inline bool contains(const Cone& cone, const Vector& v) {
  if (v.size() != cone_dim(cone)) return false;
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NonnegOrthant>) {
          return (v.array() >= 0.0).all();
        } else if constexpr (std::is_same_v<T, Box>) {
          return (v.array() >= c.lower.array()).all() &&
                 (v.array() <= c.upper.array()).all();
        } else if constexpr (std::is_same_v<T, LinfBall>) {
          // Compare against the same computed bounds the projection clamps
          // to, so that project() output always passes this check.
          return (v.array() >= c.center.array() - c.radius).all() &&
                 (v.array() <= c.center.array() + c.radius).all();
        } else {
          return true;
        }
      },
      cone);
}

// ---------------------------------------------------------------------------
// Separable functions.

// f(y) = 0.
struct ZeroFn {
  Index dim;
};

// f(y) = 0 on the cone, +inf outside.
struct IndicatorCone {
  Cone cone;
};

// f(y) = (alpha/2) |y|^2 + linear^T y, alpha >= 0.
struct QuadLin {
  double alpha;
  Vector linear;
};

using SeparableFn = std::variant<ZeroFn, IndicatorCone, QuadLin>;

inline Index fn_dim(const SeparableFn& f) {
  return std::visit(
      [](const auto& g) -> Index {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ZeroFn>) {
          return g.dim;
        } else if constexpr (std::is_same_v<T, IndicatorCone>) {
          return cone_dim(g.cone);
        } else {
          return g.linear.size();
        }
      },
      f);
}

inline void validate(const SeparableFn& f) {
  if (const auto* ind = std::get_if<IndicatorCone>(&f)) {
    validate(ind->cone);
  } else if (const auto* ql = std::get_if<QuadLin>(&f)) {
    require_finite(ql->linear, "quadratic-linear coefficient");
    if (!(ql->alpha >= 0.0)) {
      throw Error("quadratic scale must be nonnegative for convexity");
    }
  }
}

// Extended real line with a saturating +inf. Only the nonnegative infinity
// is needed: conjugates of indicators take the value +inf off their domain.
struct ExtReal {
  double value = 0.0;
  bool is_finite = true;

  static ExtReal finite(double v) { return ExtReal{v, true}; }
  static ExtReal pos_inf() { return ExtReal{0.0, false}; }

  ExtReal operator+(const ExtReal& other) const {
    if (!is_finite || !other.is_finite) return pos_inf();
    return finite(value + other.value);
  }
  double as_double() const {
    return is_finite ? value : std::numeric_limits<double>::infinity();
  }
};

// Function value f(y), +inf outside the domain.
inline ExtReal fn_value(const SeparableFn& f, const Vector& y) {
  if (y.size() != fn_dim(f)) {
    throw DimensionMismatch("fn_value: argument size mismatch");
  }
  return std::visit(
      [&](const auto& g) -> ExtReal {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ZeroFn>) {
          return ExtReal::finite(0.0);
        } else if constexpr (std::is_same_v<T, IndicatorCone>) {
          return contains(g.cone, y) ? ExtReal::finite(0.0)
                                     : ExtReal::pos_inf();
        } else {
          return ExtReal::finite(0.5 * g.alpha * y.squaredNorm() +
                                 g.linear.dot(y));
        }
      },
      f);
}

// prox_{sigma f}(q) = argmin_y 1/2 |y - q|^2 + sigma f(y).
//   Zero          -> q
//   IndicatorCone -> projection onto the cone
//   QuadLin       -> (q - sigma l) / (1 + sigma alpha)
inline Vector prox(const SeparableFn& f, const Vector& q, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error("prox step must be positive");
  }
  if (q.size() != fn_dim(f)) {
    throw DimensionMismatch("prox: argument size mismatch");
  }
  return std::visit(
      [&](const auto& g) -> Vector {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ZeroFn>) {
          return q;
        } else if constexpr (std::is_same_v<T, IndicatorCone>) {
          return project(g.cone, q);
        } else {
          return (q - sigma * g.linear) / (1.0 + sigma * g.alpha);
        }
      },
      f);
}

namespace detail {

// Support function of a cone, sup_{x in C} y^T x.
inline ExtReal support_value(const Cone& cone, const Vector& y) {
  return std::visit(
      [&](const auto& c) -> ExtReal {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NonnegOrthant>) {
          // Finite (zero) only when no coordinate can push the product up.
          return (y.array() <= 0.0).all() ? ExtReal::finite(0.0)
                                          : ExtReal::pos_inf();
        } else if constexpr (std::is_same_v<T, Box>) {
          double s = 0.0;
          for (Index i = 0; i < y.size(); ++i) {
            s += std::max(c.lower(i) * y(i), c.upper(i) * y(i));
          }
          return ExtReal::finite(s);
        } else if constexpr (std::is_same_v<T, LinfBall>) {
          return ExtReal::finite(c.center.dot(y) +
                                 c.radius * y.template lpNorm<1>());
        } else {
          return y.isZero(0.0) ? ExtReal::finite(0.0) : ExtReal::pos_inf();
        }
      },
      cone);
}

}  // namespace detail

// Fenchel conjugate f*(y) = sup_x y^T x - f(x). Every supported variant has
// a closed form:
//   Zero*              = indicator of {0}
//   IndicatorCone*     = support function of the cone
//   QuadLin(a>0, l)*   = |y - l|^2 / (2a)
//   QuadLin(0, l)*     = indicator of {l}
inline ExtReal conjugate_value(const SeparableFn& f, const Vector& y) {
  if (y.size() != fn_dim(f)) {
    throw DimensionMismatch("conjugate_value: argument size mismatch");
  }
  return std::visit(
      [&](const auto& g) -> ExtReal {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ZeroFn>) {
          return y.isZero(0.0) ? ExtReal::finite(0.0) : ExtReal::pos_inf();
        } else if constexpr (std::is_same_v<T, IndicatorCone>) {
          return detail::support_value(g.cone, y);
        } else {
          if (g.alpha > 0.0) {
            return ExtReal::finite((y - g.linear).squaredNorm() /
                                   (2.0 * g.alpha));
          }
          return (y - g.linear).isZero(0.0) ? ExtReal::finite(0.0)
                                            : ExtReal::pos_inf();
        }
      },
      f);
}

// f(x) + f*(y) - y^T x. Nonnegative for every pair by the Fenchel-Young
// inequality; zero exactly when y is a subgradient of f at x.
inline double fenchel_young_residual(const SeparableFn& f, const Vector& x,
                                     const Vector& y) {
  const ExtReal total = fn_value(f, x) + conjugate_value(f, y);
  if (!total.is_finite) return std::numeric_limits<double>::infinity();
  return total.value - y.dot(x);
}

// Linear objective with linear inequality rows and a cone constraint on x:
// min c^T x  s.t.  A x >= b, x in cone.
struct ConeProgram {
  Vector c;
  Matrix a;
  Vector b;
  Cone cone;
};

inline void validate(const ConeProgram& p) {
  require_finite(p.c, "cone program objective");
  require_finite(p.a, "cone program constraint matrix");
  require_finite(p.b, "cone program rhs");
  if (p.a.cols() != p.c.size() || p.a.rows() != p.b.size() ||
      cone_dim(p.cone) != p.c.size()) {
    throw DimensionMismatch("cone program dimensions are inconsistent");
  }
  validate(p.cone);
}

}  // namespace pdk

#endif  // PDK_CONVEX_HPP_
