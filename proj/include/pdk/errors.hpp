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

#ifndef PDK_ERRORS_HPP_
#define PDK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pdk {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operand shapes are incompatible (matrix products, elementwise ops, graph
// wiring, instance data whose sizes disagree).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A value that must be finite contains NaN or +-Inf.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

// Input to a symmetric factorization deviates from its transpose by more
// than the relative tolerance.
class NotSymmetric : public Error {
 public:
  using Error::Error;
};

// A Cholesky pivot fell below the positivity threshold.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// A graph evaluation was requested without a value for some input node.
class UnboundInput : public Error {
 public:
  using Error::Error;
};

// Step sizes violate the contraction condition tau * sigma * |K|^2 <= 1.
class StepSizeViolation : public Error {
 public:
  using Error::Error;
};

// An enumeration oracle exhausted its search space without certifying a
// solution, or was asked for a problem size it does not support.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

// Dual variables handed to a network bound do not match the output
// specification they are supposed to certify.
class SpecMismatch : public Error {
 public:
  using Error::Error;
};

// A warm start lies outside the feasible box it must belong to.
class InfeasibleStart : public Error {
 public:
  using Error::Error;
};

// The composite matrix A^T A + L is not positive definite, so the
// regularized dual is unbounded in some direction.
class SingularComposite : public Error {
 public:
  using Error::Error;
};

// A comparison run was requested with an empty solver list.
class EmptyComparison : public Error {
 public:
  using Error::Error;
};

// A solver id string does not name any registered method.
class UnknownSolver : public Error {
 public:
  using Error::Error;
};

// A JSON document does not conform to the expected schema. The message
// names the offending field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdk

#endif  // PDK_ERRORS_HPP_
