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

// Experiment runner for the nonnegative least squares solvers: reference
// solutions, per-iteration convergence traces, side-by-side comparisons,
// and CSV emission.
//
// Every trace row records the primal objective, the distance to a shared
// reference solution, and a solver-independent KKT residual evaluated at
// the implied duals lambda = Ax - b, so rows from different methods are
// directly comparable. The one exception is the distance column of the
// dual-learning method "gda", whose natural iterate is the multiplier:
// there the distance is measured against the reference dual instead.

#ifndef PDK_HARNESS_HPP_
#define PDK_HARNESS_HPP_

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdk/certificates.hpp"
#include "pdk/errors.hpp"
#include "pdk/nnls.hpp"
#include "pdk/solvers.hpp"

namespace pdk {

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double dist_to_ref = 0.0;
  double kkt_residual = 0.0;
};

struct Trace {
  std::string solver;
  std::vector<TraceRow> rows;
};

enum class ReferenceSource { kOracle, kHighAccuracyAdmm };

struct ReferenceSolution {
  Vector x_ref;
  Vector dual_ref;
  ReferenceSource source = ReferenceSource::kOracle;
};

// Builds and certifies a reference solution: the enumeration oracle when
// the column count permits it, a long high-accuracy splitting run
// otherwise. A reference that fails its own optimality check is never
// returned.
inline ReferenceSolution make_reference(const NnlsInstance& inst,
                                        ReferenceSource source) {
  ReferenceSolution ref;
  ref.source = source;
  if (source == ReferenceSource::kOracle) {
    const NnlsSolution sol = nnls_active_set_oracle(inst);
    ref.x_ref = sol.x;
    ref.dual_ref = sol.lambda;
  } else {
    StepConfig cfg;
    cfg.max_iters = 100000;
    cfg.tol_primal = 1e-10;
    cfg.tol_dual = 1e-10;
    cfg.tol_gap = 1e-10;
    const SolveReport rep = solve_admm(SplitProblem{inst.a, inst.b}, cfg);
    ref.x_ref = rep.state.x;
    ref.dual_ref = rep.state.lambda;
  }
  const double residual =
      nnls_certificate(inst.a, inst.b, ref.x_ref, ref.dual_ref)
          .max_residual();
  if (!(residual <= 1e-8)) {
    throw OracleFailure("reference solution failed its optimality check: "
                        "KKT residual " + std::to_string(residual));
  }
  return ref;
}

inline ReferenceSolution make_reference(const NnlsInstance& inst) {
  return make_reference(inst, inst.a.cols() <= 16
                                  ? ReferenceSource::kOracle
                                  : ReferenceSource::kHighAccuracyAdmm);
}

inline const std::vector<std::string>& solver_ids() {
  static const std::vector<std::string> ids = {
      "pdg", "admm", "admm-dual", "pdhg", "gda", "consensus"};
  return ids;
}

struct TracedRun {
  Trace trace;
  SolveReport report;
};

// Runs one solver over the instance, recording a row per iteration through
// the observer hook.
inline TracedRun run_traced(const NnlsInstance& inst, const std::string& id,
                            StepConfig cfg, const ReferenceSolution& ref) {
  validate(inst);
  TracedRun out;
  out.trace.solver = id;
  const bool dual_distance = id == "gda";
  const Observer observer = [&](int iter, const IterateState& state) {
    TraceRow row;
    row.iter = iter;
    row.objective = nnls_objective(inst, state.x);
    row.dist_to_ref = dual_distance ? (state.lambda - ref.dual_ref).norm()
                                    : (state.x - ref.x_ref).norm();
    row.kkt_residual =
        nnls_certificate(inst.a, inst.b, state.x, inst.a * state.x - inst.b)
            .max_residual();
    out.trace.rows.push_back(row);
  };

  if (id == "pdg") {
    out.report = solve_pdg(inst.a, inst.b, cfg, observer);
  } else if (id == "admm") {
    out.report = solve_admm(SplitProblem{inst.a, inst.b}, cfg, observer);
  } else if (id == "admm-dual") {
    out.report = solve_admm_dual_nnls(inst.a, inst.b, cfg, observer);
  } else if (id == "pdhg") {
    out.report = solve_pdhg(nnls_as_saddle(inst), cfg, observer);
  } else if (id == "gda") {
    out.report = solve_gda(inst.a, inst.b, cfg, observer);
  } else if (id == "consensus") {
    out.report = solve_consensus_admm({SplitProblem{inst.a, inst.b}}, cfg,
                                      observer);
  } else {
    throw UnknownSolver("no solver is registered under id '" + id + "'");
  }
  return out;
}

struct Comparison {
  ReferenceSolution ref;
  std::vector<TracedRun> runs;
};

// Runs every requested solver against one shared reference solution.
inline Comparison compare(const NnlsInstance& inst,
                          const std::vector<std::string>& ids,
                          StepConfig cfg = {}) {
  if (ids.empty()) {
    throw EmptyComparison("comparison needs at least one solver id");
  }
  Comparison out;
  out.ref = make_reference(inst);
  for (const std::string& id : ids) {
    out.runs.push_back(run_traced(inst, id, cfg, out.ref));
  }
  return out;
}

namespace detail {

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kTraceCsvHeader =
    "solver,iter,objective,dist_to_ref,kkt_residual";

// Writes traces as CSV, rows ordered by (solver, iter). Floats use 17
// significant digits so a parse-back reproduces every value bit for bit.
inline void write_csv(const std::vector<Trace>& traces,
                      const std::string& path) {
  std::vector<const Trace*> ordered;
  for (const Trace& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Trace* a, const Trace* b) {
                     return a->solver < b->solver;
                   });
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kTraceCsvHeader << "\n";
  for (const Trace* t : ordered) {
    for (const TraceRow& row : t->rows) {
      out << t->solver << ',' << row.iter << ','
          << detail::format_g17(row.objective) << ','
          << detail::format_g17(row.dist_to_ref) << ','
          << detail::format_g17(row.kkt_residual) << "\n";
    }
  }
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

// Parses a file produced by write_csv back into traces, grouping
// consecutive rows that share a solver name.
inline std::vector<Trace> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw IoError("'" + path + "' does not start with the trace header");
  }
  std::vector<Trace> traces;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string solver, field;
    if (!std::getline(ss, solver, ',')) {
      throw IoError("malformed trace row: " + line);
    }
    TraceRow row;
    auto next_double = [&](double* slot) {
      if (!std::getline(ss, field, ',')) {
        throw IoError("malformed trace row: " + line);
      }
      *slot = std::strtod(field.c_str(), nullptr);
    };
    double iter = 0.0;
    next_double(&iter);
    row.iter = static_cast<int>(iter);
    next_double(&row.objective);
    next_double(&row.dist_to_ref);
    next_double(&row.kkt_residual);
    if (traces.empty() || traces.back().solver != solver) {
      traces.push_back(Trace{solver, {}});
    }
    traces.back().rows.push_back(row);
  }
  return traces;
}

// Random instance with a planted sparse nonnegative signal: standard
// normal matrix, x_true zero on the first half of its entries and uniform
// on [0.5, 1.5] on the rest, b = A x_true - 0.1 * noise.
inline NnlsInstance gen_random_nnls(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) {
    throw DimensionMismatch("gen_random_nnls: dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> positive(0.5, 1.5);
  NnlsInstance inst;
  inst.a = Matrix(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) inst.a(i, j) = normal(rng);
  }
  Vector x_true = Vector::Zero(n);
  for (Index j = n / 2; j < n; ++j) x_true(j) = positive(rng);
  Vector noise(m);
  for (Index i = 0; i < m; ++i) noise(i) = normal(rng);
  inst.b = inst.a * x_true - 0.1 * noise;
  return inst;
}

struct ConsistentBlocks {
  std::vector<SplitProblem> blocks;
  Vector x_true;
};

// Block family sharing one planted signal, for consensus experiments.
inline ConsistentBlocks gen_consistent_blocks(Index count, Index m, Index n,
                                              std::uint64_t seed) {
  if (count < 1) throw DimensionMismatch("need at least one block");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> positive(0.5, 1.5);
  ConsistentBlocks out;
  out.x_true = Vector::Zero(n);
  for (Index j = n / 2; j < n; ++j) out.x_true(j) = positive(rng);
  for (Index blk = 0; blk < count; ++blk) {
    SplitProblem block;
    block.a = Matrix(m, n);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) block.a(i, j) = normal(rng);
    }
    Vector noise(m);
    for (Index i = 0; i < m; ++i) noise(i) = normal(rng);
    block.b = block.a * out.x_true - 0.1 * noise;
    out.blocks.push_back(std::move(block));
  }
  return out;
}

}  // namespace pdk

#endif  // PDK_HARNESS_HPP_
