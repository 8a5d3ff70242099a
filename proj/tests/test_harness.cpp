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

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "pdk/harness.hpp"

using namespace pdk;

namespace {

bool rows_identical(const Trace& a, const Trace& b) {
  if (a.solver != b.solver || a.rows.size() != b.rows.size()) return false;
  for (size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].iter != b.rows[i].iter ||
        a.rows[i].objective != b.rows[i].objective ||
        a.rows[i].dist_to_ref != b.rows[i].dist_to_ref ||
        a.rows[i].kkt_residual != b.rows[i].kkt_residual) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("small instances get an enumerated reference", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(12, 6, 1);
  const ReferenceSolution ref = make_reference(inst);
  CHECK(ref.source == ReferenceSource::kOracle);
  CHECK(nnls_certificate(inst.a, inst.b, ref.x_ref, ref.dual_ref)
            .max_residual() <= 1e-8);
}

TEST_CASE("wide instances get a long splitting reference", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(30, 20, 2);
  const ReferenceSolution ref = make_reference(inst);
  CHECK(ref.source == ReferenceSource::kHighAccuracyAdmm);
  CHECK(nnls_certificate(inst.a, inst.b, ref.x_ref, ref.dual_ref)
            .max_residual() <= 1e-8);
}

TEST_CASE("iteration cap bounds the trace length", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(8, 4, 3);
  const ReferenceSolution ref = make_reference(inst);
  StepConfig cfg;
  cfg.max_iters = 1;
  const TracedRun run = run_traced(inst, "pdg", cfg, ref);
  CHECK(run.trace.rows.size() == 1);
  CHECK(run.report.iterations == 1);
}

TEST_CASE("a converged run ends below its tolerances", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(10, 5, 4);
  const ReferenceSolution ref = make_reference(inst);
  StepConfig cfg;
  const TracedRun run = run_traced(inst, "pdg", cfg, ref);
  REQUIRE(run.report.termination == Termination::kConverged);
  REQUIRE(!run.trace.rows.empty());
  CHECK(run.trace.rows.back().kkt_residual <=
        std::max(cfg.tol_primal, cfg.tol_dual));
}

TEST_CASE("first-order methods all reach the shared reference",
          "[harness]") {
  const NnlsInstance inst = gen_random_nnls(30, 10, 5);
  const Comparison cmp = compare(inst, {"pdg", "admm", "pdhg"});
  REQUIRE(cmp.runs.size() == 3);
  for (const TracedRun& run : cmp.runs) {
    INFO(run.trace.solver);
    REQUIRE(!run.trace.rows.empty());
    CHECK(run.trace.rows.back().dist_to_ref <= 1e-4);
    for (size_t i = 1; i < run.trace.rows.size(); ++i) {
      REQUIRE(run.trace.rows[i].iter > run.trace.rows[i - 1].iter);
    }
  }
}

TEST_CASE("dual learning homes in on the splitting reference",
          "[harness]") {
  const NnlsInstance inst = gen_random_nnls(6, 3, 6);
  const ReferenceSolution ref =
      make_reference(inst, ReferenceSource::kHighAccuracyAdmm);
  StepConfig cfg;
  cfg.max_iters = 200000;
  const TracedRun gda = run_traced(inst, "gda", cfg, ref);
  REQUIRE(!gda.trace.rows.empty());
  CHECK(gda.trace.rows.back().dist_to_ref <= 1e-3);
}

TEST_CASE("comparison argument checking", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(8, 4, 7);
  CHECK(compare(inst, {"admm"}).runs.size() == 1);
  CHECK_THROWS_AS(compare(inst, {}), EmptyComparison);
  CHECK_THROWS_AS(compare(inst, {"simplex"}), UnknownSolver);
}

TEST_CASE("identical inputs give bit-identical traces", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(10, 5, 8);
  StepConfig cfg;
  cfg.max_iters = 200;
  const Comparison first = compare(inst, {"pdg", "admm-dual"}, cfg);
  const Comparison second = compare(inst, {"pdg", "admm-dual"}, cfg);
  REQUIRE(first.runs.size() == second.runs.size());
  for (size_t i = 0; i < first.runs.size(); ++i) {
    CHECK(rows_identical(first.runs[i].trace, second.runs[i].trace));
  }
}

TEST_CASE("splitting residual running minimum never rises", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(12, 6, 9);
  const ReferenceSolution ref = make_reference(inst);
  const TracedRun run = run_traced(inst, "admm", {}, ref);
  double running = run.trace.rows.front().kkt_residual;
  for (const TraceRow& row : run.trace.rows) {
    const double next = std::min(running, row.kkt_residual);
    REQUIRE(next <= running);
    running = next;
  }
  CHECK(running <= 1e-6);
}

TEST_CASE("empty traces write a header-only file", "[harness]") {
  const std::string path = "harness_empty.csv";
  write_csv({Trace{"pdg", {}}}, path);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == kTraceCsvHeader);
  CHECK_FALSE(std::getline(in, line));
  std::remove(path.c_str());
}

TEST_CASE("csv rows follow the header one per iteration", "[harness]") {
  Trace t{"pdg", {TraceRow{1, 0.5, 0.25, 0.125},
                  TraceRow{2, 0.25, 0.125, 0.0625}}};
  const std::string path = "harness_two_rows.csv";
  write_csv({t}, path);
  std::ifstream in(path);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);
  std::remove(path.c_str());
}

TEST_CASE("csv round-trip reproduces every value exactly", "[harness]") {
  const NnlsInstance inst = gen_random_nnls(9, 4, 10);
  StepConfig cfg;
  cfg.max_iters = 50;
  const Comparison cmp = compare(inst, {"pdhg", "admm"}, cfg);
  std::vector<Trace> traces;
  for (const TracedRun& run : cmp.runs) traces.push_back(run.trace);

  const std::string path = "harness_roundtrip.csv";
  write_csv(traces, path);
  const std::vector<Trace> parsed = read_csv(path);
  std::remove(path.c_str());

  // Rows are written sorted by solver name: admm before pdhg.
  REQUIRE(parsed.size() == 2);
  CHECK(rows_identical(parsed[0], traces[1]));
  CHECK(rows_identical(parsed[1], traces[0]));
}

TEST_CASE("unwritable and unreadable paths raise io errors", "[harness]") {
  CHECK_THROWS_AS(write_csv({}, "/nonexistent_dir_pdk/x.csv"), IoError);
  CHECK_THROWS_AS(read_csv("harness_missing_file.csv"), IoError);
}

TEST_CASE("generated instances are deterministic in the seed", "[harness]") {
  const NnlsInstance a = gen_random_nnls(7, 5, 42);
  const NnlsInstance b = gen_random_nnls(7, 5, 42);
  CHECK((a.a.array() == b.a.array()).all());
  CHECK((a.b.array() == b.b.array()).all());
  const NnlsInstance c = gen_random_nnls(7, 5, 43);
  CHECK(!((a.a.array() == c.a.array()).all()));
}

TEST_CASE("consistent block families share one planted signal",
          "[harness]") {
  const ConsistentBlocks fam = gen_consistent_blocks(4, 8, 6, 11);
  REQUIRE(fam.blocks.size() == 4);
  for (Index j = 0; j < 3; ++j) CHECK(fam.x_true(j) == 0.0);
  for (Index j = 3; j < 6; ++j) CHECK(fam.x_true(j) >= 0.5);
  for (const SplitProblem& blk : fam.blocks) {
    CHECK(blk.a.rows() == 8);
    CHECK((blk.b - blk.a * fam.x_true).norm() <= 0.1 * 8);
  }
}
