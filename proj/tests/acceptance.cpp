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

// Acceptance battery. Each numbered criterion prints exactly one PASS or
// FAIL line; the process exits 0 only if all twelve pass. Criterion 3
// audits every converged report the other convex-solver criteria produce,
// so the checks run first and the lines print afterwards in order.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "pdk/autodiff.hpp"
#include "pdk/convex.hpp"
#include "pdk/diet.hpp"
#include "pdk/graph_reg.hpp"
#include "pdk/harness.hpp"
#include "pdk/power_flow.hpp"
#include "pdk/verification.hpp"

namespace {

using pdk::Index;
using pdk::Matrix;
using pdk::StepConfig;
using pdk::Vector;

struct Result {
  std::string label;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Converged reports whose certificate claims an optimum; criterion 3 audits
// this pool. The verification search stays out: its gap field records the
// relaxation sandwich width, which stays open for ReLU nets no matter how
// converged the search is, so it is not a convergence certificate.
std::vector<pdk::SolveReport> g_converged;

void record(const pdk::SolveReport& report) {
  if (report.termination == pdk::Termination::kConverged) {
    g_converged.push_back(report);
  }
}

Matrix random_matrix(Index m, Index n, std::mt19937_64* rng) {
  std::normal_distribution<double> normal;
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = normal(*rng);
  }
  return a;
}

Vector random_vector(Index n, std::mt19937_64* rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(*rng);
  return v;
}

const Vector& gradient_for(const pdk::Gradients& grads, int id) {
  for (const auto& [node, grad] : grads) {
    if (node == id) return grad;
  }
  throw pdk::Error("no gradient recorded for the requested input");
}

double inf_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

pdk::SolveReport run_solver(const pdk::NnlsInstance& inst,
                            const std::string& id, StepConfig cfg,
                            const pdk::Observer& observer = {}) {
  if (id == "pdg") return pdk::solve_pdg(inst.a, inst.b, cfg, observer);
  if (id == "admm") {
    return pdk::solve_admm(pdk::SplitProblem{inst.a, inst.b}, cfg, observer);
  }
  if (id == "admm-dual") {
    return pdk::solve_admm_dual_nnls(inst.a, inst.b, cfg, observer);
  }
  return pdk::solve_pdhg(pdk::nnls_as_saddle(inst), cfg, observer);
}

// -------------------------------------------------------------------------
// 1. The two gradient engines agree with the analytic normal-equations
//    gradient and with central finite differences.
// -------------------------------------------------------------------------
Result criterion1() {
  Result r{"gradient engines agree on 100 random least-squares graphs"};
  Timer timer;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Index> dim(1, 20);
  double worst_pair = 0.0, worst_fd = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index m = dim(rng), n = dim(rng);
    const Matrix a = random_matrix(m, n, &rng);
    const Vector b = random_vector(m, &rng);
    const Vector x = random_vector(n, &rng);
    const pdk::NnlsGraph g = pdk::make_nnls_graph(a, b);
    const pdk::Bindings inputs = {{g.x, x}};
    const Vector chain = gradient_for(pdk::grad_chain(g.graph, inputs), g.x);
    const Vector adjoint =
        gradient_for(pdk::grad_adjoint(g.graph, inputs).gradients, g.x);
    const Vector analytic = a.transpose() * (a * x - b);
    worst_pair = std::max({worst_pair, inf_diff(chain, adjoint),
                           inf_diff(chain, analytic),
                           inf_diff(adjoint, analytic)});
    const double h = 1e-6;
    for (Index i = 0; i < n; ++i) {
      Vector hi = x, lo = x;
      hi(i) += h;
      lo(i) -= h;
      const double fd = (pdk::forward(g.graph, {{g.x, hi}}).value -
                         pdk::forward(g.graph, {{g.x, lo}}).value) /
                        (2.0 * h);
      worst_fd = std::max(worst_fd, std::abs(chain(i) - fd) /
                                        (1.0 + std::abs(fd)));
    }
  }
  r.seconds = timer.seconds();
  r.pass = worst_pair <= 1e-12 && worst_fd <= 1e-5 && r.seconds < 1.0;
  std::ostringstream os;
  os << "pairwise " << worst_pair << ", fd " << worst_fd;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 2. Four solvers reach the active-set oracle on 50 random 30x10 systems.
// -------------------------------------------------------------------------
Result criterion2() {
  Result r{"solvers match the active-set oracle on 50 random 30x10 systems"};
  Timer timer;
  const std::vector<std::string> ids = {"pdg", "admm", "admm-dual", "pdhg"};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const pdk::NnlsInstance inst = pdk::gen_random_nnls(30, 10, seed);
    const pdk::NnlsSolution oracle = pdk::nnls_active_set_oracle(inst);
    const double allowed = 1e-4 * (1.0 + oracle.x.norm());
    for (const std::string& id : ids) {
      StepConfig cfg;
      cfg.max_iters = 20000;
      const pdk::SolveReport rep = run_solver(inst, id, cfg);
      record(rep);
      worst = std::max(worst, (rep.state.x - oracle.x).norm() / allowed);
    }
  }
  r.seconds = timer.seconds();
  r.pass = worst <= 1.0 && r.seconds < 30.0;
  std::ostringstream os;
  os << "worst normalized error " << worst;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 3. Certificates are sound: converged reports sit at a tiny relative gap,
//    and weak duality holds at every traced iterate with a feasible pair.
// -------------------------------------------------------------------------
Result criterion3() {
  Result r{"certificates: tiny gap when converged, weak duality on traces"};
  Timer timer;
  // A pair only counts as feasible once its residuals are at machine-noise
  // level; the traced gap equals x^T A^T lambda there, so a looser gate
  // would let feasibility defects masquerade as duality violations.
  constexpr double kFeasible = 1e-11;
  double min_gap = 0.0;
  long feasible_rows = 0;
  for (std::uint64_t seed = 101; seed <= 105; ++seed) {
    const pdk::NnlsInstance inst = pdk::gen_random_nnls(12, 6, seed);
    for (const std::string& id : {"pdg", "admm", "admm-dual", "pdhg"}) {
      const pdk::Observer observer = [&](int, const pdk::IterateState& s) {
        if (s.x.size() != inst.a.cols()) return;
        const pdk::Certificate cert = pdk::nnls_certificate(
            inst.a, inst.b, s.x, inst.a * s.x - inst.b);
        if (cert.primal_feasibility <= kFeasible &&
            cert.dual_feasibility <= kFeasible) {
          ++feasible_rows;
          min_gap = std::min(min_gap, cert.gap);
        }
      };
      StepConfig cfg;
      cfg.max_iters = 20000;
      record(run_solver(inst, id, cfg, observer));
    }
  }
  double worst_rel_gap = 0.0;
  for (const pdk::SolveReport& rep : g_converged) {
    worst_rel_gap = std::max(worst_rel_gap, rep.certificate.rel_gap);
  }
  r.seconds = timer.seconds();
  r.pass = worst_rel_gap <= 1e-6 && feasible_rows > 0 && min_gap >= -1e-9;
  std::ostringstream os;
  os << g_converged.size() << " converged reports, worst rel_gap "
     << worst_rel_gap << ", min gap over " << feasible_rows
     << " feasible rows " << min_gap;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 4. Three-solver convergence traces on one seeded 30x10 instance.
// -------------------------------------------------------------------------
Result criterion4() {
  Result r{"pdg/admm/pdhg traces reach the reference on a seeded 30x10"};
  Timer timer;
  const pdk::NnlsInstance inst = pdk::gen_random_nnls(30, 10, 7);
  StepConfig cfg;
  cfg.max_iters = 10000;
  const pdk::Comparison cmp = pdk::compare(inst, {"pdg", "admm", "pdhg"}, cfg);
  std::vector<pdk::Trace> traces;
  bool ok = true;
  for (const pdk::TracedRun& run : cmp.runs) {
    record(run.report);
    const pdk::TraceRow& last = run.trace.rows.back();
    ok = ok && static_cast<int>(run.trace.rows.size()) <= 10000 &&
         last.dist_to_ref <= 1e-4 && last.kkt_residual <= 1e-6;
    traces.push_back(run.trace);
  }
  pdk::write_csv(traces, "acceptance_fig4.csv");
  r.seconds = timer.seconds();
  r.pass = ok && r.seconds < 10.0;
  r.detail = "trace csv written to acceptance_fig4.csv";
  return r;
}

// -------------------------------------------------------------------------
// 5. The dual learner lands on the splitting reference multiplier.
// -------------------------------------------------------------------------
Result criterion5() {
  Result r{"dual learner reaches the admm reference multiplier on 20x8"};
  Timer timer;
  const pdk::NnlsInstance inst = pdk::gen_random_nnls(20, 8, 5);
  const pdk::ReferenceSolution ref =
      pdk::make_reference(inst, pdk::ReferenceSource::kHighAccuracyAdmm);
  StepConfig cfg;
  cfg.max_iters = 30000;
  const pdk::TracedRun run = pdk::run_traced(inst, "gda", cfg, ref);
  record(run.report);
  const double dist = run.trace.rows.back().dist_to_ref;
  const double allowed = 1e-3 * (1.0 + ref.dual_ref.norm());
  r.seconds = timer.seconds();
  r.pass = dist <= allowed && r.seconds < 10.0;
  std::ostringstream os;
  os << "final distance " << dist << " allowed " << allowed;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 6. Consensus splitting equals the monolithic dual method on stacked
//    blocks, and parallel block execution is bitwise-stable to 1e-12.
// -------------------------------------------------------------------------
Result criterion6() {
  Result r{"consensus matches the stacked monolithic solve for N=1,2,4,8"};
  Timer timer;
  double worst_mono = 0.0, worst_par = 0.0;
  for (Index blocks : {1, 2, 4, 8}) {
    const pdk::ConsistentBlocks family =
        pdk::gen_consistent_blocks(blocks, 10, 6, 40 + blocks);
    Matrix stacked_a(blocks * 10, 6);
    Vector stacked_b(blocks * 10);
    for (Index i = 0; i < blocks; ++i) {
      stacked_a.middleRows(i * 10, 10) = family.blocks[i].a;
      stacked_b.segment(i * 10, 10) = family.blocks[i].b;
    }
    StepConfig cfg;
    cfg.max_iters = 50000;
    const pdk::SolveReport mono =
        pdk::solve_admm_dual_nnls(stacked_a, stacked_b, cfg);
    const pdk::SolveReport serial =
        pdk::solve_consensus_admm(family.blocks, cfg);
    StepConfig par_cfg = cfg;
    par_cfg.parallel_blocks = true;
    const pdk::SolveReport parallel =
        pdk::solve_consensus_admm(family.blocks, par_cfg);
    record(mono);
    record(serial);
    worst_mono = std::max(worst_mono, inf_diff(serial.state.x, mono.state.x));
    worst_par =
        std::max({worst_par, inf_diff(serial.state.x, parallel.state.x),
                  inf_diff(serial.state.z, parallel.state.z)});
  }
  r.seconds = timer.seconds();
  r.pass = worst_mono <= 1e-5 && worst_par <= 1e-12;
  std::ostringstream os;
  os << "mono gap " << worst_mono << ", parallel gap " << worst_par;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 7. The specialized least-squares saddle step equals the generic prox
//    path, and the quadratic prox matches a numerical argmin.
// -------------------------------------------------------------------------
Result criterion7() {
  Result r{"specialized saddle step equals the generic prox path"};
  Timer timer;
  std::mt19937_64 rng(77);
  const pdk::NnlsInstance inst = pdk::gen_random_nnls(9, 6, 3);
  const pdk::SaddleProblem saddle = pdk::nnls_as_saddle(inst);
  double worst_step = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Vector x = random_vector(6, &rng);
    Vector y = random_vector(9, &rng);
    Vector xbar = random_vector(6, &rng);
    Vector xs = x, ys = y, xbars = xbar;
    pdk::pdhg_step(saddle, 0.3, 0.4, 1.0, &x, &y, &xbar);
    pdk::pdhg_step_nnls(inst.a, inst.b, 0.3, 0.4, 1.0, &xs, &ys, &xbars);
    worst_step = std::max({worst_step, inf_diff(x, xs), inf_diff(y, ys),
                           inf_diff(xbar, xbars)});
  }

  double worst_prox = 0.0;
  for (double alpha : {0.0, 0.7, 2.5}) {
    for (int t = 0; t < 25; ++t) {
      const Vector q = random_vector(4, &rng);
      const Vector linear = random_vector(4, &rng);
      const pdk::SeparableFn f = pdk::QuadLin{alpha, linear};
      const double sigma = 0.7;
      const Vector closed = pdk::prox(f, q, sigma);
      for (Index i = 0; i < q.size(); ++i) {
        double lo = q(i) - 50.0, hi = q(i) + 50.0;
        const auto obj = [&](double v) {
          return 0.5 * (v - q(i)) * (v - q(i)) +
                 sigma * (0.5 * alpha * v * v + linear(i) * v);
        };
        for (int it = 0; it < 200; ++it) {
          const double m1 = lo + (hi - lo) / 3.0;
          const double m2 = hi - (hi - lo) / 3.0;
          if (obj(m1) <= obj(m2)) {
            hi = m2;
          } else {
            lo = m1;
          }
        }
        worst_prox =
            std::max(worst_prox, std::abs(closed(i) - 0.5 * (lo + hi)));
      }
    }
  }
  r.seconds = timer.seconds();
  r.pass = worst_step <= 1e-12 && worst_prox <= 1e-6;
  std::ostringstream os;
  os << "step gap " << worst_step << ", prox gap " << worst_prox;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 8. The diet LP meets the vertex-enumeration oracle with strong duality
//    and complementary slackness.
// -------------------------------------------------------------------------
Result criterion8() {
  Result r{"diet LP matches the vertex oracle on 20 random instances"};
  Timer timer;
  double worst_cost = 0.0, worst_duality = 0.0, worst_compl = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const pdk::DietInstance inst = pdk::gen_random_diet(6, 8, seed);
    const pdk::LpVertexSolution oracle = pdk::diet_vertex_oracle(inst);
    StepConfig cfg;
    cfg.max_iters = 300000;
    cfg.tol_gap = 1e-9;
    const pdk::SolveReport rep = pdk::lp_primal_dual(inst, cfg);
    record(rep);
    worst_cost = std::max(
        worst_cost, std::abs(rep.objective - oracle.cost) / oracle.cost);
    worst_duality =
        std::max(worst_duality,
                 std::abs(rep.objective -
                          inst.requirements.dot(rep.state.lambda)) /
                     (1.0 + std::abs(rep.objective)));
    worst_compl = std::max(worst_compl, rep.certificate.complementarity);
  }
  r.seconds = timer.seconds();
  r.pass =
      worst_cost <= 1e-6 && worst_duality <= 1e-6 && worst_compl <= 1e-6;
  std::ostringstream os;
  os << "cost " << worst_cost << ", duality " << worst_duality << ", compl "
     << worst_compl;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 9. Verification sandwich: search value <= grid max <= every dual bound,
//    with zero false certificates across 20 nets and two radii.
// -------------------------------------------------------------------------
Result criterion9() {
  Result r{"verification sandwich holds on 20 nets at eps 0.05 and 0.1"};
  Timer timer;
  std::mt19937_64 rng(909);
  std::normal_distribution<double> normal;
  bool ok = true;
  int false_certs = 0;
  for (std::uint64_t seed = 1; seed <= 20 && ok; ++seed) {
    for (double eps : {0.05, 0.1}) {
      const pdk::NnvInstance inst = pdk::gen_random_nnv(seed, eps);
      const pdk::NnvRun run = pdk::nnv_primal_dual(inst);
      const double grid = pdk::nnv_grid_max(inst);
      ok = ok && run.candidate_value <= grid + 1e-9 &&
           grid <= run.dual_bound + 1e-9;
      if (run.certified && grid >= 0.0) ++false_certs;
      const pdk::NnvBoxes boxes = pdk::nnv_boxes(inst);
      const std::vector<pdk::NnvStage> stages = pdk::nnv_stages(inst);
      for (int draw = 0; draw < 5; ++draw) {
        std::vector<Vector> lambdas;
        for (const pdk::NnvStage& stage : stages) {
          Vector l(stage.out_dim);
          for (Index i = 0; i < l.size(); ++i) l(i) = normal(rng);
          lambdas.push_back(l);
        }
        lambdas.back() = -inst.spec.c;
        const double bound = pdk::nnv_dual_bound(inst, boxes, lambdas);
        ok = ok && bound >= grid - 1e-9;
      }
    }
  }
  r.seconds = timer.seconds();
  r.pass = ok && false_certs == 0 && r.seconds < 60.0;
  std::ostringstream os;
  os << "false certificates " << false_certs;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 10. The grid surrogate reaches the dense-grid optimum with clean
//     constraints and an active multiplier on the binding line.
// -------------------------------------------------------------------------
Result criterion10() {
  Result r{"two-bus surrogate matches the dense grid with a binding line"};
  Timer timer;
  const pdk::OpfInstance inst = pdk::opf_two_bus_toy();
  StepConfig cfg;
  cfg.max_iters = 400000;
  cfg.tol_primal = 1e-7;
  cfg.tol_dual = 1e-4;
  cfg.tol_gap = 1e-5;
  const pdk::OpfRun run = pdk::opf_primal_dual(inst, cfg);
  record(run.report);
  const auto [v_grid, loss_grid] = pdk::opf_grid_oracle(inst, 1e-3);
  const double v_gap = inf_diff(run.v, v_grid);
  const double violation = pdk::opf_violations(inst, run.v).max_violation();
  const double mu_line = run.duals.mu.size() > 0 ? run.duals.mu(0) : 0.0;
  r.seconds = timer.seconds();
  r.pass = v_gap <= 1e-3 && violation <= 1e-6 && mu_line > 1e-6;
  std::ostringstream os;
  os << "v gap " << v_gap << ", violation " << violation << ", line mu "
     << mu_line;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 11. Graph-regularized recovery matches the closed form, including the
//     exact 2x2 pair, and the fit dual closes its gap.
// -------------------------------------------------------------------------
Result criterion11() {
  Result r{"graph-regularized dual recovery matches the closed form"};
  Timer timer;
  Matrix lap2(2, 2);
  lap2 << 1.0, -1.0, -1.0, 1.0;
  Vector y2(2);
  y2 << 2.0, 0.0;
  const pdk::LrmpUnconstrained exact{1.0, y2, lap2};
  Vector z_star(2);
  z_star << 4.0 / 3.0, 2.0 / 3.0;
  StepConfig tight;
  tight.tol_dual = 1e-10;
  tight.max_iters = 200000;
  const pdk::LrmpDualRun exact_run = pdk::lrmp_dual_solve(exact, tight);
  record(exact_run.report);
  double worst = inf_diff(exact_run.z, z_star);
  worst = std::max(worst, inf_diff(pdk::lrmp_closed_form(exact), z_star));

  std::mt19937_64 rng(555);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> qdist(0.2, 3.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 11);
    const Matrix lap = pdk::random_connected_laplacian(n, seed);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = normal(rng);
    const pdk::LrmpUnconstrained inst{qdist(rng), y, lap};
    const pdk::LrmpDualRun run = pdk::lrmp_dual_solve(inst, tight);
    record(run.report);
    worst = std::max(worst, inf_diff(run.z, pdk::lrmp_closed_form(inst)));
  }

  double worst_gap = 0.0;
  bool gap_sound = true;
  for (std::uint64_t seed : {1, 4, 6}) {
    std::mt19937_64 gen(seed);
    Matrix a = Matrix::Identity(6, 6);
    for (Index i = 0; i < 6; ++i) {
      for (Index k = 0; k < 6; ++k) a(i, k) += 0.25 * normal(gen);
    }
    Vector b(6);
    for (Index i = 0; i < 6; ++i) b(i) = normal(gen);
    const pdk::LrmpConstrained fit{a, b,
                                   pdk::random_connected_laplacian(6, seed)};
    StepConfig cfg;
    cfg.max_iters = 200000;
    cfg.tol_dual = 1e-6;
    const pdk::SolveReport rep = pdk::lr_nnls_dual_solve(fit, cfg);
    record(rep);
    worst_gap = std::max(worst_gap, rep.certificate.gap);
    gap_sound = gap_sound && rep.certificate.gap >= -1e-9;
  }
  r.seconds = timer.seconds();
  r.pass = worst <= 1e-6 && worst_gap <= 1e-4 && gap_sound;
  std::ostringstream os;
  os << "recovery error " << worst << ", fit gap " << worst_gap;
  r.detail = os.str();
  return r;
}

// -------------------------------------------------------------------------
// 12. The binary round-trips generate -> solve -> certify for every
//     problem family, and its trace CSV parses back bit-exactly.
// -------------------------------------------------------------------------
int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Result criterion12() {
  Result r{"cli round-trips all five families and re-emits its csv exactly"};
  Timer timer;
  const char* cli = std::getenv("PDK_CLI");
  if (cli == nullptr) {
    r.detail = "PDK_CLI is not set";
    return r;
  }
  bool ok = true;
  std::string bad;
  for (const std::string& type : {"nnls", "diet", "nnv", "opf", "lrmp"}) {
    const std::string p = "acc_" + type + ".json";
    const std::string s = "acc_" + type + "_sol.json";
    if (run_cli(cli, "generate --type " + type + " --out " + p) != 0 ||
        run_cli(cli, "solve --problem " + p + " --out " + s) != 0 ||
        run_cli(cli, "certify --problem " + p + " --solution " + s) != 0) {
      ok = false;
      bad += " " + type;
    }
  }
  if (run_cli(cli,
              "generate --type nnls --m 30 --n 10 --seed 7 "
              "--out acc_cmp.json") != 0 ||
      run_cli(cli,
              "compare --problem acc_cmp.json --solvers pdg,admm,pdhg "
              "--out acc_trace.csv") != 0) {
    ok = false;
    bad += " compare";
  } else {
    pdk::write_csv(pdk::read_csv("acc_trace.csv"), "acc_trace2.csv");
    if (slurp("acc_trace.csv") != slurp("acc_trace2.csv") ||
        slurp("acc_trace.csv").empty()) {
      ok = false;
      bad += " csv";
    }
  }
  r.seconds = timer.seconds();
  r.pass = ok;
  r.detail = ok ? "all families exit 0" : "failing:" + bad;
  return r;
}

}  // namespace

int main() {
  std::vector<Result> results(12);
  results[0] = criterion1();
  results[1] = criterion2();
  results[3] = criterion4();
  results[4] = criterion5();
  results[5] = criterion6();
  results[6] = criterion7();
  results[7] = criterion8();
  results[8] = criterion9();
  results[9] = criterion10();
  results[10] = criterion11();
  results[11] = criterion12();
  // Audits every converged report recorded above, so it runs last.
  results[2] = criterion3();

  bool all_pass = true;
  for (size_t i = 0; i < results.size(); ++i) {
    const Result& r = results[i];
    all_pass = all_pass && r.pass;
    std::printf("criterion %2zu: %s  %s (%s; %.2fs)\n", i + 1,
                r.pass ? "PASS" : "FAIL", r.label.c_str(), r.detail.c_str(),
                r.seconds);
  }
  return all_pass ? 0 : 1;
}
