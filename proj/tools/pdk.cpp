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

// Command-line driver. Four subcommands cover the full workflow:
//
//   generate  write a seeded problem JSON of a requested type
//   solve     run the matching method and print a report JSON
//   compare   run several solvers on one instance and write a trace CSV
//   certify   check a problem/solution pair and print a certificate JSON
//
// Exit codes: 0 converged or certified, 1 usage or data error, 2 iteration
// budget exhausted, 3 valid input that does not meet the certification
// tolerance.

#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "pdk/harness.hpp"
#include "pdk/json_io.hpp"

namespace {

using pdk::Index;
using pdk::Json;
using pdk::Matrix;
using pdk::Problem;
using pdk::StepConfig;
using pdk::Termination;
using pdk::Vector;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUncertified = 3;

int exit_for(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return kExitOk;
    case Termination::kMaxIters:
      return kExitBudget;
    default:
      return kExitError;
  }
}

// Flag values start as "unset" sentinels so per-problem defaults apply
// only where the user did not override them.
struct StepFlags {
  double tau = -1.0;
  double sigma = -1.0;
  double rho = -1.0;
  double lr = -1.0;
  double tol_primal = -1.0;
  double tol_dual = -1.0;
  double tol_gap = -1.0;
  int max_iters = 0;
  std::string recovery = "support";

  void attach(CLI::App* cmd) {
    cmd->add_option("--tau", tau, "primal step size");
    cmd->add_option("--sigma", sigma, "dual step size");
    cmd->add_option("--rho", rho, "splitting penalty");
    cmd->add_option("--lr", lr, "gda learning rate");
    cmd->add_option("--tol-primal", tol_primal, "primal residual tolerance");
    cmd->add_option("--tol-dual", tol_dual, "dual residual tolerance");
    cmd->add_option("--tol-gap", tol_gap, "relative gap tolerance");
    cmd->add_option("--max-iters", max_iters, "iteration budget");
    cmd->add_option("--recovery", recovery,
                    "primal recovery mode for the regularized fit")
        ->check(CLI::IsMember({"support", "direct"}));
  }

  StepConfig merge(StepConfig base) const {
    if (tau > 0.0) base.tau = tau;
    if (sigma > 0.0) base.sigma = sigma;
    if (rho > 0.0) base.rho = rho;
    if (lr > 0.0) base.lr = lr;
    if (tol_primal > 0.0) base.tol_primal = tol_primal;
    if (tol_dual > 0.0) base.tol_dual = tol_dual;
    if (tol_gap > 0.0) base.tol_gap = tol_gap;
    if (max_iters > 0) base.max_iters = max_iters;
    base.recovery = recovery == "direct" ? pdk::Recovery::kDirect
                                         : pdk::Recovery::kSupport;
    return base;
  }
};

// Budgets and tolerances the bundled methods need on desk-scale instances
// of each family; the nnls solvers are fine with the library defaults.
StepConfig base_cfg_for(const Problem& problem) {
  StepConfig cfg;
  if (std::holds_alternative<pdk::DietInstance>(problem)) {
    cfg.max_iters = 300000;
    cfg.tol_primal = 1e-6;
    cfg.tol_dual = 1e-6;
    cfg.tol_gap = 1e-8;
  } else if (std::holds_alternative<pdk::OpfInstance>(problem)) {
    cfg.max_iters = 400000;
    cfg.tol_primal = 1e-7;
    cfg.tol_dual = 1e-4;
    cfg.tol_gap = 1e-5;
  } else if (std::holds_alternative<pdk::LrmpConstrained>(problem)) {
    cfg.max_iters = 200000;
    cfg.tol_dual = 1e-6;
  }
  return cfg;
}

pdk::SolveReport dispatch_nnls(const pdk::NnlsInstance& inst,
                               const std::string& id, const StepConfig& cfg) {
  if (id == "pdg") return pdk::solve_pdg(inst.a, inst.b, cfg);
  if (id == "admm") {
    return pdk::solve_admm(pdk::SplitProblem{inst.a, inst.b}, cfg);
  }
  if (id == "admm-dual") return pdk::solve_admm_dual_nnls(inst.a, inst.b, cfg);
  if (id == "pdhg") return pdk::solve_pdhg(pdk::nnls_as_saddle(inst), cfg);
  if (id == "gda") return pdk::solve_gda(inst.a, inst.b, cfg);
  if (id == "consensus") {
    return pdk::solve_consensus_admm({pdk::SplitProblem{inst.a, inst.b}},
                                     cfg);
  }
  throw pdk::UnknownSolver("no solver is registered under id '" + id + "'");
}

struct SolveOutcome {
  Json report;
  Json solution;
  int exit_code = kExitError;
};

SolveOutcome run_solve(const Problem& problem, const std::string& solver,
                       const StepConfig& cfg) {
  SolveOutcome out;
  if (const auto* nnls = std::get_if<pdk::NnlsInstance>(&problem)) {
    const std::string id = solver.empty() ? "admm" : solver;
    const pdk::SolveReport report = dispatch_nnls(*nnls, id, cfg);
    out.report = pdk::report_to_json(report);
    out.solution = pdk::nnls_solution_to_json(
        report.state.x, nnls->a * report.state.x - nnls->b);
    out.exit_code = exit_for(report.termination);
    return out;
  }
  if (!solver.empty()) {
    throw pdk::UnknownSolver(
        "--solver selects among the nnls solvers; other problem types have "
        "a single built-in method");
  }
  if (const auto* diet = std::get_if<pdk::DietInstance>(&problem)) {
    const pdk::SolveReport report = pdk::lp_primal_dual(*diet, cfg);
    out.report = pdk::report_to_json(report);
    out.solution = pdk::diet_solution_to_json(
        {report.state.x, report.state.lambda, report.state.mu});
    out.exit_code = exit_for(report.termination);
    return out;
  }
  if (const auto* nnv = std::get_if<pdk::NnvInstance>(&problem)) {
    const pdk::NnvRun run = pdk::nnv_primal_dual(*nnv, cfg);
    out.report = pdk::report_to_json(run.report);
    out.report["dual_bound"] = run.dual_bound;
    out.report["candidate_value"] = run.candidate_value;
    out.report["certified"] = run.certified;
    out.report["falsified"] = run.falsified;
    out.solution = pdk::nnv_multipliers_to_json(run.lambdas);
    out.exit_code = exit_for(run.report.termination);
    return out;
  }
  if (const auto* opf = std::get_if<pdk::OpfInstance>(&problem)) {
    const pdk::OpfRun run = pdk::opf_primal_dual(*opf, cfg);
    out.report = pdk::report_to_json(run.report);
    out.solution = pdk::opf_solution_to_json({run.v, run.duals});
    out.exit_code = exit_for(run.report.termination);
    return out;
  }
  if (const auto* lrmp = std::get_if<pdk::LrmpUnconstrained>(&problem)) {
    const pdk::LrmpDualRun run = pdk::lrmp_dual_solve(*lrmp, cfg);
    out.report = pdk::report_to_json(run.report);
    out.solution = pdk::lrmp_solution_to_json({run.z, run.lambda});
    out.exit_code = exit_for(run.report.termination);
    return out;
  }
  const auto& fit = std::get<pdk::LrmpConstrained>(problem);
  const pdk::SolveReport report = pdk::lr_nnls_dual_solve(fit, cfg);
  out.report = pdk::report_to_json(report);
  out.solution = pdk::lr_nnls_solution_to_json(
      {report.state.x, report.state.lambda, report.state.mu});
  out.exit_code = exit_for(report.termination);
  return out;
}

int cmd_solve(const std::string& problem_path, const std::string& solver,
              const StepFlags& flags, const std::string& out_path) {
  const Problem problem =
      pdk::problem_from_json(pdk::load_json(problem_path));
  const StepConfig cfg = flags.merge(base_cfg_for(problem));
  const SolveOutcome outcome = run_solve(problem, solver, cfg);
  if (!out_path.empty()) pdk::save_json(outcome.solution, out_path);
  std::cout << outcome.report.dump(2) << "\n";
  return outcome.exit_code;
}

int cmd_compare(const std::string& problem_path,
                const std::vector<std::string>& solvers,
                const std::string& ref_mode, const StepFlags& flags,
                const std::string& out_path) {
  const Problem problem =
      pdk::problem_from_json(pdk::load_json(problem_path));
  const auto* nnls = std::get_if<pdk::NnlsInstance>(&problem);
  if (nnls == nullptr) {
    throw pdk::Error("compare records nnls traces; got another type");
  }
  if (solvers.empty()) {
    throw pdk::EmptyComparison("comparison needs at least one solver id");
  }
  pdk::ReferenceSolution ref;
  if (ref_mode == "auto") {
    ref = pdk::make_reference(*nnls);
  } else if (ref_mode == "oracle") {
    ref = pdk::make_reference(*nnls, pdk::ReferenceSource::kOracle);
  } else if (ref_mode == "admm") {
    ref = pdk::make_reference(*nnls,
                              pdk::ReferenceSource::kHighAccuracyAdmm);
  } else {
    throw pdk::Error("--ref must be auto, oracle, or admm");
  }
  const StepConfig cfg = flags.merge(base_cfg_for(problem));
  std::vector<pdk::Trace> traces;
  int code = kExitOk;
  for (const std::string& id : solvers) {
    pdk::TracedRun run = pdk::run_traced(*nnls, id, cfg, ref);
    if (run.report.termination != Termination::kConverged) {
      code = std::max(code, exit_for(run.report.termination));
    }
    traces.push_back(std::move(run.trace));
  }
  pdk::write_csv(traces, out_path);
  return code;
}

int cmd_certify(const std::string& problem_path,
                const std::string& solution_path, double tol) {
  const Problem problem =
      pdk::problem_from_json(pdk::load_json(problem_path));
  const Json sol = pdk::load_json(solution_path);

  if (const auto* nnv = std::get_if<pdk::NnvInstance>(&problem)) {
    pdk::validate(*nnv);
    const std::vector<Vector> lambdas = pdk::nnv_multipliers_from_json(sol);
    const double bound =
        pdk::nnv_dual_bound(*nnv, pdk::nnv_boxes(*nnv), lambdas);
    const bool certified = bound < 0.0;
    Json j;
    j["certified"] = certified;
    j["dual_bound"] = bound;
    std::cout << j.dump(2) << "\n";
    return certified ? kExitOk : kExitUncertified;
  }

  pdk::Certificate cert;
  if (const auto* nnls = std::get_if<pdk::NnlsInstance>(&problem)) {
    pdk::validate(*nnls);
    const pdk::NnlsSolution s = pdk::nnls_solution_from_json(sol);
    cert = pdk::nnls_certificate(nnls->a, nnls->b, s.x, s.lambda);
  } else if (const auto* diet = std::get_if<pdk::DietInstance>(&problem)) {
    pdk::validate(*diet);
    const pdk::DietSolution s = pdk::diet_solution_from_json(sol);
    cert = pdk::lp_certificate(pdk::diet_as_cone_program(*diet), s.x,
                               s.lambda, s.nu);
  } else if (const auto* opf = std::get_if<pdk::OpfInstance>(&problem)) {
    pdk::validate(*opf);
    const pdk::OpfSolution s = pdk::opf_solution_from_json(sol);
    cert = pdk::opf_certificate(*opf, s.v, s.duals);
  } else if (const auto* lrmp =
                 std::get_if<pdk::LrmpUnconstrained>(&problem)) {
    pdk::validate(*lrmp);
    const pdk::LrmpSolution s = pdk::lrmp_solution_from_json(sol);
    cert = pdk::lrmp_certificate(*lrmp, s.z, s.lambda);
  } else {
    const auto& fit = std::get<pdk::LrmpConstrained>(problem);
    pdk::validate(fit);
    const pdk::LrNnlsSolution s = pdk::lr_nnls_solution_from_json(sol);
    cert = pdk::lr_nnls_certificate(fit, s.x, s.lambda, s.mu);
  }
  std::cout << pdk::certificate_to_json(cert).dump(2) << "\n";
  const bool pass = cert.rel_gap <= tol && cert.max_residual() <= tol;
  return pass ? kExitOk : kExitUncertified;
}

int cmd_generate(const std::string& type, Index m, Index n, Index buses,
                 double eps, double q, bool fit, std::uint64_t seed,
                 const std::string& out_path) {
  if (const char* env = std::getenv("PDK_SEED")) {
    seed = std::strtoull(env, nullptr, 10);
  }
  Json j;
  if (type == "nnls") {
    if (m <= 0 || n <= 0) throw pdk::Error("nnls needs positive --m and --n");
    j = pdk::problem_to_json(pdk::gen_random_nnls(m, n, seed));
  } else if (type == "diet") {
    if (m <= 0 || n <= 0) throw pdk::Error("diet needs positive --m and --n");
    j = pdk::problem_to_json(pdk::gen_random_diet(m, n, seed));
  } else if (type == "nnv") {
    if (!(eps > 0.0)) throw pdk::Error("nnv needs a positive --eps");
    j = pdk::problem_to_json(pdk::gen_random_nnv(seed, eps));
  } else if (type == "opf") {
    if (buses != 2) throw pdk::Error("only the 2-bus toy grid is available");
    j = pdk::problem_to_json(pdk::opf_two_bus_toy());
  } else if (type == "lrmp") {
    if (n < 2) throw pdk::Error("lrmp needs --n of at least 2");
    const Matrix lap = pdk::random_connected_laplacian(n, seed);
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> normal;
    if (fit) {
      Matrix a = Matrix::Identity(n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < n; ++k) a(i, k) += 0.25 * normal(rng);
      }
      Vector b(n);
      for (Index i = 0; i < n; ++i) b(i) = normal(rng);
      j = pdk::problem_to_json(pdk::LrmpConstrained{a, b, lap});
    } else {
      if (!(q > 0.0)) throw pdk::Error("lrmp needs a positive --q");
      Vector y(n);
      for (Index i = 0; i < n; ++i) y(i) = normal(rng);
      j = pdk::problem_to_json(pdk::LrmpUnconstrained{q, y, lap});
    }
  } else {
    throw pdk::Error("unknown problem type '" + type + "'");
  }
  pdk::save_json(j, out_path.empty() ? type + ".json" : out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duality-driven first-order solvers with certificates"};
  app.require_subcommand(1);

  std::string problem_path, solution_path, out_path, solver, ref_mode, type;
  std::vector<std::string> solvers;
  StepFlags flags;
  double tol = 1e-4;
  double eps = 0.1;
  double q = 1.0;
  bool fit = false;
  Index m = 20, n = 8, buses = 2;
  std::uint64_t seed = 7;

  CLI::App* solve = app.add_subcommand("solve", "run a solver on a problem");
  solve->add_option("--problem", problem_path, "problem JSON path")
      ->required();
  solve->add_option("--solver", solver,
                    "nnls solver id: pdg admm admm-dual pdhg gda consensus");
  solve->add_option("--out", out_path, "write the solution JSON here");
  flags.attach(solve);

  CLI::App* compare =
      app.add_subcommand("compare", "trace several solvers to a CSV");
  compare->add_option("--problem", problem_path, "problem JSON path")
      ->required();
  compare->add_option("--solvers", solvers, "comma-separated solver ids")
      ->required()
      ->delimiter(',');
  compare->add_option("--ref", ref_mode, "reference: auto, oracle, or admm")
      ->default_val("auto");
  compare->add_option("--out", out_path, "trace CSV path")
      ->default_val("trace.csv");
  flags.attach(compare);

  CLI::App* certify =
      app.add_subcommand("certify", "evaluate a candidate solution");
  certify->add_option("--problem", problem_path, "problem JSON path")
      ->required();
  certify->add_option("--solution", solution_path, "solution JSON path")
      ->required();
  certify->add_option("--tol", tol,
                      "bound on the relative gap and every residual");

  CLI::App* generate =
      app.add_subcommand("generate", "write a seeded problem JSON");
  generate->add_option("--type", type, "nnls diet nnv opf lrmp")->required();
  generate->add_option("--m", m, "rows / constraints");
  generate->add_option("--n", n, "columns / nodes");
  generate->add_option("--buses", buses, "grid size for opf");
  generate->add_option("--eps", eps, "perturbation radius for nnv");
  generate->add_option("--q", q, "smoothing weight for lrmp");
  generate->add_flag("--fit", fit, "emit the lrmp regularized fit form");
  generate->add_option("--seed", seed, "rng seed (PDK_SEED overrides)");
  generate->add_option("--out", out_path, "output path, default <type>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(problem_path, solver, flags, out_path);
    }
    if (compare->parsed()) {
      return cmd_compare(problem_path, solvers, ref_mode, flags, out_path);
    }
    if (certify->parsed()) {
      return cmd_certify(problem_path, solution_path, tol);
    }
    return cmd_generate(type, m, n, buses, eps, q, fit, seed, out_path);
  } catch (const pdk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
