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

// JSON interchange for problem instances, candidate solutions, and result
// reports. Matrices travel as row-major nested arrays. Parsing is strict:
// a document with a missing, mistyped, or unknown field is rejected with a
// SchemaError that names the offending field, so a typo in a hand-written
// problem file fails loudly instead of being silently ignored.

#ifndef PDK_JSON_IO_HPP_
#define PDK_JSON_IO_HPP_

#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pdk/diet.hpp"
#include "pdk/errors.hpp"
#include "pdk/graph_reg.hpp"
#include "pdk/nnls.hpp"
#include "pdk/power_flow.hpp"
#include "pdk/solvers.hpp"
#include "pdk/verification.hpp"

namespace pdk {

using Json = nlohmann::json;

namespace detail {

inline void expect_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
}

// Rejects unknown keys and demands the required ones, naming the offender.
inline void check_fields(const Json& j, const std::string& what,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
  expect_object(j, what);
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* f : required) known = known || item.key() == f;
    for (const char* f : optional) known = known || item.key() == f;
    if (!known) {
      throw SchemaError("unknown field '" + item.key() + "' in " + what);
    }
  }
  for (const char* f : required) {
    if (!j.contains(f)) {
      throw SchemaError(what + " is missing field '" + std::string(f) + "'");
    }
  }
}

inline double number_field(const Json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  return j.get<double>();
}

inline Index index_field(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) {
    throw SchemaError(what + " must be an integer");
  }
  return j.get<Index>();
}

}  // namespace detail

inline Vector json_to_vector(const Json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) {
    v(i) = detail::number_field(j[static_cast<size_t>(i)],
                                what + " entries");
  }
  return v;
}

inline Matrix json_to_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(what + " must be a non-empty array of rows");
  }
  const size_t rows = j.size();
  if (!j[0].is_array()) {
    throw SchemaError(what + " rows must be arrays of numbers");
  }
  const size_t cols = j[0].size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw SchemaError(what + " rows must all have the same length");
    }
    for (size_t k = 0; k < cols; ++k) {
      m(static_cast<Index>(i), static_cast<Index>(k)) =
          detail::number_field(j[i][k], what + " entries");
    }
  }
  return m;
}

inline Json vector_to_json(const Vector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Json matrix_to_json(const Matrix& m) {
  Json j = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Problem instances
// ---------------------------------------------------------------------------

using Problem = std::variant<NnlsInstance, DietInstance, NnvInstance,
                             OpfInstance, LrmpUnconstrained, LrmpConstrained>;

inline NnlsInstance nnls_from_json(const Json& j) {
  detail::check_fields(j, "nnls problem", {"type", "A", "b"});
  return NnlsInstance{json_to_matrix(j["A"], "'A'"),
                      json_to_vector(j["b"], "'b'")};
}

inline DietInstance diet_from_json(const Json& j) {
  detail::check_fields(j, "diet problem", {"type", "c", "A", "b"});
  return DietInstance{json_to_vector(j["c"], "'c'"),
                      json_to_matrix(j["A"], "'A'"),
                      json_to_vector(j["b"], "'b'")};
}

inline NnvInstance nnv_from_json(const Json& j) {
  detail::check_fields(j, "nnv problem",
                       {"type", "layers", "x_nom", "eps", "spec"});
  NnvInstance inst;
  if (!j["layers"].is_array() || j["layers"].empty()) {
    throw SchemaError("'layers' must be a non-empty array");
  }
  for (const Json& lj : j["layers"]) {
    detail::check_fields(lj, "network layer", {"W", "w", "activation"});
    NnvLayer layer;
    layer.weight = json_to_matrix(lj["W"], "layer 'W'");
    layer.bias = json_to_vector(lj["w"], "layer 'w'");
    const std::string act = lj["activation"].is_string()
                                ? lj["activation"].get<std::string>()
                                : "";
    if (act == "relu") {
      layer.activation = Activation::kRelu;
    } else if (act == "identity") {
      layer.activation = Activation::kIdentity;
    } else {
      throw SchemaError("layer 'activation' must be \"relu\" or "
                        "\"identity\"");
    }
    inst.layers.push_back(std::move(layer));
  }
  inst.x_nom = json_to_vector(j["x_nom"], "'x_nom'");
  inst.eps = detail::number_field(j["eps"], "'eps'");
  detail::check_fields(j["spec"], "'spec'", {"c", "d"});
  inst.spec.c = json_to_vector(j["spec"]["c"], "spec 'c'");
  inst.spec.d = detail::number_field(j["spec"]["d"], "spec 'd'");
  return inst;
}

inline OpfInstance opf_from_json(const Json& j) {
  detail::check_fields(j, "opf problem", {"type", "grid"});
  const Json& g = j["grid"];
  detail::check_fields(
      g, "'grid'", {"G", "v_min", "v_max", "loads", "generators", "lines"});
  OpfInstance inst;
  inst.g = json_to_matrix(g["G"], "'G'");
  inst.v_lo = json_to_vector(g["v_min"], "'v_min'");
  inst.v_hi = json_to_vector(g["v_max"], "'v_max'");
  if (!g["loads"].is_array() || !g["generators"].is_array() ||
      !g["lines"].is_array()) {
    throw SchemaError("'loads', 'generators', and 'lines' must be arrays");
  }
  std::vector<double> demands, caps;
  for (const Json& lj : g["loads"]) {
    detail::check_fields(lj, "load entry", {"bus", "demand"});
    inst.loads.push_back(detail::index_field(lj["bus"], "load 'bus'"));
    demands.push_back(detail::number_field(lj["demand"], "load 'demand'"));
  }
  for (const Json& gj : g["generators"]) {
    detail::check_fields(gj, "generator entry", {"bus", "cap"});
    inst.generators.push_back(
        detail::index_field(gj["bus"], "generator 'bus'"));
    caps.push_back(detail::number_field(gj["cap"], "generator 'cap'"));
  }
  for (const Json& lj : g["lines"]) {
    detail::check_fields(lj, "line entry",
                         {"from", "to", "conductance", "i_max"});
    OpfLine line;
    line.from = detail::index_field(lj["from"], "line 'from'");
    line.to = detail::index_field(lj["to"], "line 'to'");
    line.conductance =
        detail::number_field(lj["conductance"], "line 'conductance'");
    line.i_max = detail::number_field(lj["i_max"], "line 'i_max'");
    inst.lines.push_back(line);
  }
  inst.demands = Vector(static_cast<Index>(demands.size()));
  for (size_t i = 0; i < demands.size(); ++i) {
    inst.demands(static_cast<Index>(i)) = demands[i];
  }
  inst.caps = Vector(static_cast<Index>(caps.size()));
  for (size_t i = 0; i < caps.size(); ++i) {
    inst.caps(static_cast<Index>(i)) = caps[i];
  }
  return inst;
}

inline std::variant<LrmpUnconstrained, LrmpConstrained> lrmp_from_json(
    const Json& j) {
  detail::check_fields(j, "lrmp problem", {"type", "L"},
                       {"q", "y", "A", "b"});
  const bool smooth_form = j.contains("q") || j.contains("y");
  const bool fit_form = j.contains("A") || j.contains("b");
  if (smooth_form && fit_form) {
    throw SchemaError("lrmp problem mixes 'q'/'y' with 'A'/'b'");
  }
  if (smooth_form) {
    if (!j.contains("q")) throw SchemaError("lrmp problem is missing 'q'");
    if (!j.contains("y")) throw SchemaError("lrmp problem is missing 'y'");
    return LrmpUnconstrained{detail::number_field(j["q"], "'q'"),
                             json_to_vector(j["y"], "'y'"),
                             json_to_matrix(j["L"], "'L'")};
  }
  if (!fit_form) {
    throw SchemaError("lrmp problem needs either 'q'/'y' or 'A'/'b'");
  }
  if (!j.contains("A")) throw SchemaError("lrmp problem is missing 'A'");
  if (!j.contains("b")) throw SchemaError("lrmp problem is missing 'b'");
  return LrmpConstrained{json_to_matrix(j["A"], "'A'"),
                         json_to_vector(j["b"], "'b'"),
                         json_to_matrix(j["L"], "'L'")};
}

inline Problem problem_from_json(const Json& j) {
  detail::expect_object(j, "problem document");
  if (!j.contains("type") || !j["type"].is_string()) {
    throw SchemaError("problem document is missing the 'type' string");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "nnls") return nnls_from_json(j);
  if (type == "diet") return diet_from_json(j);
  if (type == "nnv") return nnv_from_json(j);
  if (type == "opf") return opf_from_json(j);
  if (type == "lrmp") {
    auto v = lrmp_from_json(j);
    if (std::holds_alternative<LrmpUnconstrained>(v)) {
      return std::get<LrmpUnconstrained>(std::move(v));
    }
    return std::get<LrmpConstrained>(std::move(v));
  }
  throw SchemaError("unknown problem type '" + type + "'");
}

inline Json problem_to_json(const NnlsInstance& inst) {
  Json j;
  j["type"] = "nnls";
  j["A"] = matrix_to_json(inst.a);
  j["b"] = vector_to_json(inst.b);
  return j;
}

inline Json problem_to_json(const DietInstance& inst) {
  Json j;
  j["type"] = "diet";
  j["c"] = vector_to_json(inst.cost);
  j["A"] = matrix_to_json(inst.nutrients);
  j["b"] = vector_to_json(inst.requirements);
  return j;
}

inline Json problem_to_json(const NnvInstance& inst) {
  Json j;
  j["type"] = "nnv";
  j["layers"] = Json::array();
  for (const NnvLayer& layer : inst.layers) {
    Json lj;
    lj["W"] = matrix_to_json(layer.weight);
    lj["w"] = vector_to_json(layer.bias);
    lj["activation"] =
        layer.activation == Activation::kRelu ? "relu" : "identity";
    j["layers"].push_back(lj);
  }
  j["x_nom"] = vector_to_json(inst.x_nom);
  j["eps"] = inst.eps;
  j["spec"] = Json{{"c", vector_to_json(inst.spec.c)}, {"d", inst.spec.d}};
  return j;
}

inline Json problem_to_json(const OpfInstance& inst) {
  Json grid;
  grid["G"] = matrix_to_json(inst.g);
  grid["v_min"] = vector_to_json(inst.v_lo);
  grid["v_max"] = vector_to_json(inst.v_hi);
  grid["loads"] = Json::array();
  for (size_t i = 0; i < inst.loads.size(); ++i) {
    grid["loads"].push_back(Json{{"bus", inst.loads[i]},
                                 {"demand", inst.demands(static_cast<Index>(i))}});
  }
  grid["generators"] = Json::array();
  for (size_t i = 0; i < inst.generators.size(); ++i) {
    grid["generators"].push_back(
        Json{{"bus", inst.generators[i]},
             {"cap", inst.caps(static_cast<Index>(i))}});
  }
  grid["lines"] = Json::array();
  for (const OpfLine& line : inst.lines) {
    grid["lines"].push_back(Json{{"from", line.from},
                                 {"to", line.to},
                                 {"conductance", line.conductance},
                                 {"i_max", line.i_max}});
  }
  Json j;
  j["type"] = "opf";
  j["grid"] = grid;
  return j;
}

inline Json problem_to_json(const LrmpUnconstrained& inst) {
  Json j;
  j["type"] = "lrmp";
  j["q"] = inst.q;
  j["y"] = vector_to_json(inst.y);
  j["L"] = matrix_to_json(inst.laplacian);
  return j;
}

inline Json problem_to_json(const LrmpConstrained& inst) {
  Json j;
  j["type"] = "lrmp";
  j["A"] = matrix_to_json(inst.a);
  j["b"] = vector_to_json(inst.b);
  j["L"] = matrix_to_json(inst.laplacian);
  return j;
}

// ---------------------------------------------------------------------------
// Candidate solutions
// ---------------------------------------------------------------------------

struct DietSolution {
  Vector x;
  Vector lambda;
  Vector nu;
};

struct OpfSolution {
  Vector v;
  OpfDuals duals;
};

struct LrmpSolution {
  Vector z;
  Vector lambda;
};

struct LrNnlsSolution {
  Vector x;
  Vector lambda;
  Vector mu;
};

inline NnlsSolution nnls_solution_from_json(const Json& j) {
  detail::check_fields(j, "nnls solution", {"x", "lambda"});
  NnlsSolution sol;
  sol.x = json_to_vector(j["x"], "'x'");
  sol.lambda = json_to_vector(j["lambda"], "'lambda'");
  return sol;
}

inline Json nnls_solution_to_json(const Vector& x, const Vector& lambda) {
  return Json{{"x", vector_to_json(x)}, {"lambda", vector_to_json(lambda)}};
}

inline DietSolution diet_solution_from_json(const Json& j) {
  detail::check_fields(j, "diet solution", {"x", "lambda", "nu"});
  return DietSolution{json_to_vector(j["x"], "'x'"),
                      json_to_vector(j["lambda"], "'lambda'"),
                      json_to_vector(j["nu"], "'nu'")};
}

inline Json diet_solution_to_json(const DietSolution& sol) {
  return Json{{"x", vector_to_json(sol.x)},
              {"lambda", vector_to_json(sol.lambda)},
              {"nu", vector_to_json(sol.nu)}};
}

inline std::vector<Vector> nnv_multipliers_from_json(const Json& j) {
  detail::check_fields(j, "nnv solution", {"lambdas"});
  if (!j["lambdas"].is_array()) {
    throw SchemaError("'lambdas' must be an array of arrays");
  }
  std::vector<Vector> lambdas;
  for (const Json& lj : j["lambdas"]) {
    lambdas.push_back(json_to_vector(lj, "'lambdas' entries"));
  }
  return lambdas;
}

inline Json nnv_multipliers_to_json(const std::vector<Vector>& lambdas) {
  Json arr = Json::array();
  for (const Vector& l : lambdas) arr.push_back(vector_to_json(l));
  return Json{{"lambdas", arr}};
}

inline OpfSolution opf_solution_from_json(const Json& j) {
  detail::check_fields(j, "opf solution", {"v", "lambda", "gamma", "mu"});
  OpfSolution sol;
  sol.v = json_to_vector(j["v"], "'v'");
  sol.duals.lambda = json_to_vector(j["lambda"], "'lambda'");
  sol.duals.gamma = json_to_vector(j["gamma"], "'gamma'");
  sol.duals.mu = json_to_vector(j["mu"], "'mu'");
  return sol;
}

inline Json opf_solution_to_json(const OpfSolution& sol) {
  return Json{{"v", vector_to_json(sol.v)},
              {"lambda", vector_to_json(sol.duals.lambda)},
              {"gamma", vector_to_json(sol.duals.gamma)},
              {"mu", vector_to_json(sol.duals.mu)}};
}

inline LrmpSolution lrmp_solution_from_json(const Json& j) {
  detail::check_fields(j, "lrmp solution", {"z", "lambda"});
  return LrmpSolution{json_to_vector(j["z"], "'z'"),
                      json_to_vector(j["lambda"], "'lambda'")};
}

inline Json lrmp_solution_to_json(const LrmpSolution& sol) {
  return Json{{"z", vector_to_json(sol.z)},
              {"lambda", vector_to_json(sol.lambda)}};
}

inline LrNnlsSolution lr_nnls_solution_from_json(const Json& j) {
  detail::check_fields(j, "lrmp solution", {"x", "lambda", "mu"});
  return LrNnlsSolution{json_to_vector(j["x"], "'x'"),
                        json_to_vector(j["lambda"], "'lambda'"),
                        json_to_vector(j["mu"], "'mu'")};
}

inline Json lr_nnls_solution_to_json(const LrNnlsSolution& sol) {
  return Json{{"x", vector_to_json(sol.x)},
              {"lambda", vector_to_json(sol.lambda)},
              {"mu", vector_to_json(sol.mu)}};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json certificate_to_json(const Certificate& cert) {
  Json j;
  j["primal_obj"] = cert.primal_obj;
  j["dual_obj"] = cert.dual_obj;
  j["gap"] = cert.gap;
  j["rel_gap"] = cert.rel_gap;
  j["stationarity"] = cert.stationarity;
  j["primal_feasibility"] = cert.primal_feasibility;
  j["dual_feasibility"] = cert.dual_feasibility;
  j["complementarity"] = cert.complementarity;
  j["max_residual"] = cert.max_residual();
  return j;
}

inline Json report_to_json(const SolveReport& report) {
  Json j;
  j["solver"] = report.solver;
  j["termination"] = to_string(report.termination);
  j["iterations"] = report.iterations;
  j["objective"] = report.objective;
  j["certificate"] = certificate_to_json(report.certificate);
  return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
  return j;
}

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

}  // namespace pdk

#endif  // PDK_JSON_IO_HPP_
