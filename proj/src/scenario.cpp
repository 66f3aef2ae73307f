// Copyright 2026 The acl Authors
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

#include "acl/scenario.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "acl/linalg.hpp"

namespace acl {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("scenario: " + path + ": " + what);
}

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
}

const ordered_json& require(const ordered_json& obj, const std::string& key,
                            const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  return obj.at(key);
}

double as_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Matrix as_matrix(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  if (cols == 0) fail(path, "expected rows to be non-empty arrays");
  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (!row.is_array() || row.size() != cols)
      fail(path, "row " + std::to_string(i) + " has inconsistent length");
    for (const auto& v : row) entries.push_back(as_number(v, path));
  }
  return Matrix(rows, cols, std::move(entries));
}

Vec as_vector(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(as_number(e, path));
  return v;
}

std::vector<Vec> as_rows(const ordered_json& j, std::size_t n, std::size_t len,
                         const std::string& path) {
  if (!j.is_array() || j.size() != n)
    fail(path, "expected " + std::to_string(n) + " rows");
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < n; ++i) {
    Vec row = as_vector(j.at(i), path + "[" + std::to_string(i) + "]");
    if (row.size() != len)
      fail(path + "[" + std::to_string(i) + "]",
           "expected length " + std::to_string(len));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix graph_from_json(const ordered_json& j) {
  reject_unknown_keys(j, {"weights", "n", "edges"}, "graph");
  if (j.contains("weights")) {
    if (j.contains("n") || j.contains("edges"))
      fail("graph", "give either weights or n+edges, not both");
    return as_matrix(j.at("weights"), "graph.weights");
  }
  if (!j.contains("n") || !j.contains("edges"))
    fail("graph", "expected weights or n+edges");
  const auto n = j.at("n").get<std::size_t>();
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3)
      fail("graph.edges", "each edge is [i, j] or [i, j, weight], 1-based");
    const auto i = e.at(0).get<std::size_t>();
    const auto jj = e.at(1).get<std::size_t>();
    const double w = e.size() == 3 ? as_number(e.at(2), "graph.edges") : 1.0;
    if (i < 1 || jj < 1 || i > n || jj > n) fail("graph.edges", "endpoint out of range");
    edges.emplace_back(i - 1, jj - 1, w);
  }
  return UndirectedGraph::from_edges(n, edges).weights;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scenario: JSON parse failure: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("scenario: top level must be an object");
  reject_unknown_keys(root, {"graph", "dynamics", "parameters", "controller", "integrator", "seed"},
                      "(root)");

  Scenario sc;
  sc.weights = graph_from_json(require(root, "graph", "(root)"));
  const std::size_t n = sc.weights.rows();

  const auto& dyn = require(root, "dynamics", "(root)");
  reject_unknown_keys(dyn, {"A", "B", "regressor"}, "dynamics");
  sc.A = as_matrix(require(dyn, "A", "dynamics"), "dynamics.A");
  sc.B = as_matrix(require(dyn, "B", "dynamics"), "dynamics.B");
  if (sc.A.rows() != sc.A.cols()) fail("dynamics.A", "must be square");
  if (sc.B.rows() != sc.A.rows()) fail("dynamics.B", "row count must match A");

  const auto& reg = require(dyn, "regressor", "dynamics");
  reject_unknown_keys(reg, {"type", "gamma", "beta", "m"}, "dynamics.regressor");
  sc.regressor.type = require(reg, "type", "dynamics.regressor").get<std::string>();
  if (sc.regressor.type == "paper_phi") {
    sc.regressor.gamma = as_vector(require(reg, "gamma", "dynamics.regressor"),
                                   "dynamics.regressor.gamma");
    sc.regressor.beta = as_vector(require(reg, "beta", "dynamics.regressor"),
                                  "dynamics.regressor.beta");
    sc.regressor.m = 1;
    if (reg.contains("m") && reg.at("m").get<std::size_t>() != 1)
      fail("dynamics.regressor.m", "paper_phi fixes m = 1");
    if (sc.regressor.gamma.size() != n || sc.regressor.beta.size() != n)
      fail("dynamics.regressor", "gamma/beta need one entry per agent");
  } else if (sc.regressor.type == "zero") {
    if (reg.contains("gamma") || reg.contains("beta"))
      fail("dynamics.regressor", "zero regressor takes no gamma/beta");
    sc.regressor.m = reg.contains("m") ? reg.at("m").get<std::size_t>() : 1;
    if (sc.regressor.m == 0) fail("dynamics.regressor.m", "m must be >= 1");
  } else {
    fail("dynamics.regressor.type", "unknown type (expected paper_phi or zero)");
  }

  const std::size_t p = sc.A.rows();
  const std::size_t m = sc.regressor.m;

  const auto& par = require(root, "parameters", "(root)");
  reject_unknown_keys(par, {"x0", "theta_true", "theta_hat_init", "alpha", "Q"}, "parameters");
  sc.x0 = as_rows(require(par, "x0", "parameters"), n, p, "parameters.x0");
  sc.theta_true =
      as_rows(require(par, "theta_true", "parameters"), n, m, "parameters.theta_true");
  sc.theta_hat_init = as_rows(require(par, "theta_hat_init", "parameters"), n, m,
                              "parameters.theta_hat_init");
  const auto& alpha = require(par, "alpha", "parameters");
  if (alpha.is_string()) {
    if (alpha.get<std::string>() != "auto")
      fail("parameters.alpha", "expected a number or \"auto\"");
    sc.alpha_auto = true;
  } else {
    sc.alpha = as_number(alpha, "parameters.alpha");
  }
  sc.Q = par.contains("Q") ? as_matrix(par.at("Q"), "parameters.Q") : Matrix::identity(p);
  if (!sc.Q.same_shape(sc.A)) fail("parameters.Q", "must match the A dimensions");

  const auto& ctl = require(root, "controller", "(root)");
  reject_unknown_keys(ctl,
                      {"update_mode", "cl_source", "r", "t_record", "sigma", "eps_add",
                       "rank_tol", "theorem_grade"},
                      "controller");
  const std::string mode = require(ctl, "update_mode", "controller").get<std::string>();
  if (mode == "baseline")
    sc.update_mode = UpdateMode::kBaseline;
  else if (mode == "concurrent_learning")
    sc.update_mode = UpdateMode::kConcurrentLearning;
  else
    fail("controller.update_mode", "expected baseline or concurrent_learning");
  const std::string source = require(ctl, "cl_source", "controller").get<std::string>();
  if (source == "oracle")
    sc.cl_source = ClSource::kOracle;
  else if (source == "reconstructed")
    sc.cl_source = ClSource::kReconstructed;
  else
    fail("controller.cl_source", "expected oracle or reconstructed");
  sc.stack_capacity = require(ctl, "r", "controller").get<std::size_t>();
  sc.t_record = as_number(require(ctl, "t_record", "controller"), "controller.t_record");
  sc.sigma = as_number(require(ctl, "sigma", "controller"), "controller.sigma");
  if (sc.sigma < 0.0) fail("controller.sigma", "sigma must be >= 0");
  if (ctl.contains("eps_add")) sc.eps_add = as_number(ctl.at("eps_add"), "controller.eps_add");
  if (ctl.contains("rank_tol"))
    sc.rank_tol = as_number(ctl.at("rank_tol"), "controller.rank_tol");
  if (ctl.contains("theorem_grade")) {
    if (!ctl.at("theorem_grade").is_boolean()) fail("controller.theorem_grade", "expected a boolean");
    sc.theorem_grade = ctl.at("theorem_grade").get<bool>();
  }

  const auto& integ = require(root, "integrator", "(root)");
  reject_unknown_keys(integ, {"step_h", "t_final", "sample_every"}, "integrator");
  sc.integrator.step_h = as_number(require(integ, "step_h", "integrator"), "integrator.step_h");
  sc.integrator.t_final =
      as_number(require(integ, "t_final", "integrator"), "integrator.t_final");
  sc.integrator.sample_every = require(integ, "sample_every", "integrator").get<std::size_t>();
  if (!(sc.integrator.step_h > 0.0)) fail("integrator.step_h", "must be > 0");
  if (sc.integrator.t_final < sc.integrator.step_h)
    fail("integrator.t_final", "must be >= step_h");
  if (sc.integrator.sample_every < 1) fail("integrator.sample_every", "must be >= 1");

  if (root.contains("seed")) sc.seed = root.at("seed").get<std::uint64_t>();

  // Structural graph validation (symmetry, zero diagonal, nonnegative).
  UndirectedGraph::from_weights(sc.weights);
  return sc;
}

std::string emit_scenario(const Scenario& sc) {
  ordered_json root;
  const auto matrix_json = [](const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  const auto rows_json = [](const std::vector<Vec>& rows) {
    ordered_json out = ordered_json::array();
    for (const Vec& r : rows) out.push_back(r);
    return out;
  };

  root["graph"]["weights"] = matrix_json(sc.weights);
  root["dynamics"]["A"] = matrix_json(sc.A);
  root["dynamics"]["B"] = matrix_json(sc.B);
  ordered_json reg;
  reg["type"] = sc.regressor.type;
  if (sc.regressor.type == "paper_phi") {
    reg["gamma"] = sc.regressor.gamma;
    reg["beta"] = sc.regressor.beta;
  } else {
    reg["m"] = sc.regressor.m;
  }
  root["dynamics"]["regressor"] = std::move(reg);
  root["parameters"]["x0"] = rows_json(sc.x0);
  root["parameters"]["theta_true"] = rows_json(sc.theta_true);
  root["parameters"]["theta_hat_init"] = rows_json(sc.theta_hat_init);
  if (sc.alpha_auto)
    root["parameters"]["alpha"] = "auto";
  else
    root["parameters"]["alpha"] = sc.alpha;
  root["parameters"]["Q"] = matrix_json(sc.Q);
  root["controller"]["update_mode"] =
      sc.update_mode == UpdateMode::kBaseline ? "baseline" : "concurrent_learning";
  root["controller"]["cl_source"] =
      sc.cl_source == ClSource::kOracle ? "oracle" : "reconstructed";
  root["controller"]["r"] = sc.stack_capacity;
  root["controller"]["t_record"] = sc.t_record;
  root["controller"]["sigma"] = sc.sigma;
  root["controller"]["eps_add"] = sc.eps_add;
  root["controller"]["rank_tol"] = sc.rank_tol;
  root["controller"]["theorem_grade"] = sc.theorem_grade;
  root["integrator"]["step_h"] = sc.integrator.step_h;
  root["integrator"]["t_final"] = sc.integrator.t_final;
  root["integrator"]["sample_every"] = sc.integrator.sample_every;
  root["seed"] = sc.seed;
  return root.dump(2) + "\n";
}

Scenario builtin_fixture(const std::string& name) {
  if (name != "paper-s5")
    throw std::invalid_argument("builtin_fixture: unknown fixture '" + name + "'");
  Scenario sc;
  sc.weights = Matrix(5, 5,
                      {0.0,   1.037, 0.0,   0.865, 0.266,
                       1.037, 0.0,   0.0,   0.0,   0.0,
                       0.0,   0.0,   0.0,   1.651, 0.0,
                       0.865, 0.0,   1.651, 0.0,   0.347,
                       0.266, 0.0,   0.0,   0.347, 0.0});
  sc.A = Matrix(4, 4,
                {-0.8, 0.3, 0.2, 1.1,
                 0.4, -0.5, 1.2, 0.6,
                 0.7, 0.9, 0.2, 0.5,
                 1.3, 1.1, 0.4, -0.1});
  sc.B = Matrix(4, 2,
                {1.2, 0.7,
                 0.6, 1.3,
                 1.1, 1.4,
                 0.9, 1.2});
  sc.regressor.type = "paper_phi";
  sc.regressor.gamma = {0.4157, 0.4017, 0.0302, 0.1996, 0.2634};
  sc.regressor.beta = {0.3437, 0.5474, 0.5233, 0.2433, 0.3597};
  sc.regressor.m = 1;
  sc.x0 = {{-6.125, 4.375, 9.875, -8.125},
           {1.0, -8.5, -2.5, 10.0},
           {-5.0, 7.5, -3.5, 1.0},
           {10.125, -3.875, -2.875, -3.375},
           {1.125, 0.125, -0.875, -0.375}};
  sc.theta_true = {{3.0}, {6.0}, {1.5}, {5.5}, {0.5}};
  sc.theta_hat_init = {{1.0}, {1.0}, {3.0}, {2.0}, {5.0}};
  sc.alpha = 0.8019;
  sc.Q = Matrix::identity(4);
  sc.update_mode = UpdateMode::kConcurrentLearning;
  sc.cl_source = ClSource::kOracle;
  sc.stack_capacity = 20;
  sc.t_record = 0.5;
  sc.sigma = 0.0;
  sc.integrator.step_h = 1e-3;
  sc.integrator.t_final = 20.0;
  sc.integrator.sample_every = 10;
  return sc;
}

SimProblem to_problem(const Scenario& sc) {
  SimProblem problem;
  problem.graph = UndirectedGraph::from_weights(sc.weights);
  problem.laplacian = laplacian(problem.graph);

  const std::size_t n = sc.n(), p = sc.p(), q_in = sc.q_in(), m = sc.m();

  std::vector<AgentModel> agents;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AgentModel agent;
    agent.A = sc.A;
    agent.B = sc.B;
    agent.theta_true = sc.theta_true[i];
    agent.phi.p = p;
    agent.phi.q_in = q_in;
    agent.phi.m = m;
    if (sc.regressor.type == "paper_phi") {
      const double gamma = sc.regressor.gamma[i];
      const double scale = sc.regressor.beta[i] * std::exp(-static_cast<double>(i + 1));
      agent.phi.evaluate = [gamma, scale, q_in](double, const Vec& x) {
        Matrix phi(q_in, 1);
        for (std::size_t r = 0; r < q_in; ++r) phi(r, 0) = gamma + scale * x[r];
        return phi;
      };
    } else {
      agent.phi.evaluate = [q_in, m](double, const Vec&) { return Matrix(q_in, m); };
    }
    agents.push_back(std::move(agent));
  }
  problem.model = SwarmModel::from_agents(std::move(agents));

  problem.controller.P = solve_care(sc.A, sc.B, sc.Q);
  problem.controller.K = -1.0 * (sc.B.transpose() * problem.controller.P);
  problem.controller.alpha =
      sc.alpha_auto ? alpha_lower_bound(problem.laplacian) : sc.alpha;
  problem.controller.update_mode = sc.update_mode;
  problem.controller.cl_source = sc.cl_source;
  problem.controller.quantizer =
      QuantizerConfig{sc.sigma, sc.sigma > 0.0};
  problem.controller.stack_capacity = sc.stack_capacity;
  problem.controller.t_record = sc.t_record;
  problem.controller.eps_add = sc.eps_add;
  problem.controller.rank_tol = sc.rank_tol;
  problem.controller.theorem_grade = sc.theorem_grade;
  problem.q_cost = sc.Q;

  problem.x0.reserve(n * p);
  for (const Vec& row : sc.x0) problem.x0.insert(problem.x0.end(), row.begin(), row.end());
  problem.theta_hat0.reserve(n * m);
  for (const Vec& row : sc.theta_hat_init)
    problem.theta_hat0.insert(problem.theta_hat0.end(), row.begin(), row.end());
  problem.integrator = sc.integrator;
  return problem;
}

}  // namespace acl
