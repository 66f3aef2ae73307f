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

#pragma once

#include <cstdint>
#include <string>

#include "acl/sim.hpp"

namespace acl {

// Declarative run description, the in-memory form of a scenario JSON file.
// Parsing is strict: unknown keys are rejected with their field path.
struct Scenario {
  // graph: either a full symmetric weight matrix or an edge list (1-based
  // endpoints, optional per-edge weight defaulting to 1).
  Matrix weights;

  // dynamics
  Matrix A;
  Matrix B;
  struct Regressor {
    // "paper_phi": rows gamma_d + beta_d e^(-d) x_r for agent d (1-based),
    //              row r over the first q_in state components, m = 1;
    // "zero": all-zero q_in x m regressor.
    std::string type = "zero";
    Vec gamma;
    Vec beta;
    std::size_t m = 1;
  } regressor;

  // parameters
  std::vector<Vec> x0;              // n rows of length p
  std::vector<Vec> theta_true;      // n rows of length m
  std::vector<Vec> theta_hat_init;  // n rows of length m
  double alpha = 0.0;
  bool alpha_auto = false;  // true: resolve alpha = 1/(2 lambda_2)
  Matrix Q;                 // ARE state cost; defaults to identity

  // controller
  UpdateMode update_mode = UpdateMode::kConcurrentLearning;
  ClSource cl_source = ClSource::kOracle;
  std::size_t stack_capacity = 20;
  double t_record = 0.5;
  double sigma = 0.0;
  double eps_add = 1e-3;
  double rank_tol = 1e-6;
  bool theorem_grade = false;

  IntegratorConfig integrator;
  std::uint64_t seed = 0;

  std::size_t n() const { return weights.rows(); }
  std::size_t p() const { return A.rows(); }
  std::size_t q_in() const { return B.cols(); }
  std::size_t m() const { return regressor.m; }
};

// Parses scenario JSON. Throws std::invalid_argument with a field-path
// diagnostic on malformed input, unknown keys, or dimension mismatches.
Scenario parse_scenario(const std::string& json_text);

// Serializes a scenario to JSON that parses back to an identical value.
std::string emit_scenario(const Scenario& sc);

// Built-in scenarios by name. Currently: "paper-s5", the five-agent reference
// fixture. Throws on unknown names.
Scenario builtin_fixture(const std::string& name);

// Resolves a scenario into a ready-to-integrate problem: builds the graph,
// solves the Riccati equation for P (and K = -B^T P), resolves alpha "auto"
// to 1/(2 lambda_2), and materializes the per-agent regressors.
SimProblem to_problem(const Scenario& sc);

}  // namespace acl
