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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "acl/graph.hpp"
#include "acl/matrix.hpp"
#include "acl/quantize.hpp"

namespace acl {

// Pure regressor map (t, x) -> q_in x m matrix. Must return finite entries of
// the exact declared shape for every finite input; boundedness is assumed by
// the decay analysis but not enforced here.
struct RegressorSpec {
  std::size_t p = 0;
  std::size_t q_in = 0;
  std::size_t m = 0;
  std::function<Matrix(double, const Vec&)> evaluate;
};

// One agent: shared linear dynamics (A, B), its regressor, and the true
// parameter vector. theta_true is unknown to the controller; the simulator
// and the oracle learning source may read it.
struct AgentModel {
  Matrix A;
  Matrix B;
  RegressorSpec phi;
  Vec theta_true;
};

// n agents with identical (A, B) and per-agent regressor/parameters.
struct SwarmModel {
  std::vector<AgentModel> agents;
  std::size_t n = 0, p = 0, q_in = 0, m = 0;

  // Validates conforming dimensions and that every agent carries the same
  // (A, B) entries.
  static SwarmModel from_agents(std::vector<AgentModel> agents);
};

enum class UpdateMode { kBaseline, kConcurrentLearning };
enum class ClSource { kOracle, kReconstructed };

struct ControllerConfig {
  double alpha = 0.0;
  Matrix P;  // Riccati solution
  Matrix K;  // -B^T P
  UpdateMode update_mode = UpdateMode::kConcurrentLearning;
  ClSource cl_source = ClSource::kOracle;
  QuantizerConfig quantizer;
  std::size_t stack_capacity = 20;
  double t_record = 0.5;
  double eps_add = 1e-3;
  double rank_tol = 1e-6;
  // When set, simulation refuses to run the learning update with an
  // uncertified history stack instead of warning.
  bool theorem_grade = false;
};

// Hard-checks K = -B^T P (1e-12) and the Riccati residual of P against the
// given state-cost Q (1e-8), throwing on violation; returns human-readable
// warnings for soft conditions (alpha below the coupling bound, failed PSD
// certificate).
std::vector<std::string> validate_controller(const ControllerConfig& cfg,
                                             const SwarmModel& model, const Matrix& l,
                                             const Matrix& q);

// One recorded excitation point: the state, its regressor value, and the
// measured regressor-times-parameter product (used by the reconstructed
// learning source only).
struct HistoryRecord {
  Vec x;
  Matrix phi;
  Vec phi_theta;
};

// Bounded per-agent store of recorded regressor evaluations with a rank
// certificate. gram() always equals the explicit sum of phi^T phi over the
// records; q_min() = lambda_min(gram).
class HistoryStack {
 public:
  HistoryStack(std::size_t capacity, std::size_t q_in, std::size_t m);

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<HistoryRecord>& records() const { return records_; }
  const Matrix& gram() const { return gram_; }
  double q_min() const { return q_min_; }

  // Admission policy: when not full, accept unless the candidate is within
  // eps_add * max(1, ||phi_new||_F) of the last record (Frobenius). When
  // full, replace the record whose removal-then-insertion maximizes
  // lambda_min(gram), only if that strictly increases it. Returns whether
  // the record was admitted. lambda_min(gram) never decreases.
  bool offer(HistoryRecord rec, double eps_add);

 private:
  void recompute();

  std::size_t capacity_;
  std::size_t q_in_;
  std::size_t m_;
  std::vector<HistoryRecord> records_;
  Matrix gram_;
  double q_min_ = 0.0;
};

// Builds the candidate record for agent i at time t and offers it to the
// stack. phi_theta: with ClSource::kOracle it is phi * theta_true; with
// ClSource::kReconstructed it is recovered from the stored derivative as
// pinv(B) (xdot - A x) - u with the left pseudo-inverse pinv(B) = (B^T B)^-1 B^T.
// Returns whether the record was admitted.
bool record_history_point(HistoryStack& stack, double t, const Vec& x_i, const Vec& u_i,
                          const Vec& xdot_i, const AgentModel& model, ClSource source,
                          double eps_add);

// Condition-1 certificate: q_i = lambda_min(gram); satisfied iff q_i > rank_tol.
std::pair<bool, double> condition1_certificate(const HistoryStack& stack,
                                               double rank_tol = 1e-6);

// Joint simulation state: stacked agent states (n*p) and stacked parameter
// estimates (n*m).
struct SwarmState {
  Vec x;
  Vec theta_hat;
  double t = 0.0;
};

struct SwarmDeriv {
  Vec dx;
  Vec dtheta_hat;
};

// Consensus feedback term  sum_j a_ij (x~_i - x~_j)  where x~ is the
// transmitted state: quantized componentwise when the quantizer is enabled,
// raw otherwise.
Vec relative_state_sum(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                       const QuantizerConfig& quantizer, std::size_t p);

// Control law: alpha * K * relative_state_sum - phi_i(t, x_i) * theta_hat_i.
// The regressor term always uses the raw local state.
Vec control_input(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                  const ControllerConfig& cfg, const SwarmModel& model);

// Estimate derivative, gradient-only form: phi_i^T B^T P * relative_state_sum.
Vec update_baseline(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                    const ControllerConfig& cfg, const SwarmModel& model);

// Estimate derivative with the recorded-data term: baseline term minus
// sum_k phi_k^T (phi_k theta_hat_i - phi_theta_k). The subtracted product is
// phi_k * theta_true in oracle mode and the stored reconstruction otherwise.
Vec update_concurrent_learning(std::size_t i, const SwarmState& state,
                               const UndirectedGraph& g, const ControllerConfig& cfg,
                               const SwarmModel& model, const HistoryStack& stack);

// Full closed-loop vector field: per agent,
//   dx_i = A x_i + B (u_i + phi_i theta_i)
// with u_i from control_input, and dtheta_hat_i from the configured update
// law. Throws std::invalid_argument on non-finite state entries.
SwarmDeriv closed_loop_rhs(const SwarmState& state, const SwarmModel& model,
                           const UndirectedGraph& g, const ControllerConfig& cfg,
                           const std::vector<HistoryStack>& stacks);

// State derivative rewritten in terms of the parameter error
// theta_hat - theta_true (the control law substituted and the matched term
// cancelled symbolically). Quantization off only. Used to cross-check the
// composed path; the two must agree to rounding.
Vec closed_loop_rhs_parameter_error_form(const SwarmState& state, const SwarmModel& model,
                                         const UndirectedGraph& g,
                                         const ControllerConfig& cfg);

// V = x^T (L (x) P) x + 1/2 sum_i |theta_hat_i - theta_i|^2.
double lyapunov_value(const SwarmState& state, const Matrix& l, const Matrix& p,
                      const SwarmModel& model);

// Sum over ordered pairs (i, j) of |x_i - x_j|^2 (each unordered pair counted
// twice).
double consensus_error(const SwarmState& state, std::size_t n, std::size_t p);

// Analytic time-derivative of V along the unquantized closed loop:
//   -x^T (L (x) I) x - x^T ((2 alpha L^2 - L) (x) P B B^T P) x
//   - sum_i theta_err_i^T gram_i theta_err_i.
double lyapunov_vdot_analytic(const SwarmState& state, const Matrix& l,
                              const ControllerConfig& cfg, const SwarmModel& model,
                              const std::vector<HistoryStack>& stacks);

// Decay-rate and quantization-offset certificate.
//   gamma = lambda_2 / C with C = lambda_max(L) * lambda_max(P);
//   q = min_i lambda_min(gram_i);
//   decay_unquantized = min{gamma, q}; decay_quantized = min{gamma/2, q};
//   D = ||L^2 (x) P B B^T P||; J = alpha^2 D^2 / lambda_2;
//   offset = J sigma^2 / decay_quantized (0 when sigma = 0).
struct RateCertificate {
  double gamma = 0.0;
  double q = 0.0;
  double decay_unquantized = 0.0;
  double decay_quantized = 0.0;
  double c_bound = 0.0;
  double d_norm = 0.0;
  double j_gain = 0.0;
  double sigma = 0.0;
  double offset = 0.0;
};

RateCertificate rate_certificate(const Matrix& l, const Matrix& p, const Matrix& b,
                                 double alpha, double sigma,
                                 const std::vector<HistoryStack>& stacks);

}  // namespace acl
