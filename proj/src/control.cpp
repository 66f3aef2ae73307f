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

#include "acl/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "acl/linalg.hpp"

namespace acl {
namespace {

Vec slice(const Vec& v, std::size_t offset, std::size_t len) {
  return Vec(v.begin() + offset, v.begin() + offset + len);
}

Vec agent_state(const SwarmState& state, std::size_t i, std::size_t p) {
  return slice(state.x, i * p, p);
}

Vec agent_estimate(const SwarmState& state, std::size_t i, std::size_t m) {
  return slice(state.theta_hat, i * m, m);
}

Matrix eval_regressor(const AgentModel& model, double t, const Vec& x) {
  Matrix phi = model.phi.evaluate(t, x);
  if (phi.rows() != model.phi.q_in || phi.cols() != model.phi.m)
    throw std::invalid_argument("regressor: wrong output shape");
  if (!is_finite(phi)) throw std::invalid_argument("regressor: non-finite output");
  return phi;
}

Vec sub(Vec a, const Vec& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}

Vec add(Vec a, const Vec& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

Vec scale(Vec a, double s) {
  for (double& v : a) v *= s;
  return a;
}

}  // namespace

SwarmModel SwarmModel::from_agents(std::vector<AgentModel> agents) {
  if (agents.empty()) throw std::invalid_argument("swarm: no agents");
  SwarmModel model;
  const AgentModel& first = agents.front();
  model.n = agents.size();
  model.p = first.A.rows();
  model.q_in = first.B.cols();
  model.m = first.theta_true.size();
  for (const AgentModel& ag : agents) {
    if (ag.A.rows() != model.p || ag.A.cols() != model.p)
      throw std::invalid_argument("swarm: A dimension mismatch");
    if (ag.B.rows() != model.p || ag.B.cols() != model.q_in)
      throw std::invalid_argument("swarm: B dimension mismatch");
    if (ag.theta_true.size() != model.m)
      throw std::invalid_argument("swarm: theta dimension mismatch");
    if (ag.phi.p != model.p || ag.phi.q_in != model.q_in || ag.phi.m != model.m)
      throw std::invalid_argument("swarm: regressor dimension mismatch");
    if (!ag.phi.evaluate) throw std::invalid_argument("swarm: missing regressor map");
    for (std::size_t k = 0; k < ag.A.data().size(); ++k)
      if (ag.A.data()[k] != first.A.data()[k])
        throw std::invalid_argument("swarm: agents must share A");
    for (std::size_t k = 0; k < ag.B.data().size(); ++k)
      if (ag.B.data()[k] != first.B.data()[k])
        throw std::invalid_argument("swarm: agents must share B");
  }
  model.agents = std::move(agents);
  return model;
}

std::vector<std::string> validate_controller(const ControllerConfig& cfg,
                                             const SwarmModel& model, const Matrix& l,
                                             const Matrix& q) {
  const Matrix& b = model.agents.front().B;
  const Matrix& a = model.agents.front().A;
  const Matrix k_expect = -1.0 * (b.transpose() * cfg.P);
  if (!cfg.K.same_shape(k_expect) || max_abs(cfg.K - k_expect) > 1e-12)
    throw std::invalid_argument("controller: K != -B^T P");
  const Matrix residual =
      a.transpose() * cfg.P + cfg.P * a - cfg.P * (b * b.transpose()) * cfg.P + q;
  if (frobenius_norm(residual) > 1e-8)
    throw std::invalid_argument("controller: Riccati residual of P exceeds 1e-8");
  if (cfg.quantizer.enabled && !(cfg.quantizer.sigma > 0.0))
    throw std::invalid_argument("controller: quantizer enabled with sigma <= 0");

  std::vector<std::string> warnings;
  const double bound = alpha_lower_bound(l);
  if (cfg.alpha < bound)
    warnings.push_back("alpha " + std::to_string(cfg.alpha) +
                       " is below the coupling bound 1/(2 lambda_2) = " +
                       std::to_string(bound));
  if (!alpha_psd_certificate(l, cfg.alpha))
    warnings.push_back("PSD certificate failed: 2*alpha*L^2 - L has an eigenvalue below "
                       "-1e-9 for alpha = " +
                       std::to_string(cfg.alpha));
  return warnings;
}

HistoryStack::HistoryStack(std::size_t capacity, std::size_t q_in, std::size_t m)
    : capacity_(capacity), q_in_(q_in), m_(m), gram_(m, m) {
  if (capacity == 0) throw std::invalid_argument("history stack: zero capacity");
}

void HistoryStack::recompute() {
  gram_ = Matrix(m_, m_);
  for (const HistoryRecord& rec : records_) gram_ += rec.phi.transpose() * rec.phi;
  q_min_ = records_.empty() ? 0.0 : eig_symmetric(gram_).eigenvalues.front();
}

bool HistoryStack::offer(HistoryRecord rec, double eps_add) {
  if (rec.phi.rows() != q_in_ || rec.phi.cols() != m_)
    throw std::invalid_argument("history stack: record shape mismatch");
  if (records_.size() < capacity_) {
    if (!records_.empty()) {
      const double novelty = frobenius_norm(rec.phi - records_.back().phi);
      if (novelty < eps_add * std::max(1.0, frobenius_norm(rec.phi))) return false;
    }
    records_.push_back(std::move(rec));
    recompute();
    return true;
  }
  // Full: find the replacement that maximizes lambda_min of the new gram.
  const double current = q_min_;
  double best_q = current;
  std::size_t best_k = capacity_;
  for (std::size_t k = 0; k < records_.size(); ++k) {
    Matrix gram(m_, m_);
    for (std::size_t j = 0; j < records_.size(); ++j) {
      const Matrix& phi = (j == k) ? rec.phi : records_[j].phi;
      gram += phi.transpose() * phi;
    }
    const double q = eig_symmetric(gram).eigenvalues.front();
    if (q > best_q) {
      best_q = q;
      best_k = k;
    }
  }
  if (best_k == capacity_) return false;
  records_[best_k] = std::move(rec);
  recompute();
  return true;
}

bool record_history_point(HistoryStack& stack, double t, const Vec& x_i, const Vec& u_i,
                          const Vec& xdot_i, const AgentModel& model, ClSource source,
                          double eps_add) {
  if (!is_finite(x_i) || !is_finite(u_i) || !is_finite(xdot_i))
    throw std::invalid_argument("record_history_point: non-finite input");
  HistoryRecord rec;
  rec.x = x_i;
  rec.phi = eval_regressor(model, t, x_i);
  if (source == ClSource::kOracle) {
    rec.phi_theta = mat_vec(rec.phi, model.theta_true);
  } else {
    // phi theta = pinv(B) (xdot - A x) - u, pinv(B) = (B^T B)^-1 B^T.
    const Matrix bt = model.B.transpose();
    const Matrix btb = bt * model.B;
    Vec rhs = mat_vec(bt, sub(xdot_i, mat_vec(model.A, x_i)));
    Vec sol;
    try {
      sol = solve_linear(btb, std::move(rhs));
    } catch (const std::runtime_error&) {
      throw std::runtime_error("record_history_point: B^T B singular (B lacks full column rank)");
    }
    rec.phi_theta = sub(std::move(sol), u_i);
  }
  return stack.offer(std::move(rec), eps_add);
}

std::pair<bool, double> condition1_certificate(const HistoryStack& stack, double rank_tol) {
  const double q = stack.q_min();
  return {q > rank_tol, q};
}

Vec relative_state_sum(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                       const QuantizerConfig& quantizer, std::size_t p) {
  const bool quantize = quantizer.enabled;
  Vec xi = slice(state.x, i * p, p);
  if (quantize) xi = quantize_vector(xi, quantizer.sigma);
  Vec sum(p, 0.0);
  for (std::size_t j = 0; j < g.n; ++j) {
    const double w = g.weights(i, j);
    if (w == 0.0) continue;
    Vec xj = slice(state.x, j * p, p);
    if (quantize) xj = quantize_vector(xj, quantizer.sigma);
    for (std::size_t k = 0; k < p; ++k) sum[k] += w * (xi[k] - xj[k]);
  }
  return sum;
}

Vec control_input(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                  const ControllerConfig& cfg, const SwarmModel& model) {
  const Vec rel = relative_state_sum(i, state, g, cfg.quantizer, model.p);
  const Vec xi = agent_state(state, i, model.p);
  const Matrix phi = eval_regressor(model.agents[i], state.t, xi);
  const Vec theta_hat_i = agent_estimate(state, i, model.m);
  return sub(scale(mat_vec(cfg.K, rel), cfg.alpha), mat_vec(phi, theta_hat_i));
}

namespace {

// First term shared by both update laws: phi^T B^T P * relative sum.
Vec update_gradient_term(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                         const ControllerConfig& cfg, const SwarmModel& model) {
  const Vec rel = relative_state_sum(i, state, g, cfg.quantizer, model.p);
  const Vec xi = agent_state(state, i, model.p);
  const Matrix phi = eval_regressor(model.agents[i], state.t, xi);
  const Vec w = mat_vec(model.agents[i].B.transpose(), mat_vec(cfg.P, rel));
  return mat_vec(phi.transpose(), w);
}

}  // namespace

Vec update_baseline(std::size_t i, const SwarmState& state, const UndirectedGraph& g,
                    const ControllerConfig& cfg, const SwarmModel& model) {
  return update_gradient_term(i, state, g, cfg, model);
}

Vec update_concurrent_learning(std::size_t i, const SwarmState& state,
                               const UndirectedGraph& g, const ControllerConfig& cfg,
                               const SwarmModel& model, const HistoryStack& stack) {
  if (cfg.theorem_grade && stack.size() == 0)
    throw std::runtime_error("update_concurrent_learning: empty history stack in theorem-grade mode");
  Vec dtheta = update_gradient_term(i, state, g, cfg, model);
  const Vec theta_hat_i = agent_estimate(state, i, model.m);
  for (const HistoryRecord& rec : stack.records()) {
    const Vec err = sub(mat_vec(rec.phi, theta_hat_i), rec.phi_theta);
    dtheta = sub(std::move(dtheta), mat_vec(rec.phi.transpose(), err));
  }
  return dtheta;
}

SwarmDeriv closed_loop_rhs(const SwarmState& state, const SwarmModel& model,
                           const UndirectedGraph& g, const ControllerConfig& cfg,
                           const std::vector<HistoryStack>& stacks) {
  if (!is_finite(state.x) || !is_finite(state.theta_hat))
    throw std::runtime_error("closed_loop_rhs: non-finite state at t = " +
                             std::to_string(state.t));
  if (state.x.size() != model.n * model.p || state.theta_hat.size() != model.n * model.m)
    throw std::invalid_argument("closed_loop_rhs: state dimension mismatch");
  if (cfg.update_mode == UpdateMode::kConcurrentLearning && stacks.size() != model.n)
    throw std::invalid_argument("closed_loop_rhs: one history stack per agent required");

  SwarmDeriv deriv;
  deriv.dx.resize(model.n * model.p);
  deriv.dtheta_hat.resize(model.n * model.m);
  for (std::size_t i = 0; i < model.n; ++i) {
    const AgentModel& agent = model.agents[i];
    const Vec xi = agent_state(state, i, model.p);
    const Vec u = control_input(i, state, g, cfg, model);
    const Matrix phi = eval_regressor(agent, state.t, xi);
    const Vec matched = add(u, mat_vec(phi, agent.theta_true));
    const Vec dxi = add(mat_vec(agent.A, xi), mat_vec(agent.B, matched));
    std::copy(dxi.begin(), dxi.end(), deriv.dx.begin() + i * model.p);

    const Vec dth = cfg.update_mode == UpdateMode::kBaseline
                        ? update_baseline(i, state, g, cfg, model)
                        : update_concurrent_learning(i, state, g, cfg, model, stacks[i]);
    std::copy(dth.begin(), dth.end(), deriv.dtheta_hat.begin() + i * model.m);
  }
  return deriv;
}

Vec closed_loop_rhs_parameter_error_form(const SwarmState& state, const SwarmModel& model,
                                         const UndirectedGraph& g,
                                         const ControllerConfig& cfg) {
  if (cfg.quantizer.enabled)
    throw std::invalid_argument("parameter-error form is defined for the unquantized loop");
  Vec dx(model.n * model.p);
  for (std::size_t i = 0; i < model.n; ++i) {
    const AgentModel& agent = model.agents[i];
    const Vec xi = agent_state(state, i, model.p);
    const Vec rel = relative_state_sum(i, state, g, cfg.quantizer, model.p);
    const Matrix phi = eval_regressor(agent, state.t, xi);
    const Vec theta_err = sub(agent_estimate(state, i, model.m), agent.theta_true);
    const Vec bracket = sub(scale(mat_vec(cfg.K, rel), cfg.alpha), mat_vec(phi, theta_err));
    const Vec dxi = add(mat_vec(agent.A, xi), mat_vec(agent.B, bracket));
    std::copy(dxi.begin(), dxi.end(), dx.begin() + i * model.p);
  }
  return dx;
}

double lyapunov_value(const SwarmState& state, const Matrix& l, const Matrix& p,
                      const SwarmModel& model) {
  double v = 0.0;
  std::vector<Vec> px(model.n);
  for (std::size_t i = 0; i < model.n; ++i)
    px[i] = mat_vec(p, agent_state(state, i, model.p));
  for (std::size_t i = 0; i < model.n; ++i) {
    const Vec xi = agent_state(state, i, model.p);
    for (std::size_t j = 0; j < model.n; ++j) {
      const double lij = l(i, j);
      if (lij == 0.0) continue;
      v += lij * dot(xi, px[j]);
    }
  }
  for (std::size_t i = 0; i < model.n; ++i) {
    const Vec err = sub(agent_estimate(state, i, model.m), model.agents[i].theta_true);
    v += 0.5 * dot(err, err);
  }
  return v;
}

double consensus_error(const SwarmState& state, std::size_t n, std::size_t p) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double pair = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        const double d = state.x[i * p + k] - state.x[j * p + k];
        pair += d * d;
      }
      total += pair;
    }
  return total;
}

double lyapunov_vdot_analytic(const SwarmState& state, const Matrix& l,
                              const ControllerConfig& cfg, const SwarmModel& model,
                              const std::vector<HistoryStack>& stacks) {
  const Matrix& b = model.agents.front().B;
  const Matrix psp = cfg.P * (b * b.transpose()) * cfg.P;
  const Matrix m2 = 2.0 * cfg.alpha * (l * l) - l;
  double term_l = 0.0, term_m2 = 0.0;
  std::vector<Vec> xs(model.n), psp_x(model.n);
  for (std::size_t i = 0; i < model.n; ++i) {
    xs[i] = agent_state(state, i, model.p);
    psp_x[i] = mat_vec(psp, xs[i]);
  }
  for (std::size_t i = 0; i < model.n; ++i)
    for (std::size_t j = 0; j < model.n; ++j) {
      term_l += l(i, j) * dot(xs[i], xs[j]);
      term_m2 += m2(i, j) * dot(xs[i], psp_x[j]);
    }
  double term_gram = 0.0;
  for (std::size_t i = 0; i < model.n; ++i) {
    const Vec err = sub(agent_estimate(state, i, model.m), model.agents[i].theta_true);
    term_gram += dot(err, mat_vec(stacks[i].gram(), err));
  }
  return -term_l - term_m2 - term_gram;
}

RateCertificate rate_certificate(const Matrix& l, const Matrix& p, const Matrix& b,
                                 double alpha, double sigma,
                                 const std::vector<HistoryStack>& stacks) {
  RateCertificate cert;
  const double lambda2 = algebraic_connectivity(l);
  const double lmax_l = eig_symmetric(l).eigenvalues.back();
  const double lmax_p = eig_symmetric(p).eigenvalues.back();
  cert.c_bound = lmax_l * lmax_p;
  cert.gamma = lambda2 / cert.c_bound;
  cert.q = stacks.empty() ? 0.0 : stacks.front().q_min();
  for (const HistoryStack& s : stacks) cert.q = std::min(cert.q, s.q_min());
  cert.decay_unquantized = std::min(cert.gamma, cert.q);
  cert.decay_quantized = std::min(cert.gamma / 2.0, cert.q);
  const Matrix psp = p * (b * b.transpose()) * p;
  cert.d_norm = spectral_norm_psd(kron(l * l, psp));
  cert.j_gain = alpha * alpha * cert.d_norm * cert.d_norm / lambda2;
  cert.sigma = sigma;
  if (sigma > 0.0) {
    cert.offset = cert.decay_quantized > 0.0
                      ? cert.j_gain * sigma * sigma / cert.decay_quantized
                      : std::numeric_limits<double>::infinity();
  }
  return cert;
}

}  // namespace acl
