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

#include "acl/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "acl/linalg.hpp"

namespace acl {
namespace {

constexpr double kStateNormGuard = 1e12;

Vec pack(const SwarmState& s) {
  Vec y = s.x;
  y.insert(y.end(), s.theta_hat.begin(), s.theta_hat.end());
  return y;
}

SwarmState unpack(const Vec& y, std::size_t np, double t) {
  SwarmState s;
  s.x.assign(y.begin(), y.begin() + np);
  s.theta_hat.assign(y.begin() + np, y.end());
  s.t = t;
  return s;
}

double state_norm(const Vec& y, std::size_t np) {
  double s = 0.0;
  for (std::size_t k = 0; k < np; ++k) s += y[k] * y[k];
  return std::sqrt(s);
}

}  // namespace

Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& y,
             double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rk4_step: h must be positive");
  const auto checked = [&](double tt, const Vec& yy) {
    Vec d = f(tt, yy);
    if (d.size() != y.size()) throw std::invalid_argument("rk4_step: field dimension mismatch");
    if (!is_finite(d))
      throw std::runtime_error("rk4_step: non-finite stage value at t = " + std::to_string(tt));
    return d;
  };
  const Vec k1 = checked(t, y);
  Vec y2(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * h * k1[i];
  const Vec k2 = checked(t + 0.5 * h, y2);
  for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * h * k2[i];
  const Vec k3 = checked(t + 0.5 * h, y2);
  for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + h * k3[i];
  const Vec k4 = checked(t + h, y2);
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

TrajectoryLog simulate(const SimProblem& problem) {
  const SwarmModel& model = problem.model;
  const ControllerConfig& cfg = problem.controller;
  const IntegratorConfig& icfg = problem.integrator;
  const std::size_t np = model.n * model.p;
  const std::size_t nm = model.n * model.m;
  if (problem.x0.size() != np || problem.theta_hat0.size() != nm)
    throw std::invalid_argument("simulate: initial condition dimension mismatch");
  if (!(icfg.step_h > 0.0) || icfg.t_final < icfg.step_h || icfg.sample_every < 1)
    throw std::invalid_argument("simulate: bad integrator configuration");

  TrajectoryLog log;
  log.warnings = validate_controller(cfg, model, problem.laplacian, problem.q_cost);

  std::vector<HistoryStack> stacks;
  stacks.reserve(model.n);
  for (std::size_t i = 0; i < model.n; ++i)
    stacks.emplace_back(cfg.stack_capacity, model.q_in, model.m);

  const auto field = [&](double t, const Vec& y) {
    const SwarmState s = unpack(y, np, t);
    const SwarmDeriv d = closed_loop_rhs(s, model, problem.graph, cfg, stacks);
    Vec out = d.dx;
    out.insert(out.end(), d.dtheta_hat.begin(), d.dtheta_hat.end());
    return out;
  };

  Vec y = pack({problem.x0, problem.theta_hat0, 0.0});
  const double h = icfg.step_h;
  const auto n_steps = static_cast<std::size_t>(std::llround(icfg.t_final / h));
  bool freeze_checked = false;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (!is_finite(y)) {
      log.aborted = true;
      log.abort_t = t;
      log.abort_reason = "non-finite state at t = " + std::to_string(t);
      break;
    }
    if (state_norm(y, np) > kStateNormGuard) {
      log.aborted = true;
      log.abort_t = t;
      log.abort_reason = "state norm exceeded 1e12 at t = " + std::to_string(t);
      break;
    }
    const SwarmState state = unpack(y, np, t);
    if (k % icfg.sample_every == 0) {
      TrajectorySample sample;
      sample.t = t;
      sample.x = state.x;
      sample.theta_hat = state.theta_hat;
      sample.lyapunov = lyapunov_value(state, problem.laplacian, cfg.P, model);
      sample.consensus = consensus_error(state, model.n, model.p);
      log.samples.push_back(std::move(sample));
    }
    if (k == n_steps) break;

    const bool recording = cfg.update_mode == UpdateMode::kConcurrentLearning &&
                           t <= cfg.t_record;
    if (recording) {
      for (std::size_t i = 0; i < model.n; ++i) {
        const AgentModel& agent = model.agents[i];
        const Vec xi(state.x.begin() + i * model.p, state.x.begin() + (i + 1) * model.p);
        const Vec u = control_input(i, state, problem.graph, cfg, model);
        const Matrix phi = agent.phi.evaluate(t, xi);
        Vec matched = mat_vec(phi, agent.theta_true);
        for (std::size_t c = 0; c < matched.size(); ++c) matched[c] += u[c];
        Vec xdot = mat_vec(agent.A, xi);
        const Vec bu = mat_vec(agent.B, matched);
        for (std::size_t c = 0; c < xdot.size(); ++c) xdot[c] += bu[c];
        record_history_point(stacks[i], t, xi, u, xdot, agent, cfg.cl_source, cfg.eps_add);
      }
    } else if (!freeze_checked && cfg.update_mode == UpdateMode::kConcurrentLearning) {
      freeze_checked = true;
      if (cfg.theorem_grade) {
        for (std::size_t i = 0; i < model.n; ++i)
          if (!condition1_certificate(stacks[i], cfg.rank_tol).first)
            throw std::runtime_error(
                "simulate: history stack uncertified after the recording window "
                "(theorem-grade mode, agent " + std::to_string(i) + ")");
      }
    }

    try {
      y = rk4_step(field, t, y, h);
    } catch (const std::runtime_error& err) {
      log.aborted = true;
      log.abort_t = t;
      log.abort_reason = err.what();
      break;
    }
  }

  const double cert_sigma = cfg.quantizer.enabled ? cfg.quantizer.sigma : 0.0;
  log.certificate = rate_certificate(problem.laplacian, cfg.P,
                                     model.agents.front().B, cfg.alpha, cert_sigma, stacks);
  log.agent_q.reserve(model.n);
  for (std::size_t i = 0; i < model.n; ++i)
    log.agent_q.push_back(condition1_certificate(stacks[i], cfg.rank_tol).second);
  const double decay = cfg.quantizer.enabled ? log.certificate.decay_quantized
                                             : log.certificate.decay_unquantized;
  const double offset = cfg.quantizer.enabled ? log.certificate.offset : 0.0;
  if (!log.samples.empty()) {
    const double v0 = log.samples.front().lyapunov;
    for (TrajectorySample& s : log.samples)
      s.bound = std::exp(-decay * s.t) * v0 + offset;
  }
  return log;
}

}  // namespace acl
