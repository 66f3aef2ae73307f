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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "acl/control.hpp"
#include "acl/linalg.hpp"
#include "acl/scenario.hpp"
#include "doctest.h"
#include "oracles.hpp"

using acl::AgentModel;
using acl::ClSource;
using acl::ControllerConfig;
using acl::HistoryRecord;
using acl::HistoryStack;
using acl::Matrix;
using acl::SwarmModel;
using acl::SwarmState;
using acl::UndirectedGraph;
using acl::UpdateMode;
using acl::Vec;

namespace {

// Two double integrators coupled by one edge of weight 2; regressor is the
// first state component, one scalar parameter per agent.
struct Pair {
  SwarmModel model;
  UndirectedGraph graph;
  Matrix l;
  ControllerConfig cfg;
};

Pair make_pair_fixture() {
  Matrix a(2, 2, {0.0, 1.0, 0.0, 0.0});
  Matrix b(2, 1, {0.0, 1.0});
  acl::RegressorSpec phi{2, 1, 1, [](double, const Vec& x) {
                           return Matrix(1, 1, {x[0]});
                         }};
  AgentModel agent0{a, b, phi, {2.0}};
  AgentModel agent1{a, b, phi, {-1.0}};
  Pair f;
  f.model = SwarmModel::from_agents({agent0, agent1});
  f.graph = UndirectedGraph::from_edges(2, {{0, 1, 2.0}});
  f.l = acl::laplacian(f.graph);
  f.cfg.alpha = 0.5;
  f.cfg.P = acl::solve_care(a, b, Matrix::identity(2));
  f.cfg.K = -1.0 * (b.transpose() * f.cfg.P);
  return f;
}

// Fully resolved five-agent reference problem (builds P via the Riccati
// solver once per call).
acl::SimProblem reference_problem() {
  return acl::to_problem(acl::builtin_fixture("paper-s5"));
}

SwarmState random_state(std::size_t np, std::size_t nm, acl::oracle::Rng& rng,
                        double t) {
  SwarmState s;
  s.x.resize(np);
  s.theta_hat.resize(nm);
  for (double& v : s.x) v = rng.uniform(-10.0, 10.0);
  for (double& v : s.theta_hat) v = rng.uniform(-5.0, 5.0);
  s.t = t;
  return s;
}

}  // namespace

TEST_CASE("swarm assembly validates shared dynamics") {
  Pair f = make_pair_fixture();
  CHECK(f.model.n == 2);
  CHECK(f.model.p == 2);
  CHECK(f.model.q_in == 1);
  CHECK(f.model.m == 1);

  auto agents = f.model.agents;
  agents[1].A(0, 0) = 1.0;  // breaks the shared-dynamics requirement
  CHECK_THROWS(SwarmModel::from_agents(agents));
}

TEST_CASE("relative state sum, raw and quantized") {
  Pair f = make_pair_fixture();
  SwarmState s;
  s.x = {0.4, 0.6, 1.6, -0.6};
  s.theta_hat = {0.0, 0.0};

  Vec raw = acl::relative_state_sum(0, s, f.graph, {}, 2);
  CHECK(raw[0] == doctest::Approx(2.0 * (0.4 - 1.6)));
  CHECK(raw[1] == doctest::Approx(2.0 * (0.6 + 0.6)));

  // sigma = 1: transmitted states are (0,1) and (2,-1).
  acl::QuantizerConfig quant{1.0, true};
  Vec q = acl::relative_state_sum(0, s, f.graph, quant, 2);
  CHECK(q[0] == doctest::Approx(-4.0));
  CHECK(q[1] == doctest::Approx(4.0));

  Vec other = acl::relative_state_sum(1, s, f.graph, {}, 2);
  CHECK(other[0] == doctest::Approx(-raw[0]));
  CHECK(other[1] == doctest::Approx(-raw[1]));
}

TEST_CASE("control input composes coupling and regressor terms") {
  Pair f = make_pair_fixture();
  SwarmState s;
  s.x = {1.0, 2.0, -1.0, 0.5};
  s.theta_hat = {3.0, -2.0};

  Vec r = acl::relative_state_sum(0, s, f.graph, {}, 2);
  Vec expected = acl::mat_vec(f.cfg.K, r);
  for (double& v : expected) v *= f.cfg.alpha;
  expected[0] -= 1.0 * 3.0;  // phi_0(x) theta_hat_0 = x_00 * 3

  Vec u = acl::control_input(0, s, f.graph, f.cfg, f.model);
  REQUIRE(u.size() == 1);
  CHECK(u[0] == doctest::Approx(expected[0]).epsilon(1e-14));
}

TEST_CASE("baseline update is the gradient-only term") {
  Pair f = make_pair_fixture();
  SwarmState s;
  s.x = {1.0, 2.0, -1.0, 0.5};
  s.theta_hat = {3.0, -2.0};

  Vec r = acl::relative_state_sum(0, s, f.graph, {}, 2);
  // phi^T B^T P r with phi = [x_00] = [1].
  Vec btp_r = acl::mat_vec(f.model.agents[0].B.transpose() * f.cfg.P, r);
  const double expected = 1.0 * btp_r[0];

  Vec d = acl::update_baseline(0, s, f.graph, f.cfg, f.model);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("history stack admission and rank certificate") {
  HistoryStack stack(2, 1, 1);
  CHECK(stack.size() == 0);
  CHECK(stack.q_min() == 0.0);
  CHECK_FALSE(acl::condition1_certificate(stack).first);

  const auto rec = [](double v) {
    return HistoryRecord{{0.0}, Matrix(1, 1, {v}), {0.0}};
  };

  CHECK(stack.offer(rec(1.0), 1e-3));
  CHECK_FALSE(stack.offer(rec(1.0), 1e-3));  // novelty gate: same as last
  CHECK(stack.offer(rec(2.0), 1e-3));
  CHECK(stack.size() == 2);
  CHECK(stack.q_min() == doctest::Approx(5.0));  // 1^2 + 2^2

  // Full: replacement only when lambda_min strictly increases.
  CHECK(stack.offer(rec(3.0), 1e-3));
  CHECK(stack.size() == 2);
  CHECK(stack.q_min() == doctest::Approx(13.0));  // 3^2 + 2^2: replaced the 1
  CHECK_FALSE(stack.offer(rec(0.1), 1e-3));
  CHECK(stack.q_min() == doctest::Approx(13.0));

  // gram always equals the explicit sum of phi^T phi.
  double explicit_sum = 0.0;
  for (const HistoryRecord& r : stack.records())
    explicit_sum += r.phi(0, 0) * r.phi(0, 0);
  CHECK(stack.gram()(0, 0) == doctest::Approx(explicit_sum));

  CHECK(acl::condition1_certificate(stack, 1e-6).first);
  CHECK(acl::condition1_certificate(stack, 1e-6).second == doctest::Approx(13.0));
}

TEST_CASE("rank-one offers never decrease lambda_min with m = 2") {
  HistoryStack stack(2, 1, 2);
  const auto rec = [](double a, double b) {
    return HistoryRecord{{0.0}, Matrix(1, 2, {a, b}), {0.0, 0.0}};
  };
  CHECK(stack.offer(rec(1.0, 0.0), 1e-3));
  CHECK(stack.q_min() == doctest::Approx(0.0));  // rank deficient
  CHECK_FALSE(acl::condition1_certificate(stack).first);

  CHECK(stack.offer(rec(0.0, 1.0), 1e-3));
  CHECK(stack.q_min() == doctest::Approx(1.0));
  CHECK(acl::condition1_certificate(stack).first);

  // A colinear replacement would zero an eigenvalue; it must be refused.
  CHECK_FALSE(stack.offer(rec(2.0, 0.0), 1e-3));
  CHECK(stack.q_min() == doctest::Approx(1.0));
  CHECK(stack.size() == 2);
}

TEST_CASE("recorded points: oracle source vs reconstruction from derivatives") {
  Pair f = make_pair_fixture();
  const AgentModel& agent = f.model.agents[0];
  const Vec x{0.7, -0.3};
  const Vec u{0.25};
  const Matrix phi = agent.phi.evaluate(0.0, x);

  // xdot = A x + B (u + phi theta): the matched channel carries phi theta.
  Vec xdot = acl::mat_vec(agent.A, x);
  const Vec bu = acl::mat_vec(agent.B, {u[0] + phi(0, 0) * agent.theta_true[0]});
  for (std::size_t k = 0; k < 2; ++k) xdot[k] += bu[k];

  HistoryStack via_oracle(4, 1, 1);
  CHECK(acl::record_history_point(via_oracle, 0.0, x, u, xdot, agent,
                                  ClSource::kOracle, 1e-3));
  HistoryStack via_reconstruction(4, 1, 1);
  CHECK(acl::record_history_point(via_reconstruction, 0.0, x, u, xdot, agent,
                                  ClSource::kReconstructed, 1e-3));

  const Vec& truth = via_oracle.records()[0].phi_theta;
  const Vec& rebuilt = via_reconstruction.records()[0].phi_theta;
  REQUIRE(truth.size() == rebuilt.size());
  CHECK(rebuilt[0] == doctest::Approx(truth[0]).epsilon(1e-12));

  // Input matrix with no usable channel: reconstruction has no left inverse.
  AgentModel degenerate = agent;
  degenerate.B = Matrix(2, 1, {0.0, 0.0});
  HistoryStack bad(4, 1, 1);
  CHECK_THROWS(acl::record_history_point(bad, 0.0, x, u, xdot, degenerate,
                                         ClSource::kReconstructed, 1e-3));
}

TEST_CASE("learning update with an empty stack reduces to the baseline term") {
  Pair f = make_pair_fixture();
  SwarmState s;
  s.x = {1.0, 2.0, -1.0, 0.5};
  s.theta_hat = {3.0, -2.0};

  HistoryStack empty(4, 1, 1);
  Vec cl = acl::update_concurrent_learning(0, s, f.graph, f.cfg, f.model, empty);
  Vec base = acl::update_baseline(0, s, f.graph, f.cfg, f.model);
  CHECK(cl[0] == doctest::Approx(base[0]));

  ControllerConfig strict = f.cfg;
  strict.theorem_grade = true;
  CHECK_THROWS(acl::update_concurrent_learning(0, s, f.graph, strict, f.model, empty));
}

TEST_CASE("learning update subtracts the recorded-data term") {
  Pair f = make_pair_fixture();
  SwarmState s;
  s.x = {1.0, 2.0, -1.0, 0.5};
  s.theta_hat = {3.0, -2.0};

  HistoryStack stack(4, 1, 1);
  // Two synthetic records with phi = 1.5 and 0.5, phi_theta from theta = 2.
  stack.offer({{1.5, 0.0}, Matrix(1, 1, {1.5}), {3.0}}, 1e-3);
  stack.offer({{0.5, 0.0}, Matrix(1, 1, {0.5}), {1.0}}, 1e-3);

  Vec base = acl::update_baseline(0, s, f.graph, f.cfg, f.model);
  // sum_k phi_k^T (phi_k theta_hat - phi_theta_k)
  //   = 1.5 (1.5*3 - 3) + 0.5 (0.5*3 - 1) = 2.25 + 0.25.
  Vec cl = acl::update_concurrent_learning(0, s, f.graph, f.cfg, f.model, stack);
  CHECK(cl[0] == doctest::Approx(base[0] - 2.5).epsilon(1e-14));
}

TEST_CASE("composed vector field equals the parameter-error form") {
  acl::SimProblem pb = reference_problem();
  std::vector<HistoryStack> stacks(pb.model.n,
                                   HistoryStack(20, pb.model.q_in, pb.model.m));
  acl::oracle::Rng rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    SwarmState s = random_state(pb.model.n * pb.model.p, pb.model.n * pb.model.m, rng,
                                rng.uniform(0.0, 5.0));
    acl::SwarmDeriv d = acl::closed_loop_rhs(s, pb.model, pb.graph, pb.controller, stacks);
    Vec alt = acl::closed_loop_rhs_parameter_error_form(s, pb.model, pb.graph,
                                                        pb.controller);
    REQUIRE(alt.size() == d.dx.size());
    double scale = std::max(1.0, acl::norm_inf(d.dx));
    for (std::size_t k = 0; k < alt.size(); ++k)
      CHECK(std::abs(alt[k] - d.dx[k]) <= 1e-12 * scale);
  }
}

TEST_CASE("vector field rejects non-finite state") {
  acl::SimProblem pb = reference_problem();
  std::vector<HistoryStack> stacks(pb.model.n,
                                   HistoryStack(20, pb.model.q_in, pb.model.m));
  SwarmState s;
  s.x.assign(pb.model.n * pb.model.p, 0.0);
  s.theta_hat.assign(pb.model.n * pb.model.m, 0.0);
  s.x[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(acl::closed_loop_rhs(s, pb.model, pb.graph, pb.controller, stacks));
}

TEST_CASE("energy and consensus accumulators match plain-loop oracles") {
  acl::SimProblem pb = reference_problem();
  acl::oracle::Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    SwarmState s = random_state(20, 5, rng, 0.0);
    const double v = acl::lyapunov_value(s, pb.laplacian, pb.controller.P, pb.model);
    double theta_term = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      const double e = s.theta_hat[i] - pb.model.agents[i].theta_true[0];
      theta_term += 0.5 * e * e;
    }
    const double expected =
        acl::oracle::coupled_quadratic_form(s.x, pb.laplacian, pb.controller.P, 5, 4) +
        theta_term;
    CHECK(v == doctest::Approx(expected).epsilon(1e-10));

    CHECK(acl::consensus_error(s, 5, 4) ==
          doctest::Approx(acl::oracle::pairwise_error(s.x, 5, 4)).epsilon(1e-12));
  }
}

TEST_CASE("analytic decay expression vs finite differences of V") {
  // The claimed closed-form derivative omits the coupling-learning cross term
  //   cross = - sum_i r_i^T P B phi_i theta_err_i,   r_i = sum_j a_ij (x_i - x_j).
  // Finite differences agree with (analytic + cross) to truncation accuracy;
  // against the closed form alone the gap at this state is about 1.9e-2
  // relative, which is measured and pinned here.
  acl::SimProblem pb = reference_problem();
  std::vector<HistoryStack> stacks(pb.model.n,
                                   HistoryStack(20, pb.model.q_in, pb.model.m));
  // Populate stacks over the recording window so the gram matrices are
  // nontrivial (the analytic expression includes the -theta~ G theta~ term).
  {
    acl::SimProblem trunc = pb;
    trunc.integrator.t_final = pb.controller.t_record + pb.integrator.step_h;
    // Cheap re-record: step the full closed loop like simulate does.
    SwarmState s{pb.x0, pb.theta_hat0, 0.0};
    const double h = pb.integrator.step_h;
    const std::size_t steps =
        static_cast<std::size_t>(trunc.integrator.t_final / h);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * h;
      for (std::size_t i = 0; i < pb.model.n; ++i) {
        const AgentModel& agent = pb.model.agents[i];
        const Vec xi(s.x.begin() + i * 4, s.x.begin() + (i + 1) * 4);
        const Vec u = acl::control_input(i, s, pb.graph, pb.controller, pb.model);
        const Matrix phi = agent.phi.evaluate(t, xi);
        Vec xdot = acl::mat_vec(agent.A, xi);
        Vec eff{u};
        for (std::size_t c = 0; c < eff.size(); ++c)
          eff[c] += acl::mat_vec(phi, agent.theta_true)[c];
        const Vec bu = acl::mat_vec(agent.B, eff);
        for (std::size_t c = 0; c < 4; ++c) xdot[c] += bu[c];
        acl::record_history_point(stacks[i], t, xi, u, xdot, agent,
                                  acl::ClSource::kOracle, pb.controller.eps_add);
      }
      acl::SwarmDeriv d =
          acl::closed_loop_rhs(s, pb.model, pb.graph, pb.controller, stacks);
      for (std::size_t c = 0; c < s.x.size(); ++c) s.x[c] += h * d.dx[c];
      for (std::size_t c = 0; c < s.theta_hat.size(); ++c)
        s.theta_hat[c] += h * d.dtheta_hat[c];
      s.t += h;
    }
  }
  for (std::size_t i = 0; i < pb.model.n; ++i)
    REQUIRE(acl::condition1_certificate(stacks[i]).first);

  SwarmState s{pb.x0, pb.theta_hat0, 0.0};
  const double analytic =
      acl::lyapunov_vdot_analytic(s, pb.laplacian, pb.controller, pb.model, stacks);

  double cross = 0.0;
  for (std::size_t i = 0; i < pb.model.n; ++i) {
    const Vec xi(s.x.begin() + i * 4, s.x.begin() + (i + 1) * 4);
    const Vec r = acl::relative_state_sum(i, s, pb.graph, {}, 4);
    const Matrix phi = pb.model.agents[i].phi.evaluate(0.0, xi);
    const double err = s.theta_hat[i] - pb.model.agents[i].theta_true[0];
    const Vec pb_phi_theta =
        acl::mat_vec(pb.controller.P * (pb.model.agents[i].B * phi), {err});
    cross -= acl::dot(r, pb_phi_theta);
  }

  // Centered finite difference of V along the flow, h = 1e-5.
  const double fd_h = 1e-5;
  const auto v_at = [&](double sign) {
    acl::SwarmDeriv d =
        acl::closed_loop_rhs(s, pb.model, pb.graph, pb.controller, stacks);
    SwarmState shifted = s;
    for (std::size_t c = 0; c < s.x.size(); ++c)
      shifted.x[c] += sign * fd_h * d.dx[c];
    for (std::size_t c = 0; c < s.theta_hat.size(); ++c)
      shifted.theta_hat[c] += sign * fd_h * d.dtheta_hat[c];
    return acl::lyapunov_value(shifted, pb.laplacian, pb.controller.P, pb.model);
  };
  const double fd = (v_at(1.0) - v_at(-1.0)) / (2.0 * fd_h);

  CHECK(std::abs(fd - (analytic + cross)) <= 1e-6 * std::abs(fd));
  const double gap = std::abs(fd - analytic) / std::abs(fd);
  CHECK(gap >= 1e-3);   // the closed form alone genuinely disagrees
  CHECK(gap <= 5e-2);   // ... by about 1.9e-2 at this state
}

TEST_CASE("rate certificate on the reference fixture") {
  acl::SimProblem pb = reference_problem();
  std::vector<HistoryStack> stacks(pb.model.n,
                                   HistoryStack(20, pb.model.q_in, pb.model.m));
  acl::RateCertificate c = acl::rate_certificate(
      pb.laplacian, pb.controller.P, pb.model.agents[0].B, pb.controller.alpha, 0.0,
      stacks);
  CHECK(c.gamma == doctest::Approx(0.054703453495902409).epsilon(1e-9));
  CHECK(c.c_bound == doctest::Approx(11.397725772133793).epsilon(1e-9));
  CHECK(c.d_norm == doctest::Approx(64.193851126162812).epsilon(1e-9));
  CHECK(c.j_gain == doctest::Approx(4250.0529416081972).epsilon(1e-9));
  CHECK(c.q == 0.0);  // stacks empty
  CHECK(c.decay_unquantized == 0.0);
  CHECK(c.decay_quantized == 0.0);
  CHECK(c.offset == 0.0);  // sigma = 0

  // Nonempty stacks with a scalar gram of 0.25: decay picks min{gamma, q}.
  stacks[0].offer({{0.0}, Matrix(2, 1, {0.5, 0.0}), {0.0}}, 1e-3);
  for (std::size_t i = 1; i < 5; ++i)
    stacks[i].offer({{0.0}, Matrix(2, 1, {1.0, 1.0}), {0.0}}, 1e-3);
  acl::RateCertificate c2 = acl::rate_certificate(
      pb.laplacian, pb.controller.P, pb.model.agents[0].B, pb.controller.alpha, 5.0,
      stacks);
  CHECK(c2.q == doctest::Approx(0.25));
  CHECK(c2.decay_unquantized == doctest::Approx(0.054703453495902409).epsilon(1e-9));
  CHECK(c2.decay_quantized == doctest::Approx(0.5 * 0.054703453495902409).epsilon(1e-9));
  CHECK(c2.sigma == 5.0);
  CHECK(c2.offset ==
        doctest::Approx(4250.0529416081972 * 25.0 / (0.5 * 0.054703453495902409))
            .epsilon(1e-8));
}

TEST_CASE("controller validation hard checks") {
  acl::SimProblem pb = reference_problem();
  auto warnings =
      acl::validate_controller(pb.controller, pb.model, pb.laplacian, pb.q_cost);
  // alpha = 0.8019 sits just below 1/(2 lambda_2) = 0.801931...: both soft
  // checks report.
  CHECK(warnings.size() == 2);

  ControllerConfig bad_gain = pb.controller;
  bad_gain.K(0, 0) += 1e-6;
  CHECK_THROWS(acl::validate_controller(bad_gain, pb.model, pb.laplacian, pb.q_cost));

  ControllerConfig bad_p = pb.controller;
  bad_p.P(0, 0) += 1e-3;
  CHECK_THROWS(acl::validate_controller(bad_p, pb.model, pb.laplacian, pb.q_cost));

  ControllerConfig bad_sigma = pb.controller;
  bad_sigma.quantizer.enabled = true;
  bad_sigma.quantizer.sigma = 0.0;
  CHECK_THROWS(acl::validate_controller(bad_sigma, pb.model, pb.laplacian, pb.q_cost));
}
