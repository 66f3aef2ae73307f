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

#include "acl/control.hpp"

namespace acl {

struct IntegratorConfig {
  double step_h = 1e-3;
  double t_final = 20.0;
  std::size_t sample_every = 10;
};

struct TrajectorySample {
  double t = 0.0;
  Vec x;
  Vec theta_hat;
  double lyapunov = 0.0;
  double consensus = 0.0;
  // Theoretical ceiling e^(-decay t) V(0) + offset from the rate certificate.
  double bound = 0.0;
};

// Time-sampled run record. When the state norm guard trips or a vector-field
// stage goes non-finite, integration stops: samples hold the finite prefix,
// aborted is set, and abort_reason carries the diagnostic with its timestamp.
struct TrajectoryLog {
  std::vector<TrajectorySample> samples;
  RateCertificate certificate;
  std::vector<double> agent_q;  // per-agent lambda_min of the frozen gram
  std::vector<std::string> warnings;
  bool aborted = false;
  double abort_t = 0.0;
  std::string abort_reason;
};

// Everything simulate needs, already validated and resolved (no file I/O at
// this layer).
struct SimProblem {
  SwarmModel model;
  UndirectedGraph graph;
  Matrix laplacian;
  ControllerConfig controller;
  Matrix q_cost;  // state cost used by the Riccati residual check
  Vec x0;         // n*p
  Vec theta_hat0;  // n*m
  IntegratorConfig integrator;
};

// Classical 4-stage Runge-Kutta step. Throws std::runtime_error when a stage
// evaluates non-finite.
Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& y,
             double h);

// Fixed-step integration of the joint (x, theta_hat) system.
//  - Candidate history points are offered at every step with t <= t_record;
//    the stacks are frozen afterwards so the certified rate is constant.
//  - Samples are logged every sample_every steps, starting at t = 0.
//  - The state guard ||x||_2 > 1e12 and non-finite stage values abort the run
//    (recorded on the log, not thrown).
//  - The bound column is filled from the rate certificate of the frozen
//    stacks: e^(-decay t) V(0) + offset, with the quantized decay and offset
//    when the quantizer is enabled.
TrajectoryLog simulate(const SimProblem& problem);

}  // namespace acl
