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

#include "acl/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "acl/graph.hpp"
#include "acl/linalg.hpp"
#include "acl/svg.hpp"

namespace acl {
namespace {

// CSV cells carry full double precision so repeated runs are byte-identical
// and round-trip exactly; report lines use a shorter human format.
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("short write to " + path);
}

double riccati_residual(const Matrix& a, const Matrix& b, const Matrix& q,
                        const Matrix& p) {
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  Matrix r = at * p + p * a - p * (b * (bt * p)) + q;
  return frobenius_norm(r);
}

// Dry-runs exactly the recording window plus one step so the frozen stacks
// (and hence q per agent) match what the full-horizon run will use.
TrajectoryLog recording_window_dry_run(const SimProblem& problem) {
  SimProblem trunc = problem;
  trunc.integrator.t_final =
      std::max(problem.controller.t_record + problem.integrator.step_h,
               problem.integrator.step_h);
  return simulate(trunc);
}

void print_certificate(const RateCertificate& c, std::ostream& out) {
  out << "rate certificate:\n"
      << "  gamma = " << fmt9(c.gamma) << "  (lambda_2 / C, C = " << fmt9(c.c_bound)
      << ")\n"
      << "  q (min over agents) = " << fmt9(c.q) << "\n"
      << "  decay, exact channel = " << fmt9(c.decay_unquantized)
      << "  (min of gamma and q)\n"
      << "  decay, quantized channel = " << fmt9(c.decay_quantized)
      << "  (min of gamma/2 and q)\n"
      << "  D = " << fmt9(c.d_norm) << "  J = " << fmt9(c.j_gain)
      << "  sigma = " << fmt9(c.sigma) << "  offset = " << fmt9(c.offset) << "\n";
}

struct LoadedScenario {
  Scenario sc;
  SimProblem problem;
};

// Parse + resolve, turning any failure into a precondition report entry.
bool load_scenario(const std::string& path, LoadedScenario& out, RunReport& report,
                   std::ostream& os) {
  try {
    out.sc = parse_scenario(read_file(path));
    out.problem = to_problem(out.sc);
    return true;
  } catch (const std::exception& err) {
    report.preconditions_ok = false;
    report.warnings.push_back(err.what());
    os << "error: " << err.what() << "\n";
    return false;
  }
}

std::vector<std::pair<double, double>> series_from(
    const std::vector<TrajectorySample>& samples,
    const std::function<double(const TrajectorySample&)>& pick) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(samples.size());
  for (const TrajectorySample& s : samples) pts.emplace_back(s.t, pick(s));
  return pts;
}

void emit_run_artifacts(const SimProblem& problem, const TrajectoryLog& log,
                        const std::filesystem::path& dir,
                        const std::vector<std::size_t>& coords, RunReport& report) {
  const std::size_t n = problem.model.n;
  const std::size_t p = problem.model.p;
  const std::size_t m = problem.model.m;

  const auto emit = [&](const std::string& name, const std::string& content) {
    const std::string path = (dir / name).string();
    write_file(path, content);
    report.emitted_paths.push_back(path);
  };

  emit("trajectory.csv", trajectory_csv(log, n, p, m));

  PlotSeries cons{"consensus error",
                  series_from(log.samples, [](const TrajectorySample& s) { return s.consensus; }),
                  false};
  emit("consensus_error.svg",
       render_line_plot("Consensus error", "t", "sum of squared pairwise gaps", {cons}, true));

  std::vector<PlotSeries> theta_series;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t flat = i * m + c;
      theta_series.push_back(
          {"theta_hat_" + std::to_string(flat + 1),
           series_from(log.samples,
                       [flat](const TrajectorySample& s) { return s.theta_hat[flat]; }),
           false});
    }
  if (!log.samples.empty()) {
    const double t0 = log.samples.front().t;
    const double t1 = log.samples.back().t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < m; ++c) {
        const double truth = problem.model.agents[i].theta_true[c];
        theta_series.push_back({"theta_" + std::to_string(i * m + c + 1),
                                {{t0, truth}, {t1, truth}},
                                true});
      }
  }
  emit("theta.svg",
       render_line_plot("Parameter estimates", "t", "estimate", theta_series, false));

  for (std::size_t coord : coords) {
    if (coord < 1 || coord > p)
      throw std::invalid_argument("state coordinate out of range: " +
                                  std::to_string(coord));
    std::vector<PlotSeries> xs;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t flat = i * p + (coord - 1);
      xs.push_back({"x_" + std::to_string(i + 1) + "," + std::to_string(coord),
                    series_from(log.samples,
                                [flat](const TrajectorySample& s) { return s.x[flat]; }),
                    false});
    }
    emit("state_coord_" + std::to_string(coord) + ".svg",
         render_line_plot("State coordinate " + std::to_string(coord), "t", "value", xs,
                          false));
  }
}

}  // namespace

std::string trajectory_csv(const TrajectoryLog& log, std::size_t n, std::size_t p,
                           std::size_t m) {
  std::string out = "t,consensus_error,V,bound";
  for (std::size_t k = 1; k <= n * m; ++k) out += ",theta_hat_" + std::to_string(k);
  for (std::size_t k = 1; k <= n * p; ++k) out += ",x_" + std::to_string(k);
  out += "\n";
  for (const TrajectorySample& s : log.samples) {
    out += fmt17(s.t);
    out += ',';
    out += fmt17(s.consensus);
    out += ',';
    out += fmt17(s.lyapunov);
    out += ',';
    out += fmt17(s.bound);
    for (double v : s.theta_hat) {
      out += ',';
      out += fmt17(v);
    }
    for (double v : s.x) {
      out += ',';
      out += fmt17(v);
    }
    out += '\n';
  }
  return out;
}

RunReport cmd_verify(const std::string& scenario_path, std::ostream& out) {
  RunReport report;
  LoadedScenario ls;
  out << "scenario: " << scenario_path << "\n";
  if (!load_scenario(scenario_path, ls, report, out)) return report;

  const SimProblem& pb = ls.problem;
  const std::size_t n = pb.model.n;
  out << "agents: " << n << ", state dim " << pb.model.p << ", input dim "
      << pb.model.q_in << ", parameters per agent " << pb.model.m << "\n";

  if (!is_connected(pb.graph)) {
    out << "graph: DISCONNECTED\n";
    report.preconditions_ok = false;
    report.warnings.push_back("graph disconnected");
    out << "preconditions: FAIL\n";
    return report;
  }
  const double lambda2 = algebraic_connectivity(pb.laplacian);
  out << "graph: connected, lambda_2 = " << fmt9(lambda2) << "\n";

  const double res = riccati_residual(pb.model.agents.front().A,
                                      pb.model.agents.front().B, pb.q_cost,
                                      pb.controller.P);
  out << "riccati residual: " << fmt9(res) << " (must be <= 1e-8)\n";
  if (!(res <= 1e-8)) {
    report.preconditions_ok = false;
    report.warnings.push_back("riccati residual above 1e-8");
  }

  const double bound = alpha_lower_bound(pb.laplacian);
  const bool cert = alpha_psd_certificate(pb.laplacian, pb.controller.alpha);
  out << "alpha: " << fmt9(pb.controller.alpha) << " vs bound 1/(2 lambda_2) = "
      << fmt9(bound) << (pb.controller.alpha >= bound ? "  ok" : "  BELOW BOUND")
      << "\n";
  out << "psd certificate (2 alpha L^2 - L): " << (cert ? "pass" : "FAIL") << "\n";
  if (pb.controller.alpha < bound)
    report.warnings.push_back("alpha below 1/(2 lambda_2)");
  if (!cert) report.warnings.push_back("2 alpha L^2 - L is not positive semidefinite");

  TrajectoryLog dry = recording_window_dry_run(pb);
  report.certificate = dry.certificate;
  report.agent_q = dry.agent_q;
  for (const std::string& w : dry.warnings) {
    // validate_controller restates the alpha and PSD findings reported above
    if (w.rfind("alpha ", 0) == 0 || w.rfind("PSD certificate", 0) == 0) continue;
    report.warnings.push_back(w);
  }
  if (dry.aborted) {
    report.preconditions_ok = false;
    report.warnings.push_back("recording-window dry run aborted: " + dry.abort_reason);
    out << "recording window dry run: ABORTED (" << dry.abort_reason << ")\n";
  } else if (pb.controller.update_mode == UpdateMode::kConcurrentLearning) {
    out << "recording window [0, " << fmt9(pb.controller.t_record) << "]:\n";
    for (std::size_t i = 0; i < n; ++i) {
      const bool ok = dry.agent_q[i] > pb.controller.rank_tol;
      out << "  agent " << (i + 1) << ": q = " << fmt9(dry.agent_q[i])
          << (ok ? "  certified" : "  NOT CERTIFIED") << "\n";
      if (!ok)
        report.warnings.push_back("agent " + std::to_string(i + 1) +
                                  " rank condition not certified");
    }
  } else {
    out << "recording window: not applicable (baseline update)\n";
  }

  print_certificate(report.certificate, out);
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  out << "preconditions: " << (report.preconditions_ok ? "pass" : "FAIL") << "\n";
  return report;
}

RunReport cmd_run(const std::string& scenario_path, const std::string& out_dir,
                  bool force, const std::vector<std::size_t>& coords, std::ostream& out) {
  RunReport report;
  LoadedScenario ls;
  if (!load_scenario(scenario_path, ls, report, out)) return report;

  if (!force) {
    std::ostringstream quiet;
    RunReport pre = cmd_verify(scenario_path, quiet);
    if (!pre.preconditions_ok) {
      out << quiet.str();
      out << "error: verification failed; rerun with --force to override\n";
      report.preconditions_ok = false;
      report.warnings = pre.warnings;
      return report;
    }
  }

  TrajectoryLog log = simulate(ls.problem);
  report.certificate = log.certificate;
  report.agent_q = log.agent_q;
  report.warnings = log.warnings;
  report.aborted = log.aborted;
  report.abort_reason = log.abort_reason;

  try {
    std::filesystem::create_directories(out_dir);
    emit_run_artifacts(ls.problem, log, out_dir, coords, report);
  } catch (const std::exception& err) {
    report.preconditions_ok = false;
    report.warnings.push_back(err.what());
    out << "error: " << err.what() << "\n";
    return report;
  }

  print_certificate(report.certificate, out);
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  for (const std::string& path : report.emitted_paths) out << "wrote " << path << "\n";
  if (log.aborted)
    out << "error: simulation aborted: " << log.abort_reason
        << " (partial trajectory written)\n";
  return report;
}

RunReport cmd_sweep_sigma(const std::string& scenario_path,
                          const std::vector<double>& sigmas, const std::string& out_dir,
                          std::ostream& out) {
  RunReport report;
  for (double s : sigmas)
    if (!(s >= 0.0)) {
      report.preconditions_ok = false;
      report.warnings.push_back("sigma values must be >= 0");
      out << "error: sigma values must be >= 0\n";
      return report;
    }

  LoadedScenario ls;
  if (!load_scenario(scenario_path, ls, report, out)) return report;

  {
    std::ostringstream quiet;
    RunReport pre = cmd_verify(scenario_path, quiet);
    if (!pre.preconditions_ok) {
      out << quiet.str();
      out << "error: verification failed\n";
      report.preconditions_ok = false;
      report.warnings = pre.warnings;
      return report;
    }
  }

  std::string csv = "sigma,steady_state_consensus_error,steady_state_V,theorem2_offset\n";
  std::vector<PlotSeries> overlay;
  for (double sigma : sigmas) {
    SimProblem problem = ls.problem;  // same P/K; only the channel changes
    problem.controller.quantizer.sigma = sigma;
    problem.controller.quantizer.enabled = sigma > 0.0;
    TrajectoryLog log = simulate(problem);
    report.certificate = log.certificate;

    double ss_cons = std::numeric_limits<double>::quiet_NaN();
    double ss_v = std::numeric_limits<double>::quiet_NaN();
    if (!log.aborted && !log.samples.empty()) {
      // steady state: mean over the final 10% of samples (at least one)
      const std::size_t count = log.samples.size();
      const std::size_t tail = std::max<std::size_t>(1, count / 10);
      double acc_c = 0.0, acc_v = 0.0;
      for (std::size_t k = count - tail; k < count; ++k) {
        acc_c += log.samples[k].consensus;
        acc_v += log.samples[k].lyapunov;
      }
      ss_cons = acc_c / static_cast<double>(tail);
      ss_v = acc_v / static_cast<double>(tail);
    } else if (log.aborted) {
      report.aborted = true;
      report.abort_reason = "sigma = " + fmt9(sigma) + ": " + log.abort_reason;
      out << "error: sigma = " << fmt9(sigma)
          << " run aborted: " << log.abort_reason << "\n";
    }
    csv += fmt17(sigma);
    csv += ',';
    csv += fmt17(ss_cons);
    csv += ',';
    csv += fmt17(ss_v);
    csv += ',';
    csv += fmt17(log.certificate.offset);
    csv += '\n';

    overlay.push_back(
        {"sigma=" + fmt9(sigma),
         series_from(log.samples, [](const TrajectorySample& s) { return s.consensus; }),
         false});
  }

  try {
    std::filesystem::create_directories(out_dir);
    const std::string csv_path = (std::filesystem::path(out_dir) / "sweep.csv").string();
    write_file(csv_path, csv);
    report.emitted_paths.push_back(csv_path);
    const std::string svg_path =
        (std::filesystem::path(out_dir) / "sweep_overlay.svg").string();
    write_file(svg_path, render_line_plot("Consensus error by quantization level", "t",
                                          "sum of squared pairwise gaps", overlay, true));
    report.emitted_paths.push_back(svg_path);
  } catch (const std::exception& err) {
    report.preconditions_ok = false;
    report.warnings.push_back(err.what());
    out << "error: " << err.what() << "\n";
    return report;
  }

  for (const std::string& path : report.emitted_paths) out << "wrote " << path << "\n";
  return report;
}

}  // namespace acl
