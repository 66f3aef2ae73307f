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

#include <iosfwd>
#include <string>

#include "acl/scenario.hpp"

namespace acl {

// Outcome of a CLI command: resolved certificate, any warnings, emitted file
// paths, and precondition / abort status. ok() mirrors the process exit
// status contract: success iff all requested outputs were written and no
// precondition failed.
struct RunReport {
  RateCertificate certificate;
  std::vector<std::string> warnings;
  std::vector<std::string> emitted_paths;
  std::vector<double> agent_q;  // per-agent lambda_min of the recorded gram
  bool preconditions_ok = true;
  bool aborted = false;
  std::string abort_reason;

  bool ok() const { return preconditions_ok && !aborted; }
};

// Static checks without simulating the full horizon: parses the scenario,
// solves the Riccati equation and reports its residual, reports lambda_2 /
// the alpha bound / the PSD certificate, dry-runs the recording window to
// certify the per-agent rank condition, and prints the rate certificate.
RunReport cmd_verify(const std::string& scenario_path, std::ostream& out);

// Full run: simulate, write trajectory.csv and the SVG plots into out_dir.
// coords selects the plotted state coordinates (1-based; default {1, 3}).
RunReport cmd_run(const std::string& scenario_path, const std::string& out_dir,
                  bool force, const std::vector<std::size_t>& coords, std::ostream& out);

// One run per sigma; writes sweep.csv plus an overlay plot of the
// consensus-error curves into out_dir.
RunReport cmd_sweep_sigma(const std::string& scenario_path,
                          const std::vector<double>& sigmas, const std::string& out_dir,
                          std::ostream& out);

// Writes the trajectory CSV (header t,consensus_error,V,bound,theta_hat_*,x_*;
// one row per sample, %.17g formatting). Exposed for tests.
std::string trajectory_csv(const TrajectoryLog& log, std::size_t n, std::size_t p,
                           std::size_t m);

}  // namespace acl
