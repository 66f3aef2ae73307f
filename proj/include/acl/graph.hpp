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

#include <tuple>

#include "acl/matrix.hpp"

namespace acl {

// Undirected weighted communication graph. weights(i,j) is the coupling
// weight a_ij; the matrix must be exactly symmetric with zero diagonal and
// nonnegative entries.
struct UndirectedGraph {
  std::size_t n = 0;
  Matrix weights;

  // Validates the invariants above; throws std::invalid_argument on violation.
  static UndirectedGraph from_weights(Matrix w);

  // Unit or custom positive weights on the listed edges, 0-based endpoints.
  static UndirectedGraph from_edges(std::size_t n,
                                    const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges);
};

// Graph Laplacian: degree matrix minus adjacency, degree d_i = sum_j a_ij.
Matrix laplacian(const UndirectedGraph& g);

// Breadth-first reachability from vertex 0 over edges with weight > 0.
bool is_connected(const UndirectedGraph& g);

// Second-smallest Laplacian eigenvalue (Fiedler value). Throws if the value
// is <= 1e-8 (disconnected graph), reporting that as a distinct condition.
double algebraic_connectivity(const Matrix& l);

// Coupling-gain threshold 1/(2 lambda_2).
double alpha_lower_bound(const Matrix& l);

// Checks that 2*alpha*L^2 - L is positive semidefinite
// (all eigenvalues >= -1e-9).
bool alpha_psd_certificate(const Matrix& l, double alpha);

}  // namespace acl
