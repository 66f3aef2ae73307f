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

#include "acl/graph.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

#include "acl/linalg.hpp"

namespace acl {

UndirectedGraph UndirectedGraph::from_weights(Matrix w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("graph: weights not square");
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) throw std::invalid_argument("graph: nonzero diagonal weight");
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (w(i, j) < 0.0) throw std::invalid_argument("graph: negative weight");
      if (w(i, j) != w(j, i)) throw std::invalid_argument("graph: weights not symmetric");
    }
  }
  UndirectedGraph g;
  g.n = w.rows();
  g.weights = std::move(w);
  return g;
}

UndirectedGraph UndirectedGraph::from_edges(
    std::size_t n,
    const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  Matrix w(n, n);
  for (const auto& [i, j, weight] : edges) {
    if (i >= n || j >= n || i == j) throw std::invalid_argument("graph: bad edge endpoints");
    if (weight <= 0.0) throw std::invalid_argument("graph: nonpositive edge weight");
    w(i, j) = weight;
    w(j, i) = weight;
  }
  return from_weights(std::move(w));
}

Matrix laplacian(const UndirectedGraph& g) {
  Matrix l(g.n, g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
      degree += g.weights(i, j);
      l(i, j) = -g.weights(i, j);
    }
    l(i, i) = degree;
  }
  return l;
}

bool is_connected(const UndirectedGraph& g) {
  if (g.n == 0) return false;
  std::vector<bool> seen(g.n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t u = 0; u < g.n; ++u) {
      if (!seen[u] && g.weights(v, u) > 0.0) {
        seen[u] = true;
        ++count;
        frontier.push(u);
      }
    }
  }
  return count == g.n;
}

double algebraic_connectivity(const Matrix& l) {
  if (l.rows() < 2) throw std::invalid_argument("algebraic_connectivity: need n >= 2");
  const SpectralResult r = eig_symmetric(l);
  const double lambda2 = r.eigenvalues[1];
  if (lambda2 <= 1e-8)
    throw std::runtime_error("algebraic_connectivity: graph disconnected (lambda_2 <= 1e-8)");
  return lambda2;
}

double alpha_lower_bound(const Matrix& l) { return 1.0 / (2.0 * algebraic_connectivity(l)); }

bool alpha_psd_certificate(const Matrix& l, double alpha) {
  const Matrix m = 2.0 * alpha * (l * l) - l;
  const SpectralResult r = eig_symmetric(symmetrize(m));
  return r.eigenvalues.front() >= -1e-9;
}

}  // namespace acl
