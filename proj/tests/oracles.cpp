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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acl::oracle {

double det_cofactor(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("det_cofactor: square only");
  if (n == 1) return m(0, 0);
  double det = 0.0;
  double sign = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::size_t cc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == c) continue;
        minor(r - 1, cc++) = m(r, k);
      }
    }
    det += sign * m(0, c) * det_cofactor(minor);
    sign = -sign;
  }
  return det;
}

Vec charpoly(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("charpoly: square only");
  // Faddeev-LeVerrier: M_1 = m, c_1 = -tr(M_1),
  // M_k = m (M_{k-1} + c_{k-1} I), c_k = -tr(M_k)/k.
  Vec coeffs(n + 1, 0.0);
  coeffs[0] = 1.0;
  Matrix mk = m;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      Matrix shifted = mk;
      for (std::size_t i = 0; i < n; ++i) shifted(i, i) += coeffs[k - 1];
      mk = m * shifted;
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += mk(i, i);
    coeffs[k] = -trace / static_cast<double>(k);
  }
  return coeffs;
}

double polyval(const Vec& coeffs, double x) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

Vec eigs_by_charpoly(const Matrix& m, double lo, double hi, int scan_points) {
  const Vec coeffs = charpoly(m);
  Vec roots;
  double prev_x = lo;
  double prev_f = polyval(coeffs, lo);
  for (int k = 1; k <= scan_points; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / scan_points;
    const double f = polyval(coeffs, x);
    if (prev_f == 0.0) {
      roots.push_back(prev_x);
    } else if (prev_f * f < 0.0) {
      double a = prev_x, b = x, fa = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = polyval(coeffs, mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if (fa * fm < 0.0) {
          b = mid;
        } else {
          a = mid;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

Matrix lyapunov_direct(const Matrix& a, const Matrix& q) {
  const std::size_t n = a.rows();
  if (n != a.cols() || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("lyapunov_direct: dimension mismatch");
  const std::size_t nn = n * n;
  // Unknown P stored row-major as vector index r*n + c. Equation entry (i, j):
  // sum_k a(k,i) p(k,j) + sum_k p(i,k) a(k,j) = -q(i,j).
  Matrix sys(nn, nn);
  Vec rhs(nn, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) {
        sys(row, k * n + j) += a(k, i);
        sys(row, i * n + k) += a(k, j);
      }
      rhs[row] = -q(i, j);
    }

  // Full-pivot elimination with column permutation tracking.
  std::vector<std::size_t> perm(nn);
  for (std::size_t k = 0; k < nn; ++k) perm[k] = k;
  for (std::size_t step = 0; step < nn; ++step) {
    std::size_t pr = step, pc = step;
    double best = 0.0;
    for (std::size_t r = step; r < nn; ++r)
      for (std::size_t c = step; c < nn; ++c)
        if (std::abs(sys(r, c)) > best) {
          best = std::abs(sys(r, c));
          pr = r;
          pc = c;
        }
    if (best < 1e-13) throw std::runtime_error("lyapunov_direct: singular system");
    if (pr != step)
      for (std::size_t c = 0; c < nn; ++c) std::swap(sys(step, c), sys(pr, c));
    if (pr != step) std::swap(rhs[step], rhs[pr]);
    if (pc != step) {
      for (std::size_t r = 0; r < nn; ++r) std::swap(sys(r, step), sys(r, pc));
      std::swap(perm[step], perm[pc]);
    }
    for (std::size_t r = step + 1; r < nn; ++r) {
      const double f = sys(r, step) / sys(step, step);
      if (f == 0.0) continue;
      for (std::size_t c = step; c < nn; ++c) sys(r, c) -= f * sys(step, c);
      rhs[r] -= f * rhs[step];
    }
  }
  Vec sol(nn, 0.0);
  for (std::size_t k = nn; k-- > 0;) {
    double acc = rhs[k];
    for (std::size_t c = k + 1; c < nn; ++c) acc -= sys(k, c) * sol[c];
    sol[k] = acc / sys(k, k);
  }
  Matrix p(n, n);
  for (std::size_t k = 0; k < nn; ++k) p(perm[k] / n, perm[k] % n) = sol[k];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (p(i, j) + p(j, i));
      p(i, j) = avg;
      p(j, i) = avg;
    }
  return p;
}

double coupled_quadratic_form(const Vec& x, const Matrix& l, const Matrix& p,
                              std::size_t n, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
          acc += l(i, j) * x[i * dim + r] * p(r, c) * x[j * dim + c];
  return acc;
}

double pairwise_error(const Vec& x, std::size_t n, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = x[i * dim + k] - x[j * dim + k];
        acc += d * d;
      }
  return acc;
}

Matrix matmul_naive(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul_naive: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

std::uint64_t Rng::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545f4914f6cdd1dull;
}

double Rng::uniform(double lo, double hi) {
  const double unit =
      static_cast<double>(next() >> 11) / static_cast<double>(1ull << 53);
  return lo + (hi - lo) * unit;
}

Matrix random_symmetric(std::size_t dim, Rng& rng) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      const double v = rng.uniform(-2.0, 2.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

Matrix random_hurwitz(std::size_t dim, Rng& rng) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  // Gershgorin: eigenvalue real parts <= m(i,i) + sum_{j!=i} |m(i,j)|; the
  // shift makes every disc sit strictly in the open left half-plane.
  double shift = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double row = m(i, i);
    for (std::size_t j = 0; j < dim; ++j)
      if (j != i) row += std::abs(m(i, j));
    shift = std::max(shift, row);
  }
  for (std::size_t i = 0; i < dim; ++i) m(i, i) -= shift + 0.5;
  return m;
}

}  // namespace acl::oracle
