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

#include "acl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace acl {
namespace {

// Frobenius norm of the off-diagonal part (both triangles).
double offdiag_norm(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) s += m(i, j) * m(i, j);
  return std::sqrt(2.0 * s);
}

}  // namespace

SpectralResult eig_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_symmetric: not square");
  if (relative_asymmetry(m) > 1e-9)
    throw std::invalid_argument("eig_symmetric: input asymmetric beyond 1e-9 relative");
  const std::size_t n = m.rows();
  Matrix a = symmetrize(m);
  Matrix v = Matrix::identity(n);
  const double target = tol * std::max(1e-300, frobenius_norm(a));

  const int kMaxSweeps = 100;
  int sweep = 0;
  while (offdiag_norm(a) > target) {
    if (++sweep > kMaxSweeps) throw std::runtime_error("eig_symmetric: no convergence");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= target / (n * n)) continue;
        const double phi = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (phi >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(phi) + std::sqrt(phi * phi + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SpectralResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

Vec solve_linear(Matrix a, Vec b) {
  if (a.rows() != a.cols() || b.size() != a.rows())
    throw std::invalid_argument("solve_linear: shape mismatch");
  const std::size_t n = a.rows();
  double scale = max_abs(a);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= 1e-13 * std::max(1.0, scale))
      throw std::runtime_error("solve_linear: singular or near-singular system");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

Matrix kron(const Matrix& ml, const Matrix& mr) {
  Matrix out(ml.rows() * mr.rows(), ml.cols() * mr.cols());
  for (std::size_t i = 0; i < ml.rows(); ++i)
    for (std::size_t j = 0; j < ml.cols(); ++j) {
      const double lij = ml(i, j);
      if (lij == 0.0) continue;
      for (std::size_t k = 0; k < mr.rows(); ++k)
        for (std::size_t l = 0; l < mr.cols(); ++l)
          out(i * mr.rows() + k, j * mr.cols() + l) = lij * mr(k, l);
    }
  return out;
}

Vec vec_cols(const Matrix& m) {
  Vec v(m.rows() * m.cols());
  std::size_t idx = 0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v[idx++] = m(i, j);
  return v;
}

Matrix unvec_cols(const Vec& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec_cols: size mismatch");
  Matrix m(rows, cols);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[idx++];
  return m;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve_lyapunov: A not square");
  if (!q.same_shape(a)) throw std::invalid_argument("solve_lyapunov: Q shape mismatch");
  if (relative_asymmetry(q) > 1e-9)
    throw std::invalid_argument("solve_lyapunov: Q asymmetric beyond 1e-9 relative");
  const std::size_t n = a.rows();
  const Matrix at = a.transpose();
  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P), column-stacking vec.
  Matrix sys = kron(Matrix::identity(n), at) + kron(at, Matrix::identity(n));
  Vec rhs = vec_cols(q);
  for (double& v : rhs) v = -v;
  Vec p;
  try {
    p = solve_linear(std::move(sys), std::move(rhs));
  } catch (const std::runtime_error&) {
    throw std::runtime_error("solve_lyapunov: singular system (A not Hurwitz?)");
  }
  Matrix out = symmetrize(unvec_cols(p, n, n));
  const Matrix qsym = symmetrize(q);
  const Matrix residual = at * out + out * a + qsym;
  if (frobenius_norm(residual) > 1e-10 * std::max(1.0, frobenius_norm(q)))
    throw std::runtime_error("solve_lyapunov: residual too large (A not Hurwitz?)");
  // Hurwitz A with positive-definite Q forces P positive definite, so an
  // indefinite P from a solvable system flags an unstable coefficient.
  if (eig_symmetric(qsym).eigenvalues.front() > 0.0 &&
      eig_symmetric(out).eigenvalues.front() <= 0.0)
    throw std::runtime_error("solve_lyapunov: indefinite solution (A not Hurwitz)");
  return out;
}

Matrix solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                  const CareOptions& opt) {
  const std::size_t n = a.rows();
  if (a.rows() != a.cols()) throw std::invalid_argument("solve_care: A not square");
  if (b.rows() != n) throw std::invalid_argument("solve_care: B row count mismatch");
  if (!q.same_shape(a)) throw std::invalid_argument("solve_care: Q shape mismatch");
  if (relative_asymmetry(q) > 1e-9)
    throw std::invalid_argument("solve_care: Q asymmetric beyond 1e-9 relative");

  const Matrix qs = symmetrize(q);
  const Matrix at = a.transpose();
  const Matrix s = b * b.transpose();
  const double tol = opt.residual_tol * std::max(1.0, frobenius_norm(qs));

  // Algebraic residual; also the derivative of the differential Riccati flow.
  const auto riccati_rhs = [&](const Matrix& p) {
    return at * p + p * a - p * (s * p) + qs;
  };

  Matrix p = Matrix::identity(n);
  const double h = opt.h_riccati;
  bool converged = false;
  for (std::int64_t it = 0; it < opt.max_iters; ++it) {
    const Matrix k1 = riccati_rhs(p);
    if (frobenius_norm(k1) <= tol) {
      converged = true;
      break;
    }
    const Matrix k2 = riccati_rhs(p + (h / 2.0) * k1);
    const Matrix k3 = riccati_rhs(p + (h / 2.0) * k2);
    const Matrix k4 = riccati_rhs(p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    p = symmetrize(p);
    if (!is_finite(p) || frobenius_norm(p) > 1e12)
      throw std::runtime_error("solve_care: flow diverged (pair not stabilizable?)");
  }
  if (!converged)
    throw std::runtime_error(
        "solve_care: no convergence within max_iters (pair not stabilizable or "
        "h_riccati too large)");

  // One Newton refinement: with Acl = A - S P, solve
  // Acl^T P' + P' Acl + P S P + Q = 0.
  const Matrix acl = a - s * p;
  p = solve_lyapunov(acl, p * (s * p) + qs);

  // Hurwitz certificate for the refined closed loop.
  const Matrix acl_ref = a - s * p;
  const Matrix cert = solve_lyapunov(acl_ref, Matrix::identity(n));
  if (eig_symmetric(cert).eigenvalues.front() <= 0.0)
    throw std::runtime_error("solve_care: closed loop not certified Hurwitz");
  if (eig_symmetric(p).eigenvalues.front() <= 0.0)
    throw std::runtime_error("solve_care: solution not positive definite");
  const double res = frobenius_norm(riccati_rhs(p));
  if (res > tol)
    throw std::runtime_error("solve_care: refined residual too large: " +
                             std::to_string(res));
  return p;
}

double spectral_norm_psd(const Matrix& m) {
  if (relative_asymmetry(m) > 1e-9)
    throw std::invalid_argument("spectral_norm_psd: input asymmetric");
  const SpectralResult r = eig_symmetric(m);
  return r.eigenvalues.back();
}

}  // namespace acl
