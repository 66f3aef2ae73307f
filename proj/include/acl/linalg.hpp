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

#include <cstdint>

#include "acl/matrix.hpp"

namespace acl {

// Eigendecomposition of a symmetric matrix. eigenvalues are sorted ascending;
// eigenvectors.col(k) pairs with eigenvalues[k] and the columns are orthonormal.
struct SpectralResult {
  Vec eigenvalues;
  Matrix eigenvectors;
};

// Cyclic Jacobi rotations, iterated until every off-diagonal magnitude is at
// most tol * ||M||_F. Inputs asymmetric beyond 1e-9 relative are rejected;
// smaller asymmetry is silently symmetrized ((M + M^T)/2) first.
SpectralResult eig_symmetric(const Matrix& m, double tol = 1e-13);

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws on (near-)singular systems.
Vec solve_linear(Matrix a, Vec b);

// Kronecker product.
Matrix kron(const Matrix& ml, const Matrix& mr);

// Column-stacking vectorization and its inverse (square matrices).
Vec vec_cols(const Matrix& m);
Matrix unvec_cols(const Vec& v, std::size_t rows, std::size_t cols);

// Solves A^T P + P A + Q = 0 for symmetric P; requires A Hurwitz, Q symmetric.
// Implemented by vectorization: (I (x) A^T + A^T (x) I) vec(P) = -vec(Q),
// solved with partial-pivot elimination; the output is symmetrized and the
// residual is required to satisfy ||A^T P + P A + Q||_F <= 1e-10 max(1,||Q||_F).
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

// Tuning knobs for solve_care; defaults converge in well under a second for
// state dimensions up to ~8.
struct CareOptions {
  double h_riccati = 1e-3;
  std::int64_t max_iters = 10'000'000;
  double residual_tol = 1e-10;  // relative to max(1, ||Q||_F)
};

// Solves A^T P + P A - P B B^T P + Q = 0 for the symmetric positive-definite
// stabilizing solution. Method: integrate the differential Riccati equation
// Pdot = A^T P + P A - P B B^T P + Q forward from P(0) = I with classical RK4
// until the algebraic residual meets the tolerance, then apply one Newton
// refinement step through solve_lyapunov on the closed-loop matrix A - B B^T P.
// The closed loop is certified Hurwitz by solve_lyapunov(A - B B^T P, I)
// succeeding with a positive-definite result.
Matrix solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                  const CareOptions& opt = {});

// Largest eigenvalue of a symmetric positive-semidefinite matrix.
double spectral_norm_psd(const Matrix& m);

}  // namespace acl
