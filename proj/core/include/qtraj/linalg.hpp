// Copyright 2026 The qtraj Authors
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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qtraj/errors.hpp"

namespace qtraj {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
/// Operators acting on state vectors (Hamiltonian terms, Lindblad operators,
/// observables). Row-major so that operator-vector products stream rows.
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr Complex kI{0.0, 1.0};

/// Relative Hermiticity tolerance used by HermitianMatrix and by
/// hermitian_eigen* when validating input.
inline constexpr double kHermitianTolerance = 1e-12;

/// A ComplexMatrix known to be Hermitian.
///
/// Construction checks ||M - M^dagger||_max <= tol * ||M||_max and then
/// stores the symmetrized matrix (M + M^dagger) / 2, so the stored value is
/// exactly Hermitian.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m, double tol = kHermitianTolerance);

  /// Symmetrizes without checking. For accumulators that are Hermitian by
  /// construction up to roundoff.
  static HermitianMatrix symmetrized(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  Complex trace() const { return m_.trace(); }

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns; U^dagger M U = diag(values)
};

ComplexVector matvec(const ComplexMatrix& m, const ComplexVector& v);
ComplexVector matvec(const SparseOperator& m, const ComplexVector& v);

/// result(i, j) = u(i) * conj(v(j)). When u and v are the same object the
/// result is exactly Hermitian.
ComplexMatrix outer(const ComplexVector& u, const ComplexVector& v);

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m);
EigenDecomposition hermitian_eigen(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);
double min_eigenvalue(const HermitianMatrix& m);

/// max_ij |M - M^dagger|_ij
double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance);
double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);
bool all_finite(const ComplexVector& v);

SparseOperator to_sparse(const ComplexMatrix& m, double drop_below = 0.0);
ComplexMatrix to_dense(const SparseOperator& m);
SparseOperator sparse_identity(Eigen::Index dim);

/// Kronecker product of two sparse operators.
SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

/// Lifts a single-qubit operator to site `site` (0-based, leftmost factor is
/// site 0) of an `num_sites`-qubit register.
SparseOperator embed_site(const SparseOperator& op, std::size_t site, std::size_t num_sites);

/// <v|M|v> for Hermitian M; the imaginary part is discarded.
double expectation(const SparseOperator& m, const ComplexVector& v);

namespace qubit {

// Two-level basis: e = (1, 0) is the excited state, g = (0, 1) the ground
// state, so sigma_minus maps e to g and sigma_3 = diag(1, -1).
ComplexVector excited();
ComplexVector ground();
SparseOperator sigma_minus();
SparseOperator sigma_plus();
SparseOperator sigma_x();
SparseOperator sigma_y();
SparseOperator sigma_z();
SparseOperator identity();

}  // namespace qubit

}  // namespace qtraj
