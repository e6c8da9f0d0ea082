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

#include "qtraj/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace qtraj {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw DimensionError(fmt::format("HermitianMatrix: {}x{} is not square", m.rows(), m.cols()));
  }
  const double scale = std::max(max_abs(m), 1e-300);
  const double defect = hermiticity_defect(m);
  if (defect > tol * scale) {
    throw NotHermitianError(
        fmt::format("HermitianMatrix: defect {:.3e} exceeds {:.1e} relative", defect, tol));
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("HermitianMatrix::symmetrized: matrix is not square");
  }
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

ComplexVector matvec(const ComplexMatrix& m, const ComplexVector& v) {
  if (m.cols() != v.size()) {
    throw DimensionError(fmt::format("matvec: {}x{} times length {}", m.rows(), m.cols(), v.size()));
  }
  return m * v;
}

ComplexVector matvec(const SparseOperator& m, const ComplexVector& v) {
  if (m.cols() != v.size()) {
    throw DimensionError(fmt::format("matvec: {}x{} times length {}", m.rows(), m.cols(), v.size()));
  }
  return m * v;
}

ComplexMatrix outer(const ComplexVector& u, const ComplexVector& v) {
  if (u.size() != v.size()) {
    throw DimensionError(fmt::format("outer: lengths {} and {}", u.size(), v.size()));
  }
  const Eigen::Index n = u.size();
  ComplexMatrix r(n, n);
  if (&u == &v) {
    for (Eigen::Index j = 0; j < n; ++j) {
      r(j, j) = Complex(std::norm(u(j)), 0.0);
      for (Eigen::Index i = j + 1; i < n; ++i) {
        const Complex x = u(i) * std::conj(u(j));
        r(i, j) = x;
        r(j, i) = std::conj(x);
      }
    }
    return r;
  }
  r.noalias() = u * v.adjoint();
  return r;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("hermiticity_defect: matrix is not square");
  }
  if (m.size() == 0) {
    return 0.0;
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    return false;
  }
  return hermiticity_defect(m) <= tol * std::max(max_abs(m), 1e-300);
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      return false;
    }
  }
  return true;
}

bool all_finite(const ComplexVector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v(k).real()) || !std::isfinite(v(k).imag())) {
      return false;
    }
  }
  return true;
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& m) {
  if (!is_hermitian(m)) {
    throw NotHermitianError("hermitian_eigen: input is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eigen: eigen-decomposition did not converge");
  }
  EigenDecomposition out;
  const auto& ev = solver.eigenvalues();
  out.values.assign(ev.data(), ev.data() + ev.size());
  out.vectors = solver.eigenvectors();
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!is_hermitian(m)) {
    throw NotHermitianError("hermitian_eigenvalues: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eigenvalues: eigen-decomposition did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m) {
  return hermitian_eigenvalues(m.matrix());
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m).front(); }
double min_eigenvalue(const HermitianMatrix& m) { return min_eigenvalue(m.matrix()); }

SparseOperator to_sparse(const ComplexMatrix& m, double drop_below) {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > drop_below) {
        entries.emplace_back(static_cast<int>(i), static_cast<int>(j), m(i, j));
      }
    }
  }
  SparseOperator s(m.rows(), m.cols());
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

ComplexMatrix to_dense(const SparseOperator& m) { return ComplexMatrix(m); }

SparseOperator sparse_identity(Eigen::Index dim) {
  SparseOperator s(dim, dim);
  s.setIdentity();
  return s;
}

SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseOperator::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseOperator::InnerIterator ib(b, kb); ib; ++ib) {
          entries.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                               static_cast<int>(ia.col() * b.cols() + ib.col()),
                               ia.value() * ib.value());
        }
      }
    }
  }
  SparseOperator s(a.rows() * b.rows(), a.cols() * b.cols());
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

SparseOperator embed_site(const SparseOperator& op, std::size_t site, std::size_t num_sites) {
  if (site >= num_sites) {
    throw DimensionError(fmt::format("embed_site: site {} out of {}", site, num_sites));
  }
  const Eigen::Index left = Eigen::Index{1} << site;
  const Eigen::Index right = Eigen::Index{1} << (num_sites - site - 1);
  return kron(kron(sparse_identity(left), op), sparse_identity(right));
}

double expectation(const SparseOperator& m, const ComplexVector& v) {
  if (m.cols() != v.size() || m.rows() != v.size()) {
    throw DimensionError("expectation: dimension mismatch");
  }
  return v.dot(m * v).real();
}

namespace qubit {

namespace {
SparseOperator from_entries(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return to_sparse(m);
}
}  // namespace

ComplexVector excited() { return ComplexVector::Unit(2, 0); }
ComplexVector ground() { return ComplexVector::Unit(2, 1); }
SparseOperator sigma_minus() { return from_entries(0.0, 0.0, 1.0, 0.0); }
SparseOperator sigma_plus() { return from_entries(0.0, 1.0, 0.0, 0.0); }
SparseOperator sigma_x() { return from_entries(0.0, 1.0, 1.0, 0.0); }
SparseOperator sigma_y() { return from_entries(0.0, -kI, kI, 0.0); }
SparseOperator sigma_z() { return from_entries(1.0, 0.0, 0.0, -1.0); }
SparseOperator identity() { return sparse_identity(2); }

}  // namespace qubit

}  // namespace qtraj
