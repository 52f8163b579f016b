// Copyright 2026 The sdpent Authors
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

#include "sdpent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdpent/errors.hpp"

namespace sdpent {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

HermitianOperator::HermitianOperator(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << "Hermitian operator must be square and non-empty, got " << m.rows()
       << "x" << m.cols();
    throw ShapeError(os.str());
  }
  if (!all_finite(m)) {
    throw InputError("Hermitian operator has non-finite entries");
  }
  const CMatrix anti = m - m.adjoint();
  if (anti.cwiseAbs().maxCoeff() > 0.0) {
    // i * (M - M^dag) is Hermitian; its spectral radius is the residual.
    const CMatrix herm = Complex(0.0, 1.0) * anti;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    residual_ = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (residual_ > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian: ||M - M^dag||_inf = " << residual_
       << " exceeds tolerance " << tol;
    throw ValidationError("hermiticity", os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::from_real(const RMatrix& m, double tol) {
  return HermitianOperator(m.cast<Complex>(), tol);
}

HermitianOperator HermitianOperator::projector_onto(const CVector& v) {
  return HermitianOperator(v * v.adjoint());
}

HermitianOperator HermitianOperator::operator+(
    const HermitianOperator& o) const {
  if (o.dim() != dim()) throw ShapeError("operator sum: dimension mismatch");
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(
    const HermitianOperator& o) const {
  if (o.dim() != dim()) {
    throw ShapeError("operator difference: dimension mismatch");
  }
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(m_ * s);
}

EigenDecomposition eig_hermitian(const CMatrix& h) {
  if (!all_finite(h)) {
    throw InputError("eigendecomposition input has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw InputError("Hermitian eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

EigenDecomposition eig_hermitian(const HermitianOperator& h) {
  return eig_hermitian(h.matrix());
}

CMatrix partial_transpose(const CMatrix& m, BipartiteShape shape) {
  const int n = shape.dim();
  if (m.rows() != n || m.cols() != n || shape.dA < 1 || shape.dB < 1) {
    std::ostringstream os;
    os << "partial transpose: matrix is " << m.rows() << "x" << m.cols()
       << " but shape is " << shape.dA << "x" << shape.dB;
    throw ShapeError(os.str());
  }
  const int dA = shape.dA;
  const int dB = shape.dB;
  CMatrix out(n, n);
  for (int i = 0; i < dA; ++i) {
    for (int j = 0; j < dB; ++j) {
      for (int k = 0; k < dA; ++k) {
        for (int l = 0; l < dB; ++l) {
          out(i * dB + l, k * dB + j) = m(i * dB + j, k * dB + l);
        }
      }
    }
  }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& h,
                                    BipartiteShape shape) {
  return HermitianOperator(partial_transpose(h.matrix(), shape));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double trace_norm(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double op_norm(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double op_norm(const HermitianOperator& h) { return op_norm(h.matrix()); }

HermitianOperator matrix_log(const HermitianOperator& h, double floor) {
  const auto eig = eig_hermitian(h);
  if (eig.values.minCoeff() <= floor) {
    std::ostringstream os;
    os << "matrix logarithm: eigenvalue " << eig.values.minCoeff()
       << " is at or below the support floor " << floor;
    throw SupportError(os.str());
  }
  const RVector logs = eig.values.array().log();
  return HermitianOperator(eig.vectors * logs.cast<Complex>().asDiagonal() *
                           eig.vectors.adjoint());
}

HermitianOperator matrix_exp(const HermitianOperator& h) {
  const auto eig = eig_hermitian(h);
  const RVector exps = eig.values.array().exp();
  return HermitianOperator(eig.vectors * exps.cast<Complex>().asDiagonal() *
                           eig.vectors.adjoint());
}

double divided_difference_log(double a, double b, double dd_switch) {
  if (!(a > 0.0) || !(b > 0.0)) {
    std::ostringstream os;
    os << "divided difference of log needs positive arguments, got (" << a
       << ", " << b << ")";
    throw DomainError(os.str());
  }
  if (a == b) return a;
  if (std::abs(a - b) > dd_switch * std::max(a, b)) {
    return (a - b) / (std::log(a) - std::log(b));
  }
  // (b - a) / h = a (e^h - 1) / h with h = ln(b / a), |h| below ~1e-8.
  const double h = std::log1p((b - a) / a);
  return a * (1.0 + h / 2.0 + h * h / 6.0 + h * h * h / 24.0);
}

SupportProjection support_projector(const HermitianOperator& rho,
                                    double rel_tol) {
  const auto eig = eig_hermitian(rho);
  const int n = rho.dim();
  const double lmax = eig.values(n - 1);
  if (!(lmax > 0.0)) {
    throw DegenerateInputError(
        "support projector of an operator with no positive eigenvalue");
  }
  const double cut = rel_tol * lmax;
  int first = 0;
  while (first < n && eig.values(first) <= cut) ++first;
  SupportProjection out;
  out.rank = n - first;
  out.range_basis = eig.vectors.rightCols(out.rank);
  out.complement_basis = eig.vectors.leftCols(first);
  out.projector =
      HermitianOperator(out.range_basis * out.range_basis.adjoint());
  return out;
}

CVector kernel_vector(const HermitianOperator& h, double abs_tol) {
  const auto eig = eig_hermitian(h);
  const double tol =
      abs_tol >= 0.0 ? abs_tol : 1e-9 * eig.values.cwiseAbs().maxCoeff();
  int count = 0;
  int index = -1;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values(i)) <= tol) {
      ++count;
      index = i;
    }
  }
  if (count != 1) {
    std::ostringstream os;
    os << "expected a one-dimensional kernel, found dimension " << count
       << " at tolerance " << tol;
    throw KernelDimensionError(count, os.str());
  }
  return eig.vectors.col(index);
}

int schmidt_rank(const CVector& v, BipartiteShape shape, double tol) {
  if (v.size() != shape.dim()) {
    throw ShapeError("schmidt_rank: vector length does not match shape");
  }
  CMatrix m(shape.dA, shape.dB);
  for (int i = 0; i < shape.dA; ++i) {
    for (int j = 0; j < shape.dB; ++j) m(i, j) = v(i * shape.dB + j);
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector s = svd.singularValues() / v.norm();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++rank;
  }
  return rank;
}

}  // namespace sdpent
