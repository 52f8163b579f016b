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

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace sdpent {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kDefaultHermiticityTol = 1e-12;

// Dimensions of the A and B factors. Basis index |i_A j_B> <-> i * dB + j.
struct BipartiteShape {
  int dA = 1;
  int dB = 1;

  int dim() const { return dA * dB; }
  bool operator==(const BipartiteShape&) const = default;
};

// Dense Hermitian matrix. Construction symmetrizes (M + M^dag) / 2 and
// rejects inputs whose anti-Hermitian part exceeds the tolerance in operator
// norm; the pre-symmetrization residual is kept for diagnostics.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const CMatrix& m,
                             double tol = kDefaultHermiticityTol);

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);
  static HermitianOperator from_real(const RMatrix& m,
                                     double tol = kDefaultHermiticityTol);
  // |v><v|
  static HermitianOperator projector_onto(const CVector& v);

  const CMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double hermiticity_residual() const { return residual_; }
  double trace() const { return m_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& h) {
    return h * s;
  }

 private:
  CMatrix m_;
  double residual_ = 0.0;
};

// Eigenvalues ascending; eigenvectors are the matching columns.
struct EigenDecomposition {
  RVector values;
  CMatrix vectors;
};

EigenDecomposition eig_hermitian(const HermitianOperator& h);
// Same as above for a matrix already known to be Hermitian; only the lower
// triangle is read. Used on hot paths that should not re-validate.
EigenDecomposition eig_hermitian(const CMatrix& h);

// Transpose on the B factor: entry ((i,l),(k,j)) of the result is entry
// ((i,j),(k,l)) of the input.
CMatrix partial_transpose(const CMatrix& m, BipartiteShape shape);
HermitianOperator partial_transpose(const HermitianOperator& h,
                                    BipartiteShape shape);

CMatrix kron(const CMatrix& a, const CMatrix& b);

double trace_norm(const HermitianOperator& h);
double op_norm(const HermitianOperator& h);
double op_norm(const CMatrix& hermitian);

// Spectral natural logarithm. Throws SupportError if any eigenvalue is at or
// below `floor`.
HermitianOperator matrix_log(const HermitianOperator& h, double floor = 1e-300);
HermitianOperator matrix_exp(const HermitianOperator& h);

inline constexpr double kDividedDifferenceSwitch = 1e-8;

// Logarithmic mean (a - b) / (ln a - ln b), continuous at a == b where it
// equals a. Near the diagonal a series in h = ln(b / a) replaces the
// cancelling quotient.
double divided_difference_log(double a, double b,
                              double dd_switch = kDividedDifferenceSwitch);

struct SupportProjection {
  HermitianOperator projector;
  int rank = 0;
  CMatrix range_basis;       // dim x rank, orthonormal columns
  CMatrix complement_basis;  // dim x (dim - rank)
};

// Projector onto eigenvectors with eigenvalue > rel_tol * lambda_max.
SupportProjection support_projector(const HermitianOperator& rho,
                                    double rel_tol = 1e-10);

// Unit vector spanning the kernel, i.e. the eigenvector with
// |lambda| <= abs_tol. A negative abs_tol selects 1e-9 * ||h||_inf. Throws
// KernelDimensionError unless exactly one eigenvalue qualifies.
CVector kernel_vector(const HermitianOperator& h, double abs_tol = -1.0);

// Number of Schmidt coefficients above tol for a vector on C^dA (x) C^dB.
int schmidt_rank(const CVector& v, BipartiteShape shape, double tol = 1e-8);

}  // namespace sdpent
