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

#include "sdpent/states.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "sdpent/errors.hpp"
#include "sdpent/measures.hpp"

namespace sdpent {
namespace {


double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double min_eig(const HermitianOperator& h) { return eig_hermitian(h).values(0); }

double purity(const BipartiteState& s) {
  return (s.matrix() * s.matrix()).trace().real();
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

BipartiteState diagonal_state(std::vector<double> d, BipartiteShape shape) {
  CMatrix m = CMatrix::Zero(shape.dim(), shape.dim());
  for (int i = 0; i < shape.dim(); ++i) m(i, i) = d[i];
  return BipartiteState(HermitianOperator(m), shape);
}

// --- BipartiteState ------------------------------------------------------------

TEST(BipartiteState, RejectsShapeMismatch) {
  EXPECT_THROW(BipartiteState(HermitianOperator::identity(4) * 0.25, {2, 3}),
               ShapeError);
}

TEST(BipartiteState, RejectsNegativeEigenvalue) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.1;
  m(1, 1) = -0.1;
  try {
    BipartiteState(HermitianOperator(m), {1, 2});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "positive-semidefinite");
  }
}

TEST(BipartiteState, AcceptsRoundingLevelNegativity) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0 + 1e-11;
  m(1, 1) = -1e-11;
  EXPECT_NO_THROW(BipartiteState(HermitianOperator(m), {2, 1}));
}

// --- max_entangled ---------------------------------------------------------------

TEST(MaxEntangled, ScalarCase) {
  const auto s = max_entangled(1);
  ASSERT_EQ(s.dim(), 1);
  EXPECT_EQ(s.matrix()(0, 0), Complex(1.0));
}

TEST(MaxEntangled, TwoQubitEntries) {
  const auto s = max_entangled(2);
  CMatrix want = CMatrix::Zero(4, 4);
  for (int i : {0, 3})
    for (int j : {0, 3}) want(i, j) = 0.5;
  EXPECT_LE(max_abs(s.matrix() - want), 1e-15);
}

TEST(MaxEntangled, QutritIsPure) {
  const auto s = max_entangled(3);
  EXPECT_NEAR(s.op().trace(), 1.0, 1e-15);
  EXPECT_NEAR(purity(s), 1.0, 1e-14);
  EXPECT_EQ(support_projector(s.op()).rank, 1);
}

TEST(MaxEntangled, ZeroDimensionIsDomainError) {
  EXPECT_THROW(max_entangled(0), DomainError);
}

// --- pure_from_schmidt -----------------------------------------------------------

TEST(PureFromSchmidt, ProductState) {
  const auto s = pure_from_schmidt(SchmidtVector({1.0}), {2, 2});
  CMatrix want = CMatrix::Zero(4, 4);
  want(0, 0) = 1.0;
  EXPECT_EQ(s.matrix(), want);
}

TEST(PureFromSchmidt, EqualCoefficientsGiveMaximallyEntangled) {
  const double c = 1.0 / std::sqrt(2.0);
  const auto s = pure_from_schmidt(SchmidtVector({c, c}), {2, 2});
  EXPECT_LE(max_abs(s.matrix() - max_entangled(2).matrix()), 1e-15);
}

TEST(PureFromSchmidt, PartialTransposeNormIsLargestSquare) {
  const auto s =
      pure_from_schmidt(SchmidtVector({std::sqrt(0.8), std::sqrt(0.2)}), {2, 2});
  EXPECT_NEAR(op_norm(partial_transpose(s.op(), s.shape())), 0.8, 1e-14);
}

TEST(PureFromSchmidt, TooManyCoefficientsIsShapeError) {
  const double c = 1.0 / std::sqrt(3.0);
  EXPECT_THROW(pure_from_schmidt(SchmidtVector({c, c, c}), {2, 3}), ShapeError);
}

TEST(SchmidtVector, Validation) {
  EXPECT_THROW(SchmidtVector({}), DomainError);
  EXPECT_THROW(SchmidtVector({0.6, 0.8}), DomainError);
  EXPECT_THROW(SchmidtVector({1.0, 0.0}), DomainError);
  EXPECT_THROW(SchmidtVector({0.9, 0.1}), DomainError);
  EXPECT_NO_THROW(SchmidtVector({0.8, 0.6}));
}

// --- sigma_r / rho_r -------------------------------------------------------------

TEST(RainsPair, Windows) {
  EXPECT_NEAR(sigma_r_window().lo, (5.0 - std::sqrt(17.0)) / 16.0, 1e-16);
  EXPECT_NEAR(sigma_r_window().hi, (5.0 + std::sqrt(17.0)) / 16.0, 1e-16);
  EXPECT_EQ(rho_r_window().lo, 0.3125);
  EXPECT_EQ(rho_r_window().hi, 0.548);
  EXPECT_THROW(sigma_r({0.0}), DomainError);
  EXPECT_THROW(sigma_r({0.6}), DomainError);
  EXPECT_THROW(rho_r({0.3}), DomainError);
  EXPECT_THROW(rho_r({0.549}), DomainError);
}

TEST(SigmaR, Entries) {
  for (double r : {0.2, 0.3125, 0.5, 0.547}) {
    const CMatrix m = sigma_r({r}).matrix();
    EXPECT_NEAR(m(1, 2).real(), 1.0 / (4.0 * std::sqrt(2.0)), 1e-16);
    EXPECT_NEAR(m(2, 1).real(), 1.0 / (4.0 * std::sqrt(2.0)), 1e-16);
    EXPECT_NEAR(m(0, 0).real(), 0.25, 1e-16);
    EXPECT_NEAR(m(1, 1).real(), r, 1e-16);
    EXPECT_NEAR(m(2, 2).real(), 5.0 / 8.0 - r, 1e-16);
    EXPECT_NEAR(m(3, 3).real(), 0.125, 1e-16);
    EXPECT_NEAR(m.trace().real(), 1.0, 1e-15);
  }
}

TEST(SigmaR, BoundaryInnerBlockIsNonnegative) {
  const auto s = sigma_r({5.0 / 16.0});
  const double y = rains_pair_y(5.0 / 16.0);
  EXPECT_GE(5.0 / 16.0 - y / 2.0, -1e-10);
  EXPECT_GE(s.min_eigenvalue(), -1e-10);
}

TEST(SigmaR, PptAndOneDimensionalKernelOnGrid) {
  const auto w = sigma_r_window();
  for (double r : grid(w.lo + 1e-9, w.hi - 1e-9, 50)) {
    const auto s = sigma_r({r});
    const auto t = partial_transpose(s.op(), s.shape());
    const auto e = eig_hermitian(t);
    EXPECT_GE(e.values(0), -1e-10) << r;
    const double scale = op_norm(t);
    int small = 0;
    for (int i = 0; i < 4; ++i) small += std::abs(e.values(i)) <= 1e-9 * scale;
    EXPECT_EQ(small, 1) << r;
  }
}

// Independent transcription of x(r) and the off-diagonal coefficient.
double x_oracle(double r) {
  const double y = std::sqrt(4 * r * r - 2.5 * r + 33.0 / 64.0);
  return r + (32 * r * r - 10 * r + 1) / (256 * r * r - 160 * r + 33) +
         ((16 * r - 5) / y) /
             (32 * std::log(5.0 / 8.0 - y) - 32 * std::log(5.0 / 8.0 + y));
}

TEST(RhoR, EntryLayout) {
  for (double r : {0.35, 0.45, 0.5, 0.547}) {
    const double x = x_oracle(r);
    EXPECT_NEAR(rains_pair_x(r), x, 1e-14);
    const CMatrix m = rho_r({r}).matrix();
    EXPECT_NEAR(m(0, 0).real(), 0.125, 1e-15);
    EXPECT_NEAR(m(1, 1).real(), x, 1e-14);
    EXPECT_NEAR(m(2, 2).real(), (7.0 - 8.0 * x) / 8.0, 1e-14);
    EXPECT_NEAR(std::abs(m(3, 3)), 0.0, 1e-15);
    const double off =
        (32 * r * r - (6 + 32 * x) * r + 10 * x + 1) / (4 * std::sqrt(2.0));
    EXPECT_NEAR(m(1, 2).real(), off, 1e-14);
    EXPECT_NEAR(m(2, 1).real(), off, 1e-14);
  }
}

TEST(RhoR, UnitTrace) {
  for (double r : {0.35, 0.45, 0.547}) {
    EXPECT_NEAR(rho_r({r}).op().trace(), 1.0, 1e-14);
  }
}

TEST(RhoR, CssIdentityAtHalf) { EXPECT_LE(css_defect(0.5), 1e-9); }

TEST(RhoR, PositiveAndCssOnGrid) {
  for (double r : grid(0.3125, 0.548, 100)) {
    const auto rho = rho_r({r});
    EXPECT_GE(min_eig(rho.op()), -1e-10) << r;
    const auto s = sigma_r({r});
    EXPECT_GE(min_eig(partial_transpose(s.op(), s.shape())), -1e-10) << r;
    EXPECT_LE(css_defect(r), 1e-9) << r;
  }
}

// --- rho_alpha -------------------------------------------------------------------

TEST(RhoAlpha, Construction) {
  for (double alpha : {0.05, 0.2, 0.5}) {
    const auto s = rho_alpha({alpha});
    EXPECT_EQ(s.dim(), 9);
    EXPECT_NEAR(s.op().trace(), 1.0, 1e-14);
    EXPECT_GE(s.min_eigenvalue(), -1e-12);
    EXPECT_EQ(support_projector(s.op()).rank, 3);
  }
  EXPECT_THROW(rho_alpha({0.0}), DomainError);
  EXPECT_THROW(rho_alpha({0.51}), DomainError);
}

TEST(RhoAlpha, PurityIsOneThird) {
  for (double alpha : {0.1, 0.5}) {
    EXPECT_NEAR(purity(rho_alpha({alpha})), 1.0 / 3.0, 1e-14);
  }
}

TEST(RhoAlpha, SupportPartialTransposeNorm) {
  const auto p15 = support_projector(rho_alpha({0.15}).op()).projector;
  EXPECT_NEAR(op_norm(partial_transpose(p15, {3, 3})), 0.85, 1e-12);
  const auto p40 = support_projector(rho_alpha({0.4}).op()).projector;
  EXPECT_NEAR(op_norm(partial_transpose(p40, {3, 3})),
              2.0 * std::sqrt(0.4 * 0.6), 1e-12);
}

TEST(RhoAlpha, SupportCommutesWithOrbitUnitary) {
  const CMatrix u = orbit_unitary();
  EXPECT_LE(max_abs(u * u.adjoint() - CMatrix::Identity(9, 9)), 1e-15);
  for (double alpha : {0.05, 0.15, 0.3, 0.5}) {
    const CMatrix p = support_projector(rho_alpha({alpha}).op()).projector.matrix();
    EXPECT_LE(op_norm(CMatrix(Complex(0, 1) * (p * u - u * p))), 1e-10);
  }
}

TEST(ShiftOperator, CyclesBasis) {
  const CMatrix x = shift_operator();
  EXPECT_EQ(x(1, 0), Complex(1.0));
  EXPECT_EQ(x(2, 1), Complex(1.0));
  EXPECT_EQ(x(0, 2), Complex(1.0));
  EXPECT_LE(max_abs(x * x * x - CMatrix::Identity(3, 3)), 0.0);
}

// --- tensor_states -----------------------------------------------------------------

TEST(TensorStates, MaximallyEntangledPair) {
  const auto phi = max_entangled(2);
  const auto t = tensor_states(phi, phi);
  EXPECT_EQ(t.shape(), (BipartiteShape{4, 4}));
  EXPECT_LE(max_abs(t.matrix() - max_entangled(4).matrix()), 1e-15);
  EXPECT_NEAR(trace_norm(partial_transpose(t.op(), t.shape())), 4.0, 1e-12);
}

TEST(TensorStates, DiagonalStaysDiagonal) {
  const auto a = diagonal_state({0.1, 0.2, 0.3, 0.4}, {2, 2});
  const auto b = diagonal_state({0.5, 0.25, 0.125, 0.125}, {2, 2});
  const CMatrix m = tensor_states(a, b).matrix();
  EXPECT_EQ(max_abs(m - CMatrix(m.diagonal().asDiagonal())), 0.0);
  // Index (iA iA')(jB jB') carries a(iA jB) * b(iA' jB').
  for (int ia = 0; ia < 2; ++ia)
    for (int ja = 0; ja < 2; ++ja)
      for (int ib = 0; ib < 2; ++ib)
        for (int jb = 0; jb < 2; ++jb) {
          const int idx = (ia * 2 + ib) * 4 + (ja * 2 + jb);
          EXPECT_DOUBLE_EQ(m(idx, idx).real(),
                           a.matrix()(ia * 2 + ja, ia * 2 + ja).real() *
                               b.matrix()(ib * 2 + jb, ib * 2 + jb).real());
        }
}

TEST(TensorStates, PartialTransposeFactorizes) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_state({2, 2}, 4, rng);
    const auto b = random_state({2, 2}, 2, rng);
    const auto ab = tensor_states(a, b);
    const CMatrix lhs = partial_transpose(ab.matrix(), ab.shape());
    const CMatrix rhs = tensor_regrouped(partial_transpose(a.matrix(), a.shape()),
                                         a.shape(),
                                         partial_transpose(b.matrix(), b.shape()),
                                         b.shape());
    EXPECT_LE(max_abs(lhs - rhs), 1e-15);
  }
}

TEST(TensorStates, Associative) {
  const auto a = diagonal_state({0.1, 0.2, 0.3, 0.4}, {2, 2});
  const auto b = diagonal_state({0.3, 0.7}, {1, 2});
  const auto c = diagonal_state({0.6, 0.3, 0.1}, {3, 1});
  const auto left = tensor_states(tensor_states(a, b), c);
  const auto right = tensor_states(a, tensor_states(b, c));
  EXPECT_EQ(left.shape(), right.shape());
  EXPECT_LE(max_abs(left.matrix() - right.matrix()), 1e-16);
}

TEST(TensorStates, AssociativeOnRandomStates) {
  std::mt19937_64 rng(3);
  const auto a = random_state({2, 2}, 4, rng);
  const auto b = random_state({2, 1}, 2, rng);
  const auto c = random_state({1, 2}, 2, rng);
  const auto left = tensor_states(tensor_states(a, b), c);
  const auto right = tensor_states(a, tensor_states(b, c));
  EXPECT_LE(max_abs(left.matrix() - right.matrix()), 1e-15);
}

TEST(TensorStates, PermutationIsInvolutiveOnSquareShapes) {
  const auto p = regroup_permutation({2, 2}, {2, 2});
  EXPECT_EQ(p.indices().size(), 16);
  Eigen::VectorXi seen = Eigen::VectorXi::Zero(16);
  for (int i = 0; i < 16; ++i) ++seen(p.indices()(i));
  EXPECT_EQ(seen, Eigen::VectorXi::Ones(16));
}

// --- serialization -------------------------------------------------------------------

TEST(Serialization, RoundTripIsExact) {
  std::mt19937_64 rng(21);
  for (const auto& s : {max_entangled(3), rho_r({0.547}), rho_alpha({0.2}),
                        random_state({2, 3}, 6, rng)}) {
    const auto back = parse_state(serialize_state(s));
    EXPECT_EQ(back.shape(), s.shape());
    EXPECT_EQ(back.matrix(), s.matrix());
  }
}

TEST(Serialization, Layout) {
  const std::string text = serialize_state(max_entangled(2));
  EXPECT_EQ(text.find("{\"dA\":2,\"dB\":2,\"re\":[["), 0u) << text;
  EXPECT_NE(text.find("\"im\":[["), std::string::npos);
}

TEST(Serialization, MissingFieldIsParseError) {
  const std::string text =
      R"({"dA":1,"re":[[1.0]],"im":[[0.0]]})";
  try {
    parse_state(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dB"), std::string::npos);
  }
}

TEST(Serialization, MalformedDocuments) {
  EXPECT_THROW(parse_state("{"), ParseError);
  EXPECT_THROW(parse_state("[1,2]"), ParseError);
  EXPECT_THROW(parse_state(R"({"dA":1,"dB":1,"re":[[1.0]],"im":[["x"]]})"),
               ParseError);
  EXPECT_THROW(parse_state(R"({"dA":1,"dB":2,"re":[[1.0]],"im":[[0.0]]})"),
               ParseError);
  EXPECT_THROW(parse_state(R"({"dA":0,"dB":1,"re":[],"im":[]})"), ParseError);
}

TEST(Serialization, NonUnitTraceNamesInvariant) {
  const std::string text =
      R"({"dA":1,"dB":2,"re":[[0.5,0.0],[0.0,0.4]],"im":[[0.0,0.0],[0.0,0.0]]})";
  try {
    parse_state(text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "unit-trace");
  }
}

TEST(Serialization, NonHermitianNamesInvariant) {
  const std::string text =
      R"({"dA":1,"dB":2,"re":[[0.5,0.1],[0.0,0.5]],"im":[[0.0,0.0],[0.0,0.0]]})";
  try {
    parse_state(text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "hermiticity");
  }
}

TEST(Serialization, FileRoundTrip) {
  const auto path =
      std::filesystem::temp_directory_path() / "sdpent_states_test_state.json";
  write_state_file(path, rho_alpha({0.3}));
  EXPECT_EQ(read_state_file(path).matrix(), rho_alpha({0.3}).matrix());
  std::filesystem::remove(path);
  EXPECT_THROW(read_state_file(path), ParseError);
}

// --- generators ------------------------------------------------------------------------

TEST(RandomState, SeededAndValid) {
  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  for (int rank = 1; rank <= 9; ++rank) {
    const auto s = random_state({3, 3}, rank, a);
    EXPECT_EQ(s.matrix(), random_state({3, 3}, rank, b).matrix());
    EXPECT_EQ(support_projector(s.op()).rank, rank);
  }
}

TEST(RandomSchmidt, Valid) {
  std::mt19937_64 rng(6);
  for (int m = 1; m <= 3; ++m) {
    const auto s = random_schmidt(m, rng);
    double norm = 0.0;
    for (double c : s.coefficients()) norm += c * c;
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_EQ(s.size(), m);
  }
}

}  // namespace
}  // namespace sdpent
