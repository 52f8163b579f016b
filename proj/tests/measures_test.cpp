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

#include "sdpent/measures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "sdpent/errors.hpp"

namespace sdpent {
namespace {

constexpr std::uint64_t kSeed = 20260101;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double min_eig(const CMatrix& h) { return eig_hermitian(h).values(0); }

BipartiteState product_state() {
  CVector v = CVector::Zero(4);
  v(0) = 1.0;
  return pure_state(v, {2, 2});
}

// Mixed states of low rank on 2x2 and 3x3; low rank makes E_M nonzero.
std::vector<BipartiteState> chain_states() {
  std::mt19937_64 rng(kSeed);
  std::vector<BipartiteState> out;
  for (int i = 0; i < 10; ++i) out.push_back(random_state({2, 2}, 1 + i % 3, rng));
  for (int i = 0; i < 10; ++i) out.push_back(random_state({3, 3}, 1 + i % 4, rng));
  return out;
}

// --- spectral quantities -------------------------------------------------------

TEST(LogBase, Conversion) {
  EXPECT_DOUBLE_EQ(from_nats(std::log(2.0), LogBase::kTwo), 1.0);
  EXPECT_DOUBLE_EQ(from_nats(1.5, LogBase::kNatural), 1.5);
  EXPECT_STREQ(to_string(LogBase::kTwo), "2");
  EXPECT_STREQ(to_string(LogBase::kNatural), "e");
}

TEST(RelativeEntropy, SelfIsZero) {
  const auto rho = rho_r({0.5});
  EXPECT_NEAR(relative_entropy(rho, rho), 0.0, 1e-10);
}

TEST(RelativeEntropy, MaximallyEntangledAgainstMixed) {
  EXPECT_NEAR(relative_entropy(max_entangled(2), maximally_mixed({2, 2})), 2.0,
              1e-12);
  EXPECT_NEAR(relative_entropy(max_entangled(2), maximally_mixed({2, 2}),
                               LogBase::kNatural),
              std::log(4.0), 1e-12);
}

TEST(RelativeEntropy, ClosestStateValueInBits) {
  EXPECT_NEAR(relative_entropy(rho_r({0.547}), sigma_r({0.547})), 0.3891999,
              1e-4);
}

TEST(RelativeEntropy, SupportViolationIsInfinite) {
  EXPECT_EQ(relative_entropy(max_entangled(2), product_state()),
            std::numeric_limits<double>::infinity());
}

TEST(RelativeEntropy, ShapeMismatch) {
  EXPECT_THROW(relative_entropy(maximally_mixed({2, 2}), maximally_mixed({1, 4})),
               ShapeError);
}

TEST(RelativeEntropy, NonnegativeOnRandomPairs) {
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_state({2, 3}, 1 + i % 6, rng);
    const auto b = random_state({2, 3}, 6, rng);
    EXPECT_GE(relative_entropy(a, b), -1e-10);
  }
}

TEST(LogNegativity, Examples) {
  EXPECT_NEAR(log_negativity(maximally_mixed({2, 2})), 0.0, 1e-12);
  EXPECT_NEAR(log_negativity(sigma_r({0.4})), 0.0, 1e-10);
  EXPECT_NEAR(log_negativity(max_entangled(2)), 1.0, 1e-12);
  EXPECT_NEAR(log_negativity(max_entangled(3)), std::log2(3.0), 1e-12);
  EXPECT_NEAR(log_negativity(max_entangled(3), LogBase::kNatural), std::log(3.0),
              1e-12);
}

// --- SDP measures -----------------------------------------------------------------

TEST(EW, Examples) {
  EXPECT_NEAR(e_w(max_entangled(2)).value, 1.0, 1e-7);
  EXPECT_NEAR(e_w(product_state()).value, 0.0, 1e-7);
  EXPECT_NEAR(e_w(maximally_mixed({2, 2})).value, 0.0, 1e-7);
}

TEST(EW, CertificateIsFeasible) {
  const auto r = e_w(max_entangled(2));
  ASSERT_TRUE(r.certificate.has_value());
  const CMatrix& cert = r.certificate->matrix();
  EXPECT_GE(min_eig(cert), -1e-8);
  EXPECT_LE(op_norm(partial_transpose(cert, {2, 2})), 1.0 + 1e-8);
  EXPECT_NEAR((max_entangled(2).matrix() * cert).trace().real(), 2.0, 1e-7);
}

TEST(MPrimal, Examples) {
  EXPECT_NEAR(m_primal(max_entangled(2)).value, 0.5, 1e-8);
  EXPECT_NEAR(m_primal(maximally_mixed({2, 2})).value, 1.0, 1e-8);
  EXPECT_NEAR(m_primal(rho_alpha({0.2})).value, 0.8, 1e-6);
}

TEST(MDual, Examples) {
  EXPECT_NEAR(m_dual(max_entangled(2)).value, 0.5, 1e-8);
  const auto pure =
      pure_from_schmidt(SchmidtVector({std::sqrt(0.8), std::sqrt(0.2)}), {2, 2});
  EXPECT_NEAR(m_dual(pure).value, 0.8, 1e-8);
}

TEST(MDual, CertificateDominatesSupport) {
  const auto rho = rho_alpha({0.15});
  const auto r = m_dual(rho);
  ASSERT_TRUE(r.certificate.has_value());
  const CMatrix p = support_projector(rho.op()).projector.matrix();
  EXPECT_GE(min_eig(r.certificate->matrix() - p), -1e-8);
  EXPECT_NEAR(op_norm(partial_transpose(r.certificate->matrix(), rho.shape())),
              r.value, 1e-7);
}

TEST(StrongDuality, RandomTwoQubitStates) {
  std::mt19937_64 rng(kSeed + 1);
  for (int i = 0; i < 20; ++i) {
    const auto rho = random_state({2, 2}, 1 + i % 4, rng);
    EXPECT_LE(std::abs(m_primal(rho).value - m_dual(rho).value), 1e-7) << i;
  }
}

TEST(EM, MaximallyEntangled) {
  for (int d : {2, 3}) {
    const auto r = e_m(max_entangled(d));
    EXPECT_NEAR(r.value, std::log2(d), 1e-7) << d;
    EXPECT_LE(r.error_bar, 1e-7);
    ASSERT_TRUE(r.program_value.has_value());
    EXPECT_NEAR(*r.program_value, 1.0 / d, 1e-8);
  }
}

TEST(EM, OrbitFamily) {
  EXPECT_NEAR(e_m(rho_alpha({0.1})).value, -std::log2(0.9), 1e-5);
  EXPECT_NEAR(e_m(rho_alpha({0.1}), {LogBase::kNatural}).value, -std::log(0.9),
              1e-5);
}

TEST(EM, FullRankIsZero) {
  std::mt19937_64 rng(kSeed + 2);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(e_m(random_state({2, 3}, 6, rng)).value, 0.0, 1e-7);
  }
}

TEST(EM, PureStateFormula) {
  std::mt19937_64 rng(kSeed + 3);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_schmidt(1 + i % 3, rng);
    const double l1 = s.coefficients().front();
    const auto rho = pure_from_schmidt(s, {3, 3});
    EXPECT_NEAR(e_m(rho).value, -std::log2(l1 * l1), 1e-6) << i;
  }
}

TEST(EM, AdditiveOnRandomPairs) {
  std::mt19937_64 rng(kSeed + 4);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_state({2, 2}, 1 + i % 2, rng);
    const auto b = random_state({2, 2}, 1 + (i / 2) % 2, rng);
    const double joint = e_m(tensor_states(a, b)).value;
    EXPECT_NEAR(joint, e_m(a).value + e_m(b).value, 1e-5) << i;
  }
}

TEST(EM, AdditiveOnMaximallyEntangledAndOrbitState) {
  const auto a = max_entangled(2);
  const auto b = rho_alpha({0.3});
  EXPECT_NEAR(e_m(tensor_states(a, b)).value, e_m(a).value + e_m(b).value, 1e-5);
}

TEST(EM, ProductTopEigenvectorIsTight) {
  std::mt19937_64 rng(kSeed + 5);
  std::vector<BipartiteState> states{rho_alpha({0.05}), rho_alpha({0.2}),
                                     max_entangled(2), product_state()};
  for (int i = 0; i < 6; ++i) states.push_back(random_state({2, 2}, 1 + i % 3, rng));
  int product_cases = 0;
  for (const auto& rho : states) {
    const auto top = support_pt_top(rho);
    if (!top.product()) continue;
    ++product_cases;
    EXPECT_NEAR(e_m(rho).value, -std::log2(top.op_norm), 1e-6);
  }
  EXPECT_GE(product_cases, 3);
}

TEST(W0Rate, Examples) {
  EXPECT_NEAR(w0_rate(max_entangled(2)).value, 1.0, 1e-7);
  EXPECT_NEAR(w0_rate(product_state()).value, 0.0, 1e-7);
  EXPECT_NEAR(w0_rate(maximally_mixed({2, 2})).value, 0.0, 1e-9);
}

TEST(W0Rate, DirectProgramDetectsMalformedSupport) {
  CMatrix p = CMatrix::Zero(4, 4);
  p(0, 0) = 2.0;
  const auto s = solve(w0_direct_program(HermitianOperator(p), {2, 2}));
  EXPECT_EQ(s.status, ConicStatus::kInfeasible);
}

TEST(OrderingChain, RandomStates) {
  for (const auto& rho : chain_states()) {
    const double w0 = w0_rate(rho).value;
    const double em = e_m(rho).value;
    const double ew = e_w(rho).value;
    const double ln = log_negativity(rho);
    EXPECT_LE(w0, em + 1e-6);
    EXPECT_LE(em, ew + 1e-6);
    EXPECT_LE(ew, ln + 1e-6);
  }
}

// --- closest PPT state ------------------------------------------------------------------

TEST(GMap, Hermitian) {
  const auto g = g_map(sigma_r({0.45}));
  EXPECT_LE(op_norm(CMatrix(Complex(0, 1) * (g.matrix() - g.matrix().adjoint()))),
            1e-12);
}

TEST(GMap, FullRankPartialTransposeHasNoKernel) {
  EXPECT_THROW(g_map(maximally_mixed({2, 2})), KernelDimensionError);
}

TEST(RainsClosedForm, ReferenceValue) {
  const auto r = rains_closed_form(0.547);
  EXPECT_NEAR(r.value, 0.3891999, 1e-4);
  EXPECT_NEAR(2.0 * r.value, 0.7783998, 2e-4);
  EXPECT_EQ(r.kind, MeasureKind::kRainsClosedForm);
}

TEST(RainsClosedForm, OnlyOneBaseMatchesReference) {
  const bool bits = std::abs(rains_closed_form(0.547, LogBase::kTwo).value -
                             0.3891999) <= 1e-4;
  const bool nats = std::abs(rains_closed_form(0.547, LogBase::kNatural).value -
                             0.3891999) <= 1e-4;
  EXPECT_TRUE(bits);
  EXPECT_FALSE(nats);
}

TEST(RainsClosedForm, PositiveOnGrid) {
  for (int i = 0; i < 20; ++i) {
    const double r = 0.3125 + (0.548 - 0.3125) * i / 19;
    EXPECT_GT(rains_closed_form(r).value, 0.0) << r;
  }
}

// --- linear oracle ----------------------------------------------------------------------

TEST(LinearOracle, IdentityCost) {
  const auto res = fw_linear_oracle(HermitianOperator::identity(4), {2, 2});
  EXPECT_NEAR(res.value, 1.0, 1e-7);
  EXPECT_NEAR(res.atom.op().trace(), 1.0, 1e-12);
}

TEST(LinearOracle, DiagonalCostPicksProductBasisState) {
  CMatrix g = CMatrix::Zero(4, 4);
  g(0, 0) = 0.7;
  g(1, 1) = -0.4;
  g(2, 2) = 0.1;
  g(3, 3) = 0.3;
  const auto res = fw_linear_oracle(HermitianOperator(g), {2, 2});
  EXPECT_NEAR(res.value, -0.4, 1e-6);
  CMatrix want = CMatrix::Zero(4, 4);
  want(1, 1) = 1.0;
  EXPECT_LE(max_abs(res.atom.matrix() - want), 1e-5);
}

TEST(LinearOracle, NegativeMaximallyEntangledCost) {
  const auto res = fw_linear_oracle(max_entangled(2).op() * -1.0, {2, 2});
  EXPECT_NEAR(res.value, -0.5, 1e-6);
}

TEST(LinearOracle, AtomIsPpt) {
  std::mt19937_64 rng(kSeed + 6);
  for (int i = 0; i < 5; ++i) {
    const auto g = HermitianOperator(random_state({2, 3}, 6, rng).matrix() -
                                     random_state({2, 3}, 2, rng).matrix());
    const auto res = fw_linear_oracle(g, {2, 3});
    EXPECT_GE(res.atom.min_eigenvalue(), -1e-12);
    EXPECT_GE(min_eig(partial_transpose(res.atom.matrix(), {2, 3})), -1e-12);
    EXPECT_NEAR((g.matrix() * res.atom.matrix()).trace().real(), res.value, 1e-9);
  }
}

// --- conditional gradient ---------------------------------------------------------------

TEST(Gradient, MatchesFiniteDifference) {
  std::mt19937_64 rng(kSeed + 7);
  const auto rho = random_state({2, 2}, 2, rng);
  const BipartiteState sigma(
      random_state({2, 2}, 4, rng).op() * 0.5 +
          maximally_mixed({2, 2}).op() * 0.5,
      {2, 2});
  const auto dir = random_state({2, 2}, 4, rng);
  const CMatrix d = dir.matrix() - sigma.matrix();
  const auto f = [&](double t) {
    const CMatrix s = sigma.matrix() + t * d;
    return -(rho.matrix() * matrix_log(HermitianOperator(s)).matrix())
                .trace()
                .real();
  };
  const double h = 1e-6;
  const double fd = (f(h) - f(-h)) / (2 * h);
  const auto g = relative_entropy_gradient(rho, sigma.matrix());
  EXPECT_NEAR((g.matrix() * d).trace().real(), fd, 1e-7 * (1.0 + std::abs(fd)));
}

TEST(ReeUpper, MaximallyMixedIsFree) {
  const auto res = ree_upper(maximally_mixed({2, 2}));
  EXPECT_LE(res.measure.value, 1e-6);
  EXPECT_TRUE(res.trace.converged);
}

TEST(ReeUpper, MatchesClosedFormOnTwoQubits) {
  const auto res = ree_upper(rho_r({0.547}));
  EXPECT_NEAR(res.measure.value, rains_closed_form(0.547).value, 1e-3);
  EXPECT_GE(res.measure.value, rains_closed_form(0.547).value - 1e-9);
}

TEST(ReeUpper, TraceIsMonotoneAndFinalStatePpt) {
  for (FwVariant variant : {FwVariant::kFullyCorrective, FwVariant::kVanilla}) {
    FwConfig cfg;
    cfg.variant = variant;
    cfg.max_iters = variant == FwVariant::kVanilla ? 60 : 500;
    const auto res = ree_upper(rho_r({0.45}), cfg);
    const auto& it = res.trace.iterations;
    ASSERT_FALSE(it.empty());
    for (std::size_t k = 1; k < it.size(); ++k) {
      EXPECT_LE(it[k].value_bits, it[k - 1].value_bits + 1e-12) << k;
    }
    ASSERT_TRUE(res.trace.final_sigma.has_value());
    const auto& s = *res.trace.final_sigma;
    EXPECT_GE(s.min_eigenvalue(), -1e-9);
    EXPECT_GE(min_eig(partial_transpose(s.matrix(), s.shape())), -1e-9);
    EXPECT_NEAR(s.op().trace(), 1.0, 1e-9);
    EXPECT_NEAR(relative_entropy(rho_r({0.45}), s), res.measure.value, 1e-12);
  }
}

TEST(ReeUpper, UpperBoundsEntanglementMeasure) {
  // The PPT-relative entropy dominates E_M's lower companion log negativity
  // only loosely; it must at least be nonnegative and below log d.
  const auto res = ree_upper(max_entangled(2));
  EXPECT_NEAR(res.measure.value, 1.0, 1e-3);
  EXPECT_GE(res.measure.value, 1.0 - 1e-9);
}

}  // namespace
}  // namespace sdpent
