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

// Entanglement quantities of bipartite states.
//
// Everything is computed with natural logarithms and converted to the
// requested LogBase on output. The default base is 2 (bits): the closed-form
// Rains value of rho_0.547 is 0.3891999 in bits and 0.2698 in nats.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdpent/conic.hpp"
#include "sdpent/states.hpp"

namespace sdpent {

enum class LogBase { kTwo, kNatural };

const char* to_string(LogBase base);
// Converts a value in nats to the given base.
double from_nats(double nats, LogBase base);

enum class MeasureKind {
  kEW,
  kEM,
  kMPrimal,
  kMDual,
  kW0Rate,
  kLogNeg,
  kRelEnt,
  kRainsClosedForm,
  kREEUpper,
};

const char* to_string(MeasureKind kind);

struct SolverStats {
  ConicStatus status = ConicStatus::kOptimal;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double max_equality_residual = 0.0;
  double min_psd_eigenvalue = 0.0;
  int iterations = 0;
  int schur_size = 0;
  EngineForm form = EngineForm::kLmi;
  double wall_seconds = 0.0;

  static SolverStats from(const ConicSolution& s);
};

struct MeasureResult {
  MeasureKind kind = MeasureKind::kEM;
  // In `base` for logarithmic quantities. M_primal and M_dual report the
  // optimal value M itself, which is dimensionless.
  double value = 0.0;
  LogBase base = LogBase::kTwo;
  // Value of the underlying optimization problem before taking a logarithm
  // (W, M or W0), when there is one.
  std::optional<double> program_value;
  double error_bar = 0.0;
  // Optimal R for the SDP measures, the closest PPT state for REEUpper.
  std::optional<HermitianOperator> certificate;
  std::vector<SolverStats> solver;
  std::string notes;
};

struct MeasureConfig {
  LogBase base = LogBase::kTwo;
  SolverConfig solver = tight_solver_config();

  static SolverConfig tight_solver_config() {
    SolverConfig c;
    c.gap_tol = 1e-10;
    c.feas_tol = 1e-10;
    return c;
  }
};

// Spectral quantities.

// S(rho || sigma). +infinity when rho has weight outside supp(sigma).
double relative_entropy(const BipartiteState& rho, const BipartiteState& sigma,
                        LogBase base = LogBase::kTwo);
double log_negativity(const BipartiteState& rho, LogBase base = LogBase::kTwo);

// SDP measures. Each throws SolverError when the solve does not reach an
// optimal status.

// log W with W = max tr(rho R) s.t. R >= 0, -I <= R^T_B <= I.
MeasureResult e_w(const BipartiteState& rho, const MeasureConfig& cfg = {});

// M(rho) = max tr(P Z) s.t. tr(X + Y) = 1, (X - Y)^T_B >= Z, X, Y, Z >= 0
// with P the support projector of rho. Certificate: Z.
MeasureResult m_primal(const BipartiteState& rho, const MeasureConfig& cfg = {});
// M(rho) = min t s.t. R >= P, -tI <= R^T_B <= tI. Certificate: R.
MeasureResult m_dual(const BipartiteState& rho, const MeasureConfig& cfg = {});

inline constexpr double kPrimalDualConsistencyTol = 1e-6;

// -log M from the midpoint of the two programs; the half difference, in the
// output base, is the error bar. ConsistencyError if they differ by more
// than kPrimalDualConsistencyTol.
MeasureResult e_m(const BipartiteState& rho, const MeasureConfig& cfg = {});

// -log W0 with W0 = min ||R^T_B||_inf s.t. P <= R <= I. Solved in the form
// R = P + K Q K^dag, 0 <= Q <= I, with K an orthonormal basis of the kernel
// of P, which has a strictly feasible point.
MeasureResult w0_rate(const BipartiteState& rho, const MeasureConfig& cfg = {});

// The W0 program stated directly over R for an arbitrary Hermitian P. Its
// feasible set has empty interior even for projectors; it exists to expose
// infeasibility for a malformed P.
ConicProgram w0_direct_program(const HermitianOperator& p,
                               BipartiteShape shape);

// Top eigenvector of P^T_B for the support projector P, with its Schmidt
// rank. When that vector is a product vector, E_M = -log ||P^T_B||_inf.
struct SupportPartialTransposeTop {
  double op_norm = 0.0;
  CVector vector;
  int schmidt_rank = 0;
  bool product() const { return schmidt_rank == 1; }
};
SupportPartialTransposeTop support_pt_top(const BipartiteState& rho);

// Closest-PPT-state machinery for the rho_r / sigma_r family.

// G(sigma) = sum_ij G_ij |v_i><v_i| (|phi><phi|)^T_B |v_j><v_j| with
// G_ij the logarithmic mean of eigenvalues i, j of sigma and phi the kernel
// vector of sigma^T_B. DomainError if sigma is rank deficient.
HermitianOperator g_map(const BipartiteState& sigma);

// || sigma_r - (3/2) G(sigma_r) - rho_r ||_1.
double css_defect(double r);

inline constexpr double kCssDefectTol = 1e-8;

// S(rho_r || sigma_r), valid when the defect is at most kCssDefectTol;
// CertificationError otherwise.
MeasureResult rains_closed_form(double r, LogBase base = LogBase::kTwo);

// Conditional-gradient upper bound on the relative entropy to PPT states.

struct LinearOracleResult {
  BipartiteState atom;
  double value = 0.0;  // tr(G atom)
  SolverStats stats;
};

// argmin tr(G D) over D >= 0, D^T_B >= 0, tr D = 1. The returned state is
// exactly PSD and PPT up to rounding. An iterate that stopped short of the
// requested tolerance is still used when its duality gap and equality
// residual are below kOracleAcceptTol, since it is projected onto the
// feasible set anyway.
inline constexpr double kOracleAcceptTol = 1e-6;
LinearOracleResult fw_linear_oracle(const HermitianOperator& g,
                                    BipartiteShape shape,
                                    const SolverConfig& solver = {});

enum class FwVariant {
  // Keeps the active atoms and reoptimizes their weights with pairwise
  // steps after every oracle call.
  kFullyCorrective,
  // sigma <- sigma + t (D - sigma) with t <= 1 - lambda_floor.
  kVanilla,
};

struct FwConfig {
  double gap_bits = 1e-4;
  int max_iters = 500;
  double lambda_floor = 1e-12;
  FwVariant variant = FwVariant::kFullyCorrective;
  int inner_max_iters = 100;
  // Inner loop stops once the pairwise gap drops below this fraction of the
  // current outer gap.
  double inner_gap_ratio = 0.1;
  SolverConfig oracle = oracle_config();
  LogBase base = LogBase::kTwo;

  static SolverConfig oracle_config() {
    SolverConfig c;
    c.gap_tol = 1e-7;
    c.feas_tol = 1e-7;
    return c;
  }
};

struct FwIteration {
  double value_bits = 0.0;
  double fw_gap_bits = 0.0;
  double step_size = 0.0;
};

struct FWTrace {
  std::vector<FwIteration> iterations;
  std::optional<BipartiteState> final_sigma;
  bool converged = false;
  int oracle_calls = 0;
};

// Gradient of sigma -> -tr(rho ln sigma) at a full-rank sigma.
HermitianOperator relative_entropy_gradient(const BipartiteState& rho,
                                            const CMatrix& sigma);

struct ReeUpperResult {
  MeasureResult measure;
  FWTrace trace;
};

// Returns S(rho || sigma_final); sigma_final is PPT, so the value bounds the
// relative entropy of entanglement with respect to PPT states from above.
ReeUpperResult ree_upper(const BipartiteState& rho, const FwConfig& cfg = {});

struct NonadditivityReport {
  double r = 0.0;
  LogBase base = LogBase::kTwo;
  MeasureResult rains;      // R(rho_r)
  double two_rains = 0.0;   // 2 R(rho_r)
  ReeUpperResult tensor2;   // upper bound on R(rho_r (x) rho_r)
  double gap = 0.0;         // two_rains - tensor2 value
  // Feasibility of the certificate recomputed from scratch.
  double certificate_min_eigenvalue = 0.0;
  double certificate_min_pt_eigenvalue = 0.0;
  double certificate_trace_error = 0.0;
};

NonadditivityReport nonadditivity_experiment(double r, const FwConfig& cfg = {});

}  // namespace sdpent
