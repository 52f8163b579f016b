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

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include "sdpent/errors.hpp"

namespace sdpent {

const char* to_string(LogBase base) {
  return base == LogBase::kTwo ? "2" : "e";
}

double from_nats(double nats, LogBase base) {
  return base == LogBase::kTwo ? nats / std::numbers::ln2 : nats;
}

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kEW:
      return "EW";
    case MeasureKind::kEM:
      return "EM";
    case MeasureKind::kMPrimal:
      return "M_primal";
    case MeasureKind::kMDual:
      return "M_dual";
    case MeasureKind::kW0Rate:
      return "W0_rate";
    case MeasureKind::kLogNeg:
      return "LogNeg";
    case MeasureKind::kRelEnt:
      return "RelEnt";
    case MeasureKind::kRainsClosedForm:
      return "RainsClosedForm";
    case MeasureKind::kREEUpper:
      return "REEUpper";
  }
  return "unknown";
}

SolverStats SolverStats::from(const ConicSolution& s) {
  SolverStats out;
  out.status = s.status;
  out.primal_value = s.primal_value;
  out.dual_value = s.dual_value;
  out.gap = s.gap;
  out.max_equality_residual = s.max_equality_residual;
  out.min_psd_eigenvalue = s.min_psd_eigenvalue;
  out.iterations = s.iterations;
  out.schur_size = s.schur_size;
  out.form = s.form;
  out.wall_seconds = s.wall_time.count();
  return out;
}

namespace {

constexpr double kEntropyFloor = 1e-15;  // 0 log 0 := 0 below this
constexpr double kNullEigenvalue = 1e-14;
constexpr double kSupportOverlap = 1e-12;

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

ConicSolution solve_or_throw(const ConicProgram& p, const SolverConfig& cfg,
                             const char* what) {
  ConicSolution s = solve(p, cfg);
  if (!s.optimal()) {
    std::ostringstream os;
    os << what << ": solver returned " << to_string(s.status) << " after "
       << s.iterations << " iterations (gap " << s.gap << ", equality residual "
       << s.max_equality_residual << ", min PSD eigenvalue "
       << s.min_psd_eigenvalue << ")";
    if (!s.message.empty()) os << ": " << s.message;
    throw SolverError(os.str());
  }
  return s;
}

// Exact entropy of the positive part of a spectrum, sum p ln p.
double neg_entropy(const RVector& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > kEntropyFloor) s += v * std::log(v);
  }
  return s;
}

}  // namespace

double relative_entropy(const BipartiteState& rho, const BipartiteState& sigma,
                        LogBase base) {
  if (!(rho.shape() == sigma.shape())) {
    throw ShapeError("relative entropy needs states of the same shape");
  }
  const auto er = eig_hermitian(rho.op());
  const auto es = eig_hermitian(sigma.op());
  const RMatrix overlap = (er.vectors.adjoint() * es.vectors).cwiseAbs2();
  double cross = 0.0;
  for (int i = 0; i < er.values.size(); ++i) {
    const double p = er.values(i);
    if (p <= kEntropyFloor) continue;
    for (int j = 0; j < es.values.size(); ++j) {
      const double q = es.values(j);
      if (q <= kNullEigenvalue) {
        if (overlap(i, j) > kSupportOverlap) {
          return std::numeric_limits<double>::infinity();
        }
        continue;
      }
      cross += p * overlap(i, j) * std::log(q);
    }
  }
  return from_nats(neg_entropy(er.values) - cross, base);
}

double log_negativity(const BipartiteState& rho, LogBase base) {
  const double n = trace_norm(partial_transpose(rho.op(), rho.shape()));
  return from_nats(std::log(n), base);
}

// ---------------------------------------------------------------------------
// SDP measures

MeasureResult e_w(const BipartiteState& rho, const MeasureConfig& cfg) {
  const int n = rho.dim();
  const auto shape = rho.shape();
  ConicProgram p;
  const auto r = p.add_variable("R", n);
  p.set_objective(Sense::kMaximize, {{r, rho.matrix()}});
  p.add_psd(AffineExpr::zero(n).add(Term::of(r)), "R >= 0");
  p.add_psd(AffineExpr::with_constant(identity(n))
                .add(Term::partial_transpose(r, shape, -1.0)),
            "R^T_B <= I");
  p.add_psd(AffineExpr::with_constant(identity(n))
                .add(Term::partial_transpose(r, shape)),
            "R^T_B >= -I");
  const auto s = solve_or_throw(p, cfg.solver, "E_W");

  MeasureResult out;
  out.kind = MeasureKind::kEW;
  out.base = cfg.base;
  out.program_value = s.primal_value;
  out.value = from_nats(std::log(s.primal_value), cfg.base);
  out.error_bar = from_nats(s.gap / s.primal_value, cfg.base);
  out.certificate = s.values[0];
  out.solver.push_back(SolverStats::from(s));
  return out;
}

MeasureResult m_primal(const BipartiteState& rho, const MeasureConfig& cfg) {
  const int n = rho.dim();
  const auto shape = rho.shape();
  const auto support = support_projector(rho.op());
  ConicProgram p;
  const auto x = p.add_variable("X", n);
  const auto y = p.add_variable("Y", n);
  const auto z = p.add_variable("Z", n);
  p.set_objective(Sense::kMaximize, {{z, support.projector.matrix()}});
  p.add_equality({{x, identity(n)}, {y, identity(n)}}, 1.0, "tr(X + Y) = 1");
  p.add_psd(AffineExpr::zero(n).add(Term::of(x)), "X >= 0");
  p.add_psd(AffineExpr::zero(n).add(Term::of(y)), "Y >= 0");
  p.add_psd(AffineExpr::zero(n).add(Term::of(z)), "Z >= 0");
  p.add_psd(AffineExpr::zero(n)
                .add(Term::partial_transpose(x, shape))
                .add(Term::partial_transpose(y, shape, -1.0))
                .add(Term::of(z, -1.0)),
            "(X - Y)^T_B >= Z");
  SolverConfig solver = cfg.solver;
  solver.form = EngineForm::kStandard;
  const auto s = solve_or_throw(p, solver, "M primal");

  MeasureResult out;
  out.kind = MeasureKind::kMPrimal;
  out.base = cfg.base;
  out.value = s.primal_value;
  out.program_value = s.primal_value;
  out.error_bar = s.gap;
  out.certificate = s.values[2];
  out.solver.push_back(SolverStats::from(s));
  return out;
}

MeasureResult m_dual(const BipartiteState& rho, const MeasureConfig& cfg) {
  const int n = rho.dim();
  const auto shape = rho.shape();
  const auto support = support_projector(rho.op());
  ConicProgram p;
  const auto r = p.add_variable("R", n);
  const auto t = p.add_variable("t", 1);
  p.set_objective(Sense::kMinimize, {scalar_term(t)});
  p.add_psd(AffineExpr::with_constant(-support.projector.matrix())
                .add(Term::of(r)),
            "R >= P");
  p.add_psd(AffineExpr::zero(n)
                .add(Term::scaled_identity(t, n))
                .add(Term::partial_transpose(r, shape, -1.0)),
            "R^T_B <= tI");
  p.add_psd(AffineExpr::zero(n)
                .add(Term::scaled_identity(t, n))
                .add(Term::partial_transpose(r, shape)),
            "R^T_B >= -tI");
  SolverConfig solver = cfg.solver;
  solver.form = EngineForm::kLmi;
  const auto s = solve_or_throw(p, solver, "M dual");

  MeasureResult out;
  out.kind = MeasureKind::kMDual;
  out.base = cfg.base;
  out.value = s.primal_value;
  out.program_value = s.primal_value;
  out.error_bar = s.gap;
  out.certificate = s.values[0];
  out.solver.push_back(SolverStats::from(s));
  return out;
}

MeasureResult e_m(const BipartiteState& rho, const MeasureConfig& cfg) {
  const auto primal = m_primal(rho, cfg);
  const auto dual = m_dual(rho, cfg);
  const double diff = std::abs(primal.value - dual.value);
  if (diff > kPrimalDualConsistencyTol) {
    std::ostringstream os;
    os.precision(12);
    os << "E_M: primal value " << primal.value << " and dual value "
       << dual.value << " differ by " << diff;
    throw ConsistencyError(os.str());
  }
  const double m = 0.5 * (primal.value + dual.value);
  MeasureResult out;
  out.kind = MeasureKind::kEM;
  out.base = cfg.base;
  out.program_value = m;
  out.value = from_nats(-std::log(m), cfg.base);
  out.error_bar = from_nats(0.5 * diff / m, cfg.base);
  out.certificate = dual.certificate;
  out.solver = {primal.solver.front(), dual.solver.front()};
  std::ostringstream os;
  os.precision(17);
  os << "M primal " << primal.value << ", M dual " << dual.value;
  out.notes = os.str();
  return out;
}

MeasureResult w0_rate(const BipartiteState& rho, const MeasureConfig& cfg) {
  const int n = rho.dim();
  const auto shape = rho.shape();
  const auto support = support_projector(rho.op());
  const CMatrix& proj = support.projector.matrix();
  const CMatrix& k = support.complement_basis;
  const int kdim = static_cast<int>(k.cols());

  MeasureResult out;
  out.kind = MeasureKind::kW0Rate;
  out.base = cfg.base;
  if (kdim == 0) {
    // Full support forces R = I.
    out.program_value = 1.0;
    out.value = 0.0;
    out.certificate = HermitianOperator::identity(n);
    out.notes = "full support: R = I is the only feasible point";
    return out;
  }

  const CMatrix p_pt = partial_transpose(proj, shape);
  ConicProgram p;
  const auto q = p.add_variable("Q", kdim);
  const auto t = p.add_variable("t", 1);
  p.set_objective(Sense::kMinimize, {scalar_term(t)});
  p.add_psd(AffineExpr::zero(kdim).add(Term::of(q)), "Q >= 0");
  p.add_psd(AffineExpr::with_constant(identity(kdim)).add(Term::of(q, -1.0)),
            "Q <= I");
  p.add_psd(AffineExpr::with_constant(-p_pt)
                .add(Term::scaled_identity(t, n))
                .add(Term::congruence(q, k, -1.0).then_partial_transpose(shape)),
            "R^T_B <= tI");
  p.add_psd(AffineExpr::with_constant(p_pt)
                .add(Term::scaled_identity(t, n))
                .add(Term::congruence(q, k).then_partial_transpose(shape)),
            "R^T_B >= -tI");
  SolverConfig solver = cfg.solver;
  solver.form = EngineForm::kLmi;
  const auto s = solve_or_throw(p, solver, "W0");

  out.program_value = s.primal_value;
  out.value = from_nats(-std::log(s.primal_value), cfg.base);
  out.error_bar = from_nats(s.gap / s.primal_value, cfg.base);
  const CMatrix r = proj + k * s.values[0].matrix() * k.adjoint();
  out.certificate = HermitianOperator(r, 1e-10);
  out.solver.push_back(SolverStats::from(s));
  return out;
}

ConicProgram w0_direct_program(const HermitianOperator& p_op,
                               BipartiteShape shape) {
  const int n = p_op.dim();
  if (shape.dim() != n) {
    throw ShapeError("W0 program: operator dimension does not match shape");
  }
  ConicProgram p;
  const auto r = p.add_variable("R", n);
  const auto t = p.add_variable("t", 1);
  p.set_objective(Sense::kMinimize, {scalar_term(t)});
  p.add_psd(AffineExpr::with_constant(-p_op.matrix()).add(Term::of(r)),
            "R >= P");
  p.add_psd(AffineExpr::with_constant(identity(n)).add(Term::of(r, -1.0)),
            "R <= I");
  p.add_psd(AffineExpr::zero(n)
                .add(Term::scaled_identity(t, n))
                .add(Term::partial_transpose(r, shape, -1.0)),
            "R^T_B <= tI");
  p.add_psd(AffineExpr::zero(n)
                .add(Term::scaled_identity(t, n))
                .add(Term::partial_transpose(r, shape)),
            "R^T_B >= -tI");
  return p;
}

SupportPartialTransposeTop support_pt_top(const BipartiteState& rho) {
  const auto support = support_projector(rho.op());
  const auto e = eig_hermitian(partial_transpose(support.projector.matrix(),
                                                 rho.shape()));
  const int n = static_cast<int>(e.values.size());
  // The top of |P^T_B| is whichever end of the spectrum is larger.
  const int idx = std::abs(e.values(0)) > std::abs(e.values(n - 1)) ? 0 : n - 1;
  SupportPartialTransposeTop out;
  out.op_norm = std::abs(e.values(idx));
  out.vector = e.vectors.col(idx);
  out.schmidt_rank = schmidt_rank(out.vector, rho.shape());
  return out;
}

// ---------------------------------------------------------------------------
// Closest PPT state of the rho_r family

HermitianOperator g_map(const BipartiteState& sigma) {
  const auto e = eig_hermitian(sigma.op());
  if (e.values(0) <= 0.0) {
    std::ostringstream os;
    os << "G map needs a full-rank state; minimum eigenvalue is "
       << e.values(0);
    throw DomainError(os.str());
  }
  const CVector phi = kernel_vector(partial_transpose(sigma.op(), sigma.shape()));
  const CMatrix big_phi =
      partial_transpose(CMatrix(phi * phi.adjoint()), sigma.shape());
  const int n = sigma.dim();
  RMatrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = divided_difference_log(e.values(i), e.values(j));
    }
  }
  const CMatrix inner = e.vectors.adjoint() * big_phi * e.vectors;
  const CMatrix out =
      e.vectors * inner.cwiseProduct(g.cast<Complex>()) * e.vectors.adjoint();
  return HermitianOperator(0.5 * (out + out.adjoint()));
}

double css_defect(double r) {
  const auto sigma = sigma_r({r});
  const auto rho = rho_r({r});
  const CMatrix d = sigma.matrix() - 1.5 * g_map(sigma).matrix() - rho.matrix();
  return trace_norm(HermitianOperator(0.5 * (d + d.adjoint())));
}

MeasureResult rains_closed_form(double r, LogBase base) {
  const auto rho = rho_r({r});
  const auto sigma = sigma_r({r});
  const double defect = css_defect(r);
  if (!(defect <= kCssDefectTol)) {
    std::ostringstream os;
    os << "closed-form Rains value at r = " << r
       << " is not certified: closest-state identity defect " << defect
       << " exceeds " << kCssDefectTol;
    throw CertificationError(os.str());
  }
  MeasureResult out;
  out.kind = MeasureKind::kRainsClosedForm;
  out.base = base;
  out.value = relative_entropy(rho, sigma, base);
  out.certificate = sigma.op();
  std::ostringstream os;
  os << "closest-state identity defect " << defect;
  out.notes = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// Conditional gradient

LinearOracleResult fw_linear_oracle(const HermitianOperator& g,
                                    BipartiteShape shape,
                                    const SolverConfig& solver) {
  const int n = g.dim();
  if (shape.dim() != n) {
    throw ShapeError("linear oracle: gradient dimension does not match shape");
  }
  // The minimizer is invariant under positive scaling of G.
  const double scale = std::max(op_norm(g), std::numeric_limits<double>::min());
  ConicProgram p;
  const auto d = p.add_variable("D", n);
  p.set_objective(Sense::kMinimize, {{d, g.matrix() / scale}});
  p.add_equality({{d, identity(n)}}, 1.0, "tr D = 1");
  p.add_psd(AffineExpr::zero(n).add(Term::of(d)), "D >= 0");
  p.add_psd(AffineExpr::zero(n).add(Term::partial_transpose(d, shape)),
            "D^T_B >= 0");
  const ConicSolution s = solve(p, solver);
  const bool usable =
      s.optimal() ||
      ((s.status == ConicStatus::kMaxIter ||
        s.status == ConicStatus::kNumericalFailure) &&
       s.gap <= kOracleAcceptTol * (1.0 + std::abs(s.primal_value)) &&
       s.max_equality_residual <= kOracleAcceptTol);
  if (!usable) {
    throw SolverError(std::string("linear oracle: solver returned ") +
                      to_string(s.status) + ": " + s.message);
  }

  // Shift onto the feasible set exactly: D + c I stays PPT-compatible since
  // (c I)^T_B = c I.
  CMatrix atom = s.values[0].matrix();
  const double lmin = eig_hermitian(atom).values(0);
  const double lmin_pt = eig_hermitian(partial_transpose(atom, shape)).values(0);
  const double shift = std::max(0.0, -std::min(lmin, lmin_pt));
  atom += shift * identity(n);
  atom /= atom.trace().real();
  atom = 0.5 * (atom + atom.adjoint()).eval();

  LinearOracleResult out{BipartiteState(HermitianOperator(atom), shape),
                         (g.matrix() * atom).trace().real(),
                         SolverStats::from(s)};
  return out;
}

namespace {

// Eigensystem of a full-rank iterate and the pieces of f(sigma) =
// S(rho || sigma) that depend on it.
struct Iterate {
  RVector lambda;
  CMatrix v;
  CMatrix rho_tilde;  // V^dag rho V
  RMatrix gamma;      // 1 / logarithmic mean of eigenvalue pairs
};

Iterate analyse(const CMatrix& sigma, const CMatrix& rho) {
  Iterate it;
  auto e = eig_hermitian(sigma);
  if (e.values(0) <= 0.0) {
    std::ostringstream os;
    os << "iterate lost full rank (minimum eigenvalue " << e.values(0) << ")";
    throw DomainError(os.str());
  }
  it.lambda = std::move(e.values);
  it.v = std::move(e.vectors);
  it.rho_tilde = it.v.adjoint() * rho * it.v;
  const int n = static_cast<int>(it.lambda.size());
  it.gamma.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      it.gamma(i, j) = it.gamma(j, i) =
          1.0 / divided_difference_log(it.lambda(i), it.lambda(j));
    }
  }
  return it;
}

double objective(const Iterate& it, double rho_neg_entropy) {
  double cross = 0.0;
  for (int j = 0; j < it.lambda.size(); ++j) {
    cross += it.rho_tilde(j, j).real() * std::log(it.lambda(j));
  }
  return rho_neg_entropy - cross;
}

CMatrix gradient(const Iterate& it) {
  return -(it.v * it.rho_tilde.cwiseProduct(it.gamma.cast<Complex>()) *
           it.v.adjoint());
}

// d/dt f(sigma + t d) at the analysed point.
double directional_derivative(const Iterate& it, const CMatrix& d) {
  const CMatrix dt = it.v.adjoint() * d * it.v;
  double s = 0.0;
  for (int i = 0; i < dt.rows(); ++i) {
    for (int j = 0; j < dt.cols(); ++j) {
      s += it.gamma(i, j) * (it.rho_tilde(i, j) * std::conj(dt(i, j))).real();
    }
  }
  return -s;
}

// Minimizer of the convex t -> f(sigma + t d) on [0, t_max].
double line_search(const CMatrix& sigma, const CMatrix& d, double t_max,
                   const CMatrix& rho) {
  if (t_max <= 0.0) return 0.0;
  auto dphi = [&](double t) {
    return directional_derivative(analyse(sigma + t * d, rho), d);
  };
  const double d0 = dphi(0.0);
  if (d0 >= 0.0) return 0.0;
  const double d1 = dphi(t_max);
  if (d1 <= 0.0) return t_max;
  boost::math::tools::eps_tolerance<double> tol(48);
  std::uintmax_t max_iter = 100;
  const auto bracket = boost::math::tools::toms748_solve(dphi, 0.0, t_max, d0,
                                                         d1, tol, max_iter);
  // The lower end keeps phi'(t) <= 0, so the step never overshoots.
  return bracket.first;
}

BipartiteState to_state(const CMatrix& sigma, BipartiteShape shape) {
  CMatrix s = 0.5 * (sigma + sigma.adjoint());
  s /= s.trace().real();
  return BipartiteState(HermitianOperator(s), shape);
}

}  // namespace

HermitianOperator relative_entropy_gradient(const BipartiteState& rho,
                                            const CMatrix& sigma) {
  return HermitianOperator(gradient(analyse(sigma, rho.matrix())), 1e-8);
}

ReeUpperResult ree_upper(const BipartiteState& rho, const FwConfig& cfg) {
  const int n = rho.dim();
  const auto shape = rho.shape();
  const CMatrix& rmat = rho.matrix();
  const double rho_neg_entropy = neg_entropy(eig_hermitian(rho.op()).values);
  const double gap_tol = cfg.gap_bits * std::numbers::ln2;
  const double floor_weight = n * cfg.lambda_floor;

  // sigma = sum_a w_a atoms_a; atom 0 is I / n and keeps sigma full rank.
  std::vector<CMatrix> atoms{identity(n) / n};
  std::vector<double> weights{1.0};
  CMatrix sigma = atoms[0];

  ReeUpperResult out;
  FWTrace& trace = out.trace;
  double last_step = 0.0;
  std::string stop_reason = "iteration limit reached";

  for (int k = 0;; ++k) {
    Iterate it = analyse(sigma, rmat);
    const double value = objective(it, rho_neg_entropy);
    const CMatrix grad = gradient(it);

    std::optional<LinearOracleResult> oracle;
    try {
      oracle = fw_linear_oracle(
          HermitianOperator(0.5 * (grad + grad.adjoint())), shape, cfg.oracle);
    } catch (const SolverError& e) {
      stop_reason = e.what();
      trace.iterations.push_back(
          {from_nats(value, LogBase::kTwo),
           std::numeric_limits<double>::quiet_NaN(), last_step});
      break;
    }
    ++trace.oracle_calls;
    const double fw_gap = (grad * sigma).trace().real() - oracle->value;
    trace.iterations.push_back({from_nats(value, LogBase::kTwo),
                                from_nats(fw_gap, LogBase::kTwo), last_step});
    if (fw_gap <= gap_tol) {
      trace.converged = true;
      stop_reason = "Frank-Wolfe gap below tolerance";
      break;
    }
    if (k >= cfg.max_iters) break;

    const CMatrix& atom = oracle->atom.matrix();
    if (cfg.variant == FwVariant::kVanilla) {
      const double t =
          line_search(sigma, atom - sigma, 1.0 - cfg.lambda_floor, rmat);
      sigma += t * (atom - sigma);
      last_step = t;
      continue;
    }

    atoms.push_back(atom);
    weights.push_back(0.0);
    for (int inner = 0; inner < cfg.inner_max_iters; ++inner) {
      const CMatrix g = inner == 0 ? grad : gradient(analyse(sigma, rmat));
      int s_idx = 0;
      int v_idx = -1;
      double g_s = std::numeric_limits<double>::infinity();
      double g_v = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        const double ga = (g * atoms[a]).trace().real();
        if (ga < g_s) {
          g_s = ga;
          s_idx = static_cast<int>(a);
        }
        const double avail = a == 0 ? weights[0] - floor_weight : weights[a];
        if (avail > 0.0 && ga > g_v) {
          g_v = ga;
          v_idx = static_cast<int>(a);
        }
      }
      if (v_idx < 0 || v_idx == s_idx ||
          g_v - g_s <= cfg.inner_gap_ratio * fw_gap) {
        break;
      }
      const double avail =
          v_idx == 0 ? weights[0] - floor_weight : weights[v_idx];
      const CMatrix d = atoms[s_idx] - atoms[v_idx];
      const double t = line_search(sigma, d, avail, rmat);
      if (t <= 0.0) break;
      weights[s_idx] += t;
      weights[v_idx] = (t >= avail) ? (v_idx == 0 ? floor_weight : 0.0)
                                    : weights[v_idx] - t;
      sigma += t * d;
    }
    last_step = weights.back();

    // Drop atoms without weight and rebuild sigma from the weights.
    std::vector<CMatrix> kept_atoms{atoms[0]};
    std::vector<double> kept_weights{weights[0]};
    for (std::size_t a = 1; a < atoms.size(); ++a) {
      if (weights[a] > 0.0) {
        kept_atoms.push_back(std::move(atoms[a]));
        kept_weights.push_back(weights[a]);
      }
    }
    atoms = std::move(kept_atoms);
    weights = std::move(kept_weights);
    double total = 0.0;
    for (double w : weights) total += w;
    sigma = CMatrix::Zero(n, n);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      weights[a] /= total;
      sigma += weights[a] * atoms[a];
    }
  }

  trace.final_sigma = to_state(sigma, shape);
  MeasureResult& m = out.measure;
  m.kind = MeasureKind::kREEUpper;
  m.base = cfg.base;
  m.value = relative_entropy(rho, *trace.final_sigma, cfg.base);
  if (!trace.iterations.empty()) {
    m.error_bar = from_nats(
        std::max(0.0, trace.iterations.back().fw_gap_bits * std::numbers::ln2),
        cfg.base);
  }
  m.certificate = trace.final_sigma->op();
  std::ostringstream os;
  os << stop_reason << "; " << trace.iterations.size() << " iterations, "
     << trace.oracle_calls << " oracle calls";
  m.notes = os.str();
  return out;
}

NonadditivityReport nonadditivity_experiment(double r, const FwConfig& cfg) {
  NonadditivityReport rep;
  rep.r = r;
  rep.base = cfg.base;
  rep.rains = rains_closed_form(r, cfg.base);
  rep.two_rains = 2.0 * rep.rains.value;
  const auto rho = rho_r({r});
  rep.tensor2 = ree_upper(tensor_states(rho, rho), cfg);
  rep.gap = rep.two_rains - rep.tensor2.measure.value;

  const auto& sigma = *rep.tensor2.trace.final_sigma;
  rep.certificate_min_eigenvalue = eig_hermitian(sigma.op()).values(0);
  rep.certificate_min_pt_eigenvalue =
      eig_hermitian(partial_transpose(sigma.op(), sigma.shape())).values(0);
  rep.certificate_trace_error = std::abs(sigma.op().trace() - 1.0);
  return rep;
}

}  // namespace sdpent
