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

#include "sdpent/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "sdpent/errors.hpp"

namespace sdpent {

const char* to_string(EngineForm form) {
  switch (form) {
    case EngineForm::kAuto:
      return "auto";
    case EngineForm::kLmi:
      return "lmi";
    case EngineForm::kStandard:
      return "standard";
  }
  return "unknown";
}

const char* to_string(ConicStatus status) {
  switch (status) {
    case ConicStatus::kOptimal:
      return "optimal";
    case ConicStatus::kInfeasible:
      return "infeasible";
    case ConicStatus::kUnbounded:
      return "unbounded";
    case ConicStatus::kMaxIter:
      return "max-iter";
    case ConicStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Terms and expressions

Term Term::of(VariableId v, double coef) {
  Term t;
  t.var_ = v;
  t.coef_ = coef;
  return t;
}

Term Term::partial_transpose(VariableId v, BipartiteShape shape, double coef) {
  return of(v, coef).then_partial_transpose(shape);
}

Term Term::scaled_identity(VariableId v, int dim, double coef) {
  if (dim < 1) throw BuildError("scaled identity needs a positive dimension");
  Term t = of(v, coef);
  t.identity_dim_ = dim;
  return t;
}

Term Term::congruence(VariableId v, const CMatrix& k, double coef) {
  Term t = of(v, coef);
  t.congruence_ = k;
  return t;
}

Term Term::then_partial_transpose(BipartiteShape shape) const {
  if (pt_) throw BuildError("term already carries a partial transpose");
  Term t = *this;
  t.pt_ = shape;
  return t;
}

bool Term::is_bare() const {
  return !congruence_ && identity_dim_ == 0 && !pt_ && coef_ > 0.0;
}

int Term::output_dim(int var_dim) const {
  int out = var_dim;
  if (identity_dim_ > 0) {
    if (var_dim != 1) {
      throw BuildError("scaled identity applies to scalar variables only");
    }
    out = identity_dim_;
  } else if (congruence_) {
    if (congruence_->cols() != var_dim) {
      throw BuildError("congruence matrix does not match variable dimension");
    }
    out = static_cast<int>(congruence_->rows());
  }
  if (pt_ && pt_->dim() != out) {
    throw BuildError("partial transpose shape does not match term dimension");
  }
  return out;
}

CMatrix Term::apply(const CMatrix& x) const {
  CMatrix y;
  if (identity_dim_ > 0) {
    y = x(0, 0).real() * CMatrix::Identity(identity_dim_, identity_dim_);
  } else if (congruence_) {
    y = (*congruence_) * x * congruence_->adjoint();
  } else {
    y = x;
  }
  y *= coef_;
  if (pt_) y = sdpent::partial_transpose(y, *pt_);
  return y;
}

CMatrix Term::adjoint(const CMatrix& y) const {
  CMatrix z = pt_ ? sdpent::partial_transpose(y, *pt_) : y;
  if (identity_dim_ > 0) {
    CMatrix s(1, 1);
    s(0, 0) = z.trace().real();
    z = s;
  } else if (congruence_) {
    z = congruence_->adjoint() * z * (*congruence_);
  }
  return coef_ * z;
}

AffineExpr AffineExpr::zero(int dim) {
  return AffineExpr{CMatrix::Zero(dim, dim), {}};
}

AffineExpr AffineExpr::with_constant(const CMatrix& c) {
  return AffineExpr{c, {}};
}

TraceTerm scalar_term(VariableId v, double coef) {
  return TraceTerm{v, CMatrix::Constant(1, 1, Complex(coef, 0.0))};
}

// ---------------------------------------------------------------------------
// Program

namespace {

bool is_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

VariableId ConicProgram::add_variable(std::string name, int dim) {
  if (dim < 1) throw BuildError("variable '" + name + "' needs dimension >= 1");
  vars_.push_back({std::move(name), dim});
  return VariableId{static_cast<int>(vars_.size()) - 1};
}

void ConicProgram::check_functional(const TraceFunctional& f) const {
  for (const auto& t : f) {
    if (t.var.index < 0 || t.var.index >= static_cast<int>(vars_.size())) {
      throw BuildError("linear functional references an unknown variable");
    }
    const int n = vars_[t.var.index].dim;
    if (t.coefficient.rows() != n || t.coefficient.cols() != n) {
      throw BuildError("coefficient of variable '" + vars_[t.var.index].name +
                       "' has the wrong dimension");
    }
    if (!is_hermitian(t.coefficient)) {
      throw BuildError("coefficient of variable '" + vars_[t.var.index].name +
                       "' is not Hermitian");
    }
  }
}

void ConicProgram::set_objective(Sense sense, TraceFunctional f,
                                 double offset) {
  check_functional(f);
  sense_ = sense;
  objective_ = std::move(f);
  offset_ = offset;
}

void ConicProgram::add_equality(TraceFunctional f, double rhs,
                                std::string label) {
  check_functional(f);
  eqs_.push_back({std::move(f), rhs, std::move(label)});
}

void ConicProgram::add_psd(AffineExpr expr, std::string label) {
  if (expr.constant.rows() < 1 || !is_hermitian(expr.constant)) {
    throw BuildError("PSD constraint '" + label +
                     "' needs a square Hermitian constant");
  }
  for (const auto& t : expr.terms) {
    const int v = t.variable().index;
    if (v < 0 || v >= static_cast<int>(vars_.size())) {
      throw BuildError("PSD constraint '" + label +
                       "' references an unknown variable");
    }
    if (t.output_dim(vars_[v].dim) != expr.dim()) {
      std::ostringstream os;
      os << "PSD constraint '" << label << "' has dimension " << expr.dim()
         << " but a term on '" << vars_[v].name << "' has dimension "
         << t.output_dim(vars_[v].dim);
      throw BuildError(os.str());
    }
  }
  psd_.push_back({std::move(expr), std::move(label)});
}

int ConicProgram::num_coordinates() const {
  int n = 0;
  for (const auto& v : vars_) n += v.dim * v.dim;
  return n;
}

double ConicProgram::evaluate(const TraceFunctional& f,
                              const std::vector<CMatrix>& values) const {
  double s = 0.0;
  for (const auto& t : f) {
    s += (t.coefficient * values[t.var.index]).trace().real();
  }
  return s;
}

CMatrix ConicProgram::evaluate(const AffineExpr& e,
                               const std::vector<CMatrix>& values) const {
  CMatrix out = e.constant;
  for (const auto& t : e.terms) out += t.apply(values[t.variable().index]);
  return out;
}

// ---------------------------------------------------------------------------
// Real embedding

RMatrix real_embedding(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

RMatrix real_embedding(const HermitianOperator& h) {
  return real_embedding(h.matrix());
}

CMatrix real_unembedding(const RMatrix& m) {
  const Eigen::Index n = m.rows() / 2;
  const RMatrix re = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
  const RMatrix im = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
  CMatrix out(n, n);
  out.real() = 0.5 * (re + re.transpose());
  out.imag() = 0.5 * (im - im.transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

// Real coordinates of an n x n Hermitian matrix: the n diagonal entries, then
// Re and Im of each strictly upper entry.
struct Coord {
  int k;
  int l;
  enum Kind { kDiag, kRe, kIm } kind;
};

std::vector<Coord> hermitian_coords(int n) {
  std::vector<Coord> out;
  out.reserve(n * n);
  for (int k = 0; k < n; ++k) out.push_back({k, k, Coord::kDiag});
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      out.push_back({k, l, Coord::kRe});
      out.push_back({k, l, Coord::kIm});
    }
  }
  return out;
}

// X = sum_c x_c E_c.
CMatrix basis_matrix(int n, const Coord& c) {
  CMatrix e = CMatrix::Zero(n, n);
  switch (c.kind) {
    case Coord::kDiag:
      e(c.k, c.k) = 1.0;
      break;
    case Coord::kRe:
      e(c.k, c.l) = e(c.l, c.k) = 1.0;
      break;
    case Coord::kIm:
      e(c.k, c.l) = Complex(0.0, 1.0);
      e(c.l, c.k) = Complex(0.0, -1.0);
      break;
  }
  return e;
}

// B_c with Re tr(H B_c) = x_c(H).
CMatrix coordinate_dual(int n, const Coord& c) {
  CMatrix b = CMatrix::Zero(n, n);
  switch (c.kind) {
    case Coord::kDiag:
      b(c.k, c.k) = 1.0;
      break;
    case Coord::kRe:
      b(c.k, c.l) = b(c.l, c.k) = 0.5;
      break;
    case Coord::kIm:
      b(c.k, c.l) = Complex(0.0, 0.5);
      b(c.l, c.k) = Complex(0.0, -0.5);
      break;
  }
  return b;
}

double coordinate_value(const CMatrix& h, const Coord& c) {
  switch (c.kind) {
    case Coord::kDiag:
      return h(c.k, c.k).real();
    case Coord::kRe:
      return h(c.k, c.l).real();
    case Coord::kIm:
      return h(c.k, c.l).imag();
  }
  return 0.0;
}

// Re tr(C E_c) for every coordinate c.
RVector coordinate_functional(const CMatrix& coef) {
  const int n = static_cast<int>(coef.rows());
  const auto coords = hermitian_coords(n);
  RVector out(n * n);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    switch (c.kind) {
      case Coord::kDiag:
        out(i) = coef(c.k, c.k).real();
        break;
      case Coord::kRe:
        out(i) = coef(c.l, c.k).real() + coef(c.k, c.l).real();
        break;
      case Coord::kIm:
        out(i) = -coef(c.l, c.k).imag() + coef(c.k, c.l).imag();
        break;
    }
  }
  return out;
}

CMatrix from_coordinates(const double* x, int n) {
  const auto coords = hermitian_coords(n);
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    switch (c.kind) {
      case Coord::kDiag:
        out(c.k, c.k) = x[i];
        break;
      case Coord::kRe:
        out(c.k, c.l) += x[i];
        out(c.l, c.k) += x[i];
        break;
      case Coord::kIm:
        out(c.k, c.l) += Complex(0.0, x[i]);
        out(c.l, c.k) -= Complex(0.0, x[i]);
        break;
    }
  }
  return out;
}

// Appends scale * emb(h) to a constraint's entry list, nonzeros only.
void emit_embedded(std::vector<SdpEntry>& out, int block, const CMatrix& h,
                   double scale) {
  const int d = static_cast<int>(h.rows());
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double re = scale * h(a, b).real();
      const double im = scale * h(a, b).imag();
      if (re != 0.0) {
        out.push_back({block, a, b, re});
        out.push_back({block, a + d, b + d, re});
      }
      if (im != 0.0) {
        out.push_back({block, a + d, b, im});
        out.push_back({block, a, b + d, -im});
      }
    }
  }
}

struct Layout {
  std::vector<int> offset;
  int total = 0;
};

Layout coordinate_layout(const ConicProgram& p) {
  Layout l;
  for (const auto& v : p.variables()) {
    l.offset.push_back(l.total);
    l.total += v.dim * v.dim;
  }
  return l;
}

RVector objective_vector(const ConicProgram& p, const Layout& layout) {
  RVector c = RVector::Zero(layout.total);
  for (const auto& t : p.objective()) {
    c.segment(layout.offset[t.var.index], t.coefficient.size()) +=
        coordinate_functional(t.coefficient);
  }
  return c;
}

// For each variable, the first bare `X >= 0` constraint on it, or -1.
std::vector<int> bare_constraints(const ConicProgram& p) {
  std::vector<int> out(p.variables().size(), -1);
  const auto& psd = p.psd_constraints();
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const auto& e = psd[i].expr;
    if (e.terms.size() == 1 && e.terms[0].is_bare() &&
        e.constant.cwiseAbs().maxCoeff() == 0.0) {
      const int v = e.terms[0].variable().index;
      if (out[v] < 0) out[v] = static_cast<int>(i);
    }
  }
  return out;
}

void compile_lmi(const ConicProgram& p, CompiledProgram& out) {
  const Layout layout = coordinate_layout(p);
  const auto& psd = p.psd_constraints();
  const int ny = layout.total;

  BlockSdp full;
  full.a.resize(ny);
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const auto& e = psd[i].expr;
    const int d = e.dim();
    full.block_dims.push_back(2 * d);
    full.c.push_back(real_embedding(e.constant));
    out.constraint_block.push_back(static_cast<int>(i));
    for (const auto& t : e.terms) {
      const int v = t.variable().index;
      const int n = p.variables()[v].dim;
      const auto coords = hermitian_coords(n);
      for (std::size_t c = 0; c < coords.size(); ++c) {
        emit_embedded(full.a[layout.offset[v] + c], static_cast<int>(i),
                      t.apply(basis_matrix(n, coords[c])), -1.0);
      }
    }
  }
  const double sign = p.sense() == Sense::kMaximize ? 1.0 : -1.0;
  full.b = sign * objective_vector(p, layout);
  out.value_sign = sign;
  out.value_offset = p.objective_offset();

  // Reduce the equality system to echelon form with row pivoting.
  const int neq = static_cast<int>(p.equalities().size());
  RMatrix E = RMatrix::Zero(neq, ny);
  RVector e = RVector::Zero(neq);
  for (int r = 0; r < neq; ++r) {
    for (const auto& t : p.equalities()[r].lhs) {
      E.row(r).segment(layout.offset[t.var.index], t.coefficient.size()) +=
          coordinate_functional(t.coefficient).transpose();
    }
    e(r) = p.equalities()[r].rhs;
  }
  std::vector<int> pivot_rows_used;
  std::vector<int> pivots;
  for (int r = 0; r < neq; ++r) {
    const double row_scale = std::max(1.0, E.row(r).cwiseAbs().maxCoeff());
    Eigen::Index j = 0;
    const double best = E.row(r).cwiseAbs().maxCoeff(&j);
    if (best <= 1e-12 * row_scale) {
      if (std::abs(e(r)) > 1e-10 * std::max(1.0, std::abs(e(r)))) {
        out.presolved = ConicStatus::kInfeasible;
        out.presolve_message = "equality constraints are inconsistent";
        return;
      }
      E.row(r).setZero();
      e(r) = 0.0;
      continue;
    }
    const double piv = E(r, j);
    E.row(r) /= piv;
    e(r) /= piv;
    for (int q = 0; q < neq; ++q) {
      if (q == r || E(q, j) == 0.0) continue;
      const double f = E(q, j);
      E.row(q) -= f * E.row(r);
      e(q) -= f * e(r);
      E(q, j) = 0.0;
    }
    pivot_rows_used.push_back(r);
    pivots.push_back(static_cast<int>(j));
  }
  const int npiv = static_cast<int>(pivots.size());
  out.pivot_coords = pivots;
  out.pivot_rows = RMatrix::Zero(npiv, ny);
  out.pivot_rhs = RVector::Zero(npiv);
  std::vector<bool> is_pivot(ny, false);
  for (int r = 0; r < npiv; ++r) {
    out.pivot_rows.row(r) = E.row(pivot_rows_used[r]);
    out.pivot_rows(r, pivots[r]) = 0.0;
    out.pivot_rhs(r) = e(pivot_rows_used[r]);
    is_pivot[pivots[r]] = true;
  }

  // Substitute y_p = rhs_r - row_r . y into C, A and b.
  out.sdp.block_dims = full.block_dims;
  out.sdp.c = full.c;
  out.engine_offset = 0.0;
  for (int r = 0; r < npiv; ++r) {
    const int pc = pivots[r];
    const double rhs = out.pivot_rhs(r);
    for (const auto& en : full.a[pc]) {
      out.sdp.c[en.block](en.row, en.col) -= rhs * en.value;
    }
    out.engine_offset += full.b(pc) * rhs;
  }
  std::vector<double> bvals;
  for (int j = 0; j < ny; ++j) {
    if (is_pivot[j]) continue;
    std::vector<SdpEntry> entries = full.a[j];
    double bj = full.b(j);
    for (int r = 0; r < npiv; ++r) {
      const double f = out.pivot_rows(r, j);
      if (f == 0.0) continue;
      for (auto en : full.a[pivots[r]]) {
        en.value *= -f;
        entries.push_back(en);
      }
      bj -= f * full.b(pivots[r]);
    }
    if (entries.empty()) {
      if (std::abs(bj) > 1e-14) {
        out.presolved = ConicStatus::kUnbounded;
        out.presolve_message =
            "objective improves along a direction no constraint restricts";
        return;
      }
      continue;
    }
    out.free_coords.push_back(j);
    out.sdp.a.push_back(std::move(entries));
    bvals.push_back(bj);
  }
  out.sdp.b = Eigen::Map<RVector>(bvals.data(), static_cast<Eigen::Index>(bvals.size()));
}

void compile_standard(const ConicProgram& p, const std::vector<int>& bare,
                      CompiledProgram& out) {
  const auto& vars = p.variables();
  const auto& psd = p.psd_constraints();
  BlockSdp& sdp = out.sdp;
  out.var_block.assign(vars.size(), -1);
  out.constraint_block.assign(psd.size(), -1);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    out.var_block[v] = static_cast<int>(sdp.block_dims.size());
    out.constraint_block[bare[v]] = out.var_block[v];
    sdp.block_dims.push_back(2 * vars[v].dim);
  }
  for (std::size_t i = 0; i < psd.size(); ++i) {
    if (out.constraint_block[i] >= 0) continue;
    out.constraint_block[i] = static_cast<int>(sdp.block_dims.size());
    sdp.block_dims.push_back(2 * psd[i].expr.dim());
  }
  for (int d : sdp.block_dims) sdp.c.push_back(RMatrix::Zero(d, d));

  const double sign = p.sense() == Sense::kMinimize ? 1.0 : -1.0;
  out.value_sign = sign;
  out.value_offset = p.objective_offset();
  for (const auto& t : p.objective()) {
    sdp.c[out.var_block[t.var.index]] += 0.5 * sign * real_embedding(t.coefficient);
  }

  std::vector<double> bvals;
  for (const auto& eq : p.equalities()) {
    std::vector<SdpEntry> row;
    for (const auto& t : eq.lhs) {
      emit_embedded(row, out.var_block[t.var.index], t.coefficient, 0.5);
    }
    sdp.a.push_back(std::move(row));
    bvals.push_back(eq.rhs);
  }
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const int blk = out.constraint_block[i];
    const auto& e = psd[i].expr;
    if (!e.terms.empty() && bare[e.terms[0].variable().index] == static_cast<int>(i)) {
      continue;
    }
    // expr(X) - W = 0, one row per real coordinate.
    const int d = e.dim();
    const auto coords = hermitian_coords(d);
    for (const auto& c : coords) {
      const CMatrix bc = coordinate_dual(d, c);
      std::vector<SdpEntry> row;
      for (const auto& t : e.terms) {
        emit_embedded(row, out.var_block[t.variable().index], t.adjoint(bc), 0.5);
      }
      emit_embedded(row, blk, bc, -0.5);
      sdp.a.push_back(std::move(row));
      bvals.push_back(-coordinate_value(e.constant, c));
    }
  }
  sdp.b = Eigen::Map<RVector>(bvals.data(), static_cast<Eigen::Index>(bvals.size()));
}

}  // namespace

CompiledProgram compile(const ConicProgram& program, EngineForm form) {
  const auto bare = bare_constraints(program);
  const bool standard_ok =
      std::all_of(bare.begin(), bare.end(), [](int b) { return b >= 0; });

  if (form == EngineForm::kAuto) {
    const long neq = static_cast<long>(program.equalities().size());
    const long m_lmi = program.num_coordinates() - neq;
    long m_std = neq;
    const auto& psd = program.psd_constraints();
    for (std::size_t i = 0; i < psd.size(); ++i) {
      if (std::find(bare.begin(), bare.end(), static_cast<int>(i)) != bare.end()) {
        continue;
      }
      m_std += static_cast<long>(psd[i].expr.dim()) * psd[i].expr.dim();
    }
    form = (standard_ok && m_std < m_lmi) ? EngineForm::kStandard
                                          : EngineForm::kLmi;
  }
  if (form == EngineForm::kStandard && !standard_ok) {
    throw BuildError(
        "standard form needs a bare `X >= 0` constraint on every variable");
  }

  CompiledProgram out;
  out.form = form;
  if (form == EngineForm::kStandard) {
    compile_standard(program, bare, out);
  } else {
    compile_lmi(program, out);
  }
  return out;
}

ConicSolution solve(const ConicProgram& program, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const CompiledProgram cp = compile(program, cfg.form);
  const auto& vars = program.variables();
  const auto& psd = program.psd_constraints();

  ConicSolution sol;
  sol.form = cp.form;
  sol.schur_size = cp.sdp.num_constraints();
  std::vector<CMatrix> values;
  for (const auto& v : vars) values.push_back(CMatrix::Zero(v.dim, v.dim));

  if (cp.presolved) {
    sol.status = *cp.presolved;
    sol.message = cp.presolve_message;
    for (const auto& v : values) sol.values.emplace_back(v);
    sol.wall_time = std::chrono::steady_clock::now() - start;
    return sol;
  }

  IpmSettings settings;
  settings.gap_tol = cfg.gap_tol;
  settings.feas_tol = cfg.feas_tol;
  settings.max_iter = cfg.max_iter;
  settings.verbosity = cfg.verbosity;
  const IpmResult r = solve_block_sdp(cp.sdp, settings);
  sol.iterations = r.iterations;
  sol.message = r.message;

  const bool user_is_dual = cp.form == EngineForm::kLmi;
  switch (r.status) {
    case IpmStatus::kOptimal:
      sol.status = ConicStatus::kOptimal;
      break;
    case IpmStatus::kPrimalInfeasible:
      sol.status = user_is_dual ? ConicStatus::kUnbounded : ConicStatus::kInfeasible;
      break;
    case IpmStatus::kDualInfeasible:
      sol.status = user_is_dual ? ConicStatus::kInfeasible : ConicStatus::kUnbounded;
      break;
    case IpmStatus::kMaxIter:
      sol.status = ConicStatus::kMaxIter;
      break;
    case IpmStatus::kNumericalFailure:
      sol.status = ConicStatus::kNumericalFailure;
      break;
  }

  const Layout layout = coordinate_layout(program);
  std::vector<CMatrix> duals(psd.size());
  if (user_is_dual) {
    RVector y = RVector::Zero(layout.total);
    for (std::size_t j = 0; j < cp.free_coords.size(); ++j) {
      y(cp.free_coords[j]) = r.y(j);
    }
    for (std::size_t q = 0; q < cp.pivot_coords.size(); ++q) {
      y(cp.pivot_coords[q]) = cp.pivot_rhs(q) - cp.pivot_rows.row(q).dot(y);
    }
    for (std::size_t v = 0; v < vars.size(); ++v) {
      values[v] = from_coordinates(y.data() + layout.offset[v], vars[v].dim);
    }
    const double own = r.dual_objective + cp.engine_offset;
    const double other = r.primal_objective + cp.engine_offset;
    sol.primal_value = cp.value_sign * own + cp.value_offset;
    sol.dual_value = cp.value_sign * other + cp.value_offset;
    for (std::size_t i = 0; i < psd.size(); ++i) {
      duals[i] = 2.0 * real_unembedding(r.x[cp.constraint_block[i]]);
    }
  } else {
    for (std::size_t v = 0; v < vars.size(); ++v) {
      values[v] = real_unembedding(r.x[cp.var_block[v]]);
    }
    sol.primal_value = cp.value_sign * r.primal_objective + cp.value_offset;
    sol.dual_value = cp.value_sign * r.dual_objective + cp.value_offset;
    for (std::size_t i = 0; i < psd.size(); ++i) {
      duals[i] = 2.0 * real_unembedding(r.s[cp.constraint_block[i]]);
    }
  }
  sol.gap = std::abs(sol.primal_value - sol.dual_value);

  for (const auto& v : values) {
    sol.values.emplace_back(v, std::numeric_limits<double>::infinity());
  }
  for (const auto& z : duals) {
    sol.constraint_duals.emplace_back(z, std::numeric_limits<double>::infinity());
  }

  sol.max_equality_residual = 0.0;
  for (const auto& eq : program.equalities()) {
    sol.max_equality_residual =
        std::max(sol.max_equality_residual,
                 std::abs(program.evaluate(eq.lhs, values) - eq.rhs));
  }
  sol.min_psd_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& c : psd) {
    const CMatrix g = program.evaluate(c.expr, values);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()),
                                              Eigen::EigenvaluesOnly);
    sol.min_psd_eigenvalue = std::min(sol.min_psd_eigenvalue, es.eigenvalues()(0));
  }
  sol.wall_time = std::chrono::steady_clock::now() - start;
  return sol;
}

void write_sdpa(const ConicProgram& program, std::ostream& out,
                EngineForm form) {
  const CompiledProgram cp = compile(program, form);
  if (cp.presolved) {
    throw BuildError("program was decided during presolve: " +
                     cp.presolve_message);
  }
  const BlockSdp& sdp = cp.sdp;
  char buf[64];
  out << "* sdpent block SDP, " << to_string(cp.form) << " form\n";
  out << sdp.num_constraints() << " = mDIM\n";
  out << sdp.block_dims.size() << " = nBLOCK\n";
  for (std::size_t k = 0; k < sdp.block_dims.size(); ++k) {
    out << (k ? " " : "") << sdp.block_dims[k];
  }
  out << " = bLOCKsTRUCT\n";
  for (int i = 0; i < sdp.num_constraints(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", -sdp.b(i));
    out << (i ? " " : "") << buf;
  }
  out << "\n";
  // SDPA: min c^T x s.t. sum_i F_i x_i - F_0 >= 0, i.e. F_0 = -C, F_i = -A_i.
  auto write_entry = [&](int mat, int blk, int row, int col, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << mat << " " << blk + 1 << " " << row + 1 << " " << col + 1 << " "
        << buf << "\n";
  };
  for (std::size_t k = 0; k < sdp.c.size(); ++k) {
    const RMatrix& c = sdp.c[k];
    for (int i = 0; i < c.rows(); ++i) {
      for (int j = i; j < c.cols(); ++j) {
        if (c(i, j) != 0.0) write_entry(0, static_cast<int>(k), i, j, -c(i, j));
      }
    }
  }
  for (int i = 0; i < sdp.num_constraints(); ++i) {
    std::vector<RMatrix> dense;
    for (int d : sdp.block_dims) dense.push_back(RMatrix::Zero(d, d));
    for (const auto& e : sdp.a[i]) dense[e.block](e.row, e.col) += e.value;
    for (std::size_t k = 0; k < dense.size(); ++k) {
      for (int r = 0; r < dense[k].rows(); ++r) {
        for (int c = r; c < dense[k].cols(); ++c) {
          if (dense[k](r, c) != 0.0) {
            write_entry(i + 1, static_cast<int>(k), r, c, -dense[k](r, c));
          }
        }
      }
    }
  }
}

}  // namespace sdpent
