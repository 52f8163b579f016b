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

// Declarative semidefinite programs over complex Hermitian variables.
//
// A ConicProgram has Hermitian matrix variables (dimension 1 gives a real
// scalar), a real linear objective sum_k tr(C_k X_k), linear equalities of
// the same shape, and PSD constraints on affine Hermitian expressions. The
// expressions are built from Terms: a variable, optionally mapped by a
// congruence K X K^dag or scaled into t * I, optionally partially transposed.
//
// solve() compiles the program to a real block SDP (see interior_point.hpp)
// through the real embedding H = A + iB -> [[A, -B], [B, A]]. Two
// compilations exist:
//
//  * LMI form. Every real coordinate of every variable becomes a free dual
//    variable y, each PSD constraint becomes a slack block of (D), and
//    equalities are eliminated by pivoting. Schur size: #coordinates - #eqs.
//  * Standard form. Requires each variable to carry a bare `X >= 0`
//    constraint; those variables become blocks of (P), other PSD constraints
//    get slack blocks tied by equalities. Schur size: #eqs + #slack coords.
//
// The automatic choice takes the smaller Schur complement. An embedded
// block pairs with a Hermitian matrix through <emb(H), emb(X)> = 2 Re tr(HX),
// so standard-form data carries a factor 1/2; this file is the only place
// that knows about it.

#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdpent/interior_point.hpp"
#include "sdpent/linalg.hpp"

namespace sdpent {

enum class Sense { kMinimize, kMaximize };

struct VariableId {
  int index = -1;
};

class Term {
 public:
  static Term of(VariableId v, double coef = 1.0);
  static Term partial_transpose(VariableId v, BipartiteShape shape,
                                double coef = 1.0);
  // t * I_dim for a scalar variable t.
  static Term scaled_identity(VariableId v, int dim, double coef = 1.0);
  // K X K^dag.
  static Term congruence(VariableId v, const CMatrix& k, double coef = 1.0);

  // Appends a partial transpose on B to the map.
  Term then_partial_transpose(BipartiteShape shape) const;

  VariableId variable() const { return var_; }
  double coefficient() const { return coef_; }
  bool is_bare() const;

  // Output dimension for a variable of dimension var_dim; BuildError if the
  // map does not accept that dimension.
  int output_dim(int var_dim) const;
  CMatrix apply(const CMatrix& x) const;
  CMatrix adjoint(const CMatrix& y) const;

 private:
  VariableId var_;
  double coef_ = 1.0;
  std::optional<CMatrix> congruence_;
  int identity_dim_ = 0;
  std::optional<BipartiteShape> pt_;
};

struct AffineExpr {
  CMatrix constant;  // Hermitian; fixes the expression's dimension
  std::vector<Term> terms;

  static AffineExpr zero(int dim);
  static AffineExpr with_constant(const CMatrix& c);
  AffineExpr& add(Term t) {
    terms.push_back(std::move(t));
    return *this;
  }
  int dim() const { return static_cast<int>(constant.rows()); }
};

// tr(coefficient * X_var).
struct TraceTerm {
  VariableId var;
  CMatrix coefficient;
};
using TraceFunctional = std::vector<TraceTerm>;

// Convenience for tr(coef * t) with t a scalar variable.
TraceTerm scalar_term(VariableId v, double coef = 1.0);

class ConicProgram {
 public:
  struct Variable {
    std::string name;
    int dim;
  };
  struct Equality {
    TraceFunctional lhs;
    double rhs;
    std::string label;
  };
  struct PsdConstraint {
    AffineExpr expr;
    std::string label;
  };

  VariableId add_variable(std::string name, int dim);
  void set_objective(Sense sense, TraceFunctional f, double offset = 0.0);
  void add_equality(TraceFunctional f, double rhs, std::string label = {});
  void add_psd(AffineExpr expr, std::string label = {});

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Equality>& equalities() const { return eqs_; }
  const std::vector<PsdConstraint>& psd_constraints() const { return psd_; }
  Sense sense() const { return sense_; }
  const TraceFunctional& objective() const { return objective_; }
  double objective_offset() const { return offset_; }
  int num_coordinates() const;

  // Evaluates tr-functionals and affine expressions at given variable values.
  double evaluate(const TraceFunctional& f,
                  const std::vector<CMatrix>& values) const;
  CMatrix evaluate(const AffineExpr& e,
                   const std::vector<CMatrix>& values) const;

 private:
  void check_functional(const TraceFunctional& f) const;

  std::vector<Variable> vars_;
  std::vector<Equality> eqs_;
  std::vector<PsdConstraint> psd_;
  Sense sense_ = Sense::kMinimize;
  TraceFunctional objective_;
  double offset_ = 0.0;
};

enum class EngineForm { kAuto, kLmi, kStandard };

const char* to_string(EngineForm form);

struct SolverConfig {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  int verbosity = 0;
  EngineForm form = EngineForm::kAuto;
};

enum class ConicStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kMaxIter,
  kNumericalFailure,
};

const char* to_string(ConicStatus status);

struct ConicSolution {
  ConicStatus status = ConicStatus::kNumericalFailure;
  double primal_value = 0.0;  // the program's own objective
  double dual_value = 0.0;    // objective of its conic dual
  double gap = 0.0;
  std::vector<HermitianOperator> values;  // per variable
  // Multiplier Z_k >= 0 of each PSD constraint G_k >= 0, normalized so the
  // Lagrangian reads objective -/+ sum_k Re tr(Z_k G_k).
  std::vector<HermitianOperator> constraint_duals;
  double max_equality_residual = 0.0;
  double min_psd_eigenvalue = 0.0;
  int iterations = 0;
  std::chrono::duration<double> wall_time{0.0};
  EngineForm form = EngineForm::kAuto;
  int schur_size = 0;
  std::string message;

  bool optimal() const { return status == ConicStatus::kOptimal; }
  const HermitianOperator& value(VariableId v) const {
    return values.at(v.index);
  }
};

// The compiled engine problem plus what is needed to map results back.
struct CompiledProgram {
  EngineForm form = EngineForm::kLmi;
  BlockSdp sdp;
  // Set when the equalities alone decide the outcome (inconsistent system or
  // an objective direction untouched by any constraint).
  std::optional<ConicStatus> presolved;
  std::string presolve_message;

  // LMI form. Engine variable j is coordinate free_coords[j]; coordinates
  // eliminated by equalities satisfy y[pivot_coords[r]] =
  // pivot_rhs[r] - pivot_rows.row(r) . y; all others are zero.
  std::vector<int> free_coords;
  std::vector<int> pivot_coords;
  RMatrix pivot_rows;
  RVector pivot_rhs;
  double engine_offset = 0.0;  // added to both engine objectives
  // Standard form: block index of each variable.
  std::vector<int> var_block;
  std::vector<int> constraint_block;  // engine block of each PSD constraint
  double value_offset = 0.0;
  double value_sign = 1.0;  // user value = sign * engine value + offset
};

CompiledProgram compile(const ConicProgram& program,
                        EngineForm form = EngineForm::kAuto);

ConicSolution solve(const ConicProgram& program, const SolverConfig& cfg = {});

RMatrix real_embedding(const CMatrix& h);
RMatrix real_embedding(const HermitianOperator& h);
// Hermitian matrix represented by a (possibly unstructured) embedded block:
// (P + T) / 2 + i (R - Q) / 2 for blocks [[P, Q], [R, T]].
CMatrix real_unembedding(const RMatrix& m);

// SDPA sparse text format of the compiled engine problem (see README).
void write_sdpa(const ConicProgram& program, std::ostream& out,
                EngineForm form = EngineForm::kAuto);

}  // namespace sdpent
