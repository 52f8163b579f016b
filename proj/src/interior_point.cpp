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

#include "sdpent/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sdpent/errors.hpp"

namespace sdpent {

const char* to_string(IpmStatus status) {
  switch (status) {
    case IpmStatus::kOptimal:
      return "optimal";
    case IpmStatus::kPrimalInfeasible:
      return "primal-infeasible";
    case IpmStatus::kDualInfeasible:
      return "dual-infeasible";
    case IpmStatus::kMaxIter:
      return "max-iter";
    case IpmStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

namespace {

using Blocks = std::vector<RMatrix>;

struct Entry {
  int row;
  int col;
  double value;
};

// Entries of one constraint restricted to one block.
struct BlockPart {
  int block;
  std::vector<Entry> entries;
  std::vector<int> cols;  // distinct columns with a nonzero
};

struct Constraint {
  std::vector<BlockPart> parts;
  double frob = 0.0;
};

class Problem {
 public:
  explicit Problem(const BlockSdp& sdp) : sdp_(sdp) {
    const int nb = static_cast<int>(sdp.block_dims.size());
    if (static_cast<int>(sdp.c.size()) != nb) {
      throw BuildError("block SDP: C has the wrong number of blocks");
    }
    if (sdp.b.size() != sdp.num_constraints()) {
      throw BuildError("block SDP: b has the wrong length");
    }
    for (int k = 0; k < nb; ++k) {
      if (sdp.c[k].rows() != sdp.block_dims[k] ||
          sdp.c[k].cols() != sdp.block_dims[k]) {
        throw BuildError("block SDP: C block has the wrong size");
      }
    }
    users_.resize(nb);
    cons_.resize(sdp.num_constraints());
    for (int i = 0; i < sdp.num_constraints(); ++i) {
      std::vector<std::vector<Entry>> per_block(nb);
      for (const auto& e : sdp.a[i]) {
        if (e.block < 0 || e.block >= nb || e.row < 0 || e.col < 0 ||
            e.row >= sdp.block_dims[e.block] ||
            e.col >= sdp.block_dims[e.block]) {
          throw BuildError("block SDP: constraint entry out of range");
        }
        if (e.value != 0.0) per_block[e.block].push_back({e.row, e.col, e.value});
      }
      for (int k = 0; k < nb; ++k) {
        if (per_block[k].empty()) continue;
        BlockPart part{k, std::move(per_block[k]), {}};
        for (const auto& e : part.entries) {
          part.cols.push_back(e.col);
          cons_[i].frob += e.value * e.value;
        }
        std::sort(part.cols.begin(), part.cols.end());
        part.cols.erase(std::unique(part.cols.begin(), part.cols.end()),
                        part.cols.end());
        cons_[i].parts.push_back(std::move(part));
        users_[k].push_back(i);
      }
      cons_[i].frob = std::sqrt(cons_[i].frob);
    }
  }

  int m() const { return static_cast<int>(cons_.size()); }
  int nb() const { return static_cast<int>(sdp_.block_dims.size()); }
  const BlockSdp& sdp() const { return sdp_; }
  const Constraint& con(int i) const { return cons_[i]; }

  double inner(int i, const Blocks& y) const {
    double s = 0.0;
    for (const auto& part : cons_[i].parts) {
      const RMatrix& blk = y[part.block];
      for (const auto& e : part.entries) s += e.value * blk(e.row, e.col);
    }
    return s;
  }

  RVector apply(const Blocks& x) const {
    RVector out(m());
    for (int i = 0; i < m(); ++i) out(i) = inner(i, x);
    return out;
  }

  Blocks adjoint(const RVector& y) const {
    Blocks out = zeros();
    for (int i = 0; i < m(); ++i) {
      if (y(i) == 0.0) continue;
      for (const auto& part : cons_[i].parts) {
        RMatrix& blk = out[part.block];
        for (const auto& e : part.entries) blk(e.row, e.col) += y(i) * e.value;
      }
    }
    return out;
  }

  Blocks zeros() const {
    Blocks out(nb());
    for (int k = 0; k < nb(); ++k) {
      out[k] = RMatrix::Zero(sdp_.block_dims[k], sdp_.block_dims[k]);
    }
    return out;
  }

  // Schur complement M_ij = tr(A_i X A_j S^{-1}).
  RMatrix schur(const Blocks& x, const Blocks& sinv) const {
    RMatrix M = RMatrix::Zero(m(), m());
    for (int i = 0; i < m(); ++i) {
      for (const auto& part : cons_[i].parts) {
        const int k = part.block;
        const int n = sdp_.block_dims[k];
        RMatrix xa = RMatrix::Zero(n, n);
        for (const auto& e : part.entries) {
          xa.col(e.col) += e.value * x[k].col(e.row);
        }
        RMatrix g = RMatrix::Zero(n, n);
        for (int c : part.cols) g.noalias() += xa.col(c) * sinv[k].row(c);
        for (int j : users_[k]) {
          if (j < i) continue;
          double s = 0.0;
          for (const auto& pj : cons_[j].parts) {
            if (pj.block != k) continue;
            for (const auto& e : pj.entries) s += e.value * g(e.col, e.row);
          }
          M(i, j) += s;
        }
      }
    }
    const RMatrix upper = M.transpose();
    M.triangularView<Eigen::StrictlyLower>() = upper;
    return M;
  }

 private:
  const BlockSdp& sdp_;
  std::vector<Constraint> cons_;
  std::vector<std::vector<int>> users_;
};

double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(dot(a, a)); }

void symmetrize(Blocks& a) {
  for (auto& blk : a) blk = 0.5 * (blk + blk.transpose()).eval();
}

// Largest alpha with x + alpha * dx >= 0 (infinity when dx >= 0). Returns a
// negative value if x itself is not positive definite.
double max_step(const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<RMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return -1.0;
    const RMatrix t1 = llt.matrixL().solve(dx[k]);
    const RMatrix w = llt.matrixL().solve(t1.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (w + w.transpose()),
                                              Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

bool positive_definite(const Blocks& x) {
  for (const auto& blk : x) {
    Eigen::LLT<RMatrix> llt(blk);
    if (llt.info() != Eigen::Success) return false;
  }
  return true;
}

struct Direction {
  RVector dy;
  Blocks ds;
  Blocks dx;
};

}  // namespace

IpmResult solve_block_sdp(const BlockSdp& sdp, const IpmSettings& settings) {
  const Problem prob(sdp);
  const int m = prob.m();
  const int nb = prob.nb();
  const RVector& b = sdp.b;
  const Blocks& C = sdp.c;

  int total_dim = 0;
  for (int d : sdp.block_dims) total_dim += d;

  IpmResult res;
  if (total_dim == 0) {
    res.status = IpmStatus::kNumericalFailure;
    res.message = "program has no conic blocks";
    return res;
  }

  // Starting point scaled to the data.
  Blocks X = prob.zeros();
  Blocks S = prob.zeros();
  RVector y = RVector::Zero(m);
  for (int k = 0; k < nb; ++k) {
    const double n = sdp.block_dims[k];
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max({10.0, std::sqrt(n), C[k].norm()});
    for (int i = 0; i < m; ++i) {
      const double fi = prob.con(i).frob;
      xi = std::max(xi, n * (1.0 + std::abs(b(i))) / (1.0 + fi));
      eta = std::max(eta, fi);
    }
    X[k].diagonal().setConstant(xi);
    S[k].diagonal().setConstant(eta);
  }

  const double norm_b = b.norm();
  const double norm_c = frob(C);
  double gamma = 0.9;
  int stalls = 0;

  for (int iter = 0; iter <= settings.max_iter; ++iter) {
    const RVector ax = prob.apply(X);
    const RVector rp = b - ax;
    Blocks Rd = prob.adjoint(y);
    for (int k = 0; k < nb; ++k) Rd[k] = C[k] - Rd[k] - S[k];

    const double pobj = dot(C, X);
    const double dobj = b.dot(y);
    const double xs = dot(X, S);
    const double mu = xs / total_dim;
    res.primal_infeasibility = rp.norm() / (1.0 + norm_b);
    res.dual_infeasibility = frob(Rd) / (1.0 + norm_c);
    res.relative_gap =
        std::max(std::abs(pobj - dobj), xs) / (1.0 + std::abs(pobj) + std::abs(dobj));
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.iterations = iter;

    if (settings.verbosity > 0) {
      std::fprintf(stderr,
                   "ipm %3d  pobj % .10e  dobj % .10e  pinf %.2e  dinf %.2e  "
                   "gap %.2e  mu %.2e\n",
                   iter, pobj, dobj, res.primal_infeasibility,
                   res.dual_infeasibility, res.relative_gap, mu);
    }

    if (res.primal_infeasibility <= settings.feas_tol &&
        res.dual_infeasibility <= settings.feas_tol &&
        res.relative_gap <= settings.gap_tol) {
      res.status = IpmStatus::kOptimal;
      break;
    }
    // Farkas rays: X >= 0, A(X) ~ 0, <C, X> < 0 certifies (D) infeasible;
    // A^T y ~ -S <= 0 with b^T y > 0 certifies (P) infeasible.
    if (iter > 5) {
      if (pobj < 0.0 && ax.norm() / (-pobj) <= settings.infeas_tol) {
        res.status = IpmStatus::kDualInfeasible;
        res.message = "dual infeasibility certificate found";
        break;
      }
      if (dobj > 0.0) {
        Blocks aty = prob.adjoint(y);
        for (int k = 0; k < nb; ++k) aty[k] += S[k];
        if (frob(aty) / dobj <= settings.infeas_tol) {
          res.status = IpmStatus::kPrimalInfeasible;
          res.message = "primal infeasibility certificate found";
          break;
        }
      }
    }
    if (iter == settings.max_iter) {
      res.status = IpmStatus::kMaxIter;
      res.message = "iteration limit reached";
      break;
    }

    Blocks Sinv(nb);
    bool ok = true;
    for (int k = 0; k < nb; ++k) {
      Eigen::LLT<RMatrix> llt(S[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      Sinv[k] = llt.solve(RMatrix::Identity(S[k].rows(), S[k].cols()));
      Sinv[k] = 0.5 * (Sinv[k] + Sinv[k].transpose()).eval();
    }
    if (!ok) {
      res.status = IpmStatus::kNumericalFailure;
      res.message = "dual slack lost positive definiteness";
      break;
    }

    RMatrix M = prob.schur(X, Sinv);
    Eigen::LLT<RMatrix> chol;
    {
      double ridge = 0.0;
      const double scale =
          m > 0 ? std::max(1.0, M.diagonal().cwiseAbs().maxCoeff()) : 1.0;
      for (int attempt = 0; attempt < 8; ++attempt) {
        RMatrix Mr = M;
        if (ridge > 0.0) Mr.diagonal().array() += ridge;
        chol.compute(Mr);
        if (chol.info() == Eigen::Success) break;
        ridge = (ridge == 0.0) ? 1e-14 * scale : ridge * 100.0;
      }
      if (chol.info() != Eigen::Success) {
        res.status = IpmStatus::kNumericalFailure;
        res.message = "Schur complement is not positive definite";
        break;
      }
    }

    // X Rd S^{-1} enters both right-hand sides.
    Blocks xrds(nb);
    for (int k = 0; k < nb; ++k) xrds[k] = X[k] * Rd[k] * Sinv[k];

    auto direction = [&](const Blocks& T) {
      RVector rhs(m);
      for (int i = 0; i < m; ++i) {
        rhs(i) = rp(i) - prob.inner(i, T) + prob.inner(i, xrds);
      }
      Direction d;
      d.dy = chol.solve(rhs);
      const auto complete = [&] {
        d.ds = prob.adjoint(d.dy);
        for (int k = 0; k < nb; ++k) d.ds[k] = Rd[k] - d.ds[k];
        d.dx.resize(nb);
        for (int k = 0; k < nb; ++k) d.dx[k] = T[k] - X[k] * d.ds[k] * Sinv[k];
        symmetrize(d.dx);
        symmetrize(d.ds);
      };
      complete();
      // The exact direction satisfies A(dx) = rp; refine against the
      // operator itself since the Schur matrix is ill-conditioned late on.
      for (int pass = 0; pass < 2 && m > 0; ++pass) {
        const RVector e = rp - prob.apply(d.dx);
        if (e.norm() <= 1e-15 * (1.0 + rp.norm())) break;
        d.dy += chol.solve(e);
        complete();
      }
      return d;
    };

    // Predictor.
    Blocks T(nb);
    for (int k = 0; k < nb; ++k) T[k] = -X[k];
    const Direction aff = direction(T);
    const double ap_aff = std::min(1.0, max_step(X, aff.dx));
    const double ad_aff = std::min(1.0, max_step(S, aff.ds));
    if (ap_aff < 0.0 || ad_aff < 0.0) {
      res.status = IpmStatus::kNumericalFailure;
      res.message = "iterate lost positive definiteness";
      break;
    }
    double xs_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      xs_aff += ((X[k] + ap_aff * aff.dx[k]).array() *
                 (S[k] + ad_aff * aff.ds[k]).array())
                    .sum();
    }
    const double mu_aff = std::max(0.0, xs_aff / total_dim);
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);
    // Keep mu from outrunning the infeasibilities, which would leave the
    // iterate on the cone boundary with no room to restore feasibility.
    const double infeas =
        std::max(res.primal_infeasibility, res.dual_infeasibility);
    if (infeas > settings.feas_tol && infeas > 10.0 * res.relative_gap) {
      sigma = std::max(sigma, 0.5);
    }

    // Corrector.
    for (int k = 0; k < nb; ++k) {
      T[k] = sigma * mu * Sinv[k] - X[k] - aff.dx[k] * aff.ds[k] * Sinv[k];
    }
    const Direction dir = direction(T);
    const double ap_max = max_step(X, dir.dx);
    const double ad_max = max_step(S, dir.ds);
    double ap = std::min(1.0, gamma * ap_max);
    double ad = std::min(1.0, gamma * ad_max);

    // Shrink steps that rounding would push onto the cone boundary.
    Blocks x_next(nb);
    Blocks s_next(nb);
    bool interior = false;
    for (int attempt = 0; attempt < 30 && !interior; ++attempt) {
      for (int k = 0; k < nb; ++k) {
        x_next[k] = X[k] + ap * dir.dx[k];
        s_next[k] = S[k] + ad * dir.ds[k];
      }
      symmetrize(x_next);
      symmetrize(s_next);
      interior = positive_definite(x_next) && positive_definite(s_next);
      if (!interior) {
        ap *= 0.7;
        ad *= 0.7;
      }
    }
    if (!interior) {
      res.status = IpmStatus::kNumericalFailure;
      res.message = "iterate lost positive definiteness";
      break;
    }
    X = std::move(x_next);
    S = std::move(s_next);
    y += ad * dir.dy;

    gamma = 0.9 + 0.09 * std::min(ap, ad);
    stalls = (ap < 1e-10 && ad < 1e-10) ? stalls + 1 : 0;
    if (stalls >= 3) {
      res.status = IpmStatus::kNumericalFailure;
      res.message = "step lengths collapsed";
      break;
    }
  }

  res.x = std::move(X);
  res.s = std::move(S);
  res.y = std::move(y);
  return res;
}

}  // namespace sdpent
