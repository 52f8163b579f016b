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

#include <string>
#include <vector>

#include "sdpent/linalg.hpp"

namespace sdpent {

// Real block-diagonal SDP in standard form:
//
//   (P)  min <C, X>   s.t. <A_i, X> = b_i,  X >= 0
//   (D)  max b^T y    s.t. S = C - sum_i y_i A_i >= 0
//
// Each A_i is stored sparsely with both (row, col) and (col, row) listed for
// off-diagonal entries, so <A_i, X> is a plain sum over entries.
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct BlockSdp {
  std::vector<int> block_dims;
  std::vector<RMatrix> c;
  std::vector<std::vector<SdpEntry>> a;
  RVector b;

  int num_constraints() const { return static_cast<int>(a.size()); }
};

enum class IpmStatus {
  kOptimal,
  kPrimalInfeasible,  // (P) infeasible; y is a Farkas ray
  kDualInfeasible,    // (D) infeasible; X is a Farkas ray
  kMaxIter,
  kNumericalFailure,
};

const char* to_string(IpmStatus status);

struct IpmSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  double infeas_tol = 1e-8;
  int max_iter = 200;
  int verbosity = 0;
};

struct IpmResult {
  IpmStatus status = IpmStatus::kNumericalFailure;
  std::vector<RMatrix> x;
  std::vector<RMatrix> s;
  RVector y;
  double primal_objective = 0.0;  // <C, X>
  double dual_objective = 0.0;    // b^T y
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  std::string message;
};

// Infeasible-start primal-dual path following with the HKM search direction
// and Mehrotra predictor-corrector steps. Deterministic for fixed input.
IpmResult solve_block_sdp(const BlockSdp& sdp, const IpmSettings& settings);

}  // namespace sdpent
