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

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sdpent/linalg.hpp"

namespace sdpent {

// Density operator on C^dA (x) C^dB: PSD and unit trace.
class BipartiteState {
 public:
  static constexpr double kPsdTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;

  // Throws ShapeError or ValidationError naming the violated invariant.
  BipartiteState(HermitianOperator op, BipartiteShape shape);

  const HermitianOperator& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }
  BipartiteShape shape() const { return shape_; }
  int dim() const { return shape_.dim(); }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  HermitianOperator op_;
  BipartiteShape shape_;
  double min_eigenvalue_ = 0.0;
};

struct ParameterWindow {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// sigma_r is PSD on [(5 - sqrt 17) / 16, (5 + sqrt 17) / 16].
ParameterWindow sigma_r_window();
// rho_r is PSD on [0.3125, 0.5480].
ParameterWindow rho_r_window();

struct RainsPairParams {
  double r = 0.5;
};

struct IsoOrbitParams {
  double alpha = 0.1;
};

// Schmidt coefficients lambda_i (not squared), strictly positive, sorted
// descending, with sum of squares 1 to 1e-12.
class SchmidtVector {
 public:
  explicit SchmidtVector(std::vector<double> coefficients);
  const std::vector<double>& coefficients() const { return c_; }
  int size() const { return static_cast<int>(c_.size()); }

 private:
  std::vector<double> c_;
};

BipartiteState max_entangled(int d);
BipartiteState maximally_mixed(BipartiteShape shape);
BipartiteState pure_state(const CVector& psi, BipartiteShape shape);
BipartiteState pure_from_schmidt(const SchmidtVector& s, BipartiteShape shape);

double rains_pair_y(double r);
double rains_pair_x(double r);
BipartiteState sigma_r(RainsPairParams p);
BipartiteState rho_r(RainsPairParams p);

// Cyclic shift X = sum_j |j+1 mod 3><j| and the orbit unitary X^dag (x) X.
CMatrix shift_operator();
CMatrix orbit_unitary();
BipartiteState rho_alpha(IsoOrbitParams p);

// Permutation taking the kron ordering (A B A' B') to ((A A') (B B')).
Eigen::PermutationMatrix<Eigen::Dynamic> regroup_permutation(
    BipartiteShape first, BipartiteShape second);
// kron(a, b) regrouped so the result lives on (A A') (x) (B B').
CMatrix tensor_regrouped(const CMatrix& a, BipartiteShape first,
                         const CMatrix& b, BipartiteShape second);
BipartiteShape tensor_shape(BipartiteShape first, BipartiteShape second);
BipartiteState tensor_states(const BipartiteState& rho,
                             const BipartiteState& sigma);

// {"dA":..,"dB":..,"re":[[..]],"im":[[..]]}, numbers with 17 significant
// digits.
std::string serialize_state(const BipartiteState& state);
BipartiteState parse_state(std::string_view text);
BipartiteState read_state_file(const std::filesystem::path& path);
void write_state_file(const std::filesystem::path& path,
                      const BipartiteState& state);

// Seeded test generators: Ginibre-induced mixed states of the given rank and
// normalized Schmidt vectors with m terms.
BipartiteState random_state(BipartiteShape shape, int rank,
                            std::mt19937_64& rng);
SchmidtVector random_schmidt(int m, std::mt19937_64& rng);

}  // namespace sdpent
