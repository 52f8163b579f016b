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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sdpent/errors.hpp"

namespace sdpent {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

BipartiteState::BipartiteState(HermitianOperator op, BipartiteShape shape)
    : op_(std::move(op)), shape_(shape) {
  if (shape.dA < 1 || shape.dB < 1 || op_.dim() != shape.dim()) {
    std::ostringstream os;
    os << "state of dimension " << op_.dim() << " does not match shape "
       << shape.dA << "x" << shape.dB;
    throw ShapeError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op_.matrix(),
                                            Eigen::EigenvaluesOnly);
  min_eigenvalue_ = es.eigenvalues()(0);
  if (min_eigenvalue_ < -kPsdTol) {
    std::ostringstream os;
    os << "state is not positive semidefinite: minimum eigenvalue "
       << min_eigenvalue_;
    throw ValidationError("positive-semidefinite", os.str());
  }
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "state does not have unit trace: trace " << format_double(tr);
    throw ValidationError("unit-trace", os.str());
  }
}

ParameterWindow sigma_r_window() {
  return {(5.0 - std::sqrt(17.0)) / 16.0, (5.0 + std::sqrt(17.0)) / 16.0};
}

ParameterWindow rho_r_window() { return {0.3125, 0.5480}; }

SchmidtVector::SchmidtVector(std::vector<double> coefficients)
    : c_(std::move(coefficients)) {
  if (c_.empty()) throw DomainError("Schmidt vector must be non-empty");
  double norm2 = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!(c_[i] > 0.0)) {
      throw DomainError("Schmidt coefficients must be strictly positive");
    }
    if (i > 0 && c_[i] > c_[i - 1]) {
      throw DomainError("Schmidt coefficients must be sorted descending");
    }
    norm2 += c_[i] * c_[i];
  }
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw DomainError("Schmidt coefficients must have unit 2-norm, got "
                      "squared norm " +
                      format_double(norm2));
  }
}

BipartiteState max_entangled(int d) {
  if (d < 1) throw DomainError("max_entangled: dimension must be positive");
  CVector psi = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(double(d));
  return pure_state(psi, {d, d});
}

BipartiteState maximally_mixed(BipartiteShape shape) {
  const int n = shape.dim();
  return BipartiteState(HermitianOperator(CMatrix::Identity(n, n) / double(n)),
                        shape);
}

BipartiteState pure_state(const CVector& psi, BipartiteShape shape) {
  if (psi.size() != shape.dim()) {
    throw ShapeError("pure_state: vector length does not match shape");
  }
  const CVector unit = psi / psi.norm();
  return BipartiteState(HermitianOperator::projector_onto(unit), shape);
}

BipartiteState pure_from_schmidt(const SchmidtVector& s, BipartiteShape shape) {
  if (s.size() > std::min(shape.dA, shape.dB)) {
    throw ShapeError("pure_from_schmidt: more coefficients than min(dA, dB)");
  }
  CVector psi = CVector::Zero(shape.dim());
  for (int i = 0; i < s.size(); ++i) psi(i * shape.dB + i) = s.coefficients()[i];
  return pure_state(psi, shape);
}

double rains_pair_y(double r) {
  return std::sqrt(4.0 * r * r - 5.0 * r / 2.0 + 33.0 / 64.0);
}

double rains_pair_x(double r) {
  const double y = rains_pair_y(r);
  const double rational =
      (32.0 * r * r - 10.0 * r + 1.0) / (256.0 * r * r - 160.0 * r + 33.0);
  const double log_term = ((16.0 * r - 5.0) / y) /
                          (32.0 * std::log(5.0 / 8.0 - y) -
                           32.0 * std::log(5.0 / 8.0 + y));
  return r + rational + log_term;
}

BipartiteState sigma_r(RainsPairParams p) {
  const auto window = sigma_r_window();
  if (!window.contains(p.r)) {
    throw DomainError("sigma_r: r = " + format_double(p.r) +
                      " outside the positivity window");
  }
  const double r = p.r;
  RMatrix s = RMatrix::Zero(4, 4);
  s(0, 0) = 0.25;
  s(3, 3) = 0.125;
  s(1, 1) = r;
  s(2, 2) = 5.0 / 8.0 - r;
  s(1, 2) = s(2, 1) = 1.0 / (4.0 * std::sqrt(2.0));
  return BipartiteState(HermitianOperator::from_real(s), {2, 2});
}

BipartiteState rho_r(RainsPairParams p) {
  const auto window = rho_r_window();
  if (!window.contains(p.r)) {
    throw DomainError("rho_r: r = " + format_double(p.r) +
                      " outside the window [0.3125, 0.5480]");
  }
  const double r = p.r;
  const double x = rains_pair_x(r);
  RMatrix m = RMatrix::Zero(4, 4);
  m(0, 0) = 0.125;
  m(1, 1) = x;
  m(2, 2) = (7.0 - 8.0 * x) / 8.0;
  m(1, 2) = m(2, 1) = (32.0 * r * r - (6.0 + 32.0 * x) * r + 10.0 * x + 1.0) /
                      (4.0 * std::sqrt(2.0));
  return BipartiteState(HermitianOperator::from_real(m), {2, 2});
}

CMatrix shift_operator() {
  CMatrix x = CMatrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j) x((j + 1) % 3, j) = 1.0;
  return x;
}

CMatrix orbit_unitary() {
  const CMatrix x = shift_operator();
  return kron(x.adjoint(), x);
}

BipartiteState rho_alpha(IsoOrbitParams p) {
  if (!(p.alpha > 0.0 && p.alpha <= 0.5)) {
    throw DomainError("rho_alpha: alpha = " + format_double(p.alpha) +
                      " outside (0, 0.5]");
  }
  CVector psi = CVector::Zero(9);
  psi(0) = std::sqrt(p.alpha);
  psi(4) = std::sqrt(1.0 - p.alpha);
  const CMatrix u = orbit_unitary();
  CMatrix rho = CMatrix::Zero(9, 9);
  CVector v = psi;
  for (int m = 0; m < 3; ++m) {
    rho += v * v.adjoint();
    v = u * v;
  }
  return BipartiteState(HermitianOperator(rho / 3.0), {3, 3});
}

Eigen::PermutationMatrix<Eigen::Dynamic> regroup_permutation(
    BipartiteShape first, BipartiteShape second) {
  const int dA = first.dA, dB = first.dB, dA2 = second.dA, dB2 = second.dB;
  Eigen::VectorXi indices(first.dim() * second.dim());
  for (int a = 0; a < dA; ++a) {
    for (int b = 0; b < dB; ++b) {
      for (int a2 = 0; a2 < dA2; ++a2) {
        for (int b2 = 0; b2 < dB2; ++b2) {
          const int from = ((a * dB + b) * dA2 + a2) * dB2 + b2;
          const int to = ((a * dA2 + a2) * dB + b) * dB2 + b2;
          indices(from) = to;
        }
      }
    }
  }
  return Eigen::PermutationMatrix<Eigen::Dynamic>(indices);
}

BipartiteShape tensor_shape(BipartiteShape first, BipartiteShape second) {
  return {first.dA * second.dA, first.dB * second.dB};
}

CMatrix tensor_regrouped(const CMatrix& a, BipartiteShape first,
                         const CMatrix& b, BipartiteShape second) {
  if (a.rows() != first.dim() || b.rows() != second.dim()) {
    throw ShapeError("tensor_regrouped: operator does not match its shape");
  }
  const auto perm = regroup_permutation(first, second);
  return perm * kron(a, b) * perm.transpose();
}

BipartiteState tensor_states(const BipartiteState& rho,
                             const BipartiteState& sigma) {
  return BipartiteState(
      HermitianOperator(tensor_regrouped(rho.matrix(), rho.shape(),
                                         sigma.matrix(), sigma.shape())),
      tensor_shape(rho.shape(), sigma.shape()));
}

std::string serialize_state(const BipartiteState& state) {
  const CMatrix& m = state.matrix();
  const int n = state.dim();
  std::ostringstream os;
  auto write_part = [&](const char* key, bool imag) {
    os << "\"" << key << "\":[";
    for (int i = 0; i < n; ++i) {
      os << (i ? ",[" : "[");
      for (int j = 0; j < n; ++j) {
        if (j) os << ",";
        os << format_double(imag ? m(i, j).imag() : m(i, j).real());
      }
      os << "]";
    }
    os << "]";
  };
  os << "{\"dA\":" << state.shape().dA << ",\"dB\":" << state.shape().dB
     << ",";
  write_part("re", false);
  os << ",";
  write_part("im", true);
  os << "}\n";
  return os.str();
}

BipartiteState parse_state(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("state document is not valid JSON: ") +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("state document must be an object");
  for (const char* key : {"dA", "dB", "re", "im"}) {
    if (!doc.contains(key)) {
      throw ParseError(std::string("state document is missing field \"") +
                       key + "\"");
    }
  }
  if (!doc["dA"].is_number_integer() || !doc["dB"].is_number_integer()) {
    throw ParseError("fields \"dA\" and \"dB\" must be integers");
  }
  const BipartiteShape shape{doc["dA"].get<int>(), doc["dB"].get<int>()};
  if (shape.dA < 1 || shape.dB < 1) {
    throw ParseError("fields \"dA\" and \"dB\" must be positive");
  }
  const int n = shape.dim();
  CMatrix m(n, n);
  auto read_part = [&](const char* key, bool imag) {
    const auto& rows = doc[key];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw ParseError(std::string("field \"") + key + "\" must be an array of " +
                       std::to_string(n) + " rows");
    }
    for (int i = 0; i < n; ++i) {
      const auto& row = rows[i];
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw ParseError(std::string("row ") + std::to_string(i) +
                         " of field \"" + key + "\" must hold " +
                         std::to_string(n) + " numbers");
      }
      for (int j = 0; j < n; ++j) {
        if (!row[j].is_number()) {
          throw ParseError(std::string("non-numeric entry in field \"") + key +
                           "\"");
        }
        const double v = row[j].get<double>();
        if (imag) {
          m(i, j).imag(v);
        } else {
          m(i, j) = Complex(v, 0.0);
        }
      }
    }
  };
  read_part("re", false);
  read_part("im", true);
  return BipartiteState(HermitianOperator(m), shape);
}

BipartiteState read_state_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open state file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_state(buf.str());
}

void write_state_file(const std::filesystem::path& path,
                      const BipartiteState& state) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write state file " + path.string());
  out << serialize_state(state);
}

BipartiteState random_state(BipartiteShape shape, int rank,
                            std::mt19937_64& rng) {
  const int n = shape.dim();
  if (rank < 1 || rank > n) throw DomainError("random_state: invalid rank");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(n, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  }
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return BipartiteState(HermitianOperator(rho), shape);
}

SchmidtVector random_schmidt(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(m);
  for (auto& v : w) {
    const double a = normal(rng), b = normal(rng);
    v = a * a + b * b;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v = std::sqrt(v / total);
  std::sort(w.begin(), w.end(), std::greater<>());
  // Renormalize after the square roots so the unit-norm check is exact.
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  for (auto& v : w) v /= std::sqrt(norm2);
  return SchmidtVector(std::move(w));
}

}  // namespace sdpent
