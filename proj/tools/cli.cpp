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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "sdpent/errors.hpp"
#include "sdpent/measures.hpp"
#include "sdpent/states.hpp"

namespace sdpent::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct RunConfig {
  std::string command;
  std::string state_path;
  std::string sigma_path;
  std::string family;
  std::string out_path;
  std::string certificate_path;
  std::string which = "em,ew,w0,logneg";
  double tol = 1e-10;
  int sdp_max_iters = 200;
  int max_iters = 500;
  double fw_gap_bits = 1e-4;
  std::uint64_t seed = 20260101;
  std::string base = "2";
  int jobs = 1;
  bool timings = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double r = 0.547;
  double rmin = 0.45;
  double rmax = 0.548;
  double amin = 0.05;
  double amax = 0.5;
  std::vector<double> alphas;
  int steps = 20;
};

LogBase log_base(const RunConfig& c) {
  return c.base == "e" ? LogBase::kNatural : LogBase::kTwo;
}

const char* unit_suffix(LogBase b) {
  return b == LogBase::kTwo ? "bits" : "nats";
}

MeasureConfig measure_config(const RunConfig& c) {
  MeasureConfig m;
  m.base = log_base(c);
  m.solver.gap_tol = c.tol;
  m.solver.feas_tol = c.tol;
  m.solver.max_iter = c.sdp_max_iters;
  return m;
}

FwConfig fw_config(const RunConfig& c) {
  FwConfig f;
  f.base = log_base(c);
  f.max_iters = c.max_iters;
  f.gap_bits = c.fw_gap_bits;
  return f;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json config_echo(const RunConfig& c) {
  ordered_json j;
  j["base"] = c.base;
  j["tol"] = c.tol;
  j["sdp_max_iters"] = c.sdp_max_iters;
  j["max_iters"] = c.max_iters;
  j["fw_gap_bits"] = c.fw_gap_bits;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  return j;
}

ordered_json report_header(const RunConfig& c) {
  ordered_json j;
  j["tool"] = "sdpent";
  j["version"] = kToolVersion;
  j["command"] = c.command;
  j["config"] = config_echo(c);
  return j;
}

ordered_json solver_json(const SolverStats& s, bool timings) {
  ordered_json j;
  j["status"] = to_string(s.status);
  j["form"] = to_string(s.form);
  j["primal_value"] = s.primal_value;
  j["dual_value"] = s.dual_value;
  j["gap"] = s.gap;
  j["max_equality_residual"] = s.max_equality_residual;
  j["min_psd_eigenvalue"] = s.min_psd_eigenvalue;
  j["iterations"] = s.iterations;
  j["schur_size"] = s.schur_size;
  if (timings) j["wall_seconds"] = s.wall_seconds;
  return j;
}

ordered_json measure_json(const MeasureResult& m, bool timings) {
  ordered_json j;
  j["name"] = to_string(m.kind);
  j["value"] = m.value;
  j["base"] = to_string(m.base);
  if (m.program_value) j["program_value"] = *m.program_value;
  j["error_bar"] = m.error_bar;
  if (!m.solver.empty()) {
    j["solver"] = ordered_json::array();
    for (const auto& s : m.solver) j["solver"].push_back(solver_json(s, timings));
  }
  if (!m.notes.empty()) j["notes"] = m.notes;
  return j;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out);

void emit_report(const RunConfig& c, ordered_json report, std::ostream& out) {
  if (c.timings) {
    report["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - c.start)
            .count();
  }
  emit(c, report.dump(2) + "\n", out);
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw InputError("cannot open output file " + c.out_path);
  f << text;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results are stored by
// index, so output order does not depend on completion order.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::clamp(jobs, 1, std::max(1, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> grid(double lo, double hi, int steps) {
  if (steps < 1) throw InputError("--steps must be at least 1");
  if (lo > hi) throw InputError("grid minimum exceeds maximum");
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i) {
    g[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  }
  return g;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_measure(const RunConfig& c, std::ostream& out) {
  const auto rho = read_state_file(c.state_path);
  const auto mcfg = measure_config(c);
  const LogBase base = log_base(c);

  ordered_json report = report_header(c);
  report["state"] = {{"path", c.state_path},
                     {"dA", rho.shape().dA},
                     {"dB", rho.shape().dB}};
  ordered_json results = ordered_json::array();
  for (const auto& w : split(c.which, ',')) {
    if (w == "em") {
      results.push_back(measure_json(e_m(rho, mcfg), c.timings));
    } else if (w == "em-primal") {
      results.push_back(measure_json(m_primal(rho, mcfg), c.timings));
    } else if (w == "em-dual") {
      results.push_back(measure_json(m_dual(rho, mcfg), c.timings));
    } else if (w == "ew") {
      results.push_back(measure_json(e_w(rho, mcfg), c.timings));
    } else if (w == "w0") {
      results.push_back(measure_json(w0_rate(rho, mcfg), c.timings));
    } else if (w == "logneg") {
      MeasureResult m;
      m.kind = MeasureKind::kLogNeg;
      m.base = base;
      m.value = log_negativity(rho, base);
      results.push_back(measure_json(m, c.timings));
    } else if (w == "relent") {
      if (c.sigma_path.empty()) {
        throw InputError("measure relent needs --sigma STATE_FILE");
      }
      MeasureResult m;
      m.kind = MeasureKind::kRelEnt;
      m.base = base;
      m.value = relative_entropy(rho, read_state_file(c.sigma_path), base);
      results.push_back(measure_json(m, c.timings));
    } else if (w == "ree") {
      const auto r = ree_upper(rho, fw_config(c));
      auto j = measure_json(r.measure, c.timings);
      j["fw_converged"] = r.trace.converged;
      j["fw_iterations"] = r.trace.iterations.size();
      results.push_back(std::move(j));
    } else {
      throw InputError("unknown measure '" + w +
                       "' (expected em, em-primal, em-dual, ew, w0, logneg, "
                       "relent, ree)");
    }
  }
  report["results"] = std::move(results);
  emit_report(c, std::move(report), out);
  return kExitOk;
}

int cmd_sweep_fig1(const RunConfig& c, std::ostream& out) {
  const auto window = rho_r_window();
  if (!window.contains(c.rmin) || !window.contains(c.rmax)) {
    std::ostringstream os;
    os << "r range [" << c.rmin << ", " << c.rmax << "] is outside ["
       << window.lo << ", " << window.hi << "]";
    throw DomainError(os.str());
  }
  const auto rs = grid(c.rmin, c.rmax, c.steps);
  const auto fcfg = fw_config(c);
  struct Row {
    double two_r = 0.0;
    double ub = 0.0;
    bool converged = false;
  };
  std::vector<Row> rows(rs.size());
  parallel_for(static_cast<int>(rs.size()), c.jobs, [&](int i) {
    const auto rho = rho_r({rs[i]});
    rows[i].two_r = 2.0 * rains_closed_form(rs[i], fcfg.base).value;
    const auto ree = ree_upper(tensor_states(rho, rho), fcfg);
    rows[i].ub = ree.measure.value;
    rows[i].converged = ree.trace.converged;
  });

  const std::string u = unit_suffix(fcfg.base);
  std::ostringstream csv;
  csv << "r,two_R_" << u << ",ree_upper_tensor2_" << u << ",gap_" << u
      << ",fw_converged\n";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    csv << fmt17(rs[i]) << ',' << fmt17(rows[i].two_r) << ','
        << fmt17(rows[i].ub) << ',' << fmt17(rows[i].two_r - rows[i].ub) << ','
        << (rows[i].converged ? "true" : "false") << '\n';
  }
  emit(c, csv.str(), out);
  return kExitOk;
}

int cmd_sweep_fig2(const RunConfig& c, std::ostream& out) {
  const std::vector<double> alphas =
      c.alphas.empty() ? grid(c.amin, c.amax, c.steps) : c.alphas;
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 0.5)) {
      throw DomainError("alpha " + fmt17(a) + " is outside (0, 0.5]");
    }
  }
  const auto mcfg = measure_config(c);
  struct Row {
    double ew = 0.0;
    double w0 = 0.0;
    double em = 0.0;
  };
  std::vector<Row> rows(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), c.jobs, [&](int i) {
    const auto rho = rho_alpha({alphas[i]});
    rows[i].ew = e_w(rho, mcfg).value;
    rows[i].w0 = w0_rate(rho, mcfg).value;
    rows[i].em = e_m(rho, mcfg).value;
  });

  const std::string u = unit_suffix(mcfg.base);
  std::ostringstream csv;
  csv << "alpha,e_w_" << u << ",e0_one_copy_" << u << ",e_m_" << u << "\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    csv << fmt17(alphas[i]) << ',' << fmt17(rows[i].ew) << ','
        << fmt17(rows[i].w0) << ',' << fmt17(rows[i].em) << '\n';
  }
  emit(c, csv.str(), out);
  return kExitOk;
}

struct FamilyState {
  BipartiteState state;
  std::optional<double> rho_r_parameter;
  std::string label;
};

FamilyState family_state(const std::string& arg) {
  const auto colon = arg.find(':');
  if (colon == std::string::npos) {
    throw InputError("family argument must look like NAME:PARAM, got '" + arg +
                     "'");
  }
  const std::string name = arg.substr(0, colon);
  double param = 0.0;
  try {
    std::size_t used = 0;
    param = std::stod(arg.substr(colon + 1), &used);
    if (used != arg.size() - colon - 1) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw InputError("family parameter in '" + arg + "' is not a number");
  }
  if (name == "rho_r") return {rho_r({param}), param, arg};
  if (name == "sigma_r") return {sigma_r({param}), std::nullopt, arg};
  if (name == "rho_alpha") return {rho_alpha({param}), std::nullopt, arg};
  if (name == "phi") {
    const int d = static_cast<int>(param);
    if (d != param || d < 1) {
      throw DomainError("phi:d needs a positive integer d");
    }
    return {max_entangled(d), std::nullopt, arg};
  }
  throw InputError("unknown family '" + name +
                   "' (expected rho_r, sigma_r, rho_alpha, phi)");
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  if (c.state_path.empty() == c.family.empty()) {
    throw InputError("verify needs exactly one of STATE_FILE or --family");
  }
  const FamilyState input = c.family.empty()
                                ? FamilyState{read_state_file(c.state_path),
                                              std::nullopt, c.state_path}
                                : family_state(c.family);
  const auto& rho = input.state;
  const auto mcfg = measure_config(c);
  const LogBase base = log_base(c);

  const auto primal = m_primal(rho, mcfg);
  const auto dual = m_dual(rho, mcfg);
  const auto em = e_m(rho, mcfg);
  const auto ew = e_w(rho, mcfg);
  const auto w0 = w0_rate(rho, mcfg);
  const double ln = log_negativity(rho, base);

  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  // lhs <= rhs + slack.
  auto check_le = [&](const std::string& name, double lhs, double rhs,
                      double slack) {
    const bool pass = lhs <= rhs + slack;
    all_pass = all_pass && pass;
    checks.push_back({{"check", name},
                      {"lhs", lhs},
                      {"rhs", rhs},
                      {"slack", slack},
                      {"margin", rhs + slack - lhs},
                      {"pass", pass}});
  };
  check_le("|M_primal - M_dual| <= 1e-7", std::abs(primal.value - dual.value),
           0.0, 1e-7);
  check_le("W0_rate <= EM", w0.value, em.value, 1e-6);
  check_le("EM <= EW", em.value, ew.value, 1e-6);
  check_le("EW <= LogNeg", ew.value, ln, 1e-6);

  const auto top = support_pt_top(rho);
  ordered_json product = {{"support_pt_norm", top.op_norm},
                          {"top_eigenvector_schmidt_rank", top.schmidt_rank},
                          {"product", top.product()}};
  if (top.product()) {
    const double predicted = from_nats(-std::log(top.op_norm), base);
    product["predicted_em"] = predicted;
    check_le("|EM + log ||P^T_B||_inf| <= 1e-6", std::abs(em.value - predicted),
             0.0, 1e-6);
  }
  if (input.rho_r_parameter) {
    const auto rains = rains_closed_form(*input.rho_r_parameter, base);
    check_le("EM <= R closed form", em.value, rains.value, 1e-6);
  }

  ordered_json report = report_header(c);
  report["input"] = input.label;
  report["values"] = {{"EM", em.value},
                      {"EW", ew.value},
                      {"W0_rate", w0.value},
                      {"LogNeg", ln},
                      {"M_primal", primal.value},
                      {"M_dual", dual.value}};
  report["product_top_eigenvector"] = product;
  report["checks"] = checks;
  report["pass"] = all_pass;
  emit_report(c, std::move(report), out);
  return all_pass ? kExitOk : kExitVerificationFailed;
}

std::string certificate_path_for(const RunConfig& c) {
  if (!c.certificate_path.empty()) return c.certificate_path;
  if (c.out_path.empty()) return "nonadditivity_certificate.json";
  fs::path p(c.out_path);
  p.replace_extension();
  return p.string() + ".certificate.json";
}

int cmd_nonadditivity(const RunConfig& c, std::ostream& out) {
  const auto window = rho_r_window();
  if (!window.contains(c.r)) {
    std::ostringstream os;
    os << "r = " << c.r << " is outside [" << window.lo << ", " << window.hi
       << "]";
    throw DomainError(os.str());
  }
  const auto fcfg = fw_config(c);
  const auto rep = nonadditivity_experiment(c.r, fcfg);
  const auto& sigma = *rep.tensor2.trace.final_sigma;
  const std::string cert_path = certificate_path_for(c);
  write_state_file(cert_path, sigma);

  // Re-validate from the file so the report describes what was written.
  const auto reread = read_state_file(cert_path);
  const double min_eig = eig_hermitian(reread.op()).values(0);
  const double min_pt =
      eig_hermitian(partial_transpose(reread.op(), reread.shape())).values(0);
  const double trace_err = std::abs(reread.op().trace() - 1.0);
  const bool valid = min_eig >= -1e-9 && min_pt >= -1e-9 && trace_err <= 1e-9;
  const auto rho = rho_r({c.r});
  const double reread_value =
      relative_entropy(tensor_states(rho, rho), reread, fcfg.base);

  ordered_json report = report_header(c);
  report["config"]["r"] = c.r;
  report["results"] = {
      {"base", to_string(fcfg.base)},
      {"rains_closed_form", rep.rains.value},
      {"two_rains", rep.two_rains},
      {"ree_upper_tensor2", rep.tensor2.measure.value},
      {"gap", rep.gap},
      {"nonadditivity_certified", rep.gap > 0.0 && valid},
      {"fw_converged", rep.tensor2.trace.converged},
      {"fw_iterations", rep.tensor2.trace.iterations.size()},
      {"oracle_calls", rep.tensor2.trace.oracle_calls},
      {"notes", rep.tensor2.measure.notes}};
  report["certificate"] = {{"path", cert_path},
                           {"relative_entropy_from_file", reread_value},
                           {"min_eigenvalue", min_eig},
                           {"min_partial_transpose_eigenvalue", min_pt},
                           {"trace_error", trace_err},
                           {"valid", valid}};
  ordered_json trace = ordered_json::array();
  for (const auto& it : rep.tensor2.trace.iterations) {
    trace.push_back({it.value_bits, it.fw_gap_bits, it.step_size});
  }
  report["trace_columns"] = {"value_bits", "fw_gap_bits", "step_size"};
  report["trace"] = std::move(trace);
  emit_report(c, std::move(report), out);
  return valid ? kExitOk : kExitVerificationFailed;
}

// ---------------------------------------------------------------------------
// Wiring

void add_shared(CLI::App* sub, RunConfig& c) {
  sub->add_option("--out", c.out_path, "Write the report to PATH");
  sub->add_option("--tol", c.tol, "SDP gap and feasibility tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", c.max_iters,
                  "Iteration cap of the REE upper-bound iteration")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--sdp-max-iters", c.sdp_max_iters,
                  "Iteration cap of each SDP solve")
      ->check(CLI::PositiveNumber);
  sub->add_option("--fw-gap", c.fw_gap_bits,
                  "Stop the REE iteration below this Frank-Wolfe gap (bits)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--base", c.base, "Logarithm base of reported values")
      ->check(CLI::IsMember({"2", "e"}));
  sub->add_option("--jobs", c.jobs, "Worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--timings", c.timings,
                "Include wall times in JSON reports (breaks byte identity)");
}

int classify(const std::exception& e, std::ostream& err) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    err << "error: invalid input (invariant '" << v->invariant()
        << "'): " << v->what() << "\n";
    return kExitInputError;
  }
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const InputError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const SupportError*>(&e) ||
      dynamic_cast<const DegenerateInputError*>(&e) ||
      dynamic_cast<const KernelDimensionError*>(&e) ||
      dynamic_cast<const BuildError*>(&e)) {
    err << "error: invalid input: " << e.what() << "\n";
    return kExitInputError;
  }
  if (dynamic_cast<const CertificationError*>(&e)) {
    err << "error: verification failed: " << e.what() << "\n";
    return kExitVerificationFailed;
  }
  err << "error: solver failure: " << e.what() << "\n";
  return kExitSolverFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  RunConfig c;
  CLI::App app{"Entanglement measures of bipartite states via semidefinite "
               "programming",
               "sdpent"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* measure = app.add_subcommand("measure", "Compute measures of a state");
  measure->add_option("state", c.state_path, "State file")->required();
  measure->add_option("--which", c.which,
                      "Comma-separated list of em, em-primal, em-dual, ew, w0, "
                      "logneg, relent, ree");
  measure->add_option("--sigma", c.sigma_path,
                      "Second state file for relent");
  add_shared(measure, c);

  auto* fig1 = app.add_subcommand(
      "sweep-fig1", "2R(rho_r) against the REE upper bound of rho_r (x) rho_r");
  fig1->add_option("--rmin", c.rmin, "Smallest r");
  fig1->add_option("--rmax", c.rmax, "Largest r");
  fig1->add_option("--steps", c.steps, "Number of grid points");
  add_shared(fig1, c);

  auto* fig2 = app.add_subcommand(
      "sweep-fig2", "E_W, one-copy W0 rate and E_M along rho^(alpha)");
  fig2->add_option("--alpha-min", c.amin, "Smallest alpha");
  fig2->add_option("--alpha-max", c.amax, "Largest alpha");
  fig2->add_option("--steps", c.steps, "Number of grid points");
  fig2->add_option("--alphas", c.alphas, "Explicit alpha list")->delimiter(',');
  add_shared(fig2, c);

  auto* verify = app.add_subcommand(
      "verify", "Check the ordering of the computable bounds on a state");
  verify->add_option("state", c.state_path, "State file");
  verify->add_option("--family", c.family,
                     "rho_r:R, sigma_r:R, rho_alpha:ALPHA or phi:D");
  add_shared(verify, c);

  auto* nonadd = app.add_subcommand(
      "nonadditivity", "Certify R(rho_r (x) rho_r) < 2 R(rho_r)");
  nonadd->add_option("--r", c.r, "Family parameter r");
  nonadd->add_option("--certificate", c.certificate_path,
                     "Where to write the PPT certificate state");
  add_shared(nonadd, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    if (*measure) {
      c.command = "measure";
      return cmd_measure(c, out);
    }
    if (*fig1) {
      c.command = "sweep-fig1";
      return cmd_sweep_fig1(c, out);
    }
    if (*fig2) {
      c.command = "sweep-fig2";
      return cmd_sweep_fig2(c, out);
    }
    if (*verify) {
      c.command = "verify";
      return cmd_verify(c, out);
    }
    c.command = "nonadditivity";
    return cmd_nonadditivity(c, out);
  } catch (const std::exception& e) {
    return classify(e, err);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv{"sdpent"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sdpent::cli
