// Copyright 2026 The relosc Authors
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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Arguments select criteria by number;
// with no arguments all of them run (about ten minutes on one core).

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "conditional_chi2.hpp"
#include "relosc/cli/commands.hpp"
#include "relosc/cli/config.hpp"
#include "relosc/cli/output.hpp"
#include "relosc/estimators.hpp"
#include "relosc/experiment.hpp"
#include "relosc/fits.hpp"
#include "relosc/model.hpp"
#include "relosc/oracles.hpp"
#include "relosc/specfun.hpp"

using namespace relosc;
namespace fs = std::filesystem;
namespace sf = relosc::specfun;

namespace {

// ---------------------------------------------------------------------------
// Tolerances

constexpr double kLambda0Quoted = 0.808617;
constexpr double kLambda0Tol = 1e-6;
constexpr double kGapCoefficientQuoted = 1.0471;
constexpr double kGapCoefficientTol = 1e-4;
constexpr double kSpecfunRelTol = 1e-10;
constexpr double kAiryAbsTol = 1e-10;
constexpr double kDerivativeTol = 1e-6;
constexpr double kGridRelTol = 1e-3;
constexpr double kGaussianTol = 0.02;
constexpr double kCauchyTol = 1e-3;
constexpr double kSigmas = 3.0;
constexpr double kNrMaxError = 0.02;
constexpr double kDensityWidthRelTol = 0.05;
constexpr double kUrEnergyRelTol = 0.02;
constexpr double kUrRateLow = 10.47;
constexpr double kUrRateHigh = 10.60;
constexpr double kMaxOutlierBinFraction = 0.01;
// probability the unevaluated (zero-error) histogram bins may carry
constexpr double kMaxSkippedMass = 1e-3;

// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void need(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!text_.empty()) text_ += "; ";
    text_ += what + (ok ? "" : " [x]");
  }
  Outcome outcome() const { return {pass_, text_}; }

 private:
  bool pass_ = true;
  std::string text_;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string pm(double v, double e) { return fmt(v) + " +- " + fmt(e, 2); }

// |value - target| <= k sigma
bool within(double value, double sigma, double target, double k = kSigmas) {
  return std::abs(value - target) <= k * sigma;
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return xs;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// e^x K_nu(x) = int_0^inf exp(-2 x sinh^2(t/2)) cosh(nu t) dt
double quadrature_k(int nu, double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double t) {
    const double s = std::sinh(0.5 * t);
    const double e = 2.0 * x * s * s;
    if (e > 800.0) return 0.0;
    return std::exp(-e) * std::cosh(nu * t);
  };
  return std::exp(-x) * integrator.integrate(f, 1e-15);
}

struct Run {
  EnsembleData data;
  ExperimentSummary summary;
};

Run simulate(const SimParams& p, std::size_t n_paths, std::size_t n_sweeps, std::size_t therm, double h,
             double q_max, std::uint64_t seed) {
  SamplerConfig s;
  s.n_paths = n_paths;
  s.n_sweeps = n_sweeps;
  s.therm_sweeps = therm;
  s.proposal_half_width = p.time_step();
  s.seed = seed;
  MeasurementConfig m;
  m.histogram_bin_width = h;
  m.histogram_q_min = -q_max;
  m.histogram_q_max = q_max;
  const auto t0 = std::chrono::steady_clock::now();
  Run r{run_experiment(p, s, m, jobs()), {}};
  r.summary = analyze(r.data);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "  [run m=" << p.mass() << " omega=" << p.omega() << " tau=" << p.time_step()
            << " n_t=" << p.n_slices() << ": " << n_paths << "x" << n_sweeps << " sweeps, " << fmt(secs, 3)
            << " s, acceptance " << fmt(r.data.chain_summary.acceptance(), 3) << "]\n";
  return r;
}

const ScalarEstimate& scalar(const Run& r, const std::string& name) {
  const ScalarEstimate* e = r.summary.scalar(name);
  if (!e) throw std::runtime_error("missing observable " + name);
  return *e;
}

// ---------------------------------------------------------------------------
// Deterministic criteria

Outcome criterion_1() {
  Report r;
  const double l0 = oracles::ultra_lambda0();
  const double g = oracles::ultra_gap_coefficient();
  // independent route: root of Boost's Ai' bracketed in [-1.1, -0.9]
  std::uintmax_t iters = 100;
  const auto root = boost::math::tools::toms748_solve([](double x) { return boost::math::airy_ai_prime(x); },
                                                      -1.1, -0.9, boost::math::tools::eps_tolerance<double>(52),
                                                      iters);
  const double l0_boost = -0.5 * (root.first + root.second) / std::cbrt(2.0);
  r.need(std::abs(l0 - kLambda0Quoted) <= kLambda0Tol, "lambda0 = " + fmt(l0, 12));
  r.need(std::abs(l0 - l0_boost) <= 1e-12, "Boost zero agrees");
  r.need(std::abs(g - kGapCoefficientQuoted) <= kGapCoefficientTol, "gap coefficient = " + fmt(g, 12));
  const double gap = oracles::ultra_oracle(0.1, 100.0).gap;
  // (m w^2)^(1/3) = 10; 10.47 is quoted to two decimals
  r.need(std::abs(gap - 10.0 * g) <= 1e-12 && std::abs(gap - 10.47) < 5e-3, "gap(0.1, 100) = " + fmt(gap, 8));
  return r.outcome();
}

Outcome criterion_2() {
  Report r;
  double worst_k = 0.0;
  for (double x : geometric(1e-8, 700.0, 181)) {
    worst_k = std::max({worst_k, rel(sf::bessel_k0(x), quadrature_k(0, x)), rel(sf::bessel_k1(x), quadrature_k(1, x))});
  }
  r.need(worst_k <= kSpecfunRelTol, "K0/K1 vs quadrature on [1e-8, 700]: max rel " + fmt(worst_k, 3));
  double worst_ai = 0.0;
  for (int i = 0; i <= 1200; ++i) {
    const double x = -30.0 + 0.05 * i;
    worst_ai = std::max({worst_ai, std::abs(sf::airy_ai(x) - boost::math::airy_ai(x)),
                         std::abs(sf::airy_ai_prime(x) - boost::math::airy_ai_prime(x))});
  }
  r.need(worst_ai <= kAiryAbsTol, "Ai/Ai' on [-30, 30]: max abs " + fmt(worst_ai, 3));
  double worst_d = 0.0;
  for (double x : {0.01, 0.1, 0.5, 1.0, 1.9, 2.1, 4.0, 10.0, 30.0, 100.0}) {
    const double h = 1e-4 * x;
    const double d = (-sf::bessel_k0(x + 2 * h) + 8 * sf::bessel_k0(x + h) - 8 * sf::bessel_k0(x - h) +
                      sf::bessel_k0(x - 2 * h)) /
                     (12 * h);
    worst_d = std::max(worst_d, rel(d, -sf::bessel_k1(x)));
  }
  r.need(worst_d <= kDerivativeTol, "dK0/dx = -K1: max rel " + fmt(worst_d, 3));
  return r.outcome();
}

Outcome criterion_3() {
  Report r;
  const struct {
    double m, w, target;
  } cases[] = {{100.0, 1.0, 100.5}, {0.1, 100.0, 8.086}};
  for (const auto& c : cases) {
    const auto g = oracles::grid_diagonalize(c.m, c.w, oracles::default_p_max(c.m, c.w), 4096);
    r.need(rel(g.eigenvalues[0], c.target) <= kGridRelTol,
           "E0(" + fmt(c.m) + ", " + fmt(c.w) + ") = " + fmt(g.eigenvalues[0], 8));
  }
  return r.outcome();
}

Outcome criterion_4() {
  Report r;
  {
    const double m = 500.0, tau = 0.1;  // m tau = 50
    const SimParams p(m, 0.0, tau, 10);
    const double width = std::sqrt(tau / m);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double dq = width * i / 100.0;
      const double ratio = std::exp(log_kinetic_kernel(dq, p) - log_kinetic_kernel(0.0, p));
      worst = std::max(worst, std::abs(ratio / std::exp(-m * dq * dq / (2 * tau)) - 1.0));
    }
    r.need(worst <= kGaussianTol, "m tau = 50: max |k/k0 / gauss - 1| over the thermal width " + fmt(worst, 3));
  }
  {
    const double tau = 1e-3, m = 0.01;
    const SimParams p(m, 0.0, tau, 10);
    double worst = 0.0;
    for (double dq : {0.0, 1e-3, 5e-3, 9.9e-3}) {
      const double r2 = tau * tau + dq * dq;
      if (m * std::sqrt(r2) > 1e-4) throw std::logic_error("outside the Cauchy regime");
      worst = std::max(worst, std::abs(std::exp(log_kinetic_kernel(dq, p)) * std::numbers::pi * r2 / tau - 1.0));
    }
    r.need(worst <= kCauchyTol, "m r <= 1e-4: max rel vs Cauchy " + fmt(worst, 3));
  }
  return r.outcome();
}

// ---------------------------------------------------------------------------
// Non-relativistic regime

const Run& nr_run() {
  static const Run run = simulate(SimParams(100.0, 1.0, 0.1, 100), 100, 2000, 1000, 0.005, 0.4, 1);
  return run;
}

Outcome criterion_5() {
  Report r;
  const Run& run = nr_run();
  const ScalarEstimate& t = scalar(run, "kinetic");
  const ScalarEstimate& v = scalar(run, "potential");
  const double t_m = t.mean - 100.0;
  r.need(within(t_m, t.std_error, 0.25) && t.std_error <= kNrMaxError, "T - m = " + pm(t_m, t.std_error));
  r.need(within(v.mean, v.std_error, 0.25) && v.std_error <= kNrMaxError, "V = " + pm(v.mean, v.std_error));
  return r.outcome();
}

Outcome criterion_6() {
  Report r;
  const ScalarEstimate& q2 = scalar(nr_run(), "q2");
  r.need(within(q2.mean, q2.std_error, 0.005), "q2 = " + pm(q2.mean, q2.std_error));
  std::vector<fits::DataPoint> pts;
  for (double m : {50.0, 100.0, 200.0}) {
    if (m == 100.0) {
      pts.push_back({m, q2.mean, q2.std_error});
      continue;
    }
    const Run run = simulate(SimParams(m, 1.0, 0.1, 100), 100, 2000, 1000, 0.005, 0.4, 1);
    const ScalarEstimate& e = scalar(run, "q2");
    pts.push_back({m, e.mean, e.std_error});
    r.need(true, "q2(m=" + fmt(m) + ") = " + pm(e.mean, e.std_error));
  }
  const fits::FitResult fit = fits::fit_power(pts, -1.0);
  r.need(fit.converged && within(fit.value("a"), fit.error("a"), 0.5),
         "a m^-1 fit: a = " + pm(fit.value("a"), fit.error("a")));
  return r.outcome();
}

Outcome criterion_7() {
  Report r;
  const auto& fit = nr_run().summary.density_fit;
  if (!fit) return {false, "no density fit"};
  const double b = fit->value("b"), e = fit->error("b");
  r.need(within(b, e, 100.0) && rel(b, 100.0) <= kDensityWidthRelTol, "b = " + pm(b, e));
  return r.outcome();
}

Outcome criterion_8() {
  Report r;
  const auto& fit = nr_run().summary.correlation_fit;
  if (!fit) return {false, "no correlator fit"};
  r.need(within(fit->value("b"), fit->error("b"), 1.0), "rate = " + pm(fit->value("b"), fit->error("b")));
  r.need(within(fit->value("a"), fit->error("a"), 0.005), "amplitude = " + pm(fit->value("a"), fit->error("a")));
  return r.outcome();
}

// ---------------------------------------------------------------------------
// Ultra-relativistic regime

const Run& ur_run() {
  static const Run run = simulate(SimParams(0.1, 100.0, 0.01, 1000), 50, 2000, 1000, 0.004, 0.4, 1);
  return run;
}

const oracles::OracleReport& ur_oracle() {
  static const oracles::OracleReport o = oracles::ultra_oracle(0.1, 100.0);
  return o;
}

Outcome criterion_9() {
  Report r;
  const ScalarEstimate& e = scalar(ur_run(), "energy");
  const double target = ur_oracle().ground_energy;
  r.need(within(e.mean, e.std_error, target) && rel(e.mean, target) <= kUrEnergyRelTol,
         "E = " + pm(e.mean, e.std_error) + " vs " + fmt(target, 7));
  return r.outcome();
}

Outcome criterion_10() {
  Report r;
  const Run& run = ur_run();
  const ObservableSeries t = series(run.data, Observable::kKinetic);
  const ObservableSeries v = series(run.data, Observable::kPotential);
  const double ratio = scalar(run, "kinetic").mean / scalar(run, "potential").mean;
  // linearized error: blocked error of (T - ratio V) / <V>
  ObservableSeries lin = t;
  for (std::size_t i = 0; i < lin.values.size(); ++i) lin.values[i] = t.values[i] - ratio * v.values[i];
  const double sigma = blocking_analysis(lin).std_error / scalar(run, "potential").mean;
  r.need(within(ratio, sigma, 2.0), "T/V = " + pm(ratio, sigma));
  return r.outcome();
}

Outcome criterion_11() {
  Report r;
  const ScalarEstimate& q2 = scalar(ur_run(), "q2");
  r.need(within(q2.mean, q2.std_error, ur_oracle().q_squared),
         "q2 = " + pm(q2.mean, q2.std_error) + " vs " + fmt(ur_oracle().q_squared, 8));
  return r.outcome();
}

Outcome criterion_12() {
  Report r;
  const auto& fit = ur_run().summary.correlation_fit;
  if (!fit) return {false, "no correlator fit"};
  const double a = fit->value("a"), ea = fit->error("a");
  const double b = fit->value("b"), eb = fit->error("b");
  r.need(within(a, ea, ur_oracle().correlation_amplitude),
         "amplitude = " + pm(a, ea) + " vs " + fmt(ur_oracle().correlation_amplitude, 6));
  r.need(b >= kUrRateLow - kSigmas * eb && b <= kUrRateHigh + kSigmas * eb,
         "rate = " + pm(b, eb) + " vs [" + fmt(kUrRateLow) + ", " + fmt(kUrRateHigh) + "]");
  return r.outcome();
}

Outcome criterion_13() {
  Report r;
  const HistogramDensity& h = *ur_run().summary.density;
  // bin averages of the exact density, 16-point midpoint rule per bin
  const int sub = 16;
  std::vector<double> grid;
  for (std::size_t b = 0; b < h.n_bins(); ++b) {
    for (int k = 0; k < sub; ++k) grid.push_back(h.bin_left(b) + (k + 0.5) * h.bin_width / sub);
  }
  const oracles::UltraDensity exact = oracles::ultra_density(0.1, 100.0, grid);
  std::size_t evaluated = 0, outliers = 0;
  double skipped_mass = 0.0;
  for (std::size_t b = 0; b < h.n_bins(); ++b) {
    double avg = 0.0;
    for (int k = 0; k < sub; ++k) avg += exact.rho[b * sub + k] / sub;
    if (!(h.errors[b] > 0.0)) {
      skipped_mass += avg * h.bin_width;
      continue;
    }
    ++evaluated;
    if (std::abs(h.masses[b] - avg) > kSigmas * h.errors[b]) ++outliers;
  }
  const double fraction = evaluated ? static_cast<double>(outliers) / static_cast<double>(evaluated) : 1.0;
  r.need(fraction <= kMaxOutlierBinFraction,
         std::to_string(outliers) + " of " + std::to_string(evaluated) + " bins beyond 3 sigma");
  r.need(skipped_mass <= kMaxSkippedMass, std::to_string(h.n_bins() - evaluated) +
                                              " empty bins holding exact mass " + fmt(skipped_mass, 2));
  return r.outcome();
}

// ---------------------------------------------------------------------------
// Property-based criteria

Outcome criterion_14() {
  Report r;
  const double e0 = oracles::grid_diagonalize(1.0, 1.0, oracles::default_p_max(1.0, 1.0), 4096).eigenvalues[0];
  // beta = 8 fixed; tau = 0.5 so that the Trotter bias is resolvable
  const Run coarse = simulate(SimParams(1.0, 1.0, 0.5, 16), 100, 4000, 500, 0.05, 5.0, 1);
  const Run fine = simulate(SimParams(1.0, 1.0, 0.25, 32), 100, 4000, 500, 0.05, 5.0, 1);
  const ScalarEstimate& ec = scalar(coarse, "energy");
  const ScalarEstimate& ef = scalar(fine, "energy");
  r.need(within(ef.mean, ef.std_error, e0), "E(tau=0.25) = " + pm(ef.mean, ef.std_error) + " vs grid " + fmt(e0, 8));
  r.need(std::abs(ef.mean - e0) < std::abs(ec.mean - e0),
         "E(tau=0.5) = " + pm(ec.mean, ec.std_error) + " is farther from the grid value");
  return r.outcome();
}

Outcome criterion_15() {
  Report r;
  for (ProposalKind kind : {ProposalKind::kUniform, ProposalKind::kMixture}) {
    const relosc::testing::ChiSquaredResult c = relosc::testing::conditional_chi_squared(kind);
    r.need(c.pass(), std::string(to_string(kind)) + ": chi2 = " + fmt(c.chi2, 5) + " < " + fmt(c.critical, 5) +
                         " (" + std::to_string(c.dof) + " dof)");
  }
  return r.outcome();
}

Outcome criterion_16() {
  Report r;
  const fs::path dir = fs::temp_directory_path() / "relosc_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "[physics]\nm = 0.1\nomega = 100\ntau = 0.01\nn_t = 200\n"
           "[sampler]\nn_paths = 6\nn_sweeps = 200\ntherm_sweeps = 100\nseed = 42\n"
           "[histogram]\nh = 0.004\nq_min = -0.4\nq_max = 0.4\n";
  }
  const std::string cfg = (dir / "run.ini").string();
  for (const char* j : {"1", "2"}) {
    const std::string out = (dir / (std::string("jobs") + j)).string();
    const char* argv[] = {"relosc", "run", "--config", cfg.c_str(), "--out", out.c_str(), "--jobs", j};
    std::ostringstream sink;
    if (cli::run_cli(8, argv, sink, sink) != cli::kSuccess) return {false, "run failed: " + sink.str()};
  }
  std::size_t files = 0, identical = 0;
  for (const auto& e : fs::directory_iterator(dir / "jobs1")) {
    ++files;
    const fs::path other = dir / "jobs2" / e.path().filename();
    if (fs::exists(other) && cli::read_file(e.path()) == cli::read_file(other)) ++identical;
  }
  r.need(files > 0 && identical == files,
         std::to_string(identical) + " of " + std::to_string(files) + " files byte-identical for --jobs 1 vs 2");
  fs::remove_all(dir);
  return r.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ultra-relativistic spectral constants", criterion_1},
      {"special functions vs independent oracles", criterion_2},
      {"grid eigensolver in both limits", criterion_3},
      {"kernel Gaussian and Cauchy limits", criterion_4},
      {"NR kinetic and potential", criterion_5},
      {"NR q2 and m^-1 scaling", criterion_6},
      {"NR density width", criterion_7},
      {"NR correlator", criterion_8},
      {"UR energy", criterion_9},
      {"UR virial ratio", criterion_10},
      {"UR q2", criterion_11},
      {"UR correlator", criterion_12},
      {"UR density vs exact", criterion_13},
      {"m = omega = 1 vs grid and tau convergence", criterion_14},
      {"Metropolis conditional chi-squared", criterion_15},
      {"determinism across --jobs", criterion_16},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(n)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
