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

#include "relosc/oracles.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "relosc/errors.hpp"
#include "relosc/specfun.hpp"

namespace relosc::oracles {
namespace {

constexpr std::size_t kDensityPoints = 401;
constexpr double kDensityHalfWidthInSigma = 12.0;

void require_physical(double mass, double omega, const char* who) {
  if (!std::isfinite(mass) || !(mass > 0.0)) {
    throw ValidationError(std::string(who) + ": m must be positive");
  }
  if (!std::isfinite(omega) || !(omega > 0.0)) {
    throw ValidationError(std::string(who) + ": omega must be positive");
  }
}

// 32-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::array<double, 32> nodes{};
  std::array<double, 32> weights{};
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule = [] {
    GaussLegendre r;
    constexpr int n = 32;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Quadrature composite_rule(double a, double b, std::size_t panels) {
  const GaussLegendre& gl = gauss_legendre();
  Quadrature q;
  q.nodes.reserve(panels * gl.nodes.size());
  q.weights.reserve(panels * gl.nodes.size());
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = a + width * (static_cast<double>(k) + 0.5);
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      q.nodes.push_back(mid + 0.5 * width * gl.nodes[j]);
      q.weights.push_back(0.5 * width * gl.weights[j]);
    }
  }
  return q;
}

std::vector<DensityPoint> tabulate(std::span<const double> grid, std::span<const double> rho) {
  std::vector<DensityPoint> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = {grid[i], rho[i]};
  return out;
}

// Largest Airy argument kept by the momentum cutoff; Ai(10) ~ 1e-10.
constexpr double kAiryCutoff = 10.0;

}  // namespace

double ultra_lambda0() {
  static const double value = -specfun::airy_ai_prime_zero(1) / std::cbrt(2.0);
  return value;
}

double ultra_gap_coefficient() {
  static const double value = -specfun::airy_ai_zero(1) / std::cbrt(2.0) - ultra_lambda0();
  return value;
}

std::vector<double> symmetric_grid(double half_width, std::size_t n_points) {
  if (n_points < 2 || !(half_width > 0.0)) {
    throw ValidationError("symmetric_grid: need at least 2 points and positive half width");
  }
  std::vector<double> g(n_points);
  const double step = 2.0 * half_width / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    // mirror explicitly so the grid is exactly symmetric
    const double v = -half_width + step * static_cast<double>(i);
    g[i] = v;
  }
  for (std::size_t i = 0; i < n_points / 2; ++i) g[n_points - 1 - i] = -g[i];
  if (n_points % 2 == 1) g[n_points / 2] = 0.0;
  return g;
}

OracleReport sho_oracle(double mass, double omega) {
  require_physical(mass, omega, "sho_oracle");
  OracleReport r;
  r.regime = "sho";
  r.mass = mass;
  r.omega = omega;
  r.ground_energy = mass + 0.5 * omega;
  r.potential = 0.25 * omega;
  r.kinetic = mass + 0.25 * omega;
  r.q_squared = 1.0 / (2.0 * mass * omega);
  r.gap = omega;
  r.correlation_amplitude = r.q_squared;
  r.correlation_rate = omega;
  const double exponent = mass * omega;
  const auto grid = symmetric_grid(kDensityHalfWidthInSigma * std::sqrt(r.q_squared), kDensityPoints);
  std::vector<double> rho(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rho[i] = std::sqrt(exponent / std::numbers::pi) * std::exp(-exponent * grid[i] * grid[i]);
  }
  r.density = tabulate(grid, rho);
  r.diagnostics = {{"density_exponent", exponent}};
  if (omega >= mass) {
    r.warnings.push_back("sho oracle used with omega >= m; the non-relativistic limit needs m >> omega");
  }
  return r;
}

OracleReport ultra_oracle(double mass, double omega) {
  require_physical(mass, omega, "ultra_oracle");
  const double lambda0 = ultra_lambda0();
  const double scale = std::cbrt(mass * omega * omega);
  OracleReport r;
  r.regime = "ultra";
  r.mass = mass;
  r.omega = omega;
  r.ground_energy = lambda0 * scale;
  r.kinetic = 2.0 * r.ground_energy / 3.0;
  r.potential = r.ground_energy / 3.0;
  r.q_squared = 2.0 * lambda0 / (3.0 * scale * scale);
  r.gap = ultra_gap_coefficient() * scale;
  r.correlation_amplitude = r.q_squared;
  r.correlation_rate = r.gap;
  const auto grid = symmetric_grid(kDensityHalfWidthInSigma * std::sqrt(r.q_squared), kDensityPoints);
  const UltraDensity dens = ultra_density(mass, omega, grid);
  r.density = tabulate(grid, dens.rho);
  r.diagnostics = {{"lambda0", lambda0},
                   {"gap_coefficient", ultra_gap_coefficient()},
                   {"density_tail_fraction", dens.tail_fraction},
                   {"density_resolution_change", dens.resolution_change}};
  if (omega <= mass) {
    r.warnings.push_back("ultra oracle used with omega <= m; the ultra-relativistic limit needs omega >> m");
  }
  if (dens.tail_fraction > 1e-6) {
    r.warnings.push_back("density: momentum tail beyond cutoff carries " +
                         std::to_string(dens.tail_fraction) + " of the norm");
  }
  return r;
}

UltraDensity ultra_density(double mass, double omega, std::span<const double> q_grid) {
  require_physical(mass, omega, "ultra_density");
  if (q_grid.empty()) throw ValidationError("ultra_density: empty grid");
  const double scale = std::cbrt(mass * omega * omega);
  const double e0 = ultra_lambda0() * scale;
  const double c = std::cbrt(2.0 / (mass * omega * omega));
  const double cutoff = e0 + kAiryCutoff / c;

  UltraDensity out;
  out.momentum_cutoff = cutoff;
  auto evaluate = [&](std::size_t panels) {
    const Quadrature rule = composite_rule(0.0, cutoff, panels);
    std::vector<double> phi(rule.nodes.size());
    double norm = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
      phi[j] = specfun::airy_ai(c * (rule.nodes[j] - e0));
      norm += rule.weights[j] * phi[j] * phi[j];
    }
    std::vector<double> rho(q_grid.size());
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
      const double q = std::fabs(q_grid[i]);
      double amp = 0.0;
      for (std::size_t j = 0; j < phi.size(); ++j) {
        amp += rule.weights[j] * phi[j] * std::cos(rule.nodes[j] * q);
      }
      rho[i] = amp * amp / (std::numbers::pi * norm);
    }
    return std::pair{rho, norm};
  };

  std::size_t panels = 16;
  auto [rho, norm] = evaluate(panels);
  double change = HUGE_VAL;
  while (change > 1e-6 && panels < (1u << 14)) {
    panels *= 2;
    auto [finer, finer_norm] = evaluate(panels);
    change = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) change = std::max(change, std::fabs(finer[i] - rho[i]));
    rho = std::move(finer);
    norm = finer_norm;
  }
  out.rho = std::move(rho);
  out.resolution_change = change;

  // Norm beyond the cutoff, in the Airy variable up to its support range.
  const Quadrature tail = composite_rule(kAiryCutoff, kAiryCutoff + 10.0, 8);
  double tail_norm = 0.0;
  for (std::size_t j = 0; j < tail.nodes.size(); ++j) {
    const double a = specfun::airy_ai(tail.nodes[j]);
    tail_norm += tail.weights[j] * a * a;
  }
  out.tail_fraction = (tail_norm / c) / (norm + tail_norm / c);
  return out;
}

double default_p_max(double mass, double omega) {
  return 10.0 * std::max(mass, std::cbrt(mass * omega * omega));
}

namespace {

struct TridiagonalSolution {
  std::vector<double> values;
  std::vector<double> vectors;  // column-major n x k
};

TridiagonalSolution lowest_eigenpairs(double mass, double omega, double p_max, std::size_t n,
                                      std::size_t k, bool want_vectors) {
  const double h = 2.0 * p_max / static_cast<double>(n + 1);
  const double hop = 0.5 * mass * omega * omega / (h * h);
  std::vector<double> d(n), e(n - 1, -hop);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = -p_max + h * static_cast<double>(j + 1);
    d[j] = std::hypot(p, mass) + 2.0 * hop;
  }
  TridiagonalSolution sol;
  sol.values.assign(n, 0.0);
  if (want_vectors) sol.vectors.assign(n * k, 0.0);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevx(
      LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', static_cast<lapack_int>(n), d.data(),
      e.data(), 0.0, 0.0, 1, static_cast<lapack_int>(k), 2.0 * LAPACKE_dlamch('S'), &found,
      sol.values.data(), want_vectors ? sol.vectors.data() : nullptr, static_cast<lapack_int>(n),
      ifail.data());
  if (info != 0 || found != static_cast<lapack_int>(k)) {
    throw ConvergenceError("grid_diagonalize: dstevx failed (info = " + std::to_string(info) + ")");
  }
  sol.values.resize(k);
  return sol;
}

}  // namespace

GridSpectrum grid_diagonalize(double mass, double omega, double p_max, std::size_t n_points,
                              std::size_t n_levels) {
  require_physical(mass, omega, "grid_diagonalize");
  if (n_points < 512) throw ValidationError("grid_diagonalize: n_points must be at least 512");
  if (!(p_max > 0.0)) throw ValidationError("grid_diagonalize: p_max must be positive");
  n_levels = std::max<std::size_t>(n_levels, 2);

  const TridiagonalSolution coarse = lowest_eigenpairs(mass, omega, p_max, n_points, n_levels, true);
  const TridiagonalSolution fine = lowest_eigenpairs(mass, omega, p_max, 2 * n_points, n_levels, false);

  GridSpectrum out;
  out.eigenvalues = coarse.values;
  out.eigenvalues_doubled = fine.values;
  out.n_points = n_points;
  out.p_max = p_max;
  out.relative_change = std::fabs(fine.values[0] - coarse.values[0]) / std::fabs(fine.values[0]);
  if (out.relative_change > 1e-4) {
    throw ConvergenceError("grid_diagonalize: E0 changes by " + std::to_string(out.relative_change) +
                           " relative under doubling n_points; increase n_points or adjust p_max");
  }

  const std::size_t n = n_points;
  const double h = 2.0 * p_max / static_cast<double>(n + 1);
  const double stiffness = 0.5 * mass * omega * omega;
  std::span<const double> phi0(coarse.vectors.data(), n);
  std::span<const double> phi1(coarse.vectors.data() + n, n);

  double kinetic = 0.0, potential = 0.0, q01 = 0.0, norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = -p_max + h * static_cast<double>(j + 1);
    kinetic += std::hypot(p, mass) * phi0[j] * phi0[j];
    const double next = j + 1 < n ? phi0[j + 1] : 0.0;
    potential += (next - phi0[j]) * (next - phi0[j]);
    const double up = j + 1 < n ? phi1[j + 1] : 0.0;
    const double down = j > 0 ? phi1[j - 1] : 0.0;
    q01 += phi0[j] * (up - down) / (2.0 * h);
    norm += phi0[j] * phi0[j];
  }
  potential += phi0[0] * phi0[0];  // link to the Dirichlet end at -p_max
  potential *= stiffness / (h * h);

  OracleReport& r = out.report;
  r.regime = "grid";
  r.mass = mass;
  r.omega = omega;
  r.ground_energy = coarse.values[0];
  r.kinetic = kinetic / norm;
  r.potential = potential / norm;
  r.q_squared = 2.0 * r.potential / (mass * omega * omega);
  r.gap = coarse.values[1] - coarse.values[0];
  r.correlation_amplitude = q01 * q01 / norm;
  r.correlation_rate = r.gap;

  const auto grid = symmetric_grid(kDensityHalfWidthInSigma * std::sqrt(r.q_squared), kDensityPoints);
  std::vector<double> rho(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double amp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = -p_max + h * static_cast<double>(j + 1);
      amp += phi0[j] * std::cos(p * grid[i]);
    }
    rho[i] = h * amp * amp / (2.0 * std::numbers::pi * norm);
  }
  r.density = tabulate(grid, rho);
  r.diagnostics = {{"n_points", static_cast<double>(n)},
                   {"p_max", p_max},
                   {"e0_doubled", fine.values[0]},
                   {"relative_change", out.relative_change},
                   {"virial_residual", r.ground_energy - r.kinetic - r.potential}};
  return out;
}

}  // namespace relosc::oracles
