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

#pragma once

// Reference results for the oscillator:
//  - sho_oracle: closed forms of the non-relativistic limit H = m + p^2/2m + V
//  - ultra_oracle: closed forms of H = |p| + V, solved in momentum space by
//    Airy functions; the even ground state has Ai'(z0) = 0 and the first odd
//    state Ai(z1) = 0 at p = 0, giving E = |zero| (m w^2 / 2)^(1/3)
//  - grid_diagonalize: finite differences of the full Hamiltonian in momentum
//    space, valid for any m, w.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace relosc::oracles {

struct DensityPoint {
  double q;
  double rho;
};

struct OracleReport {
  std::string regime;  // "sho", "ultra" or "grid"
  double mass = 0.0;
  double omega = 0.0;
  double ground_energy = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double q_squared = 0.0;
  double gap = 0.0;
  double correlation_amplitude = 0.0;
  double correlation_rate = 0.0;
  std::vector<DensityPoint> density;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> diagnostics;
};

/// |a'_1| / 2^(1/3): E0 = lambda0 (m w^2)^(1/3) in the ultra-relativistic limit.
double ultra_lambda0();
/// |a_1| / 2^(1/3) - lambda0: gap = coefficient * (m w^2)^(1/3).
double ultra_gap_coefficient();

OracleReport sho_oracle(double mass, double omega);
OracleReport ultra_oracle(double mass, double omega);

/// Evenly spaced symmetric grid on [-half_width, half_width].
std::vector<double> symmetric_grid(double half_width, std::size_t n_points);

struct UltraDensity {
  std::vector<double> rho;
  /// Fraction of the momentum-space norm beyond the cutoff.
  double tail_fraction = 0.0;
  /// Sup-norm change of rho in the last resolution doubling.
  double resolution_change = 0.0;
  double momentum_cutoff = 0.0;
};

/// Position density of the ultra-relativistic ground state on q_grid, from a
/// cosine transform of phi(p) = Ai((2/(m w^2))^(1/3) (|p| - E0)).
UltraDensity ultra_density(double mass, double omega, std::span<const double> q_grid);

struct GridSpectrum {
  std::vector<double> eigenvalues;          // lowest k at n_points
  std::vector<double> eigenvalues_doubled;  // lowest k at 2 n_points
  double relative_change = 0.0;             // of E0 under doubling
  std::size_t n_points = 0;
  double p_max = 0.0;
  OracleReport report;
};

/// Lowest `n_levels` eigenvalues of sqrt(p^2+m^2) - (m w^2/2) d^2/dp^2 on
/// [-p_max, p_max] with Dirichlet ends. Throws ConvergenceError when doubling
/// n_points moves E0 by more than 1e-4 relative.
GridSpectrum grid_diagonalize(double mass, double omega, double p_max, std::size_t n_points,
                              std::size_t n_levels = 2);

/// p_max = 10 * max(m, (m w^2)^(1/3)), the smallest recommended cutoff.
double default_p_max(double mass, double omega);

}  // namespace relosc::oracles
