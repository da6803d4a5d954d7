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

// Physical parameters, the periodic imaginary-time path and the log-domain
// short-time kernel of H = sqrt(p^2 + m^2) + m w^2 q^2 / 2 (hbar = c = 1).
//
// Free-particle link factor:
//   <q''| e^{-tau T} |q'> = (m/pi) (1 + (dq/tau)^2)^{-1/2} K1(m tau sqrt(1 + (dq/tau)^2))
// Every site additionally carries e^{-tau V(q_i)}. Paths are closed: q[N_t] == q[0].

#include <cstddef>
#include <span>
#include <vector>

namespace relosc {

/// Below this value of m*sqrt(tau^2 + dq^2) the kernel is indistinguishable
/// (to 1e-3 relative) from the massless Cauchy kernel tau / (pi (tau^2 + dq^2)).
inline constexpr double kMasslessKernelThreshold = 1e-4;

class SimParams {
 public:
  /// Throws ValidationError naming the offending parameter.
  SimParams(double mass, double omega, double time_step, std::size_t n_slices);

  double mass() const { return mass_; }
  double omega() const { return omega_; }
  double time_step() const { return time_step_; }
  std::size_t n_slices() const { return n_slices_; }
  double beta() const { return time_step_ * static_cast<double>(n_slices_); }
  double temperature() const { return 1.0 / beta(); }

  /// Rough gap estimate interpolating the two solvable limits; used only for
  /// the ground-state dominance warning.
  double estimated_gap() const;
  bool ground_state_dominated() const { return beta() * estimated_gap() >= 5.0; }

  SimParams with_mass(double m) const { return {m, omega_, time_step_, n_slices_}; }
  SimParams with_omega(double w) const { return {mass_, w, time_step_, n_slices_}; }

  friend bool operator==(const SimParams&, const SimParams&) = default;

 private:
  double mass_;
  double omega_;
  double time_step_;
  std::size_t n_slices_;
};

/// Closed imaginary-time path; index arithmetic wraps around.
class Path {
 public:
  explicit Path(std::size_t n_slices, double value = 0.0);
  explicit Path(std::vector<double> sites);

  std::size_t size() const { return sites_.size(); }
  double operator[](std::size_t i) const { return sites_[i]; }
  double& operator[](std::size_t i) { return sites_[i]; }

  std::size_t prev(std::size_t i) const { return i == 0 ? sites_.size() - 1 : i - 1; }
  std::size_t next(std::size_t i) const { return i + 1 == sites_.size() ? 0 : i + 1; }

  std::span<const double> sites() const { return sites_; }
  std::span<double> sites() { return sites_; }

  bool all_finite() const;

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<double> sites_;
};

double potential(double q, const SimParams& params);

/// ln of the free link factor for displacement dq over one time step.
double log_kinetic_kernel(double dq, const SimParams& params);

/// ln pi(q_i): both links touching site i plus that site's potential factor.
double log_site_weight(const Path& path, std::size_t i, const SimParams& params);

/// Value of the site weight if site i were moved to `candidate`.
double log_site_weight_at(const Path& path, std::size_t i, double candidate,
                          const SimParams& params);

double log_path_weight(const Path& path, const SimParams& params);

}  // namespace relosc
