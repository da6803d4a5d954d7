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

#include "relosc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relosc/errors.hpp"
#include "relosc/specfun.hpp"

namespace relosc {

SimParams::SimParams(double mass, double omega, double time_step, std::size_t n_slices)
    : mass_(mass), omega_(omega), time_step_(time_step), n_slices_(n_slices) {
  if (!std::isfinite(mass) || !(mass > 0.0)) {
    throw ValidationError("m: mass must be positive and finite (got " + std::to_string(mass) +
                          "); use a small positive mass for the massless limit");
  }
  if (!std::isfinite(omega) || omega < 0.0) {
    throw ValidationError("omega: frequency must be non-negative and finite (got " +
                          std::to_string(omega) + ")");
  }
  if (!std::isfinite(time_step) || !(time_step > 0.0)) {
    throw ValidationError("tau: time step must be positive and finite (got " +
                          std::to_string(time_step) + ")");
  }
  if (n_slices < 3) {
    throw ValidationError("n_t: at least 3 time slices are required (got " +
                          std::to_string(n_slices) + ")");
  }
}

double SimParams::estimated_gap() const {
  // SHO gap w and the ultra-relativistic gap 1.0471 (m w^2)^(1/3); the true
  // gap lies near the smaller of the two.
  const double ultra = 1.0471406 * std::cbrt(mass_ * omega_ * omega_);
  return std::min(omega_, ultra);
}

Path::Path(std::size_t n_slices, double value) : sites_(n_slices, value) {}

Path::Path(std::vector<double> sites) : sites_(std::move(sites)) {}

bool Path::all_finite() const {
  return std::all_of(sites_.begin(), sites_.end(), [](double q) { return std::isfinite(q); });
}

double potential(double q, const SimParams& params) {
  const double w = params.omega();
  return 0.5 * params.mass() * w * w * q * q;
}

double log_kinetic_kernel(double dq, const SimParams& params) {
  const double m = params.mass();
  const double tau = params.time_step();
  const double r2 = tau * tau + dq * dq;
  const double r = std::sqrt(r2);
  const double x = m * r;
  if (x <= kMasslessKernelThreshold) {
    // x K1(x) = 1 + O(x^2 ln x)
    return std::log(tau / (std::numbers::pi * r2));
  }
  const specfun::ScaledK1 k1 = specfun::bessel_k1_split(x);
  return std::log(m * tau * k1.mantissa / (std::numbers::pi * r)) - k1.exponent;
}

double log_site_weight_at(const Path& path, std::size_t i, double candidate,
                          const SimParams& params) {
  const double left = path[path.prev(i)];
  const double right = path[path.next(i)];
  return log_kinetic_kernel(candidate - left, params) +
         log_kinetic_kernel(right - candidate, params) -
         params.time_step() * potential(candidate, params);
}

double log_site_weight(const Path& path, std::size_t i, const SimParams& params) {
  return log_site_weight_at(path, i, path[i], params);
}

double log_path_weight(const Path& path, const SimParams& params) {
  double total = 0.0;
  const double tau = params.time_step();
  for (std::size_t i = 0; i < path.size(); ++i) {
    total += log_kinetic_kernel(path[path.next(i)] - path[i], params);
    total -= tau * potential(path[i], params);
  }
  return total;
}

}  // namespace relosc
