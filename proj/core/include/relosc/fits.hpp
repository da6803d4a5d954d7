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

// Weighted least-squares fits of the functional forms used to summarise runs:
//   exponential  y = a exp(-b |x|)
//   gaussian     y = a exp(-b x^2)
//   constant     y = a
//   power        y = a * scale * x^exponent   (exponent and scale fixed)
//
// The two nonlinear forms start from a weighted log-linear fit of the points
// with y > 0 and are refined by damped Gauss-Newton on all points. Parameter
// errors are square roots of the diagonal of the inverse curvature matrix
// (not rescaled by chi^2/dof).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace relosc::fits {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;
};

struct FitParameter {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> parameters;
  double chi_squared = 0.0;
  double chi_squared_per_dof = 0.0;
  std::size_t n_points = 0;
  bool weighted = true;
  bool converged = false;
  int iterations = 0;
  std::string diagnostics;

  /// Throws std::out_of_range for an unknown name.
  const FitParameter& parameter(const std::string& name) const;
  double value(const std::string& name) const { return parameter(name).value; }
  double error(const std::string& name) const { return parameter(name).std_error; }
};

FitResult fit_exponential(std::span<const DataPoint> points);
FitResult fit_gaussian(std::span<const DataPoint> points);

/// Weighted mean. When every sigma is zero the fit is unweighted and the
/// error is the standard error of the mean.
FitResult fit_constant(std::span<const DataPoint> points);

/// Single-amplitude fit; weighting convention as fit_constant.
FitResult fit_power(std::span<const DataPoint> points, double exponent, double scale = 1.0);

/// Evaluates a fitted model at x.
double evaluate(const FitResult& fit, double x, double exponent = 0.0, double scale = 1.0);

/// Parses "-2/3", "0.5", "2" into a double. Throws std::invalid_argument.
double parse_rational(const std::string& text);

}  // namespace relosc::fits
