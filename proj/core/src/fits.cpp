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

#include "relosc/fits.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "relosc/errors.hpp"

namespace relosc::fits {

const FitParameter& FitResult::parameter(const std::string& name) const {
  for (const FitParameter& p : parameters) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("fit result has no parameter '" + name + "'");
}

namespace {

void check_points(std::span<const DataPoint> points, std::size_t min_points, const char* who) {
  if (points.size() < min_points) {
    throw ValidationError(std::string(who) + ": need at least " + std::to_string(min_points) +
                          " points, got " + std::to_string(points.size()));
  }
  for (const DataPoint& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.sigma)) {
      throw ValidationError(std::string(who) + ": non-finite data point");
    }
  }
}

bool all_sigma_zero(std::span<const DataPoint> points) {
  return std::all_of(points.begin(), points.end(), [](const DataPoint& p) { return p.sigma == 0.0; });
}

void require_positive_sigma(std::span<const DataPoint> points, const char* who) {
  for (const DataPoint& p : points) {
    if (!(p.sigma > 0.0)) {
      throw ValidationError(std::string(who) + ": every sigma must be positive");
    }
  }
}

// Two-parameter model y = a * exp(-b * u(x)) with design variable u.
struct DecayModel {
  const char* name;
  std::function<double(double)> design;
};

FitResult fit_decay(std::span<const DataPoint> points, const DecayModel& model) {
  check_points(points, 3, model.name);
  require_positive_sigma(points, model.name);

  std::vector<double> u(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) u[i] = model.design(points[i].x);
  const auto [u_min, u_max] = std::minmax_element(u.begin(), u.end());
  if (*u_max - *u_min <= 1e-14 * std::max(1.0, std::fabs(*u_max))) {
    throw ValidationError(std::string(model.name) + ": degenerate data, all x equivalent");
  }

  // Log-linear start: ln y = ln a - b u with weights (y/sigma)^2.
  double sw = 0, su = 0, sl = 0, suu = 0, sul = 0;
  std::size_t n_positive = 0;
  double u_pos_min = HUGE_VAL, u_pos_max = -HUGE_VAL;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DataPoint& p = points[i];
    if (!(p.y > 0.0)) continue;
    const double w = (p.y / p.sigma) * (p.y / p.sigma);
    const double l = std::log(p.y);
    sw += w;
    su += w * u[i];
    sl += w * l;
    suu += w * u[i] * u[i];
    sul += w * u[i] * l;
    ++n_positive;
    u_pos_min = std::min(u_pos_min, u[i]);
    u_pos_max = std::max(u_pos_max, u[i]);
  }
  if (n_positive < 2 || !(u_pos_max > u_pos_min)) {
    throw ValidationError(std::string(model.name) +
                          ": need two positive points at distinct x for initialization");
  }
  const double det = sw * suu - su * su;
  Eigen::Vector2d theta;
  theta(1) = -(sw * sul - su * sl) / det;
  theta(0) = std::exp((sl + theta(1) * su) / sw);

  auto chi2_at = [&](const Eigen::Vector2d& t) {
    double c = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double r = (points[i].y - t(0) * std::exp(-t(1) * u[i])) / points[i].sigma;
      c += r * r;
    }
    return c;
  };
  auto normal_equations = [&](const Eigen::Vector2d& t, Eigen::Matrix2d& jtj, Eigen::Vector2d& jtr) {
    jtj.setZero();
    jtr.setZero();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double e = std::exp(-t(1) * u[i]);
      const double inv_s = 1.0 / points[i].sigma;
      const Eigen::Vector2d g(e * inv_s, -t(0) * u[i] * e * inv_s);
      const double r = (points[i].y - t(0) * e) * inv_s;
      jtj += g * g.transpose();
      jtr += g * r;
    }
  };

  FitResult result;
  result.model = model.name;
  result.n_points = points.size();
  double chi2 = chi2_at(theta);
  double lambda = 1e-3;
  Eigen::Matrix2d jtj;
  Eigen::Vector2d jtr;
  constexpr int kMaxIterations = 500;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    normal_equations(theta, jtj, jtr);
    bool improved = false;
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    while (lambda < 1e16) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() *= (1.0 + lambda);
      step = damped.ldlt().solve(jtr);
      const Eigen::Vector2d trial = theta + step;
      const double trial_chi2 = chi2_at(trial);
      if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
        theta = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    const bool tiny_step = std::fabs(step(0)) <= 1e-13 * std::fabs(theta(0)) &&
                           std::fabs(step(1)) <= 1e-13 * std::max(std::fabs(theta(1)), 1e-300);
    if (!improved || tiny_step) {
      result.converged = true;
      break;
    }
  }
  normal_equations(theta, jtj, jtr);
  // Converged means the gradient vanishes relative to its scale.
  const double grad_scale = std::sqrt(jtj(0, 0) * std::max(chi2, 1e-300)) +
                            std::sqrt(jtj(1, 1) * std::max(chi2, 1e-300));
  double signal = 0.0;
  for (const DataPoint& p : points) signal += (p.y / p.sigma) * (p.y / p.sigma);
  const bool exact = chi2 <= 1e-24 * signal;
  const bool stationary = exact || jtr.norm() <= 1e-6 * grad_scale;
  result.converged = result.converged && stationary;
  result.iterations = iter;
  if (!result.converged) {
    result.diagnostics = "Gauss-Newton did not reach a stationary point after " +
                         std::to_string(iter) + " iterations; chi2 = " + std::to_string(chi2) +
                         ", |J^T r| = " + std::to_string(jtr.norm());
  }
  const Eigen::Matrix2d cov = jtj.inverse();
  result.parameters = {{"a", theta(0), std::sqrt(std::max(cov(0, 0), 0.0))},
                       {"b", theta(1), std::sqrt(std::max(cov(1, 1), 0.0))}};
  result.chi_squared = chi2;
  result.chi_squared_per_dof = points.size() > 2 ? chi2 / static_cast<double>(points.size() - 2) : 0.0;
  return result;
}

// y = a * g(x) with fixed g; unweighted when every sigma is zero.
FitResult fit_linear_amplitude(std::span<const DataPoint> points, const char* name,
                               const std::function<double(double)>& basis) {
  check_points(points, 1, name);
  const bool unweighted = all_sigma_zero(points);
  if (!unweighted) require_positive_sigma(points, name);

  double sgg = 0.0, sgy = 0.0;
  for (const DataPoint& p : points) {
    const double g = basis(p.x);
    if (!std::isfinite(g)) throw ValidationError(std::string(name) + ": basis not finite at x");
    const double w = unweighted ? 1.0 : 1.0 / (p.sigma * p.sigma);
    sgg += w * g * g;
    sgy += w * g * p.y;
  }
  if (!(sgg > 0.0)) throw ValidationError(std::string(name) + ": degenerate design");
  const double a = sgy / sgg;
  double chi2 = 0.0;
  for (const DataPoint& p : points) {
    const double r = p.y - a * basis(p.x);
    chi2 += unweighted ? r * r : (r / p.sigma) * (r / p.sigma);
  }
  const std::size_t n = points.size();
  FitResult result;
  result.model = name;
  result.n_points = n;
  result.weighted = !unweighted;
  result.converged = true;
  double err;
  if (unweighted) {
    err = n > 1 ? std::sqrt(chi2 / static_cast<double>(n - 1) / sgg) : 0.0;
  } else {
    err = std::sqrt(1.0 / sgg);
  }
  result.parameters = {{"a", a, err}};
  result.chi_squared = chi2;
  result.chi_squared_per_dof = n > 1 ? chi2 / static_cast<double>(n - 1) : 0.0;
  return result;
}

}  // namespace

FitResult fit_exponential(std::span<const DataPoint> points) {
  return fit_decay(points, {"exponential", [](double x) { return std::fabs(x); }});
}

FitResult fit_gaussian(std::span<const DataPoint> points) {
  return fit_decay(points, {"gaussian", [](double x) { return x * x; }});
}

FitResult fit_constant(std::span<const DataPoint> points) {
  return fit_linear_amplitude(points, "constant", [](double) { return 1.0; });
}

FitResult fit_power(std::span<const DataPoint> points, double exponent, double scale) {
  if (!std::isfinite(exponent) || !std::isfinite(scale) || scale == 0.0) {
    throw ValidationError("power: exponent and scale must be finite, scale nonzero");
  }
  FitResult r = fit_linear_amplitude(points, "power", [exponent, scale](double x) {
    return scale * std::pow(x, exponent);
  });
  return r;
}

double evaluate(const FitResult& fit, double x, double exponent, double scale) {
  if (fit.model == "exponential") return fit.value("a") * std::exp(-fit.value("b") * std::fabs(x));
  if (fit.model == "gaussian") return fit.value("a") * std::exp(-fit.value("b") * x * x);
  if (fit.model == "constant") return fit.value("a");
  if (fit.model == "power") return fit.value("a") * scale * std::pow(x, exponent);
  throw std::invalid_argument("unknown fit model '" + fit.model + "'");
}

double parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  if (slash == std::string::npos) {
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
    return v;
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  std::size_t used_den = 0;
  const double n = std::stod(num, &used);
  const double d = std::stod(den, &used_den);
  if (used != num.size() || used_den != den.size() || d == 0.0) {
    throw std::invalid_argument("not a rational: '" + text + "'");
  }
  return n / d;
}

}  // namespace relosc::fits
