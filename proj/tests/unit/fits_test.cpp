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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "relosc/errors.hpp"

using namespace relosc::fits;

namespace {

std::vector<DataPoint> sample(const std::function<double(double)>& f, double x0, double x1, int n,
                              double rel_sigma) {
  std::vector<DataPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (x1 - x0) * i / (n - 1);
    const double y = f(x);
    pts.push_back({x, y, rel_sigma * std::abs(y)});
  }
  return pts;
}

// sum_i r_i/sigma_i^2 * d model / d theta_k, relative to the gradient scale
double normal_equation_residual(const FitResult& fit, std::span<const DataPoint> pts,
                                const std::vector<std::function<double(double)>>& grads) {
  double worst = 0.0;
  for (const auto& g : grads) {
    double sum = 0.0;
    double scale = 0.0;
    for (const DataPoint& p : pts) {
      const double w = 1.0 / (p.sigma * p.sigma);
      const double r = p.y - evaluate(fit, p.x);
      sum += w * r * g(p.x);
      scale += w * std::abs(p.y * g(p.x));
    }
    worst = std::max(worst, std::abs(sum) / scale);
  }
  return worst;
}

}  // namespace

TEST(Exponential, ExactRecovery) {
  const auto pts = sample([](double x) { return 2.0 * std::exp(-3.0 * x); }, 0.0, 2.0, 15, 0.01);
  const FitResult f = fit_exponential(pts);
  EXPECT_TRUE(f.converged) << f.diagnostics;
  EXPECT_NEAR(f.value("a"), 2.0, 1e-8);
  EXPECT_NEAR(f.value("b"), 3.0, 1e-8);
  EXPECT_NEAR(f.chi_squared, 0.0, 1e-12);
  EXPECT_GT(f.error("a"), 0.0);
  EXPECT_EQ(f.model, "exponential");
}

TEST(Exponential, UsesAbsoluteValueOfX) {
  const auto pts = sample([](double x) { return 0.5 * std::exp(-1.5 * std::abs(x)); }, -2.0, 2.0, 21, 0.02);
  const FitResult f = fit_exponential(pts);
  EXPECT_NEAR(f.value("a"), 0.5, 1e-8);
  EXPECT_NEAR(f.value("b"), 1.5, 1e-8);
}

TEST(Gaussian, ExactRecoveryAndNormalization) {
  const double b = 100.0;
  const double a = std::sqrt(b / std::numbers::pi);
  const auto pts = sample([&](double x) { return a * std::exp(-b * x * x); }, -0.2, 0.2, 41, 0.01);
  const FitResult f = fit_gaussian(pts);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.value("a"), a, 1e-8 * a);
  EXPECT_NEAR(f.value("b"), b, 1e-8 * b);
  EXPECT_NEAR(f.value("a") * std::sqrt(std::numbers::pi / f.value("b")), 1.0, 1e-8);
}

TEST(Nonlinear, CoverageUnderNoise) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> g(0.0, 1.0);
  const int trials = 1000;
  int exp_a = 0, exp_b = 0, gau_a = 0, gau_b = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<DataPoint> e, q;
    for (int i = 0; i < 12; ++i) {
      const double x = 0.1 * i;
      const double y = 2.0 * std::exp(-3.0 * x);
      e.push_back({x, y * (1.0 + 0.01 * g(rng)), 0.01 * y});
      const double xq = -0.3 + 0.05 * i;
      const double yq = 5.0 * std::exp(-10.0 * xq * xq);
      q.push_back({xq, yq * (1.0 + 0.01 * g(rng)), 0.01 * yq});
    }
    const FitResult fe = fit_exponential(e);
    const FitResult fq = fit_gaussian(q);
    exp_a += std::abs(fe.value("a") - 2.0) <= 3 * fe.error("a");
    exp_b += std::abs(fe.value("b") - 3.0) <= 3 * fe.error("b");
    gau_a += std::abs(fq.value("a") - 5.0) <= 3 * fq.error("a");
    gau_b += std::abs(fq.value("b") - 10.0) <= 3 * fq.error("b");
  }
  EXPECT_GE(exp_a, 990);
  EXPECT_GE(exp_b, 990);
  EXPECT_GE(gau_a, 990);
  EXPECT_GE(gau_b, 990);
}

TEST(Nonlinear, NormalEquationsAtOptimum) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<DataPoint> e, q;
  for (int i = 0; i < 20; ++i) {
    const double x = 0.05 * i;
    const double y = 0.3 * std::exp(-2.0 * x);
    e.push_back({x, y + 0.02 * y * g(rng), 0.02 * y});
    const double xq = -0.5 + 0.05 * i;
    const double yq = 1.2 * std::exp(-4.0 * xq * xq);
    q.push_back({xq, yq + 0.05 * g(rng), 0.05});
  }
  const FitResult fe = fit_exponential(e);
  const double a = fe.value("a"), b = fe.value("b");
  EXPECT_LT(normal_equation_residual(fe, e,
                                     {[&](double x) { return std::exp(-b * x); },
                                      [&](double x) { return -a * x * std::exp(-b * x); }}),
            1e-8);
  const FitResult fq = fit_gaussian(q);
  const double aq = fq.value("a"), bq = fq.value("b");
  EXPECT_LT(normal_equation_residual(fq, q,
                                     {[&](double x) { return std::exp(-bq * x * x); },
                                      [&](double x) { return -aq * x * x * std::exp(-bq * x * x); }}),
            1e-8);
}

TEST(Nonlinear, SigmaScalingReparameterization) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<DataPoint> pts;
  for (int i = 0; i < 10; ++i) {
    const double y = std::exp(-0.7 * i);
    pts.push_back({static_cast<double>(i), y * (1 + 0.03 * g(rng)), 0.03 * y});
  }
  std::vector<DataPoint> scaled = pts;
  for (DataPoint& p : scaled) p.sigma *= 4.0;
  const FitResult f1 = fit_exponential(pts);
  const FitResult f4 = fit_exponential(scaled);
  for (const char* name : {"a", "b"}) {
    EXPECT_NEAR(f4.value(name), f1.value(name), 1e-9 * std::abs(f1.value(name)));
    EXPECT_NEAR(f4.error(name), 4.0 * f1.error(name), 1e-8 * f1.error(name));
  }
  EXPECT_NEAR(f4.chi_squared * 16.0, f1.chi_squared, 1e-8 * f1.chi_squared);
}

TEST(Nonlinear, NonPositiveValuesOnlyInRefinement) {
  // tail points scattered around zero must not break initialization
  std::vector<DataPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.1 * i, std::exp(-5.0 * 0.1 * i), 0.01});
  pts.push_back({2.0, -0.001, 0.01});
  pts.push_back({2.5, 0.0, 0.01});
  const FitResult f = fit_exponential(pts);
  EXPECT_TRUE(f.converged);
  EXPECT_EQ(f.n_points, 12u);
  EXPECT_NEAR(f.value("b"), 5.0, 0.2);
}

TEST(Nonlinear, InputValidation) {
  std::vector<DataPoint> two{{0, 1, 0.1}, {1, 0.5, 0.1}};
  EXPECT_THROW(fit_exponential(two), relosc::ValidationError);
  std::vector<DataPoint> same_x{{1, 1, 0.1}, {1, 0.5, 0.1}, {1, 0.7, 0.1}};
  EXPECT_THROW(fit_exponential(same_x), relosc::ValidationError);
  std::vector<DataPoint> zero_sigma{{0, 1, 0.0}, {1, 0.5, 0.1}, {2, 0.2, 0.1}};
  EXPECT_THROW(fit_gaussian(zero_sigma), relosc::ValidationError);
  std::vector<DataPoint> nan_point{{0, 1, 0.1}, {1, std::nan(""), 0.1}, {2, 0.2, 0.1}};
  EXPECT_THROW(fit_exponential(nan_point), relosc::ValidationError);
}

TEST(Constant, IdenticalPoints) {
  const std::vector<DataPoint> pts{{1, 0.25, 0.0}, {2, 0.25, 0.0}, {3, 0.25, 0.0}};
  const FitResult f = fit_constant(pts);
  EXPECT_DOUBLE_EQ(f.value("a"), 0.25);
  EXPECT_EQ(f.error("a"), 0.0);
  EXPECT_FALSE(f.weighted);
}

TEST(Constant, TwoPointWeightedMean) {
  const std::vector<DataPoint> pts{{0, 1.0, 0.1}, {1, 2.0, 0.2}};
  const FitResult f = fit_constant(pts);
  const double w1 = 100.0, w2 = 25.0;
  EXPECT_NEAR(f.value("a"), (w1 * 1.0 + w2 * 2.0) / (w1 + w2), 1e-14);
  EXPECT_NEAR(f.error("a"), 1.0 / std::sqrt(w1 + w2), 1e-14);
  EXPECT_TRUE(f.weighted);
  EXPECT_NEAR(f.chi_squared, w1 * std::pow(1.0 - f.value("a"), 2) + w2 * std::pow(2.0 - f.value("a"), 2), 1e-12);
}

TEST(Constant, UnweightedStandardError) {
  const std::vector<DataPoint> pts{{0, 1.0, 0.0}, {1, 2.0, 0.0}, {2, 4.0, 0.0}};
  const FitResult f = fit_constant(pts);
  EXPECT_NEAR(f.value("a"), 7.0 / 3.0, 1e-14);
  const double s2 = (std::pow(1 - 7.0 / 3, 2) + std::pow(2 - 7.0 / 3, 2) + std::pow(4 - 7.0 / 3, 2)) / 2.0;
  EXPECT_NEAR(f.error("a"), std::sqrt(s2 / 3.0), 1e-14);
  EXPECT_THROW(fit_constant(std::vector<DataPoint>{}), relosc::ValidationError);
}

TEST(Power, ExactRecovery) {
  std::vector<DataPoint> inv, ur;
  for (double m : {50.0, 100.0, 200.0}) inv.push_back({m, 0.5 / m, 1e-5});
  const FitResult f = fit_power(inv, -1.0);
  EXPECT_NEAR(f.value("a"), 0.5, 1e-10);
  // <q^2> = 2 a / (3 (0.1 w^2)^(2/3)) = a * (2/3) 0.1^(-2/3) * w^(-4/3)
  const double scale = 2.0 / 3.0 * std::pow(0.1, -2.0 / 3.0);
  for (double w : {50.0, 100.0, 200.0}) ur.push_back({w, 0.8086 * scale * std::pow(w, -4.0 / 3.0), 1e-6});
  const FitResult g = fit_power(ur, parse_rational("-4/3"), scale);
  EXPECT_NEAR(g.value("a"), 0.8086, 1e-10);
  EXPECT_NEAR(evaluate(g, 100.0, -4.0 / 3.0, scale), ur[1].y, 1e-14);
}

TEST(Power, NormalEquations) {
  std::vector<DataPoint> pts{{1, 2.1, 0.1}, {2, 0.9, 0.05}, {4, 0.55, 0.05}, {8, 0.24, 0.02}};
  const FitResult f = fit_power(pts, -1.0);
  double sum = 0.0;
  for (const DataPoint& p : pts) sum += (p.y - f.value("a") / p.x) / (p.x * p.sigma * p.sigma);
  EXPECT_NEAR(sum, 0.0, 1e-10);
}

TEST(ParseRational, Forms) {
  EXPECT_DOUBLE_EQ(parse_rational("-2/3"), -2.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_rational("0.5"), 0.5);
  EXPECT_DOUBLE_EQ(parse_rational("2"), 2.0);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/2/3"), std::invalid_argument);
}

TEST(FitResultTest, UnknownParameter) {
  const FitResult f = fit_constant(std::vector<DataPoint>{{0, 1, 0}, {1, 1, 0}});
  EXPECT_THROW(f.parameter("zz"), std::out_of_range);
}
