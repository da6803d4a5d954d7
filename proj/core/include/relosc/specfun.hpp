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

// Modified Bessel functions K0, K1 and the Airy function Ai.
//
// The Bessel routines are used inside the Metropolis inner loop, so they are
// branch-light: a power series with the logarithmic term for 0 < x <= 2 and a
// Chebyshev expansion of the exponentially scaled function for x > 2. Relative
// accuracy is better than 1e-13 on (0, 700]; the scaled and log forms stay
// finite for arbitrarily large x.
//
// Airy functions are supported on [-30, 30] with absolute error below 1e-12.
// They are not used on the sampling path.

#include <cmath>

#include "relosc/errors.hpp"

namespace relosc::specfun {

/// A value together with its natural logarithm. log_value is only meaningful
/// when value > 0, and stays finite where value itself underflows.
struct SpecFunResult {
  double value = 0.0;
  double log_value = -HUGE_VAL;
};

double bessel_k0(double x);
double bessel_k1(double x);

/// e^x K0(x) and e^x K1(x).
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);

double log_bessel_k1(double x);

/// K1(x) = mantissa * exp(-exponent), with mantissa of order 1/x or 1/sqrt(x).
/// Lets callers fold ln K1 into a single logarithm with other factors.
struct ScaledK1 {
  double mantissa;
  double exponent;
};
ScaledK1 bessel_k1_split(double x);

/// K0(x)/K1(x) in (0, 1), formed without underflowing intermediates.
double bessel_k_ratio(double x);

SpecFunResult bessel_k1_result(double x);

inline constexpr double kAiryRange = 30.0;

double airy_ai(double x);
double airy_ai_prime(double x);

/// n-th negative zero of Ai (a_n) and of Ai' (a'_n), 1 <= n <= 10.
double airy_ai_zero(int n);
double airy_ai_prime_zero(int n);

}  // namespace relosc::specfun
