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

#include "relosc/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace relosc::specfun {
namespace {

constexpr double kEulerGamma = std::numbers::egamma;

// Chebyshev coefficients of e^x sqrt(x) K_nu(x) on x in [2,5], [5,25], [25,inf),
// each in a variable linear in 1/x, first coefficient doubled.
// Generated by tools/scripts/gen_bessel_k_chebyshev.py.
constexpr std::array<double, 15> kK0Cheb2to5 = {
    2.414167600541852308, -1.7369440367923813882e-2, 4.6121298208212279538e-4,
    -1.9376519911528769048e-5, 1.0497644131744760928e-6, -6.7214092542545498626e-8,
    4.8539707707618703285e-9, -3.8429036217150664349e-10, 3.2732843253021893591e-11,
    -2.9603460994150751739e-12, 2.8153779776221537316e-13, -2.7949931842131442483e-14,
    2.8799888249290822787e-15, -3.0661005871889757473e-16, 3.3601500163260958913e-17,
};

constexpr std::array<double, 14> kK0Cheb5to25 = {
    2.4717068670960082645, -1.1117546687114415261e-2, 2.0527399688639320096e-4,
    -6.4735802038068848666e-6, 2.7915232935073592104e-7, -1.490823745753024601e-8,
    9.3334692222285474927e-10, -6.6180656437750033825e-11, 5.1920435455150403761e-12,
    -4.4318370672070759244e-13, 4.0646758842852826908e-14, -3.9670375624079763899e-15,
    4.088671226450297233e-16, -4.4227104859710545567e-17,
};

constexpr std::array<double, 10> kK0ChebTail = {
    2.5004639641412006198, -3.0653937910506052544e-3, 1.6595701923370634158e-5,
    -1.6338473403785056409e-7, 2.3232452759931055775e-9, -4.2947818083750552604e-11,
    9.7209257099813822351e-13, -2.5919948258554537445e-14, 7.9261367246715236553e-16,
    -2.7253931331777648904e-17,
};

constexpr std::array<double, 15> kK1Cheb2to5 = {
    2.8055529979895580747, 5.9621374043938996636e-2, -8.6992449493646148268e-4,
    3.0444461810153955149e-5, -1.5046832949951191492e-6, 9.1081401586532531651e-8,
    -6.3306221129917619937e-9, 4.8737690415408130947e-10, -4.0632755018733662049e-11,
    3.612717935056716775e-12, -3.3883154151177366147e-13, 3.3249375865178710041e-14,
    -3.3924184115617985307e-15, 3.5810756930025651289e-16, -3.8955250997193832742e-17,
};

constexpr std::array<double, 15> kK1Cheb5to25 = {
    2.6148603206400811962, 3.5173720776754224787e-2, -3.5988259688502100995e-4,
    9.5129122273698756288e-6, -3.7602627849910668148e-7, 1.9059018770680580633e-8,
    -1.1520977078336892252e-9, 7.9654660825884799433e-11, -6.1308258947597661241e-12,
    5.1552271619720945924e-13, -4.6711751528785669054e-14, 4.513547926409629669e-15,
    -4.6129137991705812374e-16, 4.9540060217038607056e-17, -5.560859426315670352e-18,
};

constexpr std::array<double, 10> kK1ChebTail = {
    2.5252566430439225927, 9.2860242312575260313e-3, -2.7925992775164434086e-5,
    2.3091319697562632722e-7, -3.0150626161254918364e-9, 5.2978290154022511937e-11,
    -1.1593562112250807111e-12, 3.0178281857419993568e-14, -9.0633207971465530491e-16,
    3.0729768232550494262e-17,
};

constexpr double kSeriesSwitch = 2.0;

template <std::size_t N>
double clenshaw(const std::array<double, N>& c, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  const double two_t = 2.0 * t;
  for (std::size_t j = N - 1; j > 0; --j) {
    const double b0 = two_t * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + 0.5 * c[0];
}

// sqrt(x) e^x K_nu(x) for x > 2.
template <class A, class B, class C>
double sqrt_scaled(const A& low, const B& mid, const C& tail, double x) {
  const double u = 1.0 / x;
  if (x >= 25.0) return clenshaw(tail, 50.0 * u - 1.0);
  if (x >= 5.0) return clenshaw(mid, (2.0 * u - 0.24) / 0.16);
  return clenshaw(low, (2.0 * u - 0.7) / 0.3);
}

double sqrt_scaled_k0(double x) { return sqrt_scaled(kK0Cheb2to5, kK0Cheb5to25, kK0ChebTail, x); }
double sqrt_scaled_k1(double x) { return sqrt_scaled(kK1Cheb2to5, kK1Cheb5to25, kK1ChebTail, x); }

// Power series with the logarithmic term, 0 < x <= 2 (A&S 9.6.11/9.6.13).
struct SmallSeries {
  double k0;
  double k1;
};

SmallSeries small_series(double x) {
  const double y = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);

  // k-th terms of I0 and (x/2)^-1 I1
  double t0 = 1.0;
  double t1 = 1.0;
  double i0 = 1.0;
  double i1 = 1.0;
  double harmonic = 0.0;            // H_k
  double k0_tail = 0.0;             // sum_{k>=1} H_k y^k/(k!)^2
  double k1_tail = 1.0 - 2.0 * kEulerGamma;  // sum (psi(k+1)+psi(k+2)) y^k/(k!(k+1)!)
  for (int k = 1; k < 40; ++k) {
    t0 *= y / (static_cast<double>(k) * k);
    t1 *= y / (static_cast<double>(k) * (k + 1));
    harmonic += 1.0 / k;
    i0 += t0;
    i1 += t1;
    k0_tail += harmonic * t0;
    // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    k1_tail += (2.0 * harmonic + 1.0 / (k + 1) - 2.0 * kEulerGamma) * t1;
    if (t0 < 1e-18 * i0) break;
  }
  const double half_x = 0.5 * x;
  SmallSeries s;
  s.k0 = -(log_half + kEulerGamma) * i0 + k0_tail;
  s.k1 = 1.0 / x + log_half * half_x * i1 - 0.5 * half_x * k1_tail;
  return s;
}

// K1 alone; the log path in the sampler needs nothing else.
double small_series_k1(double x) {
  const double y = 0.25 * x * x;
  double t1 = 1.0;
  double i1 = 1.0;
  double harmonic = 0.0;
  double tail = 1.0 - 2.0 * kEulerGamma;
  for (int k = 1; k < 40; ++k) {
    const double dk = k;
    t1 *= y / (dk * (dk + 1.0));
    harmonic += 1.0 / dk;
    i1 += t1;
    tail += (2.0 * harmonic + 1.0 / (dk + 1.0) - 2.0 * kEulerGamma) * t1;
    if (t1 < 1e-18 * i1) break;
  }
  const double half_x = 0.5 * x;
  return 1.0 / x + std::log(half_x) * half_x * i1 - 0.5 * half_x * tail;
}

[[noreturn, gnu::noinline, gnu::cold]] void throw_not_positive(double x, const char* name) {
  throw DomainError(std::string(name) + ": argument must be positive, got " + std::to_string(x));
}

inline void require_positive(double x, const char* name) {
  if (!(x > 0.0)) [[unlikely]] throw_not_positive(x, name);
}

}  // namespace

double bessel_k0(double x) {
  require_positive(x, "bessel_k0");
  if (x <= kSeriesSwitch) return small_series(x).k0;
  return std::exp(-x) * sqrt_scaled_k0(x) / std::sqrt(x);
}

double bessel_k1(double x) {
  require_positive(x, "bessel_k1");
  if (x <= kSeriesSwitch) return small_series(x).k1;
  return std::exp(-x) * sqrt_scaled_k1(x) / std::sqrt(x);
}

double bessel_k0_scaled(double x) {
  require_positive(x, "bessel_k0_scaled");
  if (x <= kSeriesSwitch) return std::exp(x) * small_series(x).k0;
  return sqrt_scaled_k0(x) / std::sqrt(x);
}

double bessel_k1_scaled(double x) {
  require_positive(x, "bessel_k1_scaled");
  if (x <= kSeriesSwitch) return std::exp(x) * small_series(x).k1;
  return sqrt_scaled_k1(x) / std::sqrt(x);
}

double log_bessel_k1(double x) {
  require_positive(x, "log_bessel_k1");
  if (x <= kSeriesSwitch) {
    // x K1(x) -> 1; keep the log of the product to avoid 1/x overflow near 0
    if (x < 1e-150) return -std::log(x);
    return std::log(small_series_k1(x));
  }
  return -x + std::log(sqrt_scaled_k1(x) / std::sqrt(x));
}

ScaledK1 bessel_k1_split(double x) {
  require_positive(x, "bessel_k1_split");
  if (x <= kSeriesSwitch) return {small_series_k1(x), 0.0};
  return {sqrt_scaled_k1(x) / std::sqrt(x), x};
}

double bessel_k_ratio(double x) {
  require_positive(x, "bessel_k_ratio");
  if (x <= kSeriesSwitch) {
    if (x < 1e-150) return x * (-std::log(0.5 * x) - kEulerGamma);
    const SmallSeries s = small_series(x);
    return s.k0 / s.k1;
  }
  return sqrt_scaled_k0(x) / sqrt_scaled_k1(x);
}

SpecFunResult bessel_k1_result(double x) {
  SpecFunResult r;
  r.log_value = log_bessel_k1(x);
  r.value = std::exp(r.log_value);
  return r;
}

// ---------------------------------------------------------------------------
// Airy functions

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAiPrime0 = -0.258819403792806798405183560189203963L;
constexpr double kMaclaurinRange = 8.0;

struct AiryPair {
  double ai;
  double ai_prime;
};

AiryPair airy_maclaurin(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  // f, g: the two standard power-series solutions; f', g' their derivatives.
  long double f_term = 1.0L, f = 1.0L;
  long double g_term = x, g = x;
  long double fp_term = 0.5L * x * x, fp = fp_term;
  long double gp_term = 1.0L, gp = 1.0L;
  long double scale = 1.0L;
  for (int k = 1; k < 80; ++k) {
    const long double k3 = 3.0L * k;
    f_term *= x3 / ((k3 - 1.0L) * k3);
    g_term *= x3 / (k3 * (k3 + 1.0L));
    if (k > 1) fp_term *= x3 / (3.0L * (k - 1) * (k3 - 1.0L));
    gp_term *= x3 / ((k3 - 2.0L) * k3);
    f += f_term;
    g += g_term;
    if (k > 1) fp += fp_term;
    gp += gp_term;
    const long double mag = std::fabs(f_term) + std::fabs(g_term) + std::fabs(fp_term) +
                            std::fabs(gp_term);
    scale = std::max(scale, mag);
    if (mag < 1e-22L * scale) break;
  }
  return {static_cast<double>(kAi0 * f + kAiPrime0 * g),
          static_cast<double>(kAi0 * fp + kAiPrime0 * gp)};
}

// Coefficients u_k, v_k of the large-argument expansions (DLMF 9.7.2).
constexpr int kAsymptoticTerms = 40;

struct AsymptoticCoeffs {
  std::array<double, kAsymptoticTerms> u{};
  std::array<double, kAsymptoticTerms> v{};
};

const AsymptoticCoeffs& asymptotic_coeffs() {
  static const AsymptoticCoeffs table = [] {
    AsymptoticCoeffs c;
    c.u[0] = 1.0;
    c.v[0] = 1.0;
    for (int k = 1; k < kAsymptoticTerms; ++k) {
      c.u[k] = c.u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
               ((2.0 * k - 1.0) * 216.0 * k);
      c.v[k] = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * c.u[k];
    }
    return c;
  }();
  return table;
}

// Sums sign^k c_k z^-k (stride 1) until terms stop shrinking.
struct SeriesSums {
  double even;  // sum_k (-1)^k c_{2k} zeta^{-2k}
  double odd;   // sum_k (-1)^k c_{2k+1} zeta^{-2k-1}
  double alternating;  // sum_k (-1)^k c_k zeta^-k
};

SeriesSums asymptotic_sums(const std::array<double, kAsymptoticTerms>& c, double zeta) {
  SeriesSums s{0.0, 0.0, 0.0};
  double power = 1.0;
  double last = HUGE_VAL;
  for (int k = 0; k < kAsymptoticTerms; ++k) {
    const double term = c[k] * power;
    if (std::fabs(term) > last) break;
    last = std::fabs(term);
    const double alt = (k % 2 == 0) ? term : -term;
    s.alternating += alt;
    if (k % 2 == 0) {
      s.even += ((k / 2) % 2 == 0) ? term : -term;
    } else {
      s.odd += ((k / 2) % 2 == 0) ? term : -term;
    }
    power /= zeta;
  }
  return s;
}

AiryPair airy_asymptotic(double x) {
  const auto& c = asymptotic_coeffs();
  constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  if (x > 0.0) {
    const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
    const double quarter = std::sqrt(std::sqrt(x));
    const double decay = std::exp(-zeta) * 0.5 * inv_sqrt_pi;
    const SeriesSums su = asymptotic_sums(c.u, zeta);
    const SeriesSums sv = asymptotic_sums(c.v, zeta);
    return {decay / quarter * su.alternating, -decay * quarter * sv.alternating};
  }
  const double z = -x;
  const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
  const double quarter = std::sqrt(std::sqrt(z));
  const double phase = zeta + 0.25 * std::numbers::pi;
  const double s = std::sin(phase);
  const double co = std::cos(phase);
  const SeriesSums su = asymptotic_sums(c.u, zeta);
  const SeriesSums sv = asymptotic_sums(c.v, zeta);
  return {inv_sqrt_pi / quarter * (s * su.even - co * su.odd),
          -inv_sqrt_pi * quarter * (co * sv.even + s * sv.odd)};
}

AiryPair airy_pair(double x) {
  if (!(std::fabs(x) <= kAiryRange)) {
    throw RangeError("airy: argument outside supported range [-30, 30]: " + std::to_string(x));
  }
  if (std::fabs(x) <= kMaclaurinRange) return airy_maclaurin(x);
  return airy_asymptotic(x);
}

enum class ZeroKind { kAi, kAiPrime };

double airy_zero(int n, ZeroKind kind) {
  if (n < 1 || n > 10) {
    throw RangeError("airy zero index must lie in [1, 10], got " + std::to_string(n));
  }
  // Asymptotic first guesses (DLMF 9.9.6-9.9.9).
  double guess;
  if (kind == ZeroKind::kAi) {
    const double t = 3.0 * std::numbers::pi * (4.0 * n - 1.0) / 8.0;
    const double t2 = 1.0 / (t * t);
    guess = -std::pow(t, 2.0 / 3.0) * (1.0 + t2 * (5.0 / 48.0 - t2 * 5.0 / 36.0));
  } else {
    const double t = 3.0 * std::numbers::pi * (4.0 * n - 3.0) / 8.0;
    const double t2 = 1.0 / (t * t);
    guess = -std::pow(t, 2.0 / 3.0) * (1.0 - t2 * (7.0 / 48.0 - t2 * 35.0 / 288.0));
  }
  auto func = [kind](double x) {
    const AiryPair p = airy_pair(x);
    return kind == ZeroKind::kAi ? p.ai : p.ai_prime;
  };
  auto deriv = [kind](double x) {
    const AiryPair p = airy_pair(x);
    return kind == ZeroKind::kAi ? p.ai_prime : x * p.ai;
  };

  // Zeros are spaced by more than 0.8 on this range, so +-0.3 around the
  // guess isolates exactly one sign change.
  double lo = guess - 0.3;
  double hi = guess + 0.3;
  double f_lo = func(lo);
  double f_hi = func(hi);
  if (f_lo * f_hi > 0.0) {
    throw ConvergenceError("airy zero: initial bracket has no sign change");
  }
  double x = guess;
  for (int iter = 0; iter < 100; ++iter) {
    const double fx = func(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
    }
    double next = x - fx / deriv(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) < 1e-15 * std::fabs(x)) return next;
    x = next;
  }
  return x;
}

}  // namespace

double airy_ai(double x) { return airy_pair(x).ai; }
double airy_ai_prime(double x) { return airy_pair(x).ai_prime; }
double airy_ai_zero(int n) { return airy_zero(n, ZeroKind::kAi); }
double airy_ai_prime_zero(int n) { return airy_zero(n, ZeroKind::kAiPrime); }

}  // namespace relosc::specfun
