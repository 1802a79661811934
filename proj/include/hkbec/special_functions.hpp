// Copyright 2026 hkbec contributors
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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hkbec/errors.hpp"

namespace hkbec::sf {

struct EvalPolicy {
  double rel_tol = 1e-16;
  int max_iterations = 5000;
  // Incomplete gamma uses its series for x < a + offset, continued fraction above.
  double incgamma_cf_offset = 1.0;
  // e^{-x} I_nu(x): power series up to this x, asymptotic expansion above.
  double bessel_i_asymptotic_from = 25.0;
};

inline void validate(const EvalPolicy& p) {
  if (!(p.rel_tol > 0.0) || p.max_iterations < 1 || !(p.incgamma_cf_offset > 0.0) ||
      !(p.bessel_i_asymptotic_from > p.incgamma_cf_offset))
    throw ValidationError("EvalPolicy: tolerance and thresholds must be positive and ordered");
}

inline constexpr double euler_gamma = 0.57721566490153286061;

namespace detail {

// A continued-fraction step ratio cannot settle closer to 1 than a few ulps.
inline double cf_tolerance(const EvalPolicy& p) {
  return std::max(p.rel_tol, 4.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace detail

// E_1(x) = Gamma(0, x), x > 0.
inline double exponential_integral_e1(double x, const EvalPolicy& p = {}) {
  if (!(x > 0.0)) throw DomainError("exponential_integral_e1: x must be > 0");
  if (x <= 1.0) {
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= p.max_iterations; ++k) {
      term *= -x / k;
      const double c = term / k;
      sum += c;
      if (std::abs(c) < p.rel_tol * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) - sum;
  }
  // Lentz evaluation of e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
  const double tiny = 1e-300;
  double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= p.max_iterations; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= detail::cf_tolerance(p)) return std::exp(-x) * h;
  }
  throw ConvergenceError("exponential_integral_e1: continued fraction failed");
}

// Gamma(a, x) = int_x^inf s^{a-1} e^{-s} ds for a > 0, x >= 0 (a = 0 allowed for x > 0).
inline double upper_incomplete_gamma(double a, double x, const EvalPolicy& p = {}) {
  if (!(a >= 0.0) || !(x >= 0.0) || !std::isfinite(a))
    throw DomainError("upper_incomplete_gamma: need a >= 0, x >= 0");
  if (a == 0.0) return exponential_integral_e1(x, p);
  if (a > 171.6) throw RangeError("upper_incomplete_gamma: a = " + std::to_string(a) + " overflows");
  if (x == 0.0) return std::tgamma(a);
  if (std::isinf(x)) return 0.0;
  if (x < a + p.incgamma_cf_offset) {
    double ap = a, del = 1.0 / a, sum = del;
    for (int n = 1; n <= p.max_iterations; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * p.rel_tol) {
        const double lower = sum * std::exp(-x + a * std::log(x));
        return std::tgamma(a) - lower;
      }
    }
    throw ConvergenceError("upper_incomplete_gamma: series failed");
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= p.max_iterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= detail::cf_tolerance(p)) return std::exp(-x + a * std::log(x)) * h;
  }
  throw ConvergenceError("upper_incomplete_gamma: continued fraction failed");
}

enum class BesselIOrder { zero = 0, one = 1 };

// e^{-x} I_nu(x), nu in {0, 1}.
inline double scaled_bessel_i(BesselIOrder order, double x, const EvalPolicy& p = {}) {
  if (!(x >= 0.0)) throw DomainError("scaled_bessel_i: x must be >= 0");
  const int nu = static_cast<int>(order);
  if (x <= p.bessel_i_asymptotic_from) {
    const double q = 0.25 * x * x;
    double term = nu == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k <= p.max_iterations; ++k) {
      term *= q / (static_cast<double>(k) * (k + nu));
      sum += term;
      if (term < p.rel_tol * sum) break;
    }
    return sum * std::exp(-x);
  }
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= p.max_iterations; ++k) {
    const double next = -term * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < p.rel_tol * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

inline double scaled_bessel_i0(double x) { return scaled_bessel_i(BesselIOrder::zero, x); }
inline double scaled_bessel_i1(double x) { return scaled_bessel_i(BesselIOrder::one, x); }

enum class BesselKOrder { zero, three_quarters, three_halves, two };

inline constexpr double order_value(BesselKOrder o) {
  switch (o) {
    case BesselKOrder::zero: return 0.0;
    case BesselKOrder::three_quarters: return 0.75;
    case BesselKOrder::three_halves: return 1.5;
    case BesselKOrder::two: return 2.0;
  }
  return 0.0;
}

namespace detail {

// e^{x} K_nu(x) = int_0^inf exp(-x (cosh u - 1)) cosh(nu u) du by the
// trapezoid rule; the integrand is entire, so the error is exponentially
// small once the step resolves the width ~ 1/sqrt(x) of the peak.
inline double scaled_bessel_k_trapezoid(double nu, double x, const EvalPolicy& p = {}) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
  const double h = std::min(0.1, 0.5 / std::sqrt(x));
  // The integrand decreases beyond asinh(nu / x).
  const double u_peak = std::asinh(std::abs(nu) / x);
  double sum = 0.5;
  for (int k = 1; k <= 10'000'000; ++k) {
    const double u = k * h;
    const double s = std::sinh(0.5 * u);
    const double f = std::exp(-2.0 * x * s * s) * std::cosh(nu * u);
    sum += f;
    if (u > u_peak && f < p.rel_tol * sum) break;
  }
  return h * sum;
}

}  // namespace detail

inline double scaled_bessel_k_three_halves_closed_form(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
  return std::sqrt(std::numbers::pi / (2.0 * x)) * (1.0 + 1.0 / x);
}

// e^{x} K_nu(x).
inline double scaled_bessel_k(BesselKOrder order, double x, const EvalPolicy& p = {}) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
  if (order == BesselKOrder::three_halves) return scaled_bessel_k_three_halves_closed_form(x);
  return detail::scaled_bessel_k_trapezoid(order_value(order), x, p);
}

inline double bessel_k(BesselKOrder order, double x, const EvalPolicy& p = {}) {
  return scaled_bessel_k(order, x, p) * std::exp(-x);
}

// Majorant of K_2 obtained by bounding (1 + s/2x)^{3/2} in its integral
// representation; checked as an inequality, never used for evaluation.
inline double bessel_k2_upper_estimate(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k2_upper_estimate: x must be > 0");
  const double g52 = std::tgamma(2.5), g72 = std::tgamma(3.5), g92 = std::tgamma(4.5);
  return 4.0 / (3.0 * std::sqrt(2.0 * x)) * std::exp(-x) * (g52 + g72 / x + g92 / (4.0 * x * x));
}

inline double riemann_zeta(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) throw DomainError("riemann_zeta: s must be > 1");
  if (s > 60.0) return 1.0 + std::exp2(-s) + std::pow(3.0, -s);
  constexpr int n = 16;
  // B_{2k} / (2k)!
  static constexpr std::array<double, 10> b2k_over_fact = {
      1.0 / 12.0,
      -1.0 / 720.0,
      1.0 / 30240.0,
      -1.0 / 1209600.0,
      1.0 / 47900160.0,
      -691.0 / 1307674368000.0,
      1.0 / 74724249600.0,
      -3617.0 / 10670622842880000.0,
      43867.0 / 5109094217170944000.0,
      -174611.0 / 802857662698291200000.0,
  };
  double sum = 0.0;
  for (int k = n - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  const double N = n;
  double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  // rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}
  double rising = s, npow = std::pow(N, -s - 1.0);
  for (int k = 0; k < 10; ++k) {
    tail += b2k_over_fact[k] * rising * npow;
    rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
    npow /= N * N;
  }
  return sum + tail;
}

// sum_{k in Z} exp(-k^2 scale + k drift - log_shift), optionally without k = 0.
// Terms are log-concave in k, so summation runs outward from the peak and
// stops once terms fall below tolerance.
inline double theta3_sum_shifted(double scale, double drift, double log_shift,
                                 bool skip_zero = false, const EvalPolicy& p = {}) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw DomainError("theta3_sum: exponent scale must be positive and finite");
  if (!std::isfinite(drift) || !std::isfinite(log_shift))
    throw DomainError("theta3_sum: drift must be finite");
  const double center = std::round(drift / (2.0 * scale));
  if (std::abs(center) > 1e15) throw DomainError("theta3_sum: drift too large for exponent scale");
  auto term = [&](double k) {
    if (skip_zero && k == 0.0) return 0.0;
    return std::exp(-k * k * scale + k * drift - log_shift);
  };
  double sum = term(center);
  for (int dir : {1, -1}) {
    for (double k = center + dir;; k += dir) {
      const double t = term(k);
      sum += t;
      const bool past_peak = dir * (k - drift / (2.0 * scale)) > 0.0;
      if (past_peak && t <= p.rel_tol * sum && !(skip_zero && k == 0.0)) break;
      if (std::abs(k - center) > 1e8) throw ConvergenceError("theta3_sum: no convergence");
    }
  }
  return sum;
}

inline double theta3_sum(double scale, double drift, const EvalPolicy& p = {}) {
  return theta3_sum_shifted(scale, drift, 0.0, false, p);
}

inline double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_function: arguments must be > 0");
  if (a + b < 170.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace hkbec::sf
