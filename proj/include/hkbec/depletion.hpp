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

// Depletion of the condensate at zero and finite temperature.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hkbec/bogoliubov.hpp"
#include "hkbec/errors.hpp"
#include "hkbec/fit.hpp"
#include "hkbec/heat_kernel_bounds.hpp"
#include "hkbec/quadrature.hpp"
#include "hkbec/special_functions.hpp"
#include "hkbec/spectrum.hpp"

namespace hkbec {

enum class DepletionForm { mode_sum, heat_kernel };

struct DepletionResult {
  double value;
  std::optional<Sandwich> bounds;
  double gp_parameter;
  double tail_bound;
  double quadrature_error;
};

// u0^{d/2} n0^{d/2 - 1}
inline double gp_parameter(const InteractionParams& ip, int d) {
  validate(ip);
  return std::pow(ip.u0, 0.5 * d) * std::pow(ip.n0, 0.5 * d - 1.0);
}

namespace detail {

inline double depletion_tail(const Spectrum& s, double a) {
  // lambda/omega - 1 <= a^2 / (2 eps^2)
  const double h = 0.5 * s.dimension();
  const double E = s.cutoff();
  return a * a / (4.0 * s.volume()) * 2.0 * s.weyl_coefficient() * h * std::pow(E, h - 2.0) / (2.0 - h);
}

}  // namespace detail

// int_0^inf ds s^{-d/2} e^{-s} I_1(s)
inline QuadratureResult gamma_d(int d, const QuadratureSpec& q = {1e-13, 0.0, 12}) {
  if (d != 2 && d != 3) throw DomainError("gamma_d: d must be 2 or 3");
  auto f = [d](double s) { return std::pow(s, -0.5 * d) * sf::scaled_bessel_i1(s); };
  return integrate_half_line(f, q);
}

// int_0^inf e^{-s} I_1(s) s^{m-1} ds = Gamma(1/2 - m) Gamma(m + 1) / (2^m sqrt(pi) Gamma(2 - m)), m = 1 - d/2.
inline double gamma_d_closed_form(int d) {
  if (d != 2 && d != 3) throw DomainError("gamma_d_closed_form: d must be 2 or 3");
  const double m = 1.0 - 0.5 * d;
  return std::tgamma(0.5 - m) * std::tgamma(m + 1.0) /
         (std::pow(2.0, m) * std::sqrt(std::numbers::pi) * std::tgamma(2.0 - m));
}

// Thermodynamic prefactors m = Gamma(d/2+1)/(2 B^{d/2}) and M = A Gamma(d/2+1)/(2 C^{d/2}).
inline Sandwich depletion_prefactors(const BoundConstants& k, int d) {
  validate(k);
  const double g = std::tgamma(0.5 * d + 1.0);
  return {g / (2.0 * std::pow(k.B, 0.5 * d)), k.A_ratio * g / (2.0 * std::pow(k.C, 0.5 * d))};
}

// Bounds on n_e.  Upper: M gamma_d a^{d/2}.  Lower: the eigenvalue upper bound
// integrated over sigma in [1, modes + 1], which reduces to m gamma_d a^{d/2}
// as V and the mode count grow.
inline Sandwich depletion_sandwich(const Spectrum& s, const InteractionParams& ip, const BoundConstants& k,
                                   const QuadratureSpec& q = {}) {
  validate(ip);
  const int d = s.dimension();
  const double a = ip.a();
  const double h = 0.5 * d;
  const auto pf = depletion_prefactors(k, d);
  const double upper = pf.upper * require(gamma_d(d), "gamma_d") * std::pow(a, h);
  const double V = s.volume();
  const double top = static_cast<double>(s.mode_count());
  auto f = [&](double t) {
    const double bt = k.B * t;
    const double win = sf::upper_incomplete_gamma(h, bt * std::pow(V, -2.0 / d)) -
                       sf::upper_incomplete_gamma(h, bt * std::pow(top / V, 2.0 / d));
    return h * std::pow(bt, -h) * win * sf::scaled_bessel_i1(a * t);
  };
  const double lower = 0.5 * a * require(integrate_half_line(f, q), "depletion lower bound");
  return {lower, upper};
}

inline DepletionResult depletion_zero_T(const Spectrum& s, const InteractionParams& ip, DepletionForm form,
                                        const SeriesSpec& spec = {}, const QuadratureSpec& q = {},
                                        const std::optional<BoundConstants>& k = std::nullopt) {
  validate(ip);
  validate(spec);
  if (s.dimension() > 3) throw ValidationError("depletion_zero_T: the mode sum diverges for d > 3");
  const double a = ip.a();
  const double V = s.volume();
  DepletionResult r{0.0, std::nullopt, gp_parameter(ip, s.dimension()), 0.0, 0.0};
  if (a == 0.0) return r;
  r.tail_bound = detail::depletion_tail(s, a);
  if (form == DepletionForm::mode_sum) {
    const auto& ev = s.eigenvalues();
    const auto& w = s.multiplicities();
    double sum = 0.0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
      const auto m = bogoliubov_mode(ev[i], a);
      sum += w[i] * m.lambda_minus_omega / m.omega;
    }
    r.value = sum / (2.0 * V);
  } else {
    auto f = [&](double t) {
      const double tr = truncated_trace(s, t, true);
      return tr == 0.0 ? 0.0 : tr * sf::scaled_bessel_i1(a * t);
    };
    const auto res = integrate_half_line(f, q);
    r.value = 0.5 * a / V * require(res, "depletion_zero_T(heat_kernel)");
    r.quadrature_error = 0.5 * a / V * res.error;
  }
  if (r.tail_bound > spec.rel_tol * r.value) {
    const double h = 0.5 * s.dimension();
    const double need = s.cutoff() * std::pow(r.tail_bound / (spec.rel_tol * r.value), 1.0 / (2.0 - h));
    throw CutoffError("depletion_zero_T: truncated levels contribute up to " + std::to_string(r.tail_bound) +
                          "; need cutoff >= " + std::to_string(need),
                      need);
  }
  if (k) r.bounds = depletion_sandwich(s, ip, *k, q);
  return r;
}

// Flat-space zero-temperature depletion in natural units,
// (1/(2 pi)^d) int d^dk (lambda/omega - 1) / 2 with eps = k^2.
inline double flat_depletion(int d, double a) {
  if (d != 2 && d != 3) throw DomainError("flat_depletion: d must be 2 or 3");
  if (!(a > 0.0)) throw DomainError("flat_depletion: a must be > 0");
  const double pi = std::numbers::pi;
  const double g = gamma_d_closed_form(d);
  // (a/2) int dt (4 pi t)^{-d/2} e^{-at} I_1(at) = a^{d/2} gamma_d / (2 (4 pi)^{d/2})
  return std::pow(a, 0.5 * d) * g / (2.0 * std::pow(4.0 * pi, 0.5 * d));
}

struct FiniteTDepletion {
  double total;
  double zero_T;
  double thermal_part;
  int k_terms;
  double tail_bound;
};

enum class ThermalForm { k_sum, bose_factor };

// Thermal part (1/V) sum' (lambda/omega) / (e^{beta omega} - 1), either directly
// or through its expansion in exponentials with the sqrt(t^2 + k^2 beta^2)
// integrals.  spec governs the zero-temperature cutoff check, q the k-sum.
inline FiniteTDepletion depletion_finite_T(const Spectrum& s, const InteractionParams& ip, double beta,
                                           ThermalForm form = ThermalForm::k_sum, const SeriesSpec& spec = {},
                                           const QuadratureSpec& q = {}) {
  validate(ip);
  validate(spec);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("depletion_finite_T: beta must be > 0");
  const double a = ip.a();
  if (!(a > 0.0)) throw DomainError("depletion_finite_T: a must be > 0");
  const double V = s.volume();
  const auto zero = depletion_zero_T(s, ip, DepletionForm::mode_sum, spec, q);
  FiniteTDepletion out{0.0, zero.value, 0.0, 0, zero.tail_bound};
  const auto& ev = s.eigenvalues();
  const auto& w = s.multiplicities();
  if (form == ThermalForm::bose_factor) {
    double sum = 0.0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
      const auto m = bogoliubov_mode(ev[i], a);
      sum += w[i] * (m.lambda / m.omega) / std::expm1(beta * m.omega);
    }
    out.thermal_part = sum / V;
  } else {
    const double w1 = bogoliubov_mode(s.gap(), a).omega;
    const double r = std::exp(-beta * w1);
    double sum = 0.0;
    for (int k = 1;; ++k) {
      const double kb = k * beta;
      const double first = truncated_trace(s, kb, true) * std::exp(-kb * a);
      auto f = [&](double t) {
        const double tau = std::hypot(t, kb);
        const double tr = truncated_trace(s, tau, true);
        if (tr == 0.0) return 0.0;
        // e^{-a tau} I_1(a t) = scaled I_1(a t) e^{-a (tau - t)}
        return tr * sf::scaled_bessel_i1(a * t) * std::exp(-a * kb * kb / (tau + t));
      };
      const double second = a * require(integrate_half_line(f, q, std::max(1.0, kb)), "depletion_finite_T k-term");
      const double term = (first + second) / V;
      sum += term;
      out.k_terms = k;
      // term_{k+1} <= r term_k mode by mode
      if (term * r / (1.0 - r) <= q.rel_tol * sum || term == 0.0) break;
      if (static_cast<std::size_t>(k) >= spec.max_terms)
        throw ConvergenceError("depletion_finite_T: k-sum did not converge");
    }
    out.thermal_part = sum;
  }
  out.total = out.zero_T + out.thermal_part;
  return out;
}

struct PrudnikovCheck {
  double quadrature;
  double gamma_expression;
  double abs_error;
};

// int_0^inf x^{rho-1} K_mu(x) I_nu(x) dx against its Gamma-function value
// 2^{rho-2} G((rho+nu+mu)/2) G((rho+nu-mu)/2) G(1-rho) / (G(1+(nu+mu-rho)/2) G(1+(nu-mu-rho)/2)),
// valid for |mu| - nu < rho < 1.  nu must be 0 or 1.
inline PrudnikovCheck prudnikov_identity(double rho, double mu, double nu, const QuadratureSpec& q = {1e-13, 0.0, 12}) {
  if (nu != 0.0 && nu != 1.0) throw DomainError("prudnikov_identity: nu must be 0 or 1");
  if (!(std::abs(mu) - nu < rho && rho < 1.0))
    throw DomainError("prudnikov_identity: need |mu| - nu < rho < 1");
  auto f = [=](double x) {
    const double i = nu == 0.0 ? sf::scaled_bessel_i0(x) : sf::scaled_bessel_i1(x);
    return std::pow(x, rho - 1.0) * sf::detail::scaled_bessel_k_trapezoid(mu, x) * i;
  };
  const double quad = require(integrate_half_line(f, q), "prudnikov_identity");
  const double num = std::pow(2.0, rho - 2.0) * std::tgamma(0.5 * (rho + nu + mu)) *
                     std::tgamma(0.5 * (rho + nu - mu)) * std::tgamma(1.0 - rho);
  const double den = std::tgamma(1.0 + 0.5 * (-rho + nu + mu)) * std::tgamma(1.0 + 0.5 * (-rho + nu - mu));
  return {quad, num / den, std::abs(quad - num / den)};
}

// Constants of the finite-temperature bound: C1 = A Gamma(5/2) / C^{3/2} and
// C6 = 2 sqrt(pi) C1 + pi^{-1/4} C1 P with P = int x^{-1/4} K_{3/4} I_1.
struct FiniteTConstants {
  double C1;
  double C6;
  double prudnikov;
};

inline FiniteTConstants finite_T_constants(const BoundConstants& k) {
  if (!(k.C > 0.0) || !(k.A_ratio > 0.0)) throw ValidationError("finite_T_constants: C and A_ratio must be > 0");
  const double pi = std::numbers::pi;
  const double c1 = k.A_ratio * std::tgamma(2.5) / std::pow(k.C, 1.5);
  const double p = prudnikov_identity(0.75, 0.75, 1.0).gamma_expression;
  return {c1, 2.0 * std::sqrt(pi) * c1 + c1 * std::pow(pi, -0.25) * p, p};
}

// C1 zeta(3/2) beta^{-3/2} + C6 a^{1/2} / beta, d = 3.
inline double finite_T_upper_bound(double a, double beta, const BoundConstants& k) {
  if (!(a >= 0.0) || !(beta > 0.0)) throw DomainError("finite_T_upper_bound: need a >= 0, beta > 0");
  const auto c = finite_T_constants(k);
  return c.C1 * sf::riemann_zeta(1.5) * std::pow(beta, -1.5) + c.C6 * std::sqrt(a) / beta;
}

struct LogProbe {
  std::vector<ProbeRow> rows;
  // Growth per unit ln(Lambda) over each successive pair of grid points.
  std::vector<double> slopes;
  double asymptotic_slope;
};

// int_0^Lambda K_0(a sqrt(t^2 + beta^2)) I_1(a t) t^{-w} dt on an ascending
// Lambda grid; w = 0 is the two-dimensional integrand, w = 1/2 its
// three-dimensional counterpart.
inline LogProbe finite_T_bessel_probe(double a, double beta, const std::vector<double>& lambda_grid, double weight_power,
                                      const QuadratureSpec& q = {1e-12, 0.0, 12}) {
  if (!(a > 0.0) || !(beta > 0.0)) throw DomainError("finite_T_bessel_probe: a, beta must be > 0");
  if (lambda_grid.size() < 2) throw ValidationError("finite_T_bessel_probe: need >= 2 grid points");
  auto f = [&](double t) {
    const double tau = std::hypot(t, beta);
    return sf::scaled_bessel_k(sf::BesselKOrder::zero, a * tau) * sf::scaled_bessel_i1(a * t) *
           std::exp(-a * beta * beta / (tau + t)) * std::pow(t, -weight_power);
  };
  LogProbe p;
  p.asymptotic_slope = weight_power == 0.0 ? 1.0 / (2.0 * a) : 0.0;
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double L = lambda_grid[i];
    if (!(L > prev)) throw ValidationError("finite_T_bessel_probe: grid must ascend from > 0");
    // Piecewise on geometric subintervals keeps each panel smooth.
    double lo = prev;
    while (lo < L) {
      const double hi = std::min(L, lo == 0.0 ? std::min(L, beta) : 4.0 * lo);
      acc += require(tanh_sinh(f, lo, hi, q), "finite_T_bessel_probe");
      lo = hi;
    }
    p.rows.push_back({L, acc});
    if (i > 0)
      p.slopes.push_back((acc - p.rows[i - 1].value) / std::log(L / lambda_grid[i - 1]));
    prev = L;
  }
  return p;
}

}  // namespace hkbec
