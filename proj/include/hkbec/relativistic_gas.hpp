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

// Relativistic ideal Bose gas with particle/antiparticle Bose factors and
// single-particle energies sqrt(lambda + m^2).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hkbec/errors.hpp"
#include "hkbec/fit.hpp"
#include "hkbec/heat_kernel_bounds.hpp"
#include "hkbec/ideal_gas.hpp"
#include "hkbec/quadrature.hpp"
#include "hkbec/special_functions.hpp"
#include "hkbec/spectrum.hpp"

namespace hkbec {

struct RelGasParams {
  double m = 1.0;
  double beta = 1.0;
  double mu = 0.0;
  int dimension = 3;
};

inline void validate(const RelGasParams& p) {
  if (!(p.m > 0.0)) throw DomainError("relativistic gas: m must be > 0");
  if (!(p.beta > 0.0)) throw DomainError("relativistic gas: beta must be > 0");
  if (!(std::abs(p.mu) < p.m)) throw DomainError("relativistic gas: need |mu| < m");
}

enum class RelForm { direct, subordinated };

namespace detail {

// Weyl tail of sum_{lambda > E} e^{-beta sqrt(lambda)}, doubled.
inline double rel_tail(const Spectrum& s, double beta, double abs_mu) {
  const int d = s.dimension();
  const double rootE = std::sqrt(s.cutoff());
  const double w = 2.0 * s.weyl_coefficient() * d * std::pow(beta, -d) * sf::upper_incomplete_gamma(d, beta * rootE);
  return std::exp(beta * abs_mu) * w / (-std::expm1(-beta * (rootE - abs_mu)));
}

}  // namespace detail

inline double rel_excited_density(const Spectrum& s, const RelGasParams& p, RelForm form,
                                  const SeriesSpec& spec = {}, const QuadratureSpec& q = {}) {
  validate(p);
  validate(spec);
  const double b = p.beta, bm = p.beta * p.mu, V = s.volume();
  if (p.mu == 0.0) return 0.0;
  const auto& ev = s.eigenvalues();
  const auto& w = s.multiplicities();
  if (form == RelForm::direct) {
    double sum = 0.0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
      const double E = b * std::sqrt(ev[i] + p.m * p.m);
      if (E - std::abs(bm) > 745.0) break;
      sum += w[i] * (1.0 / std::expm1(E - bm) - 1.0 / std::expm1(E + bm));
    }
    const double tail = detail::rel_tail(s, b, std::abs(p.mu));
    if (tail > spec.rel_tol * std::abs(sum))
      throw CutoffError("rel_excited_density: spectrum cutoff too small", 4.0 * s.cutoff());
    return sum / V;
  }
  // sum_{k>=1} (k/sqrt(pi)) sinh(k beta mu) int ds s^{-3/2} e^{-k^2/4s} (1/V) Tr' e^{-s beta^2 h} e^{-s beta^2 m^2}
  const double gap_energy = std::sqrt(s.gap() + p.m * p.m) - std::abs(p.mu);
  const double r = std::exp(-b * gap_energy);
  double sum = 0.0;
  for (std::size_t k = 1; k <= spec.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    auto f = [&](double sv) {
      const double lead = -kk * kk / (4.0 * sv) - sv * b * b * p.m * p.m;
      if (lead < -745.0) return 0.0;
      return std::pow(sv, -1.5) * std::exp(lead) * truncated_trace(s, sv * b * b, true);
    };
    const double integral = require(integrate_half_line(f, q), "rel_excited_density");
    const double term = kk / std::sqrt(std::numbers::pi) * std::sinh(kk * bm) * integral / V;
    sum += term;
    if (std::abs(term) * r / (1.0 - r) <= 0.25 * spec.rel_tol * std::abs(sum)) return sum;
  }
  throw ConvergenceError("rel_excited_density: k-series exceeded max_terms");
}

struct SeriesValue {
  double value;
  double tail;
  std::size_t terms;
};

namespace detail {

// sum_{k>=1} sinh(k beta mu) K_nu(k beta m) k^{-power}, stopped on a
// geometric remainder bracket or at max_terms.
inline SeriesValue bessel_sinh_series(const RelGasParams& p, sf::BesselKOrder order, double power,
                                      const SeriesSpec& spec) {
  const double bm = p.beta * p.m;
  const double r = std::exp(-p.beta * (p.m - std::abs(p.mu)));
  double sum = 0.0, rest = 0.0;
  std::size_t k = 1;
  for (; k <= spec.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    const double x = kk * bm;
    const double e = 0.5 * (std::exp(-kk * p.beta * (p.m - p.mu)) - std::exp(-kk * p.beta * (p.m + p.mu)));
    const double term = e * sf::scaled_bessel_k(order, x) * std::pow(kk, -power);
    sum += term;
    rest = std::abs(term) * r / (1.0 - r);
    if (rest <= spec.rel_tol * std::abs(sum) || term == 0.0) break;
  }
  return {sum, rest, std::min(k, spec.max_terms)};
}

}  // namespace detail

struct RelBounds {
  double lower;
  double upper;
  double lower_tail;
  double upper_tail;
  // d = 3 only: majorant built from the K_2 upper estimate, and whether it
  // dominates the upper series termwise.
  double estimate_chain = 0.0;
  bool chain_dominates = true;
};

inline double rel_k2_chain(const RelGasParams& p, const BoundConstants& k, const QuadratureSpec& q = {}) {
  const double bm = p.beta * p.m;
  const double pref = k.A_ratio * p.m * p.m / (std::pow(k.C, 1.5) * p.beta);
  const double g52 = std::tgamma(2.5), g72 = std::tgamma(3.5), g92 = std::tgamma(4.5);
  auto f = [&](double x) {
    const double y = bm * x;
    return std::exp(-x * p.beta * (p.m - p.mu)) / (std::sqrt(bm) * std::pow(x, 1.5)) *
           (g52 + g72 / y + g92 / (4.0 * y * y));
  };
  const double integral = require(exp_sinh(f, 1.0, q), "rel_k2_chain");
  return 3.0 * pref * std::exp(-p.beta * (p.m - p.mu)) * sf::scaled_bessel_k(sf::BesselKOrder::two, bm) +
         4.0 * pref * integral;
}

inline RelBounds rel_density_bounds(const RelGasParams& p, const BoundConstants& k, const SeriesSpec& spec = {},
                                    const QuadratureSpec& q = {}) {
  validate(p);
  validate(k);
  RelBounds out{};
  if (p.dimension == 3) {
    const auto s = detail::bessel_sinh_series(p, sf::BesselKOrder::two, 1.0, spec);
    const double pref = 6.0 * p.m * p.m / p.beta;
    out.lower = pref / std::pow(k.B, 1.5) * s.value;
    out.upper = k.A_ratio * pref / std::pow(k.C, 1.5) * s.value;
    out.lower_tail = pref / std::pow(k.B, 1.5) * s.tail;
    out.upper_tail = k.A_ratio * pref / std::pow(k.C, 1.5) * s.tail;
    out.estimate_chain = rel_k2_chain(p, k, q);
    // Termwise: k = 1 against the first chain term, k >= 2 against the chain
    // integrand at x = k (the integrand decreases in x).
    const double bm = p.beta * p.m;
    const double g52 = std::tgamma(2.5), g72 = std::tgamma(3.5), g92 = std::tgamma(4.5);
    for (std::size_t j = 1; j <= s.terms; ++j) {
      const double x = static_cast<double>(j);
      const double term =
          3.0 * std::exp(-x * p.beta * (p.m - p.mu)) * sf::scaled_bessel_k(sf::BesselKOrder::two, x * bm) / x;
      double major;
      if (j == 1) major = 3.0 * std::exp(-p.beta * (p.m - p.mu)) * sf::scaled_bessel_k(sf::BesselKOrder::two, bm);
      else {
        const double y = bm * x;
        major = 4.0 * std::exp(-x * p.beta * (p.m - p.mu)) / (std::sqrt(bm) * std::pow(x, 1.5)) *
                (g52 + g72 / y + g92 / (4.0 * y * y));
      }
      if (term > major * (1.0 + 1e-12)) out.chain_dominates = false;
    }
    if (out.estimate_chain < out.upper) out.chain_dominates = false;
  } else if (p.dimension == 2) {
    const auto s = detail::bessel_sinh_series(p, sf::BesselKOrder::three_halves, 0.5, spec);
    const double pref = std::pow(2.0, 2.5) * std::pow(p.m, 1.5) / (std::sqrt(std::numbers::pi * p.beta));
    out.lower = pref / k.B * s.value;
    out.upper = k.A_ratio * pref / k.C * s.value;
    out.lower_tail = pref / k.B * s.tail;
    out.upper_tail = k.A_ratio * pref / k.C * s.tail;
  } else {
    throw ValidationError("rel_density_bounds: dimension must be 2 or 3");
  }
  return out;
}

struct IdentityCheck {
  double lhs;
  double rhs;
  double abs_error;
};

// e^{-b sqrt x} = (b / 2 sqrt pi) int_0^inf ds s^{-3/2} e^{-b^2/4s} e^{-s x}.
inline IdentityCheck subordination_identity_check(double b, double x, const QuadratureSpec& q = {1e-14, 0.0, 12}) {
  if (!(b > 0.0) || !(x > 0.0)) throw DomainError("subordination_identity_check: b, x must be > 0");
  auto f = [&](double s) {
    const double e = -b * b / (4.0 * s) - s * x;
    return e < -745.0 ? 0.0 : std::pow(s, -1.5) * std::exp(e);
  };
  const double rhs = b / (2.0 * std::sqrt(std::numbers::pi)) * require(integrate_half_line(f, q), "subordination");
  const double lhs = std::exp(-b * std::sqrt(x));
  return {lhs, rhs, std::abs(lhs - rhs)};
}

struct ThetaComparison {
  double theta_form;
  double direct_form;
  double rel_error;
};

// n_e = (1/V) d/d(beta mu) int ds (4 pi s^3)^{-1/2} theta(s, beta mu) Tr' e^{-s beta^2 h} e^{-s beta^2 m^2}
// with theta = sum_k e^{-k^2/4s + k beta mu}; the derivative is a central
// difference of step h in beta mu (the k = 0 term drops out).
inline ThetaComparison rel_theta_representation(const Spectrum& s, const RelGasParams& p, double step = 1e-3,
                                                const SeriesSpec& spec = {}, const QuadratureSpec& q = {}) {
  validate(p);
  if (!(step > 0.0)) throw DomainError("rel_theta_representation: step must be > 0");
  const double b = p.beta, bm = p.beta * p.mu;
  const double hi = bm + step, lo = bm - step;
  const double peak = std::max(hi * hi, lo * lo);
  auto f = [&](double sv) {
    const double log_pref = sv * peak - sv * b * b * p.m * p.m;
    const double tr = truncated_trace(s, sv * b * b, true);
    if (log_pref + std::log(std::max(tr, 1e-320)) < -745.0) return 0.0;
    const double scale = 1.0 / (4.0 * sv);
    const double shift = sv * peak;
    const double diff = sf::theta3_sum_shifted(scale, hi, shift, true) - sf::theta3_sum_shifted(scale, lo, shift, true);
    return diff / (2.0 * step) * std::exp(log_pref) * tr / (2.0 * std::sqrt(std::numbers::pi) * std::pow(sv, 1.5));
  };
  const double theta = require(integrate_half_line(f, q), "rel_theta_representation") / s.volume();
  const double direct = rel_excited_density(s, p, RelForm::direct, spec);
  return {theta, direct, std::abs(theta - direct) / std::abs(direct)};
}

// d = 2: int_1^X dx sinh(x beta mu) e^{-x beta m} / x as mu -> m-, with the
// slope of its growth against -ln(beta (m - mu)).
inline ProbeTable rel_2d_divergence_probe(double beta, double m, const std::vector<double>& mu_grid, double X,
                                          const QuadratureSpec& q = {}) {
  if (!(beta > 0.0) || !(m > 0.0)) throw DomainError("rel_2d_divergence_probe: beta, m must be > 0");
  if (!(X >= 1.0)) throw DomainError("rel_2d_divergence_probe: X must be >= 1");
  if (mu_grid.size() < 2) throw ValidationError("rel_2d_divergence_probe: need >= 2 grid points");
  ProbeTable t;
  std::vector<double> xs, ys;
  for (double mu : mu_grid) {
    if (!(mu < m) || !(mu > -m)) throw DomainError("rel_2d_divergence_probe: need |mu| < m");
    // x = e^y, dx/x = dy
    auto f = [&](double y) {
      const double x = std::exp(y);
      return 0.5 * (std::exp(-x * beta * (m - mu)) - std::exp(-x * beta * (m + mu)));
    };
    const double v = std::log(X) == 0.0 ? 0.0 : require(tanh_sinh(f, 0.0, std::log(X), q), "rel_2d_divergence_probe");
    t.rows.push_back({mu, v});
    xs.push_back(-std::log(beta * (m - mu)));
    ys.push_back(v);
  }
  t.slope = linear_fit(xs, ys).slope;
  return t;
}

}  // namespace hkbec
