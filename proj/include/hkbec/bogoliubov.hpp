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

// Weakly interacting condensate: Bogoliubov modes, the renormalized
// ground-state energy in three equivalent forms, its flat-space limit and
// finite-size corrections, the chemical potential and the normalization of
// the coherent ground state.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hkbec/errors.hpp"
#include "hkbec/heat_kernel_bounds.hpp"
#include "hkbec/quadrature.hpp"
#include "hkbec/special_functions.hpp"
#include "hkbec/spectrum.hpp"

namespace hkbec {

// u0: renormalized coupling; n0: condensate density.  a = u0 n0.
struct InteractionParams {
  double u0 = 1.0;
  double n0 = 1.0;
  double a() const { return u0 * n0; }
};

inline void validate(const InteractionParams& ip) {
  if (!(ip.u0 > 0.0) || !std::isfinite(ip.u0)) throw DomainError("interaction: u0 must be > 0");
  if (!(ip.n0 >= 0.0) || !std::isfinite(ip.n0)) throw DomainError("interaction: n0 must be >= 0");
}

// Coupling from a scattering length: u0 = 4 pi a_s hbar^2 / m.
inline double coupling_from_scattering_length(double a_s, double m, double hbar) {
  if (!(a_s > 0.0) || !(m > 0.0) || !(hbar > 0.0)) throw DomainError("coupling: inputs must be > 0");
  return 4.0 * std::numbers::pi * a_s * hbar * hbar / m;
}

struct BogoliubovMode {
  double epsilon;
  double lambda;
  double omega;
  double xi;
  // lambda - omega without cancellation.
  double lambda_minus_omega;
};

inline BogoliubovMode bogoliubov_mode(double eps, double a) {
  if (!(eps >= 0.0)) throw DomainError("bogoliubov_mode: eps must be >= 0");
  if (!(a > 0.0)) throw DomainError("bogoliubov_mode: a must be > 0");
  const double lambda = eps + a;
  const double omega = std::sqrt(eps * (eps + 2.0 * a));
  return {eps, lambda, omega, -0.5 * std::atanh(a / lambda), a * a / (lambda + omega)};
}

enum class EnergyRep { renorm_sum, subtracted_i1, fxt_double };

inline std::string to_string(EnergyRep r) {
  switch (r) {
    case EnergyRep::renorm_sum: return "renorm_sum";
    case EnergyRep::subtracted_i1: return "subtracted_I1";
    case EnergyRep::fxt_double: return "Fxt_double";
  }
  return "?";
}

struct EnergyBreakdown {
  double mean_field;
  double fluctuation;
  double total;
  // Estimate of the fluctuation part carried by levels above the cutoff.
  double tail_bound;
  double quadrature_error;
};

// e^{-x} I_1(x) / x - 1/2 (non-positive).  Below x = 1 it is summed as
// (1F1(3/2; 3; -2x) - 1) / 2 so the leading 1/2 cancels exactly.
inline double subtracted_i1_factor(double x) {
  if (!(x >= 0.0)) throw DomainError("subtracted_i1_factor: x must be >= 0");
  if (x <= 1.0) {
    double term = 1.0, sum = 0.0;
    for (int n = 0; n < 200; ++n) {
      term *= (1.5 + n) / (3.0 + n) * (-2.0 * x) / (n + 1.0);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return 0.5 * sum;
  }
  return sf::scaled_bessel_i1(x) / x - 0.5;
}

// sqrt(1-x^2) ((1 - e^{-t(1-x)}) + (1 - e^{-t(1+x)})).
inline double F_tx(double t, double x) {
  return std::sqrt((1.0 - x) * (1.0 + x)) * (-std::expm1(-t * (1.0 - x)) - std::expm1(-t * (1.0 + x)));
}

// d/dt F_tx / sqrt(1-x^2).
inline double F_tx_dt_kernel(double t, double x) {
  return (1.0 - x) * std::exp(-t * (1.0 - x)) + (1.0 + x) * std::exp(-t * (1.0 + x));
}

namespace detail {

inline double fluct_mode(double eps, double a) {
  const double lambda = eps + a;
  const double omega = std::sqrt(eps * (eps + 2.0 * a));
  // lambda - omega - a^2 / 2 eps
  return a * a * (eps - a - omega) / (2.0 * eps * (lambda + omega));
}

inline double energy_tail(const Spectrum& s, double a) {
  // |bracket| <= a^3 / (2 eps^2); Weyl density doubled.
  const double h = 0.5 * s.dimension();
  const double E = s.cutoff();
  return 0.5 * (a * a * a / 2.0) * 2.0 * s.weyl_coefficient() * h * std::pow(E, h - 2.0) / (2.0 - h);
}

template <class G>
QuadratureResult trace_integral(const Spectrum& s, double a, G&& weight, const QuadratureSpec& q) {
  auto f = [&](double t) {
    const double tr = truncated_trace(s, t / a, true);
    return tr == 0.0 ? 0.0 : weight(t) * tr;
  };
  return integrate_half_line(f, q);
}

inline double G_numeric(double t, const QuadratureSpec& q) {
  return require(tanh_sinh([t](double x) { return F_tx(t, x); }, 0.0, 1.0, q), "F(t,x) x-integral");
}

}  // namespace detail

inline EnergyBreakdown ground_energy(const Spectrum& s, const InteractionParams& ip, EnergyRep rep,
                                     const SeriesSpec& spec = {}, const QuadratureSpec& q = {}) {
  validate(ip);
  validate(spec);
  if (s.dimension() > 3) throw ValidationError("ground_energy: the renormalized sum diverges for d > 3");
  const double a = ip.a();
  const double V = s.volume();
  EnergyBreakdown out{0.5 * ip.u0 * ip.n0 * ip.n0 * V, 0.0, 0.0, 0.0, 0.0};
  if (a == 0.0) {
    out.total = out.mean_field;
    return out;
  }
  out.tail_bound = detail::energy_tail(s, a);
  const auto& ev = s.eigenvalues();
  const auto& w = s.multiplicities();
  switch (rep) {
    case EnergyRep::renorm_sum: {
      double sum = 0.0;
      for (std::size_t i = 1; i < ev.size(); ++i) sum += w[i] * detail::fluct_mode(ev[i], a);
      out.fluctuation = -0.5 * sum;
      break;
    }
    case EnergyRep::subtracted_i1: {
      const auto r = detail::trace_integral(s, a, [](double x) { return subtracted_i1_factor(x); }, q);
      out.fluctuation = -0.5 * a * require(r, "ground_energy(subtracted_I1)");
      out.quadrature_error = 0.5 * a * r.error;
      break;
    }
    case EnergyRep::fxt_double: {
      QuadratureSpec inner = q;
      inner.rel_tol = std::min(q.rel_tol, 1e-12);
      const auto r = detail::trace_integral(s, a, [&](double t) { return detail::G_numeric(t, inner); }, q);
      out.fluctuation = a / (2.0 * std::numbers::pi) * require(r, "ground_energy(Fxt_double)");
      out.quadrature_error = a / (2.0 * std::numbers::pi) * r.error;
      break;
    }
  }
  if (out.tail_bound > spec.rel_tol * std::abs(out.fluctuation)) {
    const double h = 0.5 * s.dimension();
    const double need = s.cutoff() * std::pow(out.tail_bound / (spec.rel_tol * std::abs(out.fluctuation)), 1.0 / (2.0 - h));
    throw CutoffError("ground_energy: truncated levels contribute up to " + std::to_string(out.tail_bound) +
                          "; need cutoff >= " + std::to_string(need),
                      need);
  }
  out.total = out.mean_field + out.fluctuation;
  return out;
}

struct EnergyComparison {
  EnergyBreakdown renorm_sum;
  EnergyBreakdown subtracted_i1;
  EnergyBreakdown fxt_double;
  double max_rel_deviation;
};

inline EnergyComparison ground_energy_all(const Spectrum& s, const InteractionParams& ip, const SeriesSpec& spec = {},
                                          const QuadratureSpec& q = {}) {
  EnergyComparison c{ground_energy(s, ip, EnergyRep::renorm_sum, spec, q),
                     ground_energy(s, ip, EnergyRep::subtracted_i1, spec, q),
                     ground_energy(s, ip, EnergyRep::fxt_double, spec, q), 0.0};
  const double ref = std::abs(c.renorm_sum.total);
  const double v[3] = {c.renorm_sum.total, c.subtracted_i1.total, c.fxt_double.total};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      c.max_rel_deviation = std::max(c.max_rel_deviation, std::abs(v[i] - v[j]) / ref);
  return c;
}

// int_0^1 sqrt(1-x^2) ((1+x)^{1/2} + (1-x)^{1/2}) dx
inline double lee_yang_x_integral(const QuadratureSpec& q = {1e-14, 0.0, 12}) {
  auto f = [](double x) {
    const double s = std::sqrt((1.0 - x) * (1.0 + x));
    return s * (std::sqrt(1.0 + x) + std::sqrt(1.0 - x));
  };
  return require(tanh_sinh(f, 0.0, 1.0, q), "lee_yang_x_integral");
}

enum class LeeYangMethod { closed_form, numeric_integral };

struct LeeYangResult {
  double energy_per_particle;
  double mean_field_per_particle;
  double coefficient;
  double gas_parameter;
};

// E_g / N = (2 pi hbar^2 a_s n0 / m) (1 + c (n0 a_s^3)^{1/2}).
inline LeeYangResult lee_yang_flat(double n0, double a_s, double m, double hbar, LeeYangMethod method) {
  if (!(n0 > 0.0) || !(a_s > 0.0) || !(m > 0.0) || !(hbar > 0.0))
    throw DomainError("lee_yang_flat: inputs must be > 0");
  double c;
  if (method == LeeYangMethod::closed_form) {
    c = 128.0 / (15.0 * std::sqrt(std::numbers::pi));
  } else {
    // Flat trace in E_0 = (a V / 2 pi) int dt int dx F(t,x) (1/V) Tr e^{-th/a}, with
    // int_0^inf dt t^{-3/2} (1 - e^{-t(1 +- x)}) = 2 sqrt(pi) (1 +- x)^{1/2}; relative
    // to the mean field u0 n0 / 2 per particle this leaves 2^{5/2} X / sqrt(pi).
    c = std::pow(2.0, 2.5) * lee_yang_x_integral() / std::sqrt(std::numbers::pi);
  }
  const double gas = n0 * a_s * a_s * a_s;
  const double mf = 2.0 * std::numbers::pi * hbar * hbar * a_s * n0 / m;
  return {mf * (1.0 + c * std::sqrt(gas)), mf, c, gas};
}

struct FiniteSizeEnergy {
  double mean_field;
  double volume_term;
  double area_term;
  double curvature_term;
  double total;
};

// Volume term with the flat trace over all t; area and mean-curvature terms
// of the small-t expansion over t in [0, 1].  Natural units.
inline FiniteSizeEnergy finite_size_ground_energy(const GeometryInfo& g, const InteractionParams& ip,
                                                  const QuadratureSpec& q = {}) {
  validate(ip);
  if (g.dimension != 3) throw ValidationError("finite_size_ground_energy: only d = 3 is supported");
  const double a = ip.a();
  const double pi = std::numbers::pi;
  FiniteSizeEnergy e{0.5 * ip.u0 * ip.n0 * ip.n0 * g.volume, 0.0, 0.0, 0.0, 0.0};
  if (a > 0.0) {
    QuadratureSpec inner = q;
    inner.rel_tol = std::min(q.rel_tol, 1e-12);
    auto G = [&](double t) { return detail::G_numeric(t, inner); };
    const double vol = require(integrate_half_line([&](double t) { return G(t) * std::pow(t, -1.5); }, q), "volume term");
    e.volume_term = a * g.volume / (2.0 * pi) * std::pow(a / (4.0 * pi), 1.5) * vol;
    const double ar = require(tanh_sinh([&](double t) { return G(t) / t; }, 0.0, 1.0, q), "area term");
    e.area_term = a / (2.0 * pi) * g.boundary_area * a / (16.0 * pi) * ar;
    const double cu = require(tanh_sinh([&](double t) { return G(t) / std::sqrt(t); }, 0.0, 1.0, q), "curvature term");
    e.curvature_term = a / (2.0 * pi) * std::sqrt(a) * g.mean_curvature_integral / (12.0 * std::pow(pi, 1.5)) * cu;
  }
  e.total = e.mean_field + e.volume_term + e.area_term + e.curvature_term;
  return e;
}

// Majorant C3 a^2 D^3 sqrt(pi) / (2 D) of the large-t remainder in the
// upper-bound chain for E_g.
inline double energy_upper_bound_remainder(double a, double D, double C3) {
  if (!(a >= 0.0) || !(D > 0.0) || !(C3 > 0.0)) throw DomainError("energy_upper_bound_remainder: bad inputs");
  return C3 * a * a * D * D * std::sqrt(std::numbers::pi) / 2.0;
}

// F(a t, x) <= 2 sqrt(1-x^2) (1 - e^{-2 a t}).
inline double F_majorant(double a, double t, double x) {
  return 2.0 * std::sqrt((1.0 - x) * (1.0 + x)) * (-std::expm1(-2.0 * a * t));
}

// Flat-space fluctuation energy density a^{5/2} X / (8 pi^2), natural units.
inline double flat_fluctuation_density(double a) {
  return std::pow(a, 2.5) * lee_yang_x_integral() / (8.0 * std::pow(std::numbers::pi, 2));
}

// Upper bound on E_g from Tr' e^{-th} <= C_tilde (D / sqrt t)^3 for all t,
// plus the remainder majorant.  The trace bound extends past t = D^2 when
// eps_1 D^2 >= 3/2 (long-time decay); `valid` reports that condition.
struct EnergyUpperBound {
  double value;
  double flat_part;
  double remainder;
  bool valid;
};

inline EnergyUpperBound energy_upper_bound(const Spectrum& s, const InteractionParams& ip, double C_tilde) {
  validate(ip);
  if (s.dimension() != 3) throw ValidationError("energy_upper_bound: only d = 3 is supported");
  if (!(C_tilde > 0.0)) throw ValidationError("energy_upper_bound: C_tilde must be > 0");
  const double a = ip.a(), D = s.diameter();
  const double mean = 0.5 * ip.u0 * ip.n0 * ip.n0 * s.volume();
  const double flat = C_tilde * std::pow(4.0 * std::numbers::pi, 1.5) * D * D * D * flat_fluctuation_density(a);
  const double rem = energy_upper_bound_remainder(a, D, C_tilde);
  return {mean + flat + rem, flat, rem, s.gap() * D * D >= 1.5};
}

struct ChemicalPotential {
  double mu;
  double mean_field;
  double fluctuation;
  double quadrature_error;
};

enum class DerivativeForm { mode_sum, integral };

// dE_g/dN at fixed V with N ~ N0: u0 n0 + (u0 / V) dE_0/da, where
// dE_0/da = -(1/2) sum [1 - eps/omega - a/eps] or its trace-integral form.
inline ChemicalPotential bog_chemical_potential(const Spectrum& s, const InteractionParams& ip,
                                                DerivativeForm form = DerivativeForm::integral,
                                                const QuadratureSpec& q = {}) {
  validate(ip);
  if (s.dimension() > 3) throw ValidationError("bog_chemical_potential: d must be <= 3");
  const double a = ip.a();
  ChemicalPotential out{a, a, 0.0, 0.0};
  if (a == 0.0) return out;
  double dE0 = 0.0;
  if (form == DerivativeForm::mode_sum) {
    const auto& ev = s.eigenvalues();
    const auto& w = s.multiplicities();
    double sum = 0.0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
      const double e = ev[i];
      const double om = std::sqrt(e * (e + 2.0 * a));
      sum += w[i] * a * (e - 2.0 * a - om) / (om * (om + e));
    }
    dE0 = -0.5 * sum;
  } else {
    QuadratureSpec inner = q;
    inner.rel_tol = std::min(q.rel_tol, 1e-12);
    auto Gp = [&](double t) {
      auto k = [t](double x) { return std::sqrt((1.0 - x) * (1.0 + x)) * F_tx_dt_kernel(t, x); };
      return require(tanh_sinh(k, 0.0, 1.0, inner), "dF/dt x-integral");
    };
    // E_0 = (a^2 / 2 pi) int dtau G(a tau) Tr'(tau); differentiate in a.
    auto f = [&](double tau) {
      const double tr = truncated_trace(s, tau, true);
      if (tr == 0.0) return 0.0;
      return (a / std::numbers::pi * detail::G_numeric(a * tau, inner) +
              a * a / (2.0 * std::numbers::pi) * tau * Gp(a * tau)) * tr;
    };
    const auto r = integrate_half_line(f, q);
    dE0 = require(r, "bog_chemical_potential");
    out.quadrature_error = ip.u0 / s.volume() * r.error;
  }
  out.fluctuation = ip.u0 / s.volume() * dE0;
  out.mu = out.mean_field + out.fluctuation;
  return out;
}

struct Normalization {
  double log_N;
  double tail_bound;
  bool summable;
};

// log N = (1/4) sum log(1 - (lambda - omega)/(lambda + omega)).
inline Normalization normalization_constant(const Spectrum& s, const InteractionParams& ip, const SeriesSpec& spec = {}) {
  validate(ip);
  validate(spec);
  const double a = ip.a();
  if (a == 0.0) return {0.0, 0.0, true};
  if (s.dimension() > 3) throw ValidationError("normalization_constant: d must be <= 3");
  const auto& ev = s.eigenvalues();
  const auto& w = s.multiplicities();
  double sum = 0.0;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const double lam = ev[i] + a;
    const double om = std::sqrt(ev[i] * (ev[i] + 2.0 * a));
    const double r = a / (lam + om);
    sum += w[i] * std::log1p(-r * r);
  }
  // Above the cutoff (lambda - omega)/(lambda + omega) <= a^2 / (4 eps^2).
  const double h = 0.5 * s.dimension();
  const double E = s.cutoff();
  const double x = a * a / (4.0 * E * E);
  const double tail = 0.25 * a * a / 4.0 * 2.0 * s.weyl_coefficient() * h * std::pow(E, h - 2.0) / (2.0 - h) / (1.0 - x);
  Normalization n{0.25 * sum, tail, std::isfinite(sum)};
  if (tail > spec.rel_tol * std::abs(n.log_N))
    throw CutoffError("normalization_constant: tail bound " + std::to_string(tail) + " exceeds tolerance",
                      E * std::pow(tail / (spec.rel_tol * std::abs(n.log_N)), 1.0 / (2.0 - h)));
  return n;
}

}  // namespace hkbec
