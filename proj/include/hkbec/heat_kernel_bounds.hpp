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

// Two-sided heat-trace and eigenvalue bounds with dimension constants that
// are either supplied (verify) or measured from a spectrum (calibrate).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hkbec/errors.hpp"
#include "hkbec/special_functions.hpp"
#include "hkbec/spectrum.hpp"

namespace hkbec {

// C_tilde: Tr e^{-ht} <= C_tilde g(t).  C: eps_sigma >= C sigma^{2/d} / D^2.
// B: eps_sigma <= B (sigma / V)^{2/d}.  A_ratio: D^d / V.
struct BoundConstants {
  double C_tilde = 0.0;
  double C = 0.0;
  double B = 0.0;
  double A_ratio = 0.0;
};

inline void validate(const BoundConstants& k) {
  if (!(k.C_tilde > 0.0) || !(k.C > 0.0) || !(k.B > 0.0) || !(k.A_ratio > 0.0))
    throw ValidationError("bound constants must all be > 0 (run a calibration first)");
}

enum class BoundMode { verify, calibrate };

struct BoundRow {
  double parameter;
  double lower;
  double measured;
  double upper;
  bool pass;
  double slack;
};

struct BoundReport {
  std::string check;
  std::vector<BoundRow> rows;
  std::optional<BoundConstants> calibrated;

  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const BoundRow& r) { return !r.pass; }));
  }
  bool all_pass() const { return violations() == 0; }
};

inline BoundRow make_row(double param, double lower, double measured, double upper, double rel_tol = 1e-12) {
  const double tol = rel_tol * std::max(std::abs(measured), std::numeric_limits<double>::min());
  const bool pass = lower <= measured + tol && measured <= upper + tol;
  double slack = std::numeric_limits<double>::infinity();
  if (std::isfinite(lower)) slack = std::min(slack, measured - lower);
  if (std::isfinite(upper)) slack = std::min(slack, upper - measured);
  return {param, lower, measured, upper, pass, slack};
}

// Li-Yau profile g(t) = (D/sqrt t)^d for sqrt t <= D, 1 otherwise.
inline double li_yau_profile(double D, int d, double t) {
  return std::sqrt(t) <= D ? std::pow(D / std::sqrt(t), d) : 1.0;
}

inline BoundReport trace_bounds_check(const Spectrum& s, BoundConstants k, const std::vector<double>& t_grid,
                                      BoundMode mode, const SeriesSpec& spec = {}) {
  if (t_grid.empty()) throw ValidationError("trace_bounds_check: empty t grid");
  const int d = s.dimension();
  std::vector<double> measured;
  measured.reserve(t_grid.size());
  for (double t : t_grid) measured.push_back(heat_trace(s, t, false, spec).value);
  BoundReport rep{"trace", {}, {}};
  if (mode == BoundMode::calibrate) {
    double c = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      c = std::max(c, measured[i] / li_yau_profile(s.diameter(), d, t_grid[i]));
    k.C_tilde = c;
    rep.calibrated = k;
  } else if (!(k.C_tilde > 0.0)) {
    throw ValidationError("trace_bounds_check: C_tilde must be > 0 in verify mode");
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double lower = s.volume() / std::pow(4.0 * std::numbers::pi * t, 0.5 * d);
    const double upper = k.C_tilde * li_yau_profile(s.diameter(), d, t);
    rep.rows.push_back(make_row(t, lower, measured[i], upper));
  }
  return rep;
}

// Rows for sigma = 1..sigma_max; each row carries the Li-Yau lower and
// Colbois-Maerten type upper bound on eps_sigma.
inline BoundReport eigenvalue_bounds_check(const Spectrum& s, BoundConstants k, std::uint64_t sigma_max,
                                           BoundMode mode) {
  if (sigma_max < 1) throw ValidationError("eigenvalue_bounds_check: sigma_max must be >= 1");
  if (sigma_max >= s.mode_count())
    throw ValidationError("eigenvalue_bounds_check: sigma_max beyond the listed spectrum");
  const int d = s.dimension();
  const double D2 = s.diameter() * s.diameter();
  const double V = s.volume();
  std::vector<double> eps;
  eps.reserve(sigma_max);
  for (const auto& e : s.entries()) {
    if (e.eigenvalue == 0.0) continue;
    for (std::uint64_t m = 0; m < e.multiplicity && eps.size() < sigma_max; ++m) eps.push_back(e.eigenvalue);
    if (eps.size() >= sigma_max) break;
  }
  BoundReport rep{"eigenvalue", {}, {}};
  if (mode == BoundMode::calibrate) {
    double c = std::numeric_limits<double>::infinity(), b = 0.0;
    for (std::uint64_t i = 0; i < eps.size(); ++i) {
      const double sig = static_cast<double>(i + 1);
      c = std::min(c, eps[i] * D2 / std::pow(sig, 2.0 / d));
      b = std::max(b, eps[i] * std::pow(V / sig, 2.0 / d));
    }
    k.C = c;
    k.B = b;
    rep.calibrated = k;
  } else if (!(k.C > 0.0) || !(k.B > 0.0)) {
    throw ValidationError("eigenvalue_bounds_check: C and B must be > 0 in verify mode");
  }
  for (std::uint64_t i = 0; i < eps.size(); ++i) {
    const double sig = static_cast<double>(i + 1);
    const double lower = k.C * std::pow(sig, 2.0 / d) / D2;
    const double upper = k.B * std::pow(sig / V, 2.0 / d);
    rep.rows.push_back(make_row(sig, lower, eps[i], upper));
  }
  return rep;
}

struct Sandwich {
  double lower;
  double upper;
};

// Bounds on (1/V) Tr' e^{-ht} obtained by integrating the eigenvalue bounds.
inline Sandwich trace_sandwich(const BoundConstants& k, int d, double V, double D, double t) {
  if (!(t > 0.0) || !(V > 0.0) || !(D > 0.0) || d < 1)
    throw ValidationError("trace_sandwich: need t, V, D > 0 and d >= 1");
  if (!(k.B > 0.0) || !(k.C > 0.0)) throw ValidationError("trace_sandwich: B and C must be > 0");
  const double h = 0.5 * d;
  const double lower = h * sf::upper_incomplete_gamma(h, t * k.B / std::pow(V, 2.0 / d)) /
                       (std::pow(k.B, h) * std::pow(t, h));
  const double upper = std::pow(D, d) / (V * std::pow(k.C, h)) * std::tgamma(h + 1.0) * std::pow(t, -h);
  return {lower, upper};
}

inline BoundReport trace_sandwich_check(const Spectrum& s, const BoundConstants& k,
                                        const std::vector<double>& t_grid, const SeriesSpec& spec = {}) {
  BoundReport rep{"sandwich", {}, {}};
  for (double t : t_grid) {
    const auto sw = trace_sandwich(k, s.dimension(), s.volume(), s.diameter(), t);
    const double m = heat_trace(s, t, true, spec).value / s.volume();
    rep.rows.push_back(make_row(t, sw.lower, m, sw.upper));
  }
  return rep;
}

// Tr' e^{-ht} <= Tr' e^{-h t0} e^{-eps_1 (t - t0)} for t >= t0.
inline BoundReport long_time_decay_check(const Spectrum& s, double t0, const std::vector<double>& t_grid,
                                         const SeriesSpec& spec = {}) {
  if (!(t0 > 0.0)) throw ValidationError("long_time_decay_check: t0 must be > 0");
  const double base = heat_trace(s, t0, true, spec).value;
  BoundReport rep{"decay", {}, {}};
  for (double t : t_grid) {
    if (t < t0) throw ValidationError("long_time_decay_check: grid points must be >= t0");
    const double m = heat_trace(s, t, true, spec).value;
    const double upper = base * std::exp(-s.gap() * (t - t0));
    rep.rows.push_back(make_row(t, 0.0, m, upper));
  }
  return rep;
}

struct EigenvalueFromTrace {
  // Solves min_t e^{eps t} C_tilde g(t) = sigma + 1 for eps.
  double with_count;
  // Same closed form with sigma + 1 replaced by sigma, i.e. C(d) sigma^{2/d} / D^2.
  double power_law;
};

namespace detail {

inline double eigen_from_trace_level(double C_tilde, double D, int d, double level) {
  const double h = 0.5 * d;
  const double eps = h / std::numbers::e * std::pow(C_tilde, -2.0 / d) * std::pow(level, 2.0 / d) / (D * D);
  if (h / eps <= D * D) return eps;
  // Minimizer outside the power-law branch: the minimum sits at t = D^2.
  return std::max(0.0, std::log(level / C_tilde)) / (D * D);
}

}  // namespace detail

inline EigenvalueFromTrace eigenvalue_lower_from_trace(double C_tilde, double D, int d, std::uint64_t sigma) {
  if (!(C_tilde > 0.0) || !(D > 0.0) || d < 1 || sigma < 1)
    throw ValidationError("eigenvalue_lower_from_trace: positive inputs required");
  const double s = static_cast<double>(sigma);
  return {detail::eigen_from_trace_level(C_tilde, D, d, s + 1.0),
          detail::eigen_from_trace_level(C_tilde, D, d, s)};
}

struct ShortTimeTerms {
  double leading;
  double area_term;
  double curvature_term;
  double sum;
};

// Three-term small-t expansion of the Neumann heat trace in d = 3.
inline ShortTimeTerms short_time_expansion(const GeometryInfo& g, double t) {
  if (g.dimension != 3) throw ValidationError("short_time_expansion: only d = 3 is supported");
  if (!(t > 0.0)) throw DomainError("short_time_expansion: t must be > 0");
  const double pi = std::numbers::pi;
  const double lead = g.volume / std::pow(4.0 * pi * t, 1.5);
  const double area = g.boundary_area / (16.0 * pi * t);
  const double curv = g.mean_curvature_integral / (12.0 * std::pow(pi, 1.5) * std::sqrt(t));
  return {lead, area, curv, lead + area + curv};
}

}  // namespace hkbec
