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

// Ideal Bose gas on an explicit spectrum (natural units, h = -Laplacian).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hkbec/errors.hpp"
#include "hkbec/fit.hpp"
#include "hkbec/heat_kernel_bounds.hpp"
#include "hkbec/special_functions.hpp"
#include "hkbec/spectrum.hpp"

namespace hkbec {

enum class DensityForm { direct, heat_trace };

namespace detail {

// Upper estimate of sum_{eps > cutoff} mult / (e^{beta(eps - mu)} - 1).
inline double bose_tail(const Spectrum& s, double beta, double mu) {
  const double E = s.cutoff();
  const double q = std::exp(-beta * (E - mu));
  return std::exp(beta * mu) * weyl_trace_tail(s, beta, E) / (1.0 - q);
}

// Number of excited particles, sum over listed excited levels.
inline double excited_number(const Spectrum& s, double beta, double mu) {
  const auto& ev = s.eigenvalues();
  const auto& w = s.multiplicities();
  double sum = 0.0;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const double x = beta * (ev[i] - mu);
    if (x > 745.0) break;
    sum += w[i] / std::expm1(x);
  }
  return sum;
}

}  // namespace detail

// n_e = (1/V) sum_{sigma != 0} 1/(e^{beta(eps - mu)} - 1), either summed
// directly or as (1/V) sum_k e^{k beta mu} Tr' e^{-k beta h}.
inline double excited_density(const Spectrum& s, double beta, double mu, DensityForm form,
                              const SeriesSpec& spec = {}) {
  validate(spec);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("excited_density: beta must be > 0");
  if (!(mu < 0.0)) throw DomainError("excited_density: mu must be < 0 at finite volume");
  const double V = s.volume();
  if (form == DensityForm::direct) {
    const double value = detail::excited_number(s, beta, mu);
    const double tail = detail::bose_tail(s, beta, mu);
    if (tail > spec.rel_tol * value)
      throw CutoffError("excited_density: spectrum cutoff too small for beta = " + std::to_string(beta),
                        detail::required_cutoff(s, beta, spec.rel_tol * value * std::exp(-beta * mu)));
    return value / V;
  }
  const double r = std::exp(beta * mu);
  double sum = 0.0, tail = 0.0;
  for (std::size_t k = 1;; ++k) {
    if (k > spec.max_terms)
      throw ConvergenceError("excited_density: k-series exceeded max_terms (mu too close to 0)");
    const double t = beta * static_cast<double>(k);
    const double wk = std::pow(r, static_cast<double>(k));
    const double tr = truncated_trace(s, t, true);
    sum += wk * tr;
    tail += wk * weyl_trace_tail(s, t, s.cutoff());
    // Tr' is decreasing in t, so the remainder is below a geometric series.
    const double rest = wk * r * tr / (1.0 - r);
    if (rest <= 0.25 * spec.rel_tol * sum) break;
  }
  if (tail > spec.rel_tol * sum)
    throw CutoffError("excited_density: spectrum cutoff too small for beta = " + std::to_string(beta),
                      detail::required_cutoff(s, beta, spec.rel_tol * sum));
  return sum / V;
}

struct CondensationResult {
  double mu;
  double n_excited;
  double n_condensate;
  std::vector<double> occupations;
};

inline double total_number(const Spectrum& s, double beta, double mu) {
  return 1.0 / std::expm1(-beta * mu) + detail::excited_number(s, beta, mu);
}

struct SolverOptions {
  int max_iterations = 400;
  double rel_tol = 1e-13;
  bool keep_occupations = false;
};

// Grand-canonical mu < 0 at fixed density n: bisection on ln(-mu).
inline CondensationResult solve_chemical_potential(const Spectrum& s, double n, double beta,
                                                   const SeriesSpec& spec = {}, const SolverOptions& opt = {}) {
  if (!(n > 0.0) || !(beta > 0.0)) throw DomainError("solve_chemical_potential: n and beta must be > 0");
  const double N = n * s.volume();
  // At mu_hi the ground state alone holds N particles.
  const double mu_hi = -std::log1p(1.0 / N) / beta;
  double mu_lo = std::min(-1.0 / beta, 2.0 * mu_hi);
  for (int i = 0; total_number(s, beta, mu_lo) >= N; ++i) {
    mu_lo *= 2.0;
    if (i > 2000) throw ConvergenceError("solve_chemical_potential: cannot bracket mu");
  }
  double lo = std::log(-mu_hi), hi = std::log(-mu_lo);  // lo: larger N, hi: smaller N
  double mu = mu_hi, Nmu = 0.0;
  bool done = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    mu = -std::exp(mid);
    Nmu = total_number(s, beta, mu);
    if (std::abs(Nmu - N) <= opt.rel_tol * N || hi - lo < 1e-15) {
      done = true;
      break;
    }
    if (Nmu > N) lo = mid;
    else hi = mid;
  }
  if (!done)
    throw ConvergenceError("solve_chemical_potential: no convergence, bracket mu in [" +
                           std::to_string(-std::exp(hi)) + ", " + std::to_string(-std::exp(lo)) + "]");
  const double tail = detail::bose_tail(s, beta, mu);
  if (tail > spec.rel_tol * N)
    throw CutoffError("solve_chemical_potential: spectrum cutoff too small for beta = " + std::to_string(beta),
                      detail::required_cutoff(s, beta, spec.rel_tol * N * std::exp(-beta * mu)));
  CondensationResult r;
  r.mu = mu;
  const double N0 = 1.0 / std::expm1(-beta * mu);
  r.n_condensate = N0 / s.volume();
  r.n_excited = detail::excited_number(s, beta, mu) / s.volume();
  if (opt.keep_occupations) {
    r.occupations.push_back(N0);
    for (std::size_t i = 1; i < s.eigenvalues().size(); ++i)
      r.occupations.push_back(1.0 / std::expm1(beta * (s.eigenvalues()[i] - mu)));
  }
  return r;
}

// (1/V) Tr' e^{-h beta0} e^{eps_1 beta0} / (e^{eps_1 beta} - 1), valid for beta >= beta0.
inline double finite_volume_bound(const Spectrum& s, double beta0, double beta) {
  if (!(beta >= beta0) || !(beta0 > 0.0)) throw DomainError("finite_volume_bound: need beta >= beta0 > 0");
  const double e1 = s.gap();
  return truncated_trace(s, beta0, true) * std::exp(e1 * beta0) / (std::expm1(e1 * beta) * s.volume());
}

struct CurveRow {
  double beta;
  double mu;
  double n0;
  double ne;
  double bound_rhs;
  bool bound_pass;
};

inline std::vector<CurveRow> condensation_curve(const Spectrum& s, double n, const std::vector<double>& beta_grid,
                                                const SeriesSpec& spec = {}, unsigned threads = 1) {
  if (beta_grid.empty()) throw ValidationError("condensation_curve: empty beta grid");
  for (std::size_t i = 1; i < beta_grid.size(); ++i)
    if (!(beta_grid[i] > beta_grid[i - 1])) throw ValidationError("condensation_curve: beta grid must ascend");
  const double b0 = beta_grid.front();
  std::vector<CurveRow> rows(beta_grid.size());
  auto work = [&](std::size_t i) {
    const double b = beta_grid[i];
    const auto r = solve_chemical_potential(s, n, b, spec);
    const double rhs = finite_volume_bound(s, b0, b);
    rows[i] = {b, r.mu, r.n_condensate, r.n_excited, rhs, r.n_excited <= rhs * (1.0 + 1e-12)};
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(beta_grid.size())));
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < rows.size(); i += threads) work(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  try {
    for (std::size_t i = 0; i < rows.size(); i += threads) work(i);
  } catch (...) {
    errs[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return rows;
}

// Inverse temperature at which n0/n crosses `fraction`, by bisection in ln beta.
inline double condensation_crossing(const Spectrum& s, double n, double fraction = 0.05,
                                    const SeriesSpec& spec = {}, double rel_tol = 1e-9) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("condensation_crossing: fraction must be in (0,1)");
  auto frac = [&](double b) { return solve_chemical_potential(s, n, b, spec).n_condensate / n; };
  const int d = s.dimension();
  double b = std::pow(sf::riemann_zeta(std::max(0.5 * d, 1.5)) / n, 2.0 / d) / (4.0 * std::numbers::pi);
  double lo = b, hi = b;
  while (frac(lo) > fraction) lo *= 0.5;
  while (frac(hi) < fraction) hi *= 2.0;
  while (std::log(hi / lo) > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (frac(mid) < fraction) lo = mid;
    else hi = mid;
  }
  return std::sqrt(lo * hi);
}

struct TcBounds {
  double lower;
  double upper;
};

inline TcBounds tc_bounds(double n, int d, const BoundConstants& k) {
  if (d < 3) throw DomainError("tc_bounds: no condensation regime for d < 3");
  if (!(n > 0.0)) throw DomainError("tc_bounds: n must be > 0");
  validate(k);
  const double h = 0.5 * d;
  const double gz = std::tgamma(h) * sf::riemann_zeta(h);
  const double lower = std::pow(k.A_ratio * d / (2.0 * n * std::pow(k.C, h)) * gz, -2.0 / d);
  const double upper = std::pow(d / (2.0 * n * std::pow(k.B, h)) * gz, -2.0 / d);
  return {lower, upper};
}

// Density-of-states factor S(d) = |S^{d-1}| m^{d/2} / (2^{d/2+1} pi^d).
inline double dos_factor(int d, double m) {
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  return sphere * std::pow(m, 0.5 * d) / (std::pow(2.0, 0.5 * d + 1.0) * std::pow(std::numbers::pi, d));
}

// Flat-space excited density at mu = 0; m = 1/2 matches h = -Laplacian.
inline double flat_reference_density(int d, double beta, double m = 0.5) {
  if (d < 3) throw DomainError("flat_reference_density: diverges for d < 3");
  if (!(beta > 0.0) || !(m > 0.0)) throw DomainError("flat_reference_density: beta, m must be > 0");
  const double h = 0.5 * d;
  return dos_factor(d, m) * std::pow(beta, -h) * std::tgamma(h) * sf::riemann_zeta(h);
}

// Flat-space critical temperature: flat_reference_density(d, 1/T) = n.
inline double flat_critical_temperature(int d, double n, double m = 0.5) {
  if (!(n > 0.0)) throw DomainError("flat_critical_temperature: n must be > 0");
  return std::pow(n / flat_reference_density(d, 1.0, m), 2.0 / d);
}

// Two-sided bounds on the excited density at mu -> 0-, summing the trace
// sandwich over k; the lower side keeps the finite-volume incomplete gamma.
inline Sandwich excited_density_sandwich(const BoundConstants& k, int d, double V, double D, double beta) {
  validate(k);
  const double h = 0.5 * d;
  if (d < 3) throw DomainError("excited_density_sandwich: the k-sum diverges for d < 3");
  const double upper = std::pow(D, d) / V * h * std::pow(beta * k.C, -h) * std::tgamma(h) * sf::riemann_zeta(h);
  double lower = 0.0;
  for (int j = 1; j < 100'000'000; ++j) {
    const double term = trace_sandwich(k, d, V, D, beta * j).lower;
    lower += term;
    if (term < 1e-17 * lower) break;
  }
  return {lower, upper};
}

// d = 2: lower-bound density Gamma(0, beta|mu|)/(4 pi beta) as mu -> 0-;
// slope fitted against ln(1/|mu|).
inline ProbeTable d2_condensation_probe(double beta, const std::vector<double>& mu_grid) {
  if (!(beta > 0.0)) throw DomainError("d2_condensation_probe: beta must be > 0");
  if (mu_grid.size() < 2) throw ValidationError("d2_condensation_probe: need >= 2 grid points");
  ProbeTable t;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    const double mu = mu_grid[i];
    if (!(mu < 0.0)) throw DomainError("d2_condensation_probe: mu must be < 0");
    if (i > 0 && !(mu > mu_grid[i - 1])) throw ValidationError("d2_condensation_probe: mu grid must ascend to 0-");
    const double v = sf::exponential_integral_e1(beta * std::abs(mu)) / (4.0 * std::numbers::pi * beta);
    t.rows.push_back({mu, v});
    xs.push_back(std::log(1.0 / std::abs(mu)));
    ys.push_back(v);
  }
  t.slope = linear_fit(xs, ys).slope;
  return t;
}

}  // namespace hkbec
