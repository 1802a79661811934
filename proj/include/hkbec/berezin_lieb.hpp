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

// Coherent states on a truncated Fock space, lower and upper symbols, and the
// lower/upper partition-function sandwich for one condensate mode coupled to
// free spectator modes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hkbec/errors.hpp"
#include "hkbec/quadrature.hpp"

namespace hkbec {

struct FockTruncation {
  int nmax = 60;
  double tail_tol = 1e-12;
};

inline void validate(const FockTruncation& t) {
  if (t.nmax < 1) throw ValidationError("fock truncation: nmax must be >= 1");
  if (!(t.tail_tol > 0.0)) throw ValidationError("fock truncation: tail_tol must be > 0");
}

using cplx = std::complex<double>;

// nmax >= |z|^2 + 8|z| + 16
inline int required_nmax(cplx z) {
  const double r = std::abs(z);
  return static_cast<int>(std::ceil(r * r + 8.0 * r + 16.0));
}

struct CoherentState {
  cplx z;
  std::vector<cplx> amplitudes;
  double norm_deficit;
};

inline CoherentState coherent_vector(cplx z, const FockTruncation& t) {
  validate(t);
  const int need = required_nmax(z);
  if (t.nmax < need)
    throw TruncationError("coherent_vector: nmax " + std::to_string(t.nmax) + " too small; need >= " +
                              std::to_string(need),
                          need);
  const double rho = std::norm(z);
  CoherentState c{z, std::vector<cplx>(t.nmax + 1), 0.0};
  // c_n = e^{-rho/2} z^n / sqrt(n!) via the recursion c_n = c_{n-1} z / sqrt(n).
  c.amplitudes[0] = std::exp(-0.5 * rho);
  for (int n = 1; n <= t.nmax; ++n) c.amplitudes[n] = c.amplitudes[n - 1] * z / std::sqrt(static_cast<double>(n));
  // Poisson tail beyond nmax.
  double p = std::norm(c.amplitudes[t.nmax]), tail = 0.0;
  for (int n = t.nmax + 1; n < t.nmax + 100000; ++n) {
    p *= rho / n;
    tail += p;
    if (p <= 1e-18 * tail || p == 0.0) break;
  }
  c.norm_deficit = tail;
  if (tail > t.tail_tol)
    throw TruncationError("coherent_vector: norm deficit " + std::to_string(tail) + " above tolerance", need + 8);
  return c;
}

// e^{-(|z|^2 + |w|^2)/2 + conj(z) w}
inline cplx coherent_overlap_exact(cplx z, cplx w) {
  return std::exp(-0.5 * (std::norm(z) + std::norm(w)) + std::conj(z) * w);
}

inline cplx coherent_overlap(const CoherentState& a, const CoherentState& b) {
  const std::size_t n = std::min(a.amplitudes.size(), b.amplitudes.size());
  cplx s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

enum class Monomial { identity, a, a_dag, a2, a_dag2, number, pair_number };

inline std::string to_string(Monomial m) {
  switch (m) {
    case Monomial::identity: return "1";
    case Monomial::a: return "a";
    case Monomial::a_dag: return "a+";
    case Monomial::a2: return "a^2";
    case Monomial::a_dag2: return "a+^2";
    case Monomial::number: return "a+a";
    case Monomial::pair_number: return "a+^2a^2";
  }
  return "?";
}

// Upper symbol as sum of c z^p conj(z)^q.
struct SymbolTerm {
  int p;
  int q;
  double c;
};

inline std::vector<SymbolTerm> upper_symbol_terms(Monomial m) {
  switch (m) {
    case Monomial::identity: return {{0, 0, 1.0}};
    case Monomial::a: return {{1, 0, 1.0}};
    case Monomial::a_dag: return {{0, 1, 1.0}};
    case Monomial::a2: return {{2, 0, 1.0}};
    case Monomial::a_dag2: return {{0, 2, 1.0}};
    case Monomial::number: return {{1, 1, 1.0}, {0, 0, -1.0}};
    case Monomial::pair_number: return {{2, 2, 1.0}, {1, 1, -4.0}, {0, 0, 2.0}};
  }
  return {};
}

inline cplx lower_symbol(Monomial m, cplx z) {
  const double r = std::norm(z);
  switch (m) {
    case Monomial::identity: return 1.0;
    case Monomial::a: return z;
    case Monomial::a_dag: return std::conj(z);
    case Monomial::a2: return z * z;
    case Monomial::a_dag2: return std::conj(z) * std::conj(z);
    case Monomial::number: return r;
    case Monomial::pair_number: return r * r;
  }
  return 0.0;
}

inline cplx upper_symbol(Monomial m, cplx z) {
  cplx s = 0.0;
  for (const auto& t : upper_symbol_terms(m)) s += t.c * std::pow(z, t.p) * std::pow(std::conj(z), t.q);
  return s;
}

// <m|A|n> for the monomial, exact.
inline double monomial_element(Monomial mono, int m, int n) {
  switch (mono) {
    case Monomial::identity: return m == n ? 1.0 : 0.0;
    case Monomial::a: return m == n - 1 ? std::sqrt(static_cast<double>(n)) : 0.0;
    case Monomial::a_dag: return m == n + 1 ? std::sqrt(n + 1.0) : 0.0;
    case Monomial::a2: return m == n - 2 ? std::sqrt(n * (n - 1.0)) : 0.0;
    case Monomial::a_dag2: return m == n + 2 ? std::sqrt((n + 1.0) * (n + 2.0)) : 0.0;
    case Monomial::number: return m == n ? static_cast<double>(n) : 0.0;
    case Monomial::pair_number: return m == n ? n * (n - 1.0) : 0.0;
  }
  return 0.0;
}

struct SymbolPair {
  cplx lower_measured;
  cplx lower_table;
  cplx upper_table;
};

inline SymbolPair symbol_pair(Monomial mono, cplx z, const FockTruncation& t) {
  const auto c = coherent_vector(z, t);
  cplx s = 0.0;
  for (int m = 0; m <= t.nmax; ++m)
    for (int n = std::max(0, m - 2); n <= std::min(t.nmax, m + 2); ++n) {
      const double e = monomial_element(mono, m, n);
      if (e != 0.0) s += std::conj(c.amplitudes[m]) * e * c.amplitudes[n];
    }
  return {s, lower_symbol(mono, z), upper_symbol(mono, z)};
}

struct Reconstruction {
  // Row-major (nmax+1)^2 matrix.
  std::vector<double> matrix;
  int size;
  // Max |reconstructed - exact| over m, n <= nmax/2.
  double low_block_deviation;
};

// int dmu(z) A_U(z) |z><z| with the angular integral done exactly:
// <m|.|n> = sum c_pq delta_{m+p, n+q} int_0^inf e^{-r} r^{m+p} dr / sqrt(m! n!),
// radial integral by Gauss-Laguerre.
inline Reconstruction reconstruct_from_upper_symbol(Monomial mono, const FockTruncation& t, int radial_nodes = 0) {
  validate(t);
  const int n_nodes = radial_nodes > 0 ? radial_nodes : t.nmax + 4;
  const auto rule = gauss_laguerre(n_nodes);
  const int N = t.nmax + 1;
  Reconstruction r{std::vector<double>(static_cast<std::size_t>(N) * N, 0.0), N, 0.0};
  auto moment = [&](int k, double log_norm) {
    double s = 0.0;
    for (int i = 0; i < n_nodes; ++i) s += std::exp(rule.log_weights[i] + k * std::log(rule.nodes[i]) - log_norm);
    return s;
  };
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      const double log_norm = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0));
      double v = 0.0;
      for (const auto& term : upper_symbol_terms(mono))
        if (m + term.p == n + term.q) v += term.c * moment(m + term.p, log_norm);
      r.matrix[static_cast<std::size_t>(m) * N + n] = v;
    }
  const int low = t.nmax / 2;
  for (int m = 0; m <= low; ++m)
    for (int n = 0; n <= low; ++n)
      r.low_block_deviation = std::max(r.low_block_deviation,
                                       std::abs(r.matrix[static_cast<std::size_t>(m) * N + n] - monomial_element(mono, m, n)));
  return r;
}

// One condensate mode (energy 0) and `spectators` free modes of energy epsilon:
// H = epsilon N_ex - mu (n0 + N_ex) + (u / 2V) a+^2 a^2 + (2u / V) n0 N_ex.
struct ToySystem {
  double epsilon = 1.0;
  double u = 0.5;
  double mu = 0.25;
  double V = 10.0;
  double beta = 1.0;
  int spectators = 1;
};

inline void validate(const ToySystem& s) {
  if (!(s.u > 0.0)) throw ValidationError("toy system: u must be > 0");
  if (!(s.beta > 0.0)) throw ValidationError("toy system: beta must be > 0");
  if (!(s.V > 0.0)) throw ValidationError("toy system: V must be > 0");
  if (s.spectators < 0) throw ValidationError("toy system: spectators must be >= 0");
  if (s.spectators > 0 && !(s.epsilon - s.mu - 2.0 * s.u / s.V > 0.0))
    throw ValidationError("toy system: need epsilon - mu - 2u/V > 0 for the upper-symbol trace");
}

// Polynomial in rho = |z|^2 and N_ex with coefficients that are exact integer
// combinations mu_c mu + eps_c epsilon + uh_c u/(2V).
struct SymCoef {
  long mu_c = 0;
  long eps_c = 0;
  long uh_c = 0;
  bool operator==(const SymCoef&) const = default;
};

using SymPoly = std::map<std::pair<int, int>, SymCoef>;

inline SymPoly& add_term(SymPoly& p, int rho_pow, int nex_pow, SymCoef c, long factor) {
  auto& t = p[{rho_pow, nex_pow}];
  t.mu_c += factor * c.mu_c;
  t.eps_c += factor * c.eps_c;
  t.uh_c += factor * c.uh_c;
  if (t == SymCoef{}) p.erase({rho_pow, nex_pow});
  return p;
}

enum class SymbolKind { lower, upper };

// Substitutes the symbol table into H; a+a -> rho or rho - 1 and
// a+^2 a^2 -> rho^2 or rho^2 - 4 rho + 2.
inline SymPoly hamiltonian_symbol(SymbolKind kind) {
  SymPoly h;
  const SymCoef eps{0, 1, 0}, mu{1, 0, 0}, uh{0, 0, 1};
  add_term(h, 0, 1, eps, 1);
  add_term(h, 0, 1, mu, -1);
  // -mu a+a, (u/2V) a+^2a^2, (2u/V) a+a N_ex = 4 (u/2V) a+a N_ex
  auto number = [&](SymCoef c, long f, int nex) {
    add_term(h, 1, nex, c, f);
    if (kind == SymbolKind::upper) add_term(h, 0, nex, c, -f);
  };
  number(mu, -1, 0);
  number(uh, 4, 1);
  add_term(h, 2, 0, uh, 1);
  if (kind == SymbolKind::upper) {
    add_term(h, 1, 0, uh, -4);
    add_term(h, 0, 0, uh, 2);
  }
  return h;
}

inline SymPoly symbol_difference(const SymPoly& a, const SymPoly& b) {
  SymPoly d = a;
  for (const auto& [k, c] : b) add_term(d, k.first, k.second, c, -1);
  return d;
}

// delta = mu + (u/2V)(2 - 4 N_L), N_L = rho + N_ex.
inline SymPoly expected_delta() {
  SymPoly d;
  add_term(d, 0, 0, {1, 0, 0}, 1);
  add_term(d, 0, 0, {0, 0, 1}, 2);
  add_term(d, 1, 0, {0, 0, 1}, -4);
  add_term(d, 0, 1, {0, 0, 1}, -4);
  return d;
}

inline double evaluate(const SymPoly& p, const ToySystem& s, double rho, double n_ex) {
  double v = 0.0;
  for (const auto& [k, c] : p)
    v += (static_cast<double>(c.mu_c) * s.mu + static_cast<double>(c.eps_c) * s.epsilon +
          static_cast<double>(c.uh_c) * s.u / (2.0 * s.V)) *
         std::pow(rho, k.first) *
         std::pow(n_ex, k.second);
  return v;
}

// <z| H |z> on the truncated Fock space at fixed spectator occupation.
inline double lower_symbol_energy_measured(const ToySystem& s, cplx z, int n_ex, const FockTruncation& t) {
  const auto c = coherent_vector(z, t);
  double e = 0.0;
  for (int n = 0; n <= t.nmax; ++n) {
    const double h = s.epsilon * n_ex - s.mu * (n + n_ex) + s.u / (2.0 * s.V) * n * (n - 1.0) +
                     2.0 * s.u / s.V * n * n_ex;
    e += std::norm(c.amplitudes[n]) * h;
  }
  return e;
}

namespace detail {

// log of prod_j 1 / (1 - e^{-beta e_j}) with equal spectator energies.
inline double spectator_log_factor(const ToySystem& s, double shifted_energy) {
  if (s.spectators == 0) return 0.0;
  return -s.spectators * std::log(-std::expm1(-s.beta * shifted_energy));
}

inline double log_integrand(const ToySystem& s, double rho, SymbolKind kind) {
  const double k = s.u / (2.0 * s.V);
  if (kind == SymbolKind::lower)
    return -s.beta * (k * rho * rho - s.mu * rho) + spectator_log_factor(s, s.epsilon - s.mu + 4.0 * k * rho);
  return -s.beta * (k * (rho * rho - 4.0 * rho + 2.0) - s.mu * (rho - 1.0)) +
         spectator_log_factor(s, s.epsilon - s.mu + 4.0 * k * (rho - 1.0));
}

inline double log_exact_term(const ToySystem& s, int n) {
  const double k = s.u / (2.0 * s.V);
  return -s.beta * (k * n * (n - 1.0) - s.mu * n) + spectator_log_factor(s, s.epsilon - s.mu + 4.0 * k * n);
}

}  // namespace detail

// Maximizer of the lower-symbol integrand in rho = |z|^2.
inline double lower_symbol_maximizer(const ToySystem& s) {
  validate(s);
  double lo = 0.0, hi = std::max(1.0, 4.0 * std::abs(s.mu) * s.V / s.u + 10.0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double r) { return detail::log_integrand(s, r, SymbolKind::lower); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// ln of int_0^inf drho exp(log_integrand).
inline double log_symbol_partition(const ToySystem& s, SymbolKind kind, const QuadratureSpec& q = {1e-13, 0.0, 12}) {
  validate(s);
  const double peak = lower_symbol_maximizer(s) + (kind == SymbolKind::upper ? 2.0 : 0.0);
  const double ref = detail::log_integrand(s, peak, kind);
  auto f = [&](double r) { return std::exp(detail::log_integrand(s, r, kind) - ref); };
  const double split = std::max(1.0, peak);
  auto res = tanh_sinh(f, 0.0, split, q) + exp_sinh(f, split, q);
  return ref + std::log(require(res, "log_symbol_partition"));
}

struct ExactPartition {
  double log_Z;
  double tail_bound;
};

// ln sum_{n0 <= nmax} exp(-beta E(n0)) with the spectators traced exactly.
inline ExactPartition log_exact_partition(const ToySystem& s, const FockTruncation& t) {
  validate(s);
  validate(t);
  double ref = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= t.nmax; ++n) ref = std::max(ref, detail::log_exact_term(s, n));
  double sum = 0.0;
  for (int n = 0; n <= t.nmax; ++n) sum += std::exp(detail::log_exact_term(s, n) - ref);
  // Successive ratios beyond nmax are at most exp(-beta (u nmax / V - mu)).
  const double log_r = -s.beta * (s.u * t.nmax / s.V - s.mu);
  double tail = std::numeric_limits<double>::infinity();
  if (log_r < 0.0) tail = std::exp(detail::log_exact_term(s, t.nmax) - ref + log_r) / -std::expm1(log_r) / sum;
  if (!(tail <= t.tail_tol)) {
    int need = t.nmax;
    for (; need < 1'000'000; need += 8) {
      const double lr = -s.beta * (s.u * need / s.V - s.mu);
      if (lr < 0.0 && std::exp(detail::log_exact_term(s, need) - ref + lr) / -std::expm1(lr) / sum <= t.tail_tol) break;
    }
    throw TruncationError("log_exact_partition: Fock tail above tolerance; need nmax >= " + std::to_string(need), need);
  }
  return {ref + std::log(sum), tail};
}

struct PartitionSandwich {
  double log_Z_L;
  double log_Z;
  double log_Z_U;
  bool pass;
};

inline PartitionSandwich partition_sandwich(const ToySystem& s, const FockTruncation& t,
                                            const QuadratureSpec& q = {1e-13, 0.0, 12}) {
  const double l = log_symbol_partition(s, SymbolKind::lower, q);
  const double u = log_symbol_partition(s, SymbolKind::upper, q);
  const auto z = log_exact_partition(s, t);
  return {l, z.log_Z, u, l <= z.log_Z && z.log_Z <= u};
}

struct LocalizationRow {
  double V;
  double log_Z_L;
  double log_Z_U;
  // ln Z_U(mu) - [-beta (mu + u/V) + ln Z_L(mu + 2u/V)]
  double shift_residual;
  double pressure_gap;
  double rho0_per_volume;
};

inline std::vector<LocalizationRow> pressure_localization_check(ToySystem s, const std::vector<double>& V_grid,
                                                                const QuadratureSpec& q = {1e-13, 0.0, 12}) {
  if (V_grid.empty()) throw ValidationError("pressure_localization_check: empty V grid");
  std::vector<LocalizationRow> rows;
  double prev = 0.0;
  for (double V : V_grid) {
    if (!(V > prev)) throw ValidationError("pressure_localization_check: V grid must ascend");
    prev = V;
    s.V = V;
    const double lzl = log_symbol_partition(s, SymbolKind::lower, q);
    const double lzu = log_symbol_partition(s, SymbolKind::upper, q);
    ToySystem shifted = s;
    shifted.mu = s.mu + 2.0 * s.u / V;
    const double rhs = -s.beta * (s.mu + s.u / V) + log_symbol_partition(shifted, SymbolKind::lower, q);
    rows.push_back({V, lzl, lzu, lzu - rhs, std::abs(lzu - lzl) / V, lower_symbol_maximizer(s) / V});
  }
  return rows;
}

}  // namespace hkbec
