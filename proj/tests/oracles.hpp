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

// Reference values computed independently of the library: Boost special
// functions and quadrature, brute-force lattice scans, closed forms.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/math/tools/minima.hpp>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

template <class F>
double integrate(F f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts(15);
  return ts.integrate(f, a, b, std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-3);
}

// Adaptive Gauss-Kronrod for smooth integrands on a finite interval.
template <class F>
double integrate_smooth(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 30, 1e-14);
}

template <class F>
double integrate_to_inf(F f, double a) {
  boost::math::quadrature::exp_sinh<double> es(15);
  return es.integrate([&](double x) { return f(a + x); }, 0.0, std::numeric_limits<double>::infinity(),
                      std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-3);
}

// [0, inf) split at 1 so both rules see a one-sided singularity at most.
template <class F>
double integrate_half_line(F f) {
  return integrate(f, 0.0, 1.0) + integrate_to_inf(f, 1.0);
}

inline double tgamma_upper(double a, double x) { return boost::math::tgamma(a, x); }
inline double tgamma_lower(double a, double x) { return boost::math::tgamma_lower(a, x); }
// P(N > k) for N ~ Poisson(lambda).
inline double poisson_tail(int k, double lambda) { return boost::math::gamma_p(k + 1.0, lambda); }
inline double e1(double x) { return boost::math::expint(1, x); }
inline double zeta(double s) { return boost::math::zeta(s); }
inline double beta(double a, double b) { return boost::math::beta(a, b); }
inline double bessel_i(double nu, double x) { return boost::math::cyl_bessel_i(nu, x); }
inline double bessel_k(double nu, double x) { return boost::math::cyl_bessel_k(nu, x); }

// e^{-x} I_1(x) with the power series near 0 to avoid Boost's 0 * inf at huge x.
inline double scaled_i1(double x) {
  if (x < 600.0) return std::exp(-x) * bessel_i(1.0, x);
  return (1.0 - 3.0 / (8.0 * x) - 15.0 / (128.0 * x * x) - 105.0 / (1024.0 * x * x * x)) / std::sqrt(2.0 * pi * x);
}

// All box eigenvalues (n1 pi/L1)^2 + ... <= cutoff, n_i >= 0, with repetition.
inline std::vector<double> box_eigenvalues(const std::vector<double>& L, double cutoff) {
  std::vector<double> out;
  std::vector<long> n(L.size(), 0);
  const std::size_t d = L.size();
  for (;;) {
    double e = 0.0;
    for (std::size_t i = 0; i < d; ++i) e += std::pow(static_cast<double>(n[i]) * pi / L[i], 2);
    if (e <= cutoff * (1.0 + 1e-14)) out.push_back(e);
    std::size_t i = 0;
    for (; i < d; ++i) {
      ++n[i];
      if (std::pow(static_cast<double>(n[i]) * pi / L[i], 2) <= cutoff * (1.0 + 1e-14)) break;
      n[i] = 0;
    }
    if (i == d) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Torus: n_i in Z, eigenvalue (2 pi n / L)^2.
inline std::vector<double> torus_eigenvalues(const std::vector<double>& L, double cutoff) {
  std::vector<double> out;
  const std::size_t d = L.size();
  std::vector<long> lim(d), n(d);
  for (std::size_t i = 0; i < d; ++i) {
    lim[i] = static_cast<long>(std::floor(std::sqrt(cutoff) * L[i] / (2.0 * pi))) + 1;
    n[i] = -lim[i];
  }
  for (;;) {
    double e = 0.0;
    for (std::size_t i = 0; i < d; ++i) e += std::pow(2.0 * pi * static_cast<double>(n[i]) / L[i], 2);
    if (e <= cutoff * (1.0 + 1e-14)) out.push_back(e);
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++n[i] <= lim[i]) break;
      n[i] = -lim[i];
    }
    if (i == d) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Dimension of degree-l harmonic polynomials in d+1 variables.
inline std::uint64_t sphere_multiplicity(int d, int l) {
  auto monomials = [d](int deg) -> std::uint64_t {
    if (deg < 0) return 0;
    // C(deg + d, d)
    double c = 1.0;
    for (int j = 1; j <= d; ++j) c = c * (deg + j) / j;
    return static_cast<std::uint64_t>(std::llround(c));
  };
  return monomials(l) - monomials(l - 2);
}

// Neumann interval trace sum_{n >= 0} e^{-(n pi / L)^2 t} in its Poisson-dual
// form (1/2)(1 + L/sqrt(pi t) sum_{k in Z} e^{-k^2 L^2 / t}).
inline double interval_trace_dual(double L, double t) {
  double s = 1.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = 2.0 * std::exp(-k * k * L * L / t);
    s += term;
    if (term < 1e-18 * s) break;
  }
  return 0.5 * (1.0 + L / std::sqrt(pi * t) * s);
}

inline double box_trace_dual(const std::vector<double>& L, double t) {
  double p = 1.0;
  for (double l : L) p *= interval_trace_dual(l, t);
  return p;
}

// Zero-temperature depletion of the full Neumann box spectrum,
// (a / 2V) int_0^inf (Tr e^{-th} - 1) e^{-at} I_1(at) dt with the exact product trace.
inline double box_depletion(const std::vector<double>& L, double a) {
  double V = 1.0;
  for (double l : L) V *= l;
  auto primed = [&](double t) {
    double lmax = 0.0;
    for (double l : L) lmax = std::max(lmax, l);
    if (t < lmax * lmax) return box_trace_dual(L, t) - 1.0;
    // Direct mode sums; prod (1 + delta_i) - 1 without cancellation.
    double log_sum = 0.0;
    for (double l : L) {
      double delta = 0.0;
      for (int n = 1; n < 100000; ++n) {
        const double term = std::exp(-(n * pi / l) * (n * pi / l) * t);
        delta += term;
        if (term < 1e-18 * delta) break;
      }
      log_sum += std::log1p(delta);
    }
    return std::expm1(log_sum);
  };
  auto f = [&](double t) {
    if (t < 1e-100) return 0.0;
    return primed(t) * scaled_i1(a * t);
  };
  return 0.5 * a / V * integrate_half_line(f);
}

// (1/4 pi^2) int_0^inf k^2 (lambda/omega - 1) dk with eps = k^2.
inline double flat_depletion_3d(double a) {
  auto f = [a](double k) {
    if (k == 0.0) return 0.0;
    const double e = k * k;
    const double w = k * std::sqrt(e + 2.0 * a);
    // lambda/omega - 1 = (lambda - omega)/omega = a^2 / (omega (lambda + omega))
    return e * a * a / (w * (e + a + w));
  };
  return integrate_half_line(f) / (4.0 * pi * pi);
}

// Flat-space fluctuation energy density (1/(2 pi)^3) int d^3k (omega - lambda + a^2/(2 eps)) / 2.
inline double flat_fluctuation_energy_3d(double a) {
  auto f = [a](double k) {
    if (k == 0.0) return 0.0;
    const double e = k * k;
    const double w = k * std::sqrt(e + 2.0 * a);
    const double lam = e + a;
    // k^2 (a^2/(2 eps) - a^2/(lambda + omega)); lambda + omega - 2 eps = a + 2 a k / (sqrt(eps + 2a) + k)
    return a * a * (a + 2.0 * a * k / (std::sqrt(e + 2.0 * a) + k)) / (2.0 * (lam + w));
  };
  return 0.5 * integrate_half_line(f) / (2.0 * pi * pi);
}

// int_0^inf x^{rho-1} K_mu(x) I_nu(x) dx: Boost Bessel functions up to X, then
// the large-x expansion 2x I_nu K_mu = sum_j c_j x^{-j} integrated term by term.
inline double bessel_ki_moment(double rho, double mu, double nu) {
  const double X = 600.0;
  auto f = [=](double x) {
    if (x < 1e-150) return 0.0;
    return std::pow(x, rho - 1.0) * bessel_k(mu, x) * bessel_i(nu, x);
  };
  double head = 0.0;
  for (double lo = 0.0, hi = 1.0; lo < X; lo = hi, hi = std::min(X, 4.0 * hi)) head += integrate(f, lo, hi);
  const int n = 8;
  std::vector<double> ai(n, 1.0), bk(n, 1.0);
  for (int k = 1; k < n; ++k) {
    const double o2 = (2.0 * k - 1.0) * (2.0 * k - 1.0);
    ai[k] = -ai[k - 1] * (4.0 * nu * nu - o2) / (8.0 * k);
    bk[k] = bk[k - 1] * (4.0 * mu * mu - o2) / (8.0 * k);
  }
  double tail = 0.0;
  for (int j = 0; j < n; ++j) {
    double c = 0.0;
    for (int k = 0; k <= j; ++k) c += ai[k] * bk[j - k];
    tail += 0.5 * c * std::pow(X, rho - 1.0 - j) / (1.0 + j - rho);
  }
  return head + tail;
}

// Minimum of f on [lo, hi]: dense log-spaced scan refined by Brent in ln x,
// done separately on each piece between the given breakpoints (where f may
// have a kink), with the breakpoints themselves evaluated exactly.
template <class F>
double minimize(F f, double lo, double hi, const std::vector<double>& breaks = {}) {
  std::vector<double> knots = {lo};
  for (double b : breaks)
    if (b > lo && b < hi) knots.push_back(b);
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    const double a = std::log(knots[p]), b = std::log(knots[p + 1]);
    auto g = [&](double u) { return f(std::exp(u)); };
    const int n = 2000;
    double ub = a, gb = g(a);
    for (int i = 1; i <= n; ++i) {
      const double u = a + (b - a) * i / n;
      const double v = g(u);
      if (v < gb) {
        gb = v;
        ub = u;
      }
    }
    const double step = (b - a) / n;
    const auto r = boost::math::tools::brent_find_minima(g, std::max(a, ub - step), std::min(b, ub + step), 52);
    best = std::min({best, gb, r.second, f(knots[p]), f(knots[p + 1])});
  }
  return best;
}

// Dense Fock-space matrix of a^{dag p} a^q on states 0..n-1.
inline std::vector<double> fock_matrix(int p, int q, int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int col = 0; col < n; ++col) {
    if (col < q) continue;
    double amp = 1.0;
    for (int j = 0; j < q; ++j) amp *= std::sqrt(static_cast<double>(col - j));
    const int mid = col - q;
    for (int j = 1; j <= p; ++j) amp *= std::sqrt(static_cast<double>(mid + j));
    const int row = mid + p;
    if (row < n) m[static_cast<std::size_t>(row) * n + col] = amp;
  }
  return m;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
