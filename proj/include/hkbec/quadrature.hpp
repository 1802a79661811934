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

// Double-exponential quadrature (tanh-sinh on [a,b], exp-sinh on [a,inf))
// and Gauss-Laguerre rules.  Nodes are generated on the fly so every call
// owns its workspace.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hkbec/errors.hpp"

namespace hkbec {

struct QuadratureSpec {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_levels = 11;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

inline void validate(const QuadratureSpec& q) {
  if (!(q.rel_tol > 0.0) || q.abs_tol < 0.0 || q.max_levels < 1)
    throw ValidationError("quadrature spec: tolerances must be positive and max_levels >= 1");
}

inline double require(const QuadratureResult& r, const std::string& what) {
  if (!r.converged)
    throw ConvergenceError(what + ": quadrature did not converge (estimate " +
                           std::to_string(r.value) + ", error " + std::to_string(r.error) + ")");
  return r.value;
}

namespace detail {

// Drives the level refinement; node(tau, x, w) returns false when the
// abscissa has collapsed onto an endpoint or left the representable range.
template <class F, class Node>
QuadratureResult de_refine(F&& f, Node&& node, double tau_lo, double tau_hi,
                           const QuadratureSpec& q) {
  validate(q);
  QuadratureResult r;
  auto accumulate = [&](double tau, double& sum) {
    double x, w;
    if (!node(tau, x, w)) return;
    const double fx = f(x);
    ++r.evaluations;
    if (!std::isfinite(fx))
      throw ConvergenceError("quadrature: integrand not finite at x = " + std::to_string(x));
    sum += w * fx;
  };

  double sum = 0.0;
  for (double tau = 0.0; tau <= tau_hi; tau += 1.0) accumulate(tau, sum);
  for (double tau = -1.0; tau >= tau_lo; tau -= 1.0) accumulate(tau, sum);
  double h = 1.0;
  double prev = sum * h;
  for (int level = 1; level <= q.max_levels; ++level) {
    h *= 0.5;
    for (double tau = h; tau <= tau_hi; tau += 2.0 * h) accumulate(tau, sum);
    for (double tau = -h; tau >= tau_lo; tau -= 2.0 * h) accumulate(tau, sum);
    const double cur = sum * h;
    r.value = cur;
    r.error = std::abs(cur - prev);
    if (level >= 3 && r.error <= std::max(q.abs_tol, q.rel_tol * std::abs(cur))) {
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  return r;
}

}  // namespace detail

// Integrates f over the finite interval [a, b].  The integrand is never
// evaluated at the endpoints, and abscissae near an endpoint are formed from
// their distance to it so integrable endpoint singularities at 0 stay sharp.
template <class F>
QuadratureResult tanh_sinh(F&& f, double a, double b, const QuadratureSpec& q = {}) {
  if (!(a < b)) {
    if (a == b) return {0.0, 0.0, 0, true};
    QuadratureResult r = tanh_sinh(std::forward<F>(f), b, a, q);
    r.value = -r.value;
    return r;
  }
  const double half = 0.5 * (b - a);
  const double mid = a + half;
  auto node = [&](double tau, double& x, double& w) {
    const double s = 0.5 * std::numbers::pi * std::sinh(tau);
    const double e = std::exp(-2.0 * std::abs(s));
    const double delta = (b - a) * e / (1.0 + e);
    if (tau == 0.0) x = mid;
    else x = tau < 0.0 ? a + delta : b - delta;
    if (x <= a || x >= b || delta == 0.0) return false;
    w = half * 0.5 * std::numbers::pi * std::cosh(tau) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    return true;
  };
  return detail::de_refine(std::forward<F>(f), node, -5.3, 5.3, q);
}

// Integrates f over [a, inf).  f must decay at least like x^{-1-eps}.
template <class F>
QuadratureResult exp_sinh(F&& f, double a, const QuadratureSpec& q = {}) {
  auto node = [&](double tau, double& x, double& w) {
    const double s = 0.5 * std::numbers::pi * std::sinh(tau);
    const double e = std::exp(s);
    x = a + e;
    if (x <= a || !std::isfinite(x) || e == 0.0) return false;
    w = e * 0.5 * std::numbers::pi * std::cosh(tau);
    return std::isfinite(w);
  };
  return detail::de_refine(std::forward<F>(f), node, -6.0, 6.0, q);
}

inline QuadratureResult operator+(const QuadratureResult& l, const QuadratureResult& r) {
  return {l.value + r.value, l.error + r.error, l.evaluations + r.evaluations,
          l.converged && r.converged};
}

// [0, inf) split at `split`: tanh-sinh below, exp-sinh above.
template <class F>
QuadratureResult integrate_half_line(F&& f, const QuadratureSpec& q = {}, double split = 1.0) {
  return tanh_sinh(f, 0.0, split, q) + exp_sinh(f, split, q);
}

// Gauss-Laguerre rule for weight e^{-x} on [0, inf), exact for polynomials of
// degree <= 2n-1.  Weights are returned as logarithms.
struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

inline LaguerreRule gauss_laguerre(int n) {
  if (n < 1 || n > 400) throw ValidationError("gauss_laguerre: n must be in [1, 400]");
  LaguerreRule rule;
  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  auto eval = [n](double x, double& ln, double& lnm1) {
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0 - x) * p2 - (j - 1.0) * p3) / j;
    }
    ln = p1;
    lnm1 = p2;
  };
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) z = 3.0 / (1.0 + 2.4 * n);
    else if (i == 1) z += 15.0 / (1.0 + 2.5 * n);
    else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
    }
    double ln = 0.0, lnm1 = 0.0;
    double step = 0.0;
    for (int it = 0; it < 100; ++it) {
      eval(z, ln, lnm1);
      const double dp = n * (ln - lnm1) / z;
      const double z1 = z;
      z = z1 - ln / dp;
      step = std::abs(z - z1);
      if (step <= 4e-15 * std::max(1.0, z)) break;
    }
    if (!(step <= 1e-11 * std::max(1.0, z))) throw ConvergenceError("gauss_laguerre: Newton iteration failed");
    eval(z, ln, lnm1);
    const double dp = n * (ln - lnm1) / z;
    rule.nodes[i] = z;
    // w = 1 / (x L_n'(x)^2)
    rule.log_weights[i] = -std::log(z) - 2.0 * std::log(std::abs(dp));
  }
  return rule;
}

}  // namespace hkbec
