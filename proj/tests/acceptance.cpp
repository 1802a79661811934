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
// Acceptance runner: `hkbec_acceptance --criterion N` prints one PASS/FAIL
// line for criterion N (1..10); without arguments it runs all of them.
// Exit status is 0 only if every requested criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hkbec/hkbec.hpp"
#include "oracles.hpp"

using namespace hkbec;
namespace o = oracle;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

const double pi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  return g;
}

BoundConstants calibrated(const Spectrum& s, std::uint64_t sigma_max) {
  auto k = *eigenvalue_bounds_check(s, {}, sigma_max, BoundMode::calibrate).calibrated;
  k.C_tilde = 1.0;
  k.A_ratio = std::pow(s.diameter(), s.dimension()) / s.volume();
  return k;
}

Spectrum with_cutoff_for(const std::vector<double>& L, double cutoff, const std::function<void(const Spectrum&)>& probe) {
  for (int attempt = 0; attempt < 6; ++attempt) {
    auto s = build_box(L, cutoff);
    try {
      probe(s);
      return s;
    } catch (const CutoffError& e) {
      cutoff = std::max(1.25 * cutoff, e.required_cutoff() * 1.01);
    }
  }
  throw ConvergenceError("could not reach the requested tail bound");
}

// 1. Lee-Yang coefficient from the numeric integral.
Outcome lee_yang() {
  const double want = 128.0 / (15.0 * std::sqrt(pi));
  const auto r = lee_yang_flat(1.0, 0.01, 0.5, 1.0, LeeYangMethod::numeric_integral);
  const double b = sf::beta_function(1.5, 2.0);
  const bool ok = std::abs(r.coefficient - want) <= 1e-6 && std::abs(b - 4.0 / 15.0) <= 1e-12;
  return {ok, "coefficient=" + fmt(r.coefficient) + " target=" + fmt(want) + " B(3/2,2)=" + fmt(b)};
}

// 2. gamma_3 against the stated closed value, with the momentum-integral oracle.
Outcome gamma_three() {
  const double stated = 8.0 * std::sqrt(2.0) / (3.0 * std::sqrt(pi));
  const double lib = require(gamma_d(3), "gamma_d");
  // n_flat = a^{3/2} gamma_3 / (2 (4 pi)^{3/2})
  const double oracle = o::flat_depletion_3d(1.0) * 2.0 * std::pow(4.0 * pi, 1.5);
  const bool ok = std::abs(lib - stated) <= 1e-6 && std::abs(oracle - stated) <= 1e-6;
  return {ok, "gamma_3=" + fmt(lib) + " momentum_oracle=" + fmt(oracle) + " stated=" + fmt(stated) +
                  " ratio=" + fmt(stated / lib)};
}

// 3. Three E_g representations on the L = 20 cube.
Outcome energy_representations() {
  const InteractionParams ip{1.0, 1.0};
  // Cutoff raised until the Weyl tail is below 2% of the fluctuation energy.
  const auto s = with_cutoff_for({20.0, 20.0, 20.0}, 60.0,
                                 [&](const Spectrum& sp) { ground_energy(sp, ip, EnergyRep::renorm_sum, SeriesSpec{0.02}); });
  const auto c = ground_energy_all(s, ip, SeriesSpec{0.02});
  const double f0 = c.renorm_sum.fluctuation;
  const double fdev = std::max({o::rel_diff(c.subtracted_i1.fluctuation, f0), o::rel_diff(c.fxt_double.fluctuation, f0),
                                o::rel_diff(c.fxt_double.fluctuation, c.subtracted_i1.fluctuation)});
  return {c.max_rel_deviation <= 1e-6 && fdev <= 1e-6,
          "fluctuation_rel_dev=" + fmt(fdev) + " cutoff=" + fmt(s.cutoff()) + " E_renorm=" + fmt(c.renorm_sum.total) + " E_I1=" + fmt(c.subtracted_i1.total) +
              " E_Fxt=" + fmt(c.fxt_double.total) + " max_rel_dev=" + fmt(c.max_rel_deviation)};
}

// 4. Depletion dual forms and the finite-T coth form.
Outcome depletion_forms() {
  const SeriesSpec loose{1.0};
  double worst = 0.0;
  for (const auto& s : {build_box({10.0, 10.0, 10.0}, 400.0), build_box({20.0, 20.0, 20.0}, 300.0),
                        build_sphere(3, 5.0, 400.0)})
    for (double a : {0.3, 1.0, 3.0}) {
      const double ms = depletion_zero_T(s, {a, 1.0}, DepletionForm::mode_sum, loose).value;
      const double hk = depletion_zero_T(s, {a, 1.0}, DepletionForm::heat_kernel, loose).value;
      worst = std::max(worst, o::rel_diff(hk, ms));
    }
  const auto one = Spectrum(3, 1.0, 1.0, 1e4, Backend::file, {{0.0, 1}, {1.0, 1}});
  double worst_t = 0.0;
  for (double a : {0.5, 1.0, 2.0})
    for (double beta : {0.2, 1.0, 5.0}) {
      const auto m = bogoliubov_mode(1.0, a);
      const double coth = 0.5 * (m.lambda / m.omega / std::tanh(0.5 * beta * m.omega) - 1.0);
      const double ks = depletion_finite_T(one, {a, 1.0}, beta, ThermalForm::k_sum, loose).total;
      worst_t = std::max(worst_t, std::abs(ks - coth));
    }
  return {worst <= 1e-8 && worst_t <= 1e-8,
          "zero_T max_rel_diff=" + fmt(worst) + " finite_T max_abs_diff=" + fmt(worst_t)};
}

// 5. Ideal-gas crossing temperature on cubes against the flat value.
Outcome flat_convergence() {
  const double n = 1.0, fraction = 0.05;
  const double tc = flat_critical_temperature(3, n);
  const double matched = std::pow(1.0 - fraction, 2.0 / 3.0) * tc;
  std::vector<double> err;
  std::string detail;
  for (double L : {20.0, 40.0, 80.0}) {
    double beta = 0.0;
    with_cutoff_for({L, L, L}, 300.0, [&](const Spectrum& s) { beta = condensation_crossing(s, n, fraction, SeriesSpec{1e-8}, 1e-9); });
    err.push_back(std::abs(1.0 / beta - matched) / matched);
    detail += "L=" + fmt(L) + " T=" + fmt(1.0 / beta) + " err=" + fmt(err.back()) + "; ";
  }
  const bool monotone = err[1] < err[0] && err[2] < err[1];
  return {monotone && err[2] <= 0.02,
          detail + "flat_Tc=" + fmt(tc) + " flat_T(n0/n=0.05)=" + fmt(matched) + " monotone=" + (monotone ? "yes" : "no")};
}

// 6. Bound suites on documented sweep grids.
Outcome bound_suites() {
  std::vector<std::pair<std::string, std::size_t>> tally;
  auto count = [&](const std::string& name, std::size_t v) { tally.emplace_back(name, v); };
  const SeriesSpec loose{1.0};

  {  // Li-Yau lower trace bound on every backend
    std::size_t v = 0;
    for (const auto& s : {build_box({2.0, 3.0, 4.0}, 3000.0), build_torus({3.0, 3.0, 3.0}, 3000.0),
                          build_sphere(2, 1.0, 3000.0), build_box({5.0}, 3000.0)}) {
      BoundConstants k;
      k.C_tilde = 1e30;
      v += trace_bounds_check(s, k, log_grid(0.02, s.diameter() * s.diameter(), 25), BoundMode::verify).violations();
    }
    count("li_yau_lower", v);
  }
  {  // long-time decay
    std::size_t v = 0;
    for (const auto& s : {build_box({2.0, 3.0, 4.0}, 300.0), build_torus({3.0, 4.0}, 300.0), build_sphere(3, 1.5, 300.0)})
      v += long_time_decay_check(s, 0.1, log_grid(0.1, 50.0, 20)).violations();
    count("long_time_decay", v);
  }
  {  // trace sandwich with calibrated B, C
    const auto s = build_box({20.0, 20.0, 20.0}, 40.0);
    const auto k = calibrated(s, s.mode_count() - 1);
    count("trace_sandwich", trace_sandwich_check(s, k, {1.0, 2.0, 5.0, 10.0}, SeriesSpec{1e-8}).violations());
  }
  {  // eigenvalue bounds: calibrated on one box, verified on its rescalings
    std::size_t v = 0;
    const auto base = build_box({2.0, 3.0, 4.0}, 60.0);
    const std::uint64_t sig = 150;
    auto k = *eigenvalue_bounds_check(base, {}, sig, BoundMode::calibrate).calibrated;
    for (double f : {0.5, 1.0, 3.0}) {
      const auto s = build_box({2.0 * f, 3.0 * f, 4.0 * f}, 60.0 / (f * f));
      v += eigenvalue_bounds_check(s, k, sig, BoundMode::verify).violations();
    }
    count("eigenvalue_calibrated", v);
  }
  {  // finite-volume excited-density bound
    std::size_t v = 0;
    const auto s = build_box({5.0, 6.0, 7.0}, 200.0);
    for (double b0 : {0.1, 0.3, 1.0})
      for (double b : {1.0, 2.0, 5.0})
        for (double mu : {-1.0, -1e-2, -1e-6})
          if (b >= b0 && excited_density(s, b, mu, DensityForm::direct) > finite_volume_bound(s, b0, b)) ++v;
    count("finite_volume_ne", v);
  }
  {  // thermodynamic ideal-gas sandwich
    std::size_t v = 0;
    const auto s = build_box({20.0, 20.0, 20.0}, 60.0);
    const auto k = calibrated(s, s.mode_count() - 1);
    for (double beta : {0.5, 1.0, 3.0}) {
      const double ne = excited_density(s, beta, -1e-12, DensityForm::direct, SeriesSpec{1e-6});
      const auto sw = excited_density_sandwich(k, 3, s.volume(), s.diameter(), beta);
      if (!(sw.lower <= ne && ne <= sw.upper)) ++v;
    }
    count("ideal_gas_sandwich", v);
  }
  {  // depletion sandwich
    std::size_t v = 0;
    const auto s = build_box({10.0, 10.0, 10.0}, 400.0);
    const auto k = calibrated(s, s.mode_count() - 1);
    for (double a : {0.1, 0.5, 1.0, 2.0}) {
      const auto r = depletion_zero_T(s, {a, 1.0}, DepletionForm::mode_sum, loose, {}, k);
      if (!(r.bounds->lower <= r.value && r.value + r.tail_bound <= r.bounds->upper)) ++v;
    }
    count("depletion_sandwich", v);
  }
  {  // finite-temperature depletion bound
    std::size_t v = 0;
    const auto s = build_box({40.0, 40.0, 40.0}, 500.0);
    const auto k = calibrated(s, 200000);
    for (double a : {0.1, 1.0, 4.0})
      for (double beta : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0})
        if (depletion_finite_T(s, {a, 1.0}, beta, ThermalForm::bose_factor, loose).thermal_part >
            finite_T_upper_bound(a, beta, k))
          ++v;
    count("finite_T_depletion", v);
  }
  {  // E_g upper bound with C_tilde from the exact product trace
    std::size_t v = 0;
    for (double L : {10.0, 20.0, 40.0}) {
      const std::vector<double> sides{L, L, L};
      const auto s = build_box(sides, 4000.0 / L);
      const double D = s.diameter();
      double Ct = 0.0;
      for (double t = 1e-4 * D * D; t < 50.0 * D * D; t *= 1.05)
        Ct = std::max(Ct, (o::box_trace_dual(sides, t) - 1.0) * std::pow(std::sqrt(t) / D, 3));
      for (double a : {0.5, 1.0, 2.0}) {
        const InteractionParams ip{a, 1.0};
        const auto eg = ground_energy(s, ip, EnergyRep::renorm_sum, loose);
        const auto ub = energy_upper_bound(s, ip, Ct);
        if (!ub.valid || eg.total + eg.tail_bound > ub.value) ++v;
      }
    }
    count("energy_upper", v);
  }
  std::size_t total = 0;
  std::string detail;
  for (const auto& [name, v] : tally) {
    total += v;
    detail += name + "=" + std::to_string(v) + " ";
  }
  return {total == 0, "violations: " + detail};
}

// 7. Identity suites.
Outcome identities() {
  double sub = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      sub = std::max(sub, subordination_identity_check(0.1 * std::pow(100.0, i / 4.0), 0.1 * std::pow(100.0, j / 4.0)).abs_error);
  const double p1 = prudnikov_identity(0.5, 0.75, 1.0).abs_error;
  const double p2 = prudnikov_identity(0.25, 0.75, 1.0).abs_error;
  double k32 = 0.0;
  for (double x : log_grid(0.1, 20.0, 40)) {
    const double cf = sf::scaled_bessel_k_three_halves_closed_form(x);
    k32 = std::max(k32, std::abs(cf - o::bessel_k(1.5, x) * std::exp(x)) / cf);
    k32 = std::max(k32, std::abs(cf - sf::detail::scaled_bessel_k_trapezoid(1.5, x)) / cf);
  }
  double th = 0.0;
  for (double sc : {0.05, 0.3, 1.0, 4.0})
    for (double dr : {0.0, 0.4, 2.0, 7.0}) {
      double direct = 0.0;
      for (int k = -400; k <= 400; ++k) direct += std::exp(-sc * k * k + dr * k);
      th = std::max(th, o::rel_diff(sf::theta3_sum(sc, dr), direct));
    }
  const bool ok = sub <= 1e-10 && p1 <= 1e-8 && p2 <= 1e-8 && k32 <= 1e-10 && th <= 1e-12;
  return {ok, "subordination=" + fmt(sub) + " prudnikov(1/2,3/4,1)=" + fmt(p1) + " prudnikov(1/4,3/4,1)=" + fmt(p2) +
                  " K_3/2=" + fmt(k32) + " theta3=" + fmt(th)};
}

// 8. Short-time expansion.
Outcome short_time() {
  const std::vector<double> L = {1.0, 1.0, 1.0};
  const auto g = GeometryInfo::box(L);
  const double want = (L[0] + L[1] + L[2]) / (4.0 * std::sqrt(4.0 * pi));
  double err = 0.0;
  std::string detail;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const auto e = short_time_expansion(g, t);
    err = std::abs((o::box_trace_dual(L, t) - e.leading - e.area_term) * std::sqrt(t) / want - 1.0);
    detail += "t=" + fmt(t) + " rel_err=" + fmt(err) + "; ";
  }
  const double ball = short_time_expansion(GeometryInfo::ball(1.0), 1.0).curvature_term;
  const double ball_want = 1.0 / (3.0 * std::sqrt(pi));
  const bool ok = err <= 0.01 && std::abs(ball - ball_want) <= 1e-14;
  return {ok, detail + "ball_curvature=" + fmt(ball) + " want=" + fmt(ball_want)};
}

// 9. Two-dimensional probes.
Outcome probes_2d() {
  const double beta = 2.0;
  std::vector<double> mus;
  for (double e = -2; e >= -9; --e) mus.push_back(-std::pow(10.0, e));
  const auto ig = d2_condensation_probe(beta, mus);
  const double ig_rel = std::abs(ig.slope * 4.0 * pi * beta - 1.0);
  const auto rel = rel_2d_divergence_probe(1.0, 1.0, {0.9, 0.99, 0.999, 0.9999, 0.99999}, 1e8);
  const auto kp = finite_T_bessel_probe(1.0, 1.0, {10.0, 100.0, 1000.0, 10000.0}, 0.0);
  const double s1 = kp.slopes[kp.slopes.size() - 2], s2 = kp.slopes.back();
  const double kp_rel = std::abs(s2 - s1) / std::abs(s1);
  const bool ok = ig_rel <= 0.05 && rel.slope >= 0.45 && rel.slope <= 0.55 && kp_rel <= 0.05;
  return {ok, "ideal_slope*4pi*beta=" + fmt(ig.slope * 4.0 * pi * beta) + " relativistic_slope=" + fmt(rel.slope) +
                  " K0I1_slopes=" + fmt(s1) + "," + fmt(s2) + " (asymptote " + fmt(kp.asymptotic_slope) + ")"};
}

// 10. Coherent-state partition-function sandwich.
Outcome berezin_lieb() {
  const FockTruncation wide{60, 1e-12};
  int bad = 0, cells = 0;
  for (double beta : {0.5, 1.0, 2.0})
    for (double mu : {-0.5, 0.0, 0.25}) {
      ++cells;
      if (!partition_sandwich(ToySystem{1.0, 0.5, mu, 10.0, beta, 1}, wide).pass) ++bad;
    }
  bool table = true;
  const auto n = symbol_pair(Monomial::number, 2.0, wide);
  table = table && n.lower_table == cplx(4.0) && n.upper_table == cplx(3.0);
  const auto p = symbol_pair(Monomial::pair_number, 1.0, wide);
  table = table && p.lower_table == cplx(1.0) && p.upper_table == cplx(-1.0);
  const auto a = symbol_pair(Monomial::a, 1.0, wide);
  table = table && a.lower_table == cplx(1.0) && a.upper_table == cplx(1.0);
  const auto id = symbol_pair(Monomial::identity, 1.0, wide);
  table = table && id.lower_table == cplx(1.0) && id.upper_table == cplx(1.0);
  const bool delta = symbol_difference(hamiltonian_symbol(SymbolKind::upper), hamiltonian_symbol(SymbolKind::lower)) ==
                     expected_delta();
  const auto rows = pressure_localization_check(ToySystem{1.0, 0.5, 0.25, 10.0, 1.0, 1}, {5.0, 10.0, 20.0, 40.0});
  double shift = 0.0;
  bool decreasing = true;
  std::string gaps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    shift = std::max(shift, std::abs(rows[i].shift_residual));
    if (i > 0 && !(rows[i].pressure_gap < rows[i - 1].pressure_gap)) decreasing = false;
    gaps += fmt(rows[i].pressure_gap) + (i + 1 < rows.size() ? "," : "");
  }
  const bool ok = bad == 0 && table && delta && shift <= 1e-8 && decreasing;
  return {ok, "sandwich " + std::to_string(cells - bad) + "/" + std::to_string(cells) + " table=" + (table ? "ok" : "mismatch") +
                  " delta=" + (delta ? "exact" : "mismatch") + " shift_residual=" + fmt(shift) + " gaps=" + gaps};
}

struct Criterion {
  std::function<Outcome()> run;
  double max_seconds;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {{lee_yang, 1.0},          {gamma_three, 1.0},      {energy_representations, 30.0},
                                      {depletion_forms, 60.0},  {flat_convergence, 300.0}, {bound_suites, 0.0},
                                      {identities, 0.0},        {short_time, 0.0},       {probes_2d, 0.0},
                                      {berezin_lieb, 0.0}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (n < 1 || n > static_cast<int>(all.size())) {
        std::cerr << "criterion must be 1.." << all.size() << "\n";
        return 2;
      }
      which.push_back(n);
    } else {
      std::cerr << "usage: hkbec_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (which.empty())
    for (int n = 1; n <= static_cast<int>(all.size()); ++n) which.push_back(n);

  bool every = true;
  for (int n : which) {
    const auto& c = all[static_cast<std::size_t>(n - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.max_seconds > 0.0 && secs > c.max_seconds) {
      r.pass = false;
      r.detail += " runtime over " + fmt(c.max_seconds) + " s";
    }
    std::cout << "criterion " << n << ": " << (r.pass ? "PASS" : "FAIL") << " (" << fmt(secs) << " s) " << r.detail
              << std::endl;
    every = every && r.pass;
  }
  return every ? 0 : 1;
}
