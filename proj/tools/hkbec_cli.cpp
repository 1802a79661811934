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
// hkbec command-line front end.
//
// Exit status: 0 ok, 1 invalid input, 2 numerical tolerance not met,
// 3 bound violation or verify without calibrated constants.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hkbec/hkbec.hpp"

namespace {

using namespace hkbec;

constexpr int kOk = 0, kInvalid = 1, kNumerical = 2, kViolation = 3;

// Raised when a check fails or constants are missing; maps to exit 3.
class CheckFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

const char* const kCalibrationHint =
    "hint: run 'hkbec bounds check --mode calibrate --spectrum FILE --constants-out k.cfg' "
    "and pass '--config k.cfg' (or --C-tilde/--C/--B/--A-ratio)";

// "a:b:n" linear, "a:b:n:log" log-spaced, or "x1,x2,...".
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
  auto num = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ValidationError(what + ": cannot parse '" + s + "'");
    }
    if (pos != s.size()) throw ValidationError(what + ": cannot parse '" + s + "'");
    return v;
  };
  std::vector<double> out;
  if (sep == ',') {
    for (const auto& p : parts) out.push_back(num(p));
    if (out.empty()) throw ValidationError(what + ": empty grid");
    return out;
  }
  if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log"))
    throw ValidationError(what + ": expected a:b:n or a:b:n:log");
  const double a = num(parts[0]), b = num(parts[1]);
  const double nd = num(parts[2]);
  if (!(nd >= 1.0) || nd != std::floor(nd)) throw ValidationError(what + ": step count must be a positive integer");
  const auto n = static_cast<int>(nd);
  const bool log = parts.size() == 4;
  if (log && !(a > 0.0 && b > 0.0)) throw ValidationError(what + ": log grid needs positive ends");
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
  }
  return out;
}

struct Globals {
  std::string config_path;
  std::map<std::string, std::string> flag_values;
  RunConfig cfg;
};

struct SpectrumArgs {
  std::string file;
  std::string backend = "box";
  std::vector<double> lengths;
  double radius = 0.0;
  int dim = 3;
  double cutoff = 0.0;
};

void add_spectrum_options(CLI::App* sub, SpectrumArgs& a) {
  sub->add_option("--spectrum", a.file, "Spectrum file (overrides the backend options)");
  sub->add_option("--backend", a.backend, "box | torus | sphere")->check(CLI::IsMember({"box", "torus", "sphere"}));
  sub->add_option("--lengths", a.lengths, "Side lengths (box, torus)")->delimiter(',');
  sub->add_option("--radius", a.radius, "Radius (sphere)");
  sub->add_option("--dim", a.dim, "Dimension (sphere)");
  sub->add_option("--cutoff", a.cutoff, "Eigenvalue cutoff");
}

Spectrum make_spectrum(const SpectrumArgs& a) {
  if (!a.file.empty()) return load_spectrum(a.file);
  if (!(a.cutoff > 0.0)) throw ValidationError("--cutoff must be > 0 (or give --spectrum)");
  if (a.backend == "sphere") {
    if (!(a.radius > 0.0)) throw ValidationError("--radius must be > 0 for the sphere backend");
    return build_sphere(a.dim, a.radius, a.cutoff);
  }
  if (a.lengths.empty()) throw ValidationError("--lengths is required for the " + a.backend + " backend");
  return a.backend == "box" ? build_box(a.lengths, a.cutoff) : build_torus(a.lengths, a.cutoff);
}

SeriesSpec series(const RunConfig& c) { return SeriesSpec{c.tol.series}; }
QuadratureSpec quad(const RunConfig& c) { return QuadratureSpec{c.tol.quadrature, 0.0, 12}; }

const BoundConstants& need_constants(const RunConfig& c) {
  if (!c.constants_calibrated()) throw CheckFailure("bound constants are not calibrated");
  return c.constants;
}

void emit(const ResultTable& t, const RunConfig& c) {
  if (c.output.empty()) {
    if (t.empty()) throw ValidationError("refusing to write an empty result table");
    write_table(std::cout, t, c.format);
  } else {
    export_table(t, c.format, c.output);
  }
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

InteractionParams to_natural(InteractionParams ip, const RunConfig& c) {
  ip.u0 = c.units.coupling_to_natural(ip.u0);
  return ip;
}

// ---------------------------------------------------------------- spectrum

void spectrum_verbs(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("spectrum", "Build and inspect spectra")->require_subcommand(1);
  auto* gen = top->add_subcommand("gen", "Write a spectrum file");
  static SpectrumArgs a;
  add_spectrum_options(gen, a);
  gen->callback([&] {
    action = [&] {
      const auto s = make_spectrum(a);
      if (g.cfg.output.empty()) {
        write_spectrum(std::cout, s);
        return;
      }
      std::ofstream out(g.cfg.output);
      if (!out) throw ResourceError("cannot open '" + g.cfg.output + "' for writing");
      write_spectrum(out, s);
      if (!out) throw ResourceError("write to '" + g.cfg.output + "' failed");
    };
  });
  auto* stats = top->add_subcommand("stats", "Volume, diameter, gap and Weyl-law comparison");
  static SpectrumArgs b;
  static int points = 16;
  add_spectrum_options(stats, b);
  stats->add_option("--points", points, "Weyl grid points");
  stats->callback([&] {
    action = [&] {
      const auto s = make_spectrum(b);
      const auto st = spectrum_stats(s, points);
      std::cerr << "V=" << format_double(st.volume) << " D=" << format_double(st.diameter)
                << " gap=" << format_double(st.gap) << " modes=" << st.modes << "\n";
      ResultTable t{{"energy", "count", "weyl", "ratio"}, {}};
      for (const auto& r : st.weyl) t.add_row({r.energy, r.count, r.weyl, r.ratio});
      emit(t, g.cfg);
    };
  });
}

// -------------------------------------------------------------- heat-trace

void heat_trace_verb(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* sub = app.add_subcommand("heat-trace", "Heat-kernel trace with tail bounds");
  static SpectrumArgs a;
  static std::string grid = "0.01:10:20:log";
  static bool full = false;
  add_spectrum_options(sub, a);
  sub->add_option("--t", grid, "t grid (a:b:n[:log] or list)");
  sub->add_flag("--full", full, "Include the ground state");
  sub->callback([&] {
    action = [&] {
      const auto s = make_spectrum(a);
      const auto ts = parse_grid(grid, "--t");
      const auto vals = heat_trace_grid(s, ts, !full, series(g.cfg), worker_count());
      const bool geom = s.geometry().has_value() && s.dimension() == 3;
      ResultTable t{{"t", "trace", "tail_bound"}, {}};
      if (geom) t.columns.push_back("short_time");
      for (std::size_t i = 0; i < ts.size(); ++i) {
        std::vector<Cell> row{ts[i], vals[i].value, vals[i].tail_bound};
        if (geom) row.push_back(short_time_expansion(*s.geometry(), ts[i]).sum);
        t.add_row(std::move(row));
      }
      emit(t, g.cfg);
    };
  });
}

// ------------------------------------------------------------------ bounds

void bounds_verb(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("bounds", "Heat-kernel and eigenvalue bound checks")->require_subcommand(1);
  auto* chk = top->add_subcommand("check", "Calibrate or verify the bound constants");
  static SpectrumArgs a;
  static std::string mode = "verify", grid = "0.1:10:12:log", constants_out;
  static std::uint64_t sigma_max = 200;
  add_spectrum_options(chk, a);
  chk->add_option("--mode", mode, "calibrate | verify")->check(CLI::IsMember({"calibrate", "verify"}));
  chk->add_option("--t", grid, "t grid for the trace checks");
  chk->add_option("--sigma-max", sigma_max, "Eigenvalue index range");
  chk->add_option("--constants-out", constants_out, "Write calibrated constants here (calibrate)");
  chk->callback([&] {
    action = [&] {
      const auto s = make_spectrum(a);
      const auto ts = parse_grid(grid, "--t");
      const auto spec = series(g.cfg);
      std::vector<BoundReport> reports;
      BoundConstants k = g.cfg.constants;
      if (mode == "calibrate") {
        reports.push_back(trace_bounds_check(s, {}, ts, BoundMode::calibrate, spec));
        reports.push_back(eigenvalue_bounds_check(s, {}, sigma_max, BoundMode::calibrate));
        const auto& kt = *reports[0].calibrated;
        const auto& ke = *reports[1].calibrated;
        k = {kt.C_tilde, ke.C, ke.B, std::pow(s.diameter(), s.dimension()) / s.volume()};
        const auto frag = constants_fragment(k);
        if (constants_out.empty()) {
          std::cerr << frag;
        } else {
          std::ofstream out(constants_out);
          if (!out) throw ResourceError("cannot open '" + constants_out + "' for writing");
          out << frag;
        }
      } else {
        k = need_constants(g.cfg);
        reports.push_back(trace_bounds_check(s, k, ts, BoundMode::verify, spec));
        reports.push_back(eigenvalue_bounds_check(s, k, sigma_max, BoundMode::verify));
      }
      reports.push_back(trace_sandwich_check(s, k, ts, spec));
      reports.push_back(long_time_decay_check(s, ts.front(), ts, spec));
      ResultTable t{{"check", "parameter", "lower", "measured", "upper", "pass", "slack"}, {}};
      std::size_t bad = 0;
      for (const auto& r : reports) {
        bad += r.violations();
        for (const auto& row : r.rows)
          t.add_row({r.check, row.parameter, row.lower, row.measured, row.upper, row.pass, row.slack});
      }
      emit(t, g.cfg);
      if (bad > 0) throw CheckFailure(std::to_string(bad) + " bound violation(s)");
    };
  });
}

// --------------------------------------------------------------- ideal-gas

void ideal_gas_verbs(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("ideal-gas", "Non-interacting Bose gas")->require_subcommand(1);
  auto* curve = top->add_subcommand("curve", "Chemical potential and occupations over a beta grid");
  static SpectrumArgs a;
  static double density = 1.0;
  static std::string betas = "0.05:1:20";
  add_spectrum_options(curve, a);
  curve->add_option("--density", density, "Particle density n")->required();
  curve->add_option("--beta", betas, "beta grid (a:b:n[:log] or list)");
  curve->callback([&] {
    action = [&] {
      const auto& u = g.cfg.units;
      const auto s = make_spectrum(a);
      auto grid = parse_grid(betas, "--beta");
      for (double& b : grid) b = u.beta_to_natural(b);
      const auto rows = condensation_curve(s, density, grid, series(g.cfg), worker_count());
      ResultTable t{{"beta", "mu", "n0", "ne", "bound_rhs", "bound_pass"}, {}};
      for (const auto& r : rows)
        t.add_row({u.beta_to_physical(r.beta), u.energy_to_physical(r.mu), r.n0, r.ne, r.bound_rhs, r.bound_pass});
      emit(t, g.cfg);
    };
  });
  auto* cross = top->add_subcommand("crossing", "Temperature where n0/n falls to a threshold");
  static SpectrumArgs c;
  static double cdens = 1.0, fraction = 0.05;
  add_spectrum_options(cross, c);
  cross->add_option("--density", cdens, "Particle density n")->required();
  cross->add_option("--fraction", fraction, "Condensate fraction threshold");
  cross->callback([&] {
    action = [&] {
      const auto s = make_spectrum(c);
      const double beta = condensation_crossing(s, cdens, fraction, series(g.cfg));
      const double tc = flat_critical_temperature(s.dimension(), cdens);
      const double matched = std::pow(1.0 - fraction, 2.0 / s.dimension()) * tc;
      const auto& u = g.cfg.units;
      ResultTable t{{"beta", "temperature", "flat_tc", "flat_threshold_temperature", "rel_error"}, {}};
      t.add_row({u.beta_to_physical(beta), u.energy_to_physical(1.0 / beta), u.energy_to_physical(tc),
                 u.energy_to_physical(matched), (1.0 / beta - matched) / matched});
      emit(t, g.cfg);
    };
  });
  auto* probe = top->add_subcommand("probe2d", "d = 2 density growth as mu -> 0-");
  static double pbeta = 1.0;
  static std::string mus = "1:1e-8:17:log";
  probe->add_option("--beta", pbeta, "Inverse temperature");
  probe->add_option("--abs-mu", mus, "|mu| grid");
  probe->callback([&] {
    action = [&] {
      auto grid = parse_grid(mus, "--abs-mu");
      for (double& m : grid) m = -std::abs(m);
      std::sort(grid.begin(), grid.end());
      const auto p = d2_condensation_probe(pbeta, grid);
      ResultTable t{{"mu", "density", "fit_slope", "expected_slope"}, {}};
      for (const auto& r : p.rows) t.add_row({r.parameter, r.value, p.slope, 1.0 / (4.0 * std::numbers::pi * pbeta)});
      emit(t, g.cfg);
    };
  });
}

// ------------------------------------------------------------ relativistic

void relativistic_verbs(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("relativistic", "Relativistic ideal gas (natural units)")->require_subcommand(1);
  static RelGasParams p;
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--m", p.m, "Rest mass");
    sub->add_option("--beta", p.beta, "Inverse temperature");
    sub->add_option("--mu", p.mu, "Chemical potential, |mu| < m");
  };
  auto* dens = top->add_subcommand("density", "Excited density, direct and subordinated forms");
  static SpectrumArgs a;
  static std::string form = "both";
  add_spectrum_options(dens, a);
  add_params(dens);
  dens->add_option("--form", form, "direct | subordinated | both")
      ->check(CLI::IsMember({"direct", "subordinated", "both"}));
  dens->callback([&] {
    action = [&] {
      const auto s = make_spectrum(a);
      p.dimension = s.dimension();
      ResultTable t{{"form", "density"}, {}};
      std::vector<double> v;
      for (auto [name, f] : {std::pair{"direct", RelForm::direct}, std::pair{"subordinated", RelForm::subordinated}}) {
        if (form != "both" && form != name) continue;
        v.push_back(rel_excited_density(s, p, f, series(g.cfg), quad(g.cfg)));
        t.add_row({std::string(name), v.back()});
      }
      emit(t, g.cfg);
      if (v.size() == 2 && std::abs(v[0] - v[1]) > g.cfg.tol.comparison * std::abs(v[0]))
        throw ConvergenceError("relativistic density: forms disagree beyond compare_tol");
    };
  });
  auto* bnd = top->add_subcommand("bounds", "Upper and lower density bounds from the calibrated constants");
  add_params(bnd);
  bnd->add_option("--dim", p.dimension, "Dimension (2 or 3)");
  bnd->callback([&] {
    action = [&] {
      const auto r = rel_density_bounds(p, need_constants(g.cfg), series(g.cfg), quad(g.cfg));
      ResultTable t{{"lower", "upper", "lower_tail", "upper_tail", "estimate_chain", "chain_dominates"}, {}};
      t.add_row({r.lower, r.upper, r.lower_tail, r.upper_tail, r.estimate_chain, r.chain_dominates});
      emit(t, g.cfg);
      if (!r.chain_dominates) throw CheckFailure("K_2 estimate chain does not dominate the series");
    };
  });
  auto* probe = top->add_subcommand("probe", "d = 2 divergence as mu -> m-");
  static double pbeta = 1.0, pm = 1.0, X = 1e6;
  static std::string gaps = "1e-1:1e-5:9:log";
  probe->add_option("--beta", pbeta, "Inverse temperature");
  probe->add_option("--m", pm, "Rest mass");
  probe->add_option("--gap", gaps, "m - mu grid (descending)");
  probe->add_option("--x-max", X, "Upper integration limit");
  probe->callback([&] {
    action = [&] {
      auto gap = parse_grid(gaps, "--gap");
      std::vector<double> mus;
      for (double d : gap) mus.push_back(pm - d);
      std::sort(mus.begin(), mus.end());
      const auto pt = rel_2d_divergence_probe(pbeta, pm, mus, X, quad(g.cfg));
      ResultTable t{{"mu", "integral", "fit_slope"}, {}};
      for (const auto& r : pt.rows) t.add_row({r.parameter, r.value, pt.slope});
      emit(t, g.cfg);
    };
  });
}

// -------------------------------------------------------------- bogoliubov

void bogoliubov_verbs(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("bogoliubov", "Weakly interacting gas: ground-state energy")->require_subcommand(1);
  static InteractionParams ip;
  auto add_ip = [&](CLI::App* sub) {
    sub->add_option("--u0", ip.u0, "Coupling u0");
    sub->add_option("--n0", ip.n0, "Condensate density n0");
  };

  auto* en = top->add_subcommand("energy", "E_g in up to three representations");
  static SpectrumArgs a;
  static std::string rep = "all";
  add_spectrum_options(en, a);
  add_ip(en);
  en->add_option("--rep", rep, "renorm | subtracted | fxt | all")
      ->check(CLI::IsMember({"renorm", "subtracted", "fxt", "all"}));
  en->callback([&] {
    action = [&] {
      const auto s = make_spectrum(a);
      const auto& u = g.cfg.units;
      const auto q = to_natural(ip, g.cfg);
      ResultTable t{{"rep", "mean_field", "fluctuation", "total", "tail_bound", "quadrature_error", "rel_deviation"},
                    {}};
      auto add = [&](const EnergyBreakdown& e, EnergyRep r, double dev) {
        t.add_row({to_string(r), u.energy_to_physical(e.mean_field), u.energy_to_physical(e.fluctuation),
                   u.energy_to_physical(e.total), u.energy_to_physical(e.tail_bound),
                   u.energy_to_physical(e.quadrature_error), dev});
      };
      if (rep == "all") {
        const auto c = ground_energy_all(s, q, series(g.cfg), quad(g.cfg));
        add(c.renorm_sum, EnergyRep::renorm_sum, c.max_rel_deviation);
        add(c.subtracted_i1, EnergyRep::subtracted_i1, c.max_rel_deviation);
        add(c.fxt_double, EnergyRep::fxt_double, c.max_rel_deviation);
        emit(t, g.cfg);
        if (c.max_rel_deviation > g.cfg.tol.comparison)
          throw ConvergenceError("bogoliubov energy: representations differ by " + format_double(c.max_rel_deviation) +
                                 " > compare_tol");
        return;
      }
      const EnergyRep r = rep == "renorm" ? EnergyRep::renorm_sum
                          : rep == "subtracted" ? EnergyRep::subtracted_i1
                                                : EnergyRep::fxt_double;
      add(ground_energy(s, q, r, series(g.cfg), quad(g.cfg)), r, 0.0);
      emit(t, g.cfg);
    };
  });

  auto* ly = top->add_subcommand("leeyang", "Flat-space energy per particle and its coefficient");
  static double n0 = 1.0, as = 0.01;
  static std::string method = "closed";
  ly->add_option("--n0", n0, "Density");
  ly->add_option("--as", as, "Scattering length");
  ly->add_option("--method", method, "closed | numeric | both")->check(CLI::IsMember({"closed", "numeric", "both"}));
  ly->callback([&] {
    action = [&] {
      const auto& u = g.cfg.units;
      const double m = u.physical ? u.mass : 0.5, hbar = u.physical ? u.hbar : 1.0;
      ResultTable t{{"method", "energy_per_particle", "mean_field_per_particle", "coefficient", "gas_parameter"}, {}};
      std::vector<double> coef;
      for (auto [name, lm] : {std::pair{"closed", LeeYangMethod::closed_form},
                              std::pair{"numeric", LeeYangMethod::numeric_integral}}) {
        if (method != "both" && method != name) continue;
        const auto r = lee_yang_flat(n0, as, m, hbar, lm);
        coef.push_back(r.coefficient);
        t.add_row({std::string(name), r.energy_per_particle, r.mean_field_per_particle, r.coefficient,
                   r.gas_parameter});
      }
      emit(t, g.cfg);
      if (coef.size() == 2 && std::abs(coef[0] - coef[1]) > 1e-6 * coef[0])
        throw ConvergenceError("leeyang: closed form and integral disagree");
    };
  });

  auto* fs = top->add_subcommand("finite-size", "Volume, area and curvature terms of E_g (d = 3)");
  static SpectrumArgs fa;
  add_spectrum_options(fs, fa);
  add_ip(fs);
  fs->callback([&] {
    action = [&] {
      GeometryInfo geo;
      if (!fa.file.empty()) throw ValidationError("finite-size needs geometry: use --backend box|sphere, not --spectrum");
      if (fa.backend == "sphere") {
        if (fa.dim != 3) throw ValidationError("finite-size: only d = 3 is supported");
        geo = GeometryInfo::ball(fa.radius);
      } else if (fa.backend == "box") {
        geo = GeometryInfo::box(fa.lengths);
      } else {
        throw ValidationError("finite-size: the torus has no boundary terms; use box or sphere");
      }
      const auto& u = g.cfg.units;
      const auto e = finite_size_ground_energy(geo, to_natural(ip, g.cfg), quad(g.cfg));
      ResultTable t{{"mean_field", "volume_term", "area_term", "curvature_term", "total"}, {}};
      t.add_row({u.energy_to_physical(e.mean_field), u.energy_to_physical(e.volume_term),
                 u.energy_to_physical(e.area_term), u.energy_to_physical(e.curvature_term),
                 u.energy_to_physical(e.total)});
      emit(t, g.cfg);
    };
  });

  auto* mu = top->add_subcommand("mu", "Chemical potential dE_g/dN");
  static SpectrumArgs ma;
  static std::string mform = "both";
  add_spectrum_options(mu, ma);
  add_ip(mu);
  mu->add_option("--form", mform, "mode-sum | integral | both")->check(CLI::IsMember({"mode-sum", "integral", "both"}));
  mu->callback([&] {
    action = [&] {
      const auto s = make_spectrum(ma);
      const auto& u = g.cfg.units;
      ResultTable t{{"form", "mu", "mean_field", "fluctuation", "quadrature_error"}, {}};
      std::vector<double> v;
      for (auto [name, f] : {std::pair{"mode-sum", DerivativeForm::mode_sum},
                             std::pair{"integral", DerivativeForm::integral}}) {
        if (mform != "both" && mform != name) continue;
        const auto r = bog_chemical_potential(s, to_natural(ip, g.cfg), f, quad(g.cfg));
        v.push_back(r.mu);
        t.add_row({std::string(name), u.energy_to_physical(r.mu), u.energy_to_physical(r.mean_field),
                   u.energy_to_physical(r.fluctuation), u.energy_to_physical(r.quadrature_error)});
      }
      emit(t, g.cfg);
      if (v.size() == 2 && std::abs(v[0] - v[1]) > g.cfg.tol.comparison * std::abs(v[0]))
        throw ConvergenceError("bogoliubov mu: forms disagree beyond compare_tol");
    };
  });
}

// --------------------------------------------------------------- depletion

void depletion_verbs(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("depletion", "Condensate depletion")->require_subcommand(1);
  static InteractionParams ip;
  auto add_ip = [&](CLI::App* sub) {
    sub->add_option("--u0", ip.u0, "Coupling u0");
    sub->add_option("--n0", ip.n0, "Condensate density n0");
  };

  auto* zt = top->add_subcommand("zero-t", "Zero-temperature depletion, mode sum and heat-kernel forms");
  static SpectrumArgs a;
  static std::string form = "both";
  add_spectrum_options(zt, a);
  add_ip(zt);
  zt->add_option("--form", form, "mode-sum | heat-kernel | both")
      ->check(CLI::IsMember({"mode-sum", "heat-kernel", "both"}));
  zt->callback([&] {
    action = [&] {
      const auto s = make_spectrum(a);
      std::optional<BoundConstants> k;
      if (g.cfg.constants_calibrated()) k = g.cfg.constants;
      ResultTable t{{"form", "depletion", "tail_bound", "quadrature_error", "gp_parameter", "flat", "lower", "upper",
                     "within_bounds"},
                    {}};
      std::vector<double> v;
      bool outside = false;
      for (auto [name, f] : {std::pair{"mode-sum", DepletionForm::mode_sum},
                             std::pair{"heat-kernel", DepletionForm::heat_kernel}}) {
        if (form != "both" && form != name) continue;
        const auto r = depletion_zero_T(s, to_natural(ip, g.cfg), f, series(g.cfg), quad(g.cfg), k);
        v.push_back(r.value);
        const double nan = std::nan("");
        const double lo = r.bounds ? r.bounds->lower : nan, hi = r.bounds ? r.bounds->upper : nan;
        const bool inside = !r.bounds || (lo <= r.value && r.value <= hi);
        outside = outside || !inside;
        double flat = nan;
        if (s.dimension() <= 3 && s.dimension() >= 2) flat = flat_depletion(s.dimension(), to_natural(ip, g.cfg).a());
        t.add_row({std::string(name), r.value, r.tail_bound, r.quadrature_error, r.gp_parameter, flat, lo, hi, inside});
      }
      emit(t, g.cfg);
      if (v.size() == 2 && std::abs(v[0] - v[1]) > g.cfg.tol.comparison * std::abs(v[0]))
        throw ConvergenceError("depletion zero-t: forms disagree beyond compare_tol");
      if (outside) throw CheckFailure("depletion outside the calibrated sandwich");
    };
  });

  auto* ft = top->add_subcommand("finite-t", "Finite-temperature depletion");
  static SpectrumArgs fa;
  static double beta = 1.0;
  static std::string tform = "both";
  add_spectrum_options(ft, fa);
  add_ip(ft);
  ft->add_option("--beta", beta, "Inverse temperature");
  ft->add_option("--form", tform, "k-sum | bose | both")->check(CLI::IsMember({"k-sum", "bose", "both"}));
  ft->callback([&] {
    action = [&] {
      const auto s = make_spectrum(fa);
      const double b = g.cfg.units.beta_to_natural(beta);
      const bool bounded = g.cfg.constants_calibrated() && s.dimension() == 3;
      ResultTable t{{"form", "total", "zero_t", "thermal_part", "k_terms", "tail_bound", "upper_bound"}, {}};
      std::vector<double> v;
      bool over = false;
      for (auto [name, f] : {std::pair{"k-sum", ThermalForm::k_sum}, std::pair{"bose", ThermalForm::bose_factor}}) {
        if (tform != "both" && tform != name) continue;
        const auto r = depletion_finite_T(s, to_natural(ip, g.cfg), b, f, series(g.cfg), quad(g.cfg));
        v.push_back(r.thermal_part);
        const double ub = bounded ? finite_T_upper_bound(to_natural(ip, g.cfg).a(), b, g.cfg.constants) : std::nan("");
        over = over || (bounded && r.thermal_part > ub);
        t.add_row({std::string(name), r.total, r.zero_T, r.thermal_part, std::int64_t{r.k_terms}, r.tail_bound, ub});
      }
      emit(t, g.cfg);
      if (v.size() == 2 && std::abs(v[0] - v[1]) > g.cfg.tol.comparison * std::abs(v[0]))
        throw ConvergenceError("depletion finite-t: forms disagree beyond compare_tol");
      if (over) throw CheckFailure("thermal depletion above the finite-temperature bound");
    };
  });

  auto* probe = top->add_subcommand("probe2d", "K0 I1 cutoff integral growth");
  static double pa = 1.0, pbeta = 1.0, weight = 0.0;
  static std::string lambdas = "10:1e5:9:log";
  probe->add_option("--a", pa, "u0 n0");
  probe->add_option("--beta", pbeta, "Inverse temperature");
  probe->add_option("--lambda", lambdas, "Cutoff grid (ascending)");
  probe->add_option("--weight", weight, "Power w of t^{-w}: 0 for d = 2, 0.5 for d = 3");
  probe->callback([&] {
    action = [&] {
      const auto p = finite_T_bessel_probe(pa, pbeta, parse_grid(lambdas, "--lambda"), weight);
      ResultTable t{{"lambda", "integral", "local_slope", "asymptotic_slope"}, {}};
      for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const double sl = i == 0 ? std::nan("") : p.slopes[i - 1];
        t.add_row({p.rows[i].parameter, p.rows[i].value, sl, p.asymptotic_slope});
      }
      emit(t, g.cfg);
    };
  });
}

// ------------------------------------------------------------ berezin-lieb

void berezin_lieb_verb(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("berezin-lieb", "Coherent-state partition function sandwich")->require_subcommand(1);
  auto* ver = top->add_subcommand("verify", "Z_L <= Z <= Z_U on a (beta, mu) grid plus symbolic checks");
  static int nmax = 60;
  static std::string sys, betas, mus;
  ver->add_option("--nmax", nmax, "Fock truncation");
  ver->add_option("--sys", sys, "epsilon=..,u=..,mu=..,V=..,beta=..,spectators=..");
  ver->add_option("--beta", betas, "beta grid (default: the system value)");
  ver->add_option("--mu", mus, "mu grid (default: the system value)");
  ver->callback([&] {
    action = [&] {
      ToySystem base;
      std::stringstream ss(sys);
      for (std::string kv; std::getline(ss, kv, ',');) {
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--sys: expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        const double v = detail::config_number("--sys " + key, val);
        if (key == "epsilon") base.epsilon = v;
        else if (key == "u") base.u = v;
        else if (key == "mu") base.mu = v;
        else if (key == "V") base.V = v;
        else if (key == "beta") base.beta = v;
        else if (key == "spectators") {
          if (v != std::floor(v)) throw ValidationError("--sys spectators must be an integer");
          base.spectators = static_cast<int>(v);
        } else throw ValidationError("--sys: unknown key '" + key + "'");
      }
      const auto bgrid = betas.empty() ? std::vector<double>{base.beta} : parse_grid(betas, "--beta");
      const auto mgrid = mus.empty() ? std::vector<double>{base.mu} : parse_grid(mus, "--mu");
      FockTruncation tr;
      tr.nmax = nmax;
      ResultTable t{{"beta", "mu", "log_Z_L", "log_Z", "log_Z_U", "pass"}, {}};
      std::size_t bad = 0;
      for (double b : bgrid)
        for (double m : mgrid) {
          ToySystem s = base;
          s.beta = b;
          s.mu = m;
          const auto r = partition_sandwich(s, tr, quad(g.cfg));
          bad += r.pass ? 0 : 1;
          t.add_row({b, m, r.log_Z_L, r.log_Z, r.log_Z_U, r.pass});
        }
      const bool delta_ok =
          symbol_difference(hamiltonian_symbol(SymbolKind::upper), hamiltonian_symbol(SymbolKind::lower)) ==
          expected_delta();
      emit(t, g.cfg);
      std::cerr << "sandwich: " << (t.rows.size() - bad) << "/" << t.rows.size() << " pass; delta identity: "
                << (delta_ok ? "exact" : "MISMATCH") << "\n";
      if (bad > 0 || !delta_ok) throw CheckFailure("Berezin-Lieb verification failed");
    };
  });
}

// ---------------------------------------------------------------------- sf

void sf_verb(CLI::App& app, Globals& g, std::function<void()>& action) {
  auto* top = app.add_subcommand("sf", "Special-function passthrough")->require_subcommand(1);
  auto* ev = top->add_subcommand("eval", "Evaluate one special function");
  static std::string name;
  static std::vector<double> args;
  ev->add_option("name", name,
                 "e1 | gamma_upper | i0e | i1e | k | ke | k2_estimate | zeta | theta3 | beta")
      ->required();
  ev->add_option("args", args, "Arguments")->allow_extra_args();
  ev->callback([&] {
    action = [&] {
      auto need = [&](std::size_t n) {
        if (args.size() != n)
          throw ValidationError("sf " + name + ": expected " + std::to_string(n) + " argument(s)");
      };
      auto k_order = [&](double nu) {
        if (nu == 0.0) return sf::BesselKOrder::zero;
        if (nu == 0.75) return sf::BesselKOrder::three_quarters;
        if (nu == 1.5) return sf::BesselKOrder::three_halves;
        if (nu == 2.0) return sf::BesselKOrder::two;
        throw ValidationError("sf k: order must be 0, 0.75, 1.5 or 2");
      };
      double v = 0.0;
      if (name == "e1") need(1), v = sf::exponential_integral_e1(args[0]);
      else if (name == "gamma_upper") need(2), v = sf::upper_incomplete_gamma(args[0], args[1]);
      else if (name == "i0e") need(1), v = sf::scaled_bessel_i0(args[0]);
      else if (name == "i1e") need(1), v = sf::scaled_bessel_i1(args[0]);
      else if (name == "k") need(2), v = sf::bessel_k(k_order(args[0]), args[1]);
      else if (name == "ke") need(2), v = sf::scaled_bessel_k(k_order(args[0]), args[1]);
      else if (name == "k2_estimate") need(1), v = sf::bessel_k2_upper_estimate(args[0]);
      else if (name == "zeta") need(1), v = sf::riemann_zeta(args[0]);
      else if (name == "theta3") need(2), v = sf::theta3_sum(args[0], args[1]);
      else if (name == "beta") need(2), v = sf::beta_function(args[0], args[1]);
      else throw ValidationError("sf: unknown function '" + name + "'");
      std::string joined;
      for (std::size_t i = 0; i < args.size(); ++i) joined += (i ? " " : "") + format_double(args[i]);
      ResultTable t{{"function", "args", "value"}, {}};
      t.add_row({name, joined, v});
      emit(t, g.cfg);
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hkbec: Bose-Einstein condensation observables from Neumann Laplacian spectra"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Config file (key = value)");
  // Flags mirror config keys and override the file.
  const std::vector<std::pair<std::string, std::string>> mirrored = {
      {"--units", "units"},           {"--mass", "mass"},           {"--hbar", "hbar"},
      {"--series-tol", "series_tol"}, {"--quad-tol", "quad_tol"},   {"--compare-tol", "compare_tol"},
      {"--C-tilde", "C_tilde"},       {"--C", "C"},                 {"--B", "B"},
      {"--A-ratio", "A_ratio"},       {"--format", "format"},       {"--out", "output"}};
  std::map<std::string, std::string> raw;
  for (const auto& [flag, key] : mirrored) app.add_option(flag, raw[key], "config key '" + key + "'");

  std::function<void()> action;
  spectrum_verbs(app, g, action);
  heat_trace_verb(app, g, action);
  bounds_verb(app, g, action);
  ideal_gas_verbs(app, g, action);
  relativistic_verbs(app, g, action);
  bogoliubov_verbs(app, g, action);
  depletion_verbs(app, g, action);
  berezin_lieb_verb(app, g, action);
  sf_verb(app, g, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    for (const auto& [flag, key] : mirrored)
      if (app.count(flag) > 0) g.flag_values[key] = raw[key];
    ConfigMap file;
    if (!g.config_path.empty()) file = load_config_file(g.config_path);
    g.cfg = parse_config(file, g.flag_values);
    if (!action) throw ValidationError("no command given");
    action();
    return kOk;
  } catch (const CheckFailure& e) {
    std::cerr << "hkbec: " << e.what() << "\n";
    if (std::string(e.what()).find("not calibrated") != std::string::npos) std::cerr << kCalibrationHint << "\n";
    return kViolation;
  } catch (const CutoffError& e) {
    std::cerr << "hkbec: " << e.what() << "\nhint: rebuild the spectrum with --cutoff >= "
              << format_double(e.required_cutoff()) << " or loosen series_tol\n";
    return kNumerical;
  } catch (const TruncationError& e) {
    std::cerr << "hkbec: " << e.what() << "\nhint: use --nmax >= " << e.required_nmax() << "\n";
    return kNumerical;
  } catch (const ConvergenceError& e) {
    std::cerr << "hkbec: " << e.what() << "\n";
    return kNumerical;
  } catch (const RangeError& e) {
    std::cerr << "hkbec: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "hkbec: " << e.what() << "\n";
    return kInvalid;
  }
}
