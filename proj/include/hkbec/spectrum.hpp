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

// Explicit Neumann Laplacian spectra (boxes, flat tori, round spheres, or
// files), their geometric metadata and truncated heat traces with Weyl-law
// tail control.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hkbec/errors.hpp"
#include "hkbec/special_functions.hpp"

namespace hkbec {

enum class Backend { box, torus, sphere, file };

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::box: return "box";
    case Backend::torus: return "torus";
    case Backend::sphere: return "sphere";
    case Backend::file: return "file";
  }
  return "?";
}

struct SpectrumEntry {
  double eigenvalue;
  std::uint64_t multiplicity;
  bool operator==(const SpectrumEntry&) const = default;
};

struct GeometryInfo {
  int dimension = 0;
  double volume = 0.0;
  double boundary_area = 0.0;
  // Integral of the mean curvature over the boundary.  For polyhedral boxes
  // this is the effective value 3*pi/2 * sum(L_i) whose heat-trace term equals
  // the right-angle edge contribution.
  double mean_curvature_integral = 0.0;
  std::vector<double> side_lengths;
  std::optional<double> radius;

  static GeometryInfo box(std::vector<double> lengths) {
    if (lengths.empty()) throw ValidationError("box: need at least one side length");
    GeometryInfo g;
    g.dimension = static_cast<int>(lengths.size());
    g.volume = 1.0;
    for (double L : lengths) {
      if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("box: side lengths must be > 0");
      g.volume *= L;
    }
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      double face = 1.0;
      for (std::size_t j = 0; j < lengths.size(); ++j)
        if (j != i) face *= lengths[j];
      g.boundary_area += 2.0 * face;
    }
    if (g.dimension == 3) {
      double s = 0.0;
      for (double L : lengths) s += L;
      g.mean_curvature_integral = 1.5 * std::numbers::pi * s;
    }
    g.side_lengths = std::move(lengths);
    return g;
  }

  static GeometryInfo ball(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("ball: radius must be > 0");
    GeometryInfo g;
    g.dimension = 3;
    g.volume = 4.0 * std::numbers::pi * radius * radius * radius / 3.0;
    g.boundary_area = 4.0 * std::numbers::pi * radius * radius;
    g.mean_curvature_integral = 4.0 * std::numbers::pi * radius;
    g.radius = radius;
    return g;
  }
};

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

class Spectrum {
public:
  Spectrum(int dimension, double volume, double diameter, double cutoff, Backend backend,
           std::vector<SpectrumEntry> entries, std::optional<GeometryInfo> geometry = {})
      : d_(dimension), volume_(volume), diameter_(diameter), cutoff_(cutoff), backend_(backend),
        entries_(std::move(entries)), geometry_(std::move(geometry)) {
    if (d_ < 1) throw ValidationError("spectrum: dimension must be >= 1");
    if (!(volume_ > 0.0) || !std::isfinite(volume_)) throw ValidationError("spectrum: V must be > 0");
    if (!(diameter_ > 0.0) || !std::isfinite(diameter_))
      throw ValidationError("spectrum: D must be > 0");
    if (entries_.size() < 2) throw InvariantError("spectrum: need the ground state and at least one excited level");
    if (entries_[0].eigenvalue != 0.0 || entries_[0].multiplicity != 1)
      throw InvariantError("spectrum: first entry must be eigenvalue 0 with multiplicity 1");
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (!(entries_[i].eigenvalue > entries_[i - 1].eigenvalue))
        throw InvariantError("spectrum: eigenvalues must be strictly ascending (entry " +
                             std::to_string(i) + ")");
      if (entries_[i].multiplicity == 0)
        throw InvariantError("spectrum: multiplicity must be >= 1 (entry " + std::to_string(i) + ")");
    }
    if (!(cutoff_ >= entries_.back().eigenvalue))
      throw InvariantError("spectrum: listed eigenvalue exceeds the cutoff");
    values_.reserve(entries_.size());
    weights_.reserve(entries_.size());
    for (const auto& e : entries_) {
      values_.push_back(e.eigenvalue);
      weights_.push_back(static_cast<double>(e.multiplicity));
    }
  }

  int dimension() const { return d_; }
  double volume() const { return volume_; }
  double diameter() const { return diameter_; }
  double cutoff() const { return cutoff_; }
  Backend backend() const { return backend_; }
  const std::vector<SpectrumEntry>& entries() const { return entries_; }
  const std::vector<double>& eigenvalues() const { return values_; }
  const std::vector<double>& multiplicities() const { return weights_; }
  const std::optional<GeometryInfo>& geometry() const { return geometry_; }
  double gap() const { return values_[1]; }

  std::uint64_t mode_count() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) n += e.multiplicity;
    return n;
  }

  // W in N(E) ~ W E^{d/2}.
  double weyl_coefficient() const {
    return unit_ball_volume(d_) * volume_ / std::pow(2.0 * std::numbers::pi, d_);
  }

  // Number of eigenvalues <= E, with multiplicity.
  double counting(double E) const {
    double n = 0.0;
    for (std::size_t i = 0; i < values_.size() && values_[i] <= E; ++i) n += weights_[i];
    return n;
  }

  // The eigenvalue with index sigma (0-based, counting multiplicity).
  double eigenvalue_at(std::uint64_t sigma) const {
    std::uint64_t seen = 0;
    for (const auto& e : entries_) {
      seen += e.multiplicity;
      if (sigma < seen) return e.eigenvalue;
    }
    throw ValidationError("spectrum: index " + std::to_string(sigma) + " beyond the cutoff");
  }

private:
  int d_;
  double volume_, diameter_, cutoff_;
  Backend backend_;
  std::vector<SpectrumEntry> entries_;
  std::vector<double> values_, weights_;
  std::optional<GeometryInfo> geometry_;
};

struct BuildLimits {
  std::size_t max_entries = 20'000'000;
  std::size_t max_histogram = 100'000'000;
};

namespace detail {

// Histogram over S = sum_i n_i^2 for `axes` lattice coordinates, S <= smax.
// Box: n_i >= 0.  Torus: n_i in Z.
inline std::vector<std::uint64_t> square_sum_histogram(int axes, std::uint64_t smax, bool two_sided,
                                                       const BuildLimits& lim) {
  if (smax + 1 > lim.max_histogram)
    throw ResourceError("build_spectrum: cutoff too large (lattice histogram of " +
                        std::to_string(smax + 1) + " bins exceeds the limit)");
  std::vector<std::uint64_t> one(smax + 1, 0);
  std::vector<std::uint64_t> squares;
  for (std::uint64_t n = 0; n * n <= smax; ++n) {
    one[n * n] = (n == 0 || !two_sided) ? 1 : 2;
    squares.push_back(n * n);
  }
  std::vector<std::uint64_t> h = one;
  for (int a = 1; a < axes; ++a) {
    std::vector<std::uint64_t> next(smax + 1, 0);
    for (std::uint64_t s = 0; s <= smax; ++s) {
      const std::uint64_t c = h[s];
      if (c == 0) continue;
      for (std::uint64_t q : squares) {
        if (s + q > smax) break;
        next[s + q] += c * one[q];
      }
    }
    h.swap(next);
  }
  return h;
}

inline std::vector<SpectrumEntry> lattice_spectrum(std::vector<double> lengths, double cutoff,
                                                   bool torus, const BuildLimits& lim) {
  if (lengths.empty()) throw ValidationError("build_spectrum: need at least one side length");
  for (double L : lengths)
    if (!(L > 0.0) || !std::isfinite(L))
      throw ValidationError("build_spectrum: side lengths must be > 0");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw ValidationError("build_spectrum: cutoff must be > 0");
  // Axes with bitwise-identical lengths share a histogram, so degeneracies
  // inside a group are counted by integer identity.  Sorting makes the result
  // independent of the order in which lengths were given.
  std::sort(lengths.begin(), lengths.end());
  struct Group {
    double coeff;
    std::vector<std::uint64_t> hist;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < lengths.size();) {
    std::size_t j = i;
    while (j < lengths.size() && lengths[j] == lengths[i]) ++j;
    const double k = (torus ? 2.0 : 1.0) * std::numbers::pi / lengths[i];
    const double coeff = k * k;
    std::uint64_t smax = static_cast<std::uint64_t>(std::floor(cutoff / coeff));
    while (coeff * static_cast<double>(smax + 1) <= cutoff) ++smax;
    if (static_cast<double>(smax) + 1.0 > static_cast<double>(lim.max_histogram))
      throw ResourceError("build_spectrum: cutoff too large for the configured limits");
    groups.push_back({coeff, square_sum_histogram(static_cast<int>(j - i), smax, torus, lim)});
    i = j;
  }

  std::vector<SpectrumEntry> out;
  if (groups.size() == 1) {
    const auto& g = groups[0];
    for (std::size_t s = 0; s < g.hist.size(); ++s)
      if (g.hist[s] != 0) {
        const double e = g.coeff * static_cast<double>(s);
        if (e <= cutoff) out.push_back({e, g.hist[s]});
      }
    if (out.size() > lim.max_entries)
      throw ResourceError("build_spectrum: entry count exceeds the configured maximum");
    return out;
  }

  std::function<void(std::size_t, double, std::uint64_t)> walk = [&](std::size_t gi, double partial,
                                                                    std::uint64_t mult) {
    if (gi == groups.size()) {
      out.push_back({partial, mult});
      if (out.size() > lim.max_entries)
        throw ResourceError("build_spectrum: entry count exceeds the configured maximum");
      return;
    }
    const auto& g = groups[gi];
    for (std::size_t s = 0; s < g.hist.size(); ++s) {
      if (g.hist[s] == 0) continue;
      const double e = partial + g.coeff * static_cast<double>(s);
      if (e > cutoff) break;
      walk(gi + 1, e, mult * g.hist[s]);
    }
  };
  walk(0, 0.0, 1);
  std::sort(out.begin(), out.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.eigenvalue < b.eigenvalue; });
  std::vector<SpectrumEntry> merged;
  merged.reserve(out.size());
  for (const auto& e : out) {
    if (!merged.empty() && merged.back().eigenvalue == e.eigenvalue) merged.back().multiplicity += e.multiplicity;
    else merged.push_back(e);
  }
  return merged;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using wide = unsigned __int128;
  wide r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  if (r > std::numeric_limits<std::uint64_t>::max())
    throw ResourceError("sphere multiplicity overflows 64 bits");
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

// Neumann box [0,L_1] x ... x [0,L_d]: eigenvalues sum (pi n_i / L_i)^2, n_i >= 0.
inline Spectrum build_box(const std::vector<double>& lengths, double cutoff, const BuildLimits& lim = {}) {
  auto entries = detail::lattice_spectrum(lengths, cutoff, false, lim);
  GeometryInfo g = GeometryInfo::box(lengths);
  double diag2 = 0.0;
  for (double L : lengths) diag2 += L * L;
  return Spectrum(g.dimension, g.volume, std::sqrt(diag2), cutoff, Backend::box, std::move(entries), g);
}

// Flat torus R^d / (L_1 Z x ... x L_d Z): eigenvalues sum (2 pi n_i / L_i)^2, n_i in Z.
inline Spectrum build_torus(const std::vector<double>& lengths, double cutoff, const BuildLimits& lim = {}) {
  auto entries = detail::lattice_spectrum(lengths, cutoff, true, lim);
  double vol = 1.0, diag2 = 0.0;
  for (double L : lengths) {
    vol *= L;
    diag2 += L * L;
  }
  GeometryInfo g;
  g.dimension = static_cast<int>(lengths.size());
  g.volume = vol;
  g.side_lengths = lengths;
  return Spectrum(g.dimension, vol, 0.5 * std::sqrt(diag2), cutoff, Backend::torus, std::move(entries), g);
}

// Round sphere S^d of radius R: eigenvalues l(l+d-1)/R^2.
inline Spectrum build_sphere(int d, double radius, double cutoff, const BuildLimits& lim = {}) {
  if (d < 1) throw ValidationError("build_spectrum: sphere dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("build_spectrum: radius must be > 0");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw ValidationError("build_spectrum: cutoff must be > 0");
  std::vector<SpectrumEntry> entries;
  const double r2 = radius * radius;
  for (std::uint64_t l = 0;; ++l) {
    const double e = static_cast<double>(l) * static_cast<double>(l + d - 1) / r2;
    if (e > cutoff) break;
    std::uint64_t m = 0;
    if (l == 0) m = 1;
    else if (l == 1) m = static_cast<std::uint64_t>(d) + 1;
    else m = detail::binomial(l + d, d) - detail::binomial(l + d - 2, d);
    entries.push_back({e, m});
    if (entries.size() > lim.max_entries)
      throw ResourceError("build_spectrum: entry count exceeds the configured maximum");
  }
  GeometryInfo g;
  g.dimension = d;
  g.volume = 2.0 * std::pow(std::numbers::pi, 0.5 * (d + 1)) * std::pow(radius, d) /
             std::tgamma(0.5 * (d + 1));
  g.radius = radius;
  return Spectrum(d, g.volume, std::numbers::pi * radius, cutoff, Backend::sphere, std::move(entries), g);
}

// Text format: '#' comments, header lines d=, V=, D=, cutoff= (optional),
// then "<eigenvalue> <multiplicity>" per line in ascending order.
inline Spectrum parse_spectrum(std::istream& in, const std::string& source = "<stream>") {
  std::optional<int> d;
  std::optional<double> V, D, cutoff;
  std::vector<SpectrumEntry> entries;
  std::string line;
  int lineno = 0;
  auto number = [&](const std::string& text, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "cannot parse value of '" + key + "'");
    }
    if (text.find_first_not_of(" \t\r", pos) != std::string::npos)
      throw ParseError(source, lineno, "trailing characters after '" + key + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      if (!entries.empty()) throw ParseError(source, lineno, "header line after data");
      std::string key = line.substr(0, eq);
      key.erase(key.find_last_not_of(" \t") + 1);
      const std::string val = line.substr(eq + 1);
      if (key == "d") {
        const double x = number(val, key);
        if (x != std::floor(x) || x < 1) throw ParseError(source, lineno, "d must be a positive integer");
        d = static_cast<int>(x);
      } else if (key == "V") V = number(val, key);
      else if (key == "D") D = number(val, key);
      else if (key == "cutoff") cutoff = number(val, key);
      else throw ParseError(source, lineno, "unknown header key '" + key + "'");
      continue;
    }
    std::istringstream ls(line);
    std::string es, ms, extra;
    if (!(ls >> es >> ms) || (ls >> extra))
      throw ParseError(source, lineno, "expected '<eigenvalue> <multiplicity>'");
    const double e = number(es, "eigenvalue");
    const double m = number(ms, "multiplicity");
    if (m != std::floor(m) || m < 0 || m > 1e18)
      throw ParseError(source, lineno, "multiplicity must be a non-negative integer");
    if (m == 0) throw InvariantError(source + ":" + std::to_string(lineno) + ": multiplicity must be >= 1");
    if (entries.empty() && (e != 0.0 || m != 1))
      throw InvariantError(source + ":" + std::to_string(lineno) +
                           ": first level must be the ground state '0 1'");
    if (!entries.empty() && !(e > entries.back().eigenvalue))
      throw InvariantError(source + ":" + std::to_string(lineno) +
                           ": eigenvalues must be strictly ascending");
    entries.push_back({e, static_cast<std::uint64_t>(m)});
  }
  if (!d) throw ParseError(source, lineno, "missing header 'd='");
  if (!V) throw ParseError(source, lineno, "missing header 'V='");
  if (!D) throw ParseError(source, lineno, "missing header 'D='");
  if (entries.empty()) throw InvariantError(source + ": no eigenvalues");
  const double cut = cutoff ? *cutoff : entries.back().eigenvalue;
  return Spectrum(*d, *V, *D, cut, Backend::file, std::move(entries));
}

inline Spectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spectrum file '" + path + "'");
  return parse_spectrum(in, path);
}

inline void write_spectrum(std::ostream& out, const Spectrum& s) {
  out << "# backend: " << to_string(s.backend()) << "\n";
  out << std::setprecision(17);
  out << "d=" << s.dimension() << "\nV=" << s.volume() << "\nD=" << s.diameter()
      << "\ncutoff=" << s.cutoff() << "\n";
  for (const auto& e : s.entries()) out << e.eigenvalue << " " << e.multiplicity << "\n";
}

enum class TailMethod { geometric, integral_comparison };

struct SeriesSpec {
  double rel_tol = 1e-10;
  std::size_t max_terms = 100'000'000;
  TailMethod tail = TailMethod::integral_comparison;
};

inline void validate(const SeriesSpec& s) {
  if (!(s.rel_tol > 0.0)) throw ValidationError("series spec: tolerance must be > 0");
  if (s.max_terms < 1) throw ValidationError("series spec: max_terms must be >= 1");
}

// Sum over listed levels of mult * exp(-eps t), without the ground state when
// primed.  Ascending order, no tail.
inline double truncated_trace(const Spectrum& s, double t, bool primed) {
  const auto& ev = s.eigenvalues();
  const auto& w = s.multiplicities();
  double sum = 0.0;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const double x = ev[i] * t;
    if (x > 745.0) break;
    sum += w[i] * std::exp(-x);
  }
  return primed ? sum : sum + 1.0;
}

// 2 x the Weyl-density integral of exp(-eps t) above E.
inline double weyl_trace_tail(const Spectrum& s, double t, double E) {
  const double h = 0.5 * s.dimension();
  return 2.0 * s.weyl_coefficient() * h * std::pow(t, -h) * sf::upper_incomplete_gamma(h, E * t);
}

struct TraceValue {
  double value;
  double tail_bound;
};

namespace detail {

inline double required_cutoff(const Spectrum& s, double t, double target) {
  double E = std::max(s.cutoff(), 1.0 / t);
  for (int i = 0; i < 200 && weyl_trace_tail(s, t, E) > target; ++i) E *= 2.0;
  return E;
}

}  // namespace detail

inline TraceValue heat_trace(const Spectrum& s, double t, bool primed, const SeriesSpec& spec = {}) {
  validate(spec);
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat_trace: t must be > 0");
  if (s.eigenvalues().size() > spec.max_terms)
    throw ConvergenceError("heat_trace: spectrum has more levels than max_terms");
  const double value = truncated_trace(s, t, primed);
  const double tail = weyl_trace_tail(s, t, s.cutoff());
  if (tail > spec.rel_tol * std::abs(value)) {
    const double need = detail::required_cutoff(s, t, spec.rel_tol * std::abs(value));
    throw CutoffError("heat_trace: cutoff " + std::to_string(s.cutoff()) + " insufficient at t = " +
                          std::to_string(t) + "; need cutoff >= " + std::to_string(need),
                      need);
  }
  return {value, tail};
}

// Evaluates heat_trace on a grid with `threads` workers; each point is summed
// independently in ascending order, so the result does not depend on threads.
inline std::vector<TraceValue> heat_trace_grid(const Spectrum& s, const std::vector<double>& ts,
                                               bool primed, const SeriesSpec& spec = {},
                                               unsigned threads = 1) {
  std::vector<TraceValue> out(ts.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ts.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = heat_trace(s, ts[i], primed, spec);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < ts.size(); i += threads) out[i] = heat_trace(s, ts[i], primed, spec);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct WeylRow {
  double energy;
  double count;
  double weyl;
  double ratio;
};

struct SpectrumStats {
  double volume;
  double diameter;
  double gap;
  std::uint64_t modes;
  std::vector<WeylRow> weyl;
};

inline SpectrumStats spectrum_stats(const Spectrum& s, int grid_points = 16) {
  if (grid_points < 1) throw ValidationError("spectrum_stats: grid_points must be >= 1");
  SpectrumStats st{s.volume(), s.diameter(), s.gap(), s.mode_count(), {}};
  const double W = s.weyl_coefficient();
  for (int j = 1; j <= grid_points; ++j) {
    const double E = s.cutoff() * j / grid_points;
    const double n = s.counting(E);
    const double w = W * std::pow(E, 0.5 * s.dimension());
    st.weyl.push_back({E, n, w, n / w});
  }
  return st;
}

}  // namespace hkbec
