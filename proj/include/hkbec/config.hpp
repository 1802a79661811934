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

// Run configuration: flat "key = value" files, flag overrides and the
// natural/physical unit mapping.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "hkbec/errors.hpp"
#include "hkbec/heat_kernel_bounds.hpp"
#include "hkbec/report.hpp"

namespace hkbec {

// Natural units measure energy in hbar^2 / (2 m L0^2), so h = -Laplacian.
struct UnitSystem {
  bool physical = false;
  double mass = 0.5;
  double hbar = 1.0;

  double energy_scale() const { return physical ? hbar * hbar / (2.0 * mass) : 1.0; }
  double energy_to_natural(double e) const { return e / energy_scale(); }
  double energy_to_physical(double e) const { return e * energy_scale(); }
  // beta carries inverse energy.
  double beta_to_natural(double b) const { return b * energy_scale(); }
  double beta_to_physical(double b) const { return b / energy_scale(); }
  // u0 carries energy * length^d.
  double coupling_to_natural(double u) const { return u / energy_scale(); }
  double coupling_to_physical(double u) const { return u * energy_scale(); }
};

struct Tolerances {
  double series = 1e-8;
  double quadrature = 1e-8;
  double comparison = 1e-8;
};

struct RunConfig {
  UnitSystem units;
  Tolerances tol;
  BoundConstants constants;
  OutputFormat format = OutputFormat::csv;
  std::string output;

  bool constants_calibrated() const {
    return constants.C_tilde > 0.0 && constants.C > 0.0 && constants.B > 0.0 && constants.A_ratio > 0.0;
  }
};

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double config_number(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': '" + text + "' is not a number");
  }
  if (pos != text.size()) throw ValidationError("config key '" + key + "': trailing characters in '" + text + "'");
  if (!std::isfinite(v)) throw ValidationError("config key '" + key + "': value must be finite");
  return v;
}

}  // namespace detail

inline ConfigMap parse_config_text(std::istream& in, const std::string& source = "<config>") {
  ConfigMap m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(source, lineno, "empty key");
    if (m.count(key)) throw ParseError(source, lineno, "duplicate key '" + key + "'");
    m[key] = val;
  }
  return m;
}

inline ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return parse_config_text(in, path);
}

// Flags override file entries key by key; unknown keys are rejected.
inline RunConfig parse_config(const ConfigMap& file, const ConfigMap& flags = {}) {
  ConfigMap m = file;
  for (const auto& [k, v] : flags) m[k] = v;
  RunConfig c;
  auto positive = [&](const std::string& key, double& slot) {
    const double v = detail::config_number(key, m.at(key));
    if (!(v > 0.0)) throw ValidationError("config key '" + key + "' must be > 0");
    slot = v;
  };
  for (const auto& [key, val] : m) {
    if (key == "units") {
      if (val == "natural") c.units.physical = false;
      else if (val == "physical") c.units.physical = true;
      else throw ValidationError("config key 'units': expected natural or physical");
    } else if (key == "mass") positive(key, c.units.mass);
    else if (key == "hbar") positive(key, c.units.hbar);
    else if (key == "series_tol") positive(key, c.tol.series);
    else if (key == "quad_tol") positive(key, c.tol.quadrature);
    else if (key == "compare_tol") positive(key, c.tol.comparison);
    else if (key == "C_tilde") positive(key, c.constants.C_tilde);
    else if (key == "C") positive(key, c.constants.C);
    else if (key == "B") positive(key, c.constants.B);
    else if (key == "A_ratio") positive(key, c.constants.A_ratio);
    else if (key == "format") {
      try {
        c.format = parse_format(val);
      } catch (const ValidationError&) {
        throw ValidationError("config key 'format': expected csv or json");
      }
    } else if (key == "output") c.output = val;
    else throw ValidationError("unknown config key '" + key + "'");
  }
  if (!c.units.physical && (m.count("mass") || m.count("hbar")))
    throw ValidationError("config keys 'mass'/'hbar' require units = physical");
  return c;
}

// Fragment consumed by verify runs.
inline std::string constants_fragment(const BoundConstants& k) {
  std::ostringstream os;
  os << "# calibrated bound constants\n";
  os << "C_tilde = " << format_double(k.C_tilde) << "\n";
  os << "C = " << format_double(k.C) << "\n";
  os << "B = " << format_double(k.B) << "\n";
  os << "A_ratio = " << format_double(k.A_ratio) << "\n";
  return os.str();
}

}  // namespace hkbec
