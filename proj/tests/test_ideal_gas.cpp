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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hkbec/ideal_gas.hpp"
#include "oracles.hpp"

using namespace hkbec;
namespace o = oracle;

constexpr double pi = std::numbers::pi;

namespace {

Spectrum single_mode(double eps, int d = 3) { return Spectrum(d, 1.0, 1.0, 1e4, Backend::file, {{0.0, 1}, {eps, 1}}); }

const Spectrum& cube20() {
  static const Spectrum s = build_box({20.0, 20.0, 20.0}, 2000.0);
  return s;
}

double direct_bose_density(const Spectrum& s, double beta, double mu) {
  double sum = 0.0;
  for (std::size_t i = 1; i < s.eigenvalues().size(); ++i)
    sum += s.multiplicities()[i] / (std::exp(beta * (s.eigenvalues()[i] - mu)) - 1.0);
  return sum / s.volume();
}

}  // namespace

TEST(ExcitedDensity, SingleModeExample) {
  const auto s = single_mode(1.0);
  const double want = 1.0 / (std::exp(2.0) - 1.0);
  EXPECT_NEAR(excited_density(s, 1.0, -1.0, DensityForm::direct), want, 1e-15);
  EXPECT_NEAR(excited_density(s, 1.0, -1.0, DensityForm::heat_trace), want, 1e-12);
  EXPECT_NEAR(want, 0.156518, 1e-6);
}

TEST(ExcitedDensity, CubeDualRepresentations) {
  const auto& s = cube20();
  const double d = excited_density(s, 1.0, -0.1, DensityForm::direct);
  const double h = excited_density(s, 1.0, -0.1, DensityForm::heat_trace);
  EXPECT_LE(o::rel_diff(h, d), 1e-8);
  EXPECT_LE(o::rel_diff(d, direct_bose_density(s, 1.0, -0.1)), 1e-12);
}

TEST(ExcitedDensity, DualRepresentationsOnEveryBackend) {
  const std::vector<Spectrum> specs = {build_box({3.0, 4.0, 5.0}, 150.0), build_torus({4.0, 4.0, 4.0}, 150.0),
                                       build_sphere(3, 2.0, 150.0), build_box({6.0, 7.0}, 150.0)};
  for (const auto& s : specs)
    for (double mu : {-2.0, -0.3, -1e-3}) {
      const double d = excited_density(s, 0.7, mu, DensityForm::direct);
      const double h = excited_density(s, 0.7, mu, DensityForm::heat_trace);
      EXPECT_LE(o::rel_diff(h, d), 1e-8) << to_string(s.backend()) << " mu=" << mu;
    }
}

TEST(ExcitedDensity, Monotonicity) {
  const auto& s = cube20();
  double prev = 0.0;
  for (double mu : {-3.0, -1.0, -0.3, -0.1, -1e-3}) {
    const double v = excited_density(s, 1.0, mu, DensityForm::direct);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = 1e300;
  for (double beta : {0.5, 1.0, 2.0, 8.0, 40.0, 400.0}) {
    const double v = excited_density(s, beta, -0.2, DensityForm::direct);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(ExcitedDensity, RejectsBadArguments) {
  const auto& s = cube20();
  EXPECT_THROW(excited_density(s, 1.0, 0.0, DensityForm::direct), DomainError);
  EXPECT_THROW(excited_density(s, -1.0, -1.0, DensityForm::direct), DomainError);
  EXPECT_THROW(excited_density(s, 0.01, -1.0, DensityForm::direct), CutoffError);
}

TEST(Solver, ReproducesDensity) {
  const auto& s = cube20();
  for (double beta : {0.05, 0.15, 0.3, 1.0}) {
    const auto r = solve_chemical_potential(s, 1.0, beta);
    const double n = (1.0 / std::expm1(-beta * r.mu)) / s.volume() + direct_bose_density(s, beta, r.mu);
    EXPECT_LE(o::rel_diff(n, 1.0), 1e-10) << beta;
    EXPECT_LT(r.mu, 0.0);
    EXPECT_NEAR(r.n_condensate + r.n_excited, 1.0, 1e-10);
  }
}

TEST(Solver, LowTemperatureMuScaling) {
  const auto s = build_box({40.0, 40.0, 40.0}, 80.0);
  const double beta = 0.5;
  const auto r = solve_chemical_potential(s, 1.0, beta);
  EXPECT_GT(r.n_condensate, 0.5);
  EXPECT_NEAR(s.volume() * beta * std::abs(r.mu) * r.n_condensate, 1.0, 0.05);
}

TEST(Solver, HighTemperatureHasNoCondensate) {
  const auto r = solve_chemical_potential(cube20(), 1.0, 0.02, SeriesSpec{1e-6});
  EXPECT_LT(r.n_condensate, 1e-3);
}

TEST(Solver, KeepsOccupations) {
  const auto s = build_box({3.0, 3.0, 3.0}, 60.0);
  SolverOptions opt;
  opt.keep_occupations = true;
  const auto r = solve_chemical_potential(s, 1.0, 1.0, {}, opt);
  ASSERT_EQ(r.occupations.size(), s.entries().size());
  EXPECT_NEAR(r.occupations[0] / s.volume(), r.n_condensate, 1e-15);
}

TEST(Curve, MonotoneCondensateAndBound) {
  const auto& s = cube20();
  std::vector<double> grid;
  for (double b = 0.1; b <= 0.6; b += 0.05) grid.push_back(b);
  const auto rows = condensation_curve(s, 1.0, grid, {}, 4);
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(rows[i].bound_pass) << rows[i].beta;
    EXPECT_LE(rows[i].ne, rows[i].bound_rhs);
    if (i > 0) {
      EXPECT_GE(rows[i].n0, rows[i - 1].n0);
    }
  }
  const auto serial = condensation_curve(s, 1.0, grid, {}, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].mu, serial[i].mu);
  EXPECT_THROW(condensation_curve(s, 1.0, {0.3, 0.2}), ValidationError);
}

TEST(Curve, FiniteVolumeBoundOnPairs) {
  const auto s = build_box({5.0, 6.0, 7.0}, 200.0);
  for (double b0 : {0.1, 0.3, 1.0})
    for (double b : {1.0, 2.0, 5.0}) {
      if (b < b0) continue;
      for (double mu : {-1.0, -1e-2, -1e-6}) {
        EXPECT_LE(excited_density(s, b, mu, DensityForm::direct), finite_volume_bound(s, b0, b)) << b0 << " " << b;
      }
    }
  EXPECT_THROW(finite_volume_bound(s, 2.0, 1.0), DomainError);
}

TEST(Curve, CrossingBracketsFlatThreshold) {
  const auto s = build_box({20.0, 20.0, 20.0}, 600.0);
  const double beta = condensation_crossing(s, 1.0, 0.05, SeriesSpec{1e-8}, 1e-7);
  const auto r = solve_chemical_potential(s, 1.0, beta, SeriesSpec{1e-8});
  EXPECT_NEAR(r.n_condensate, 0.05, 1e-5);
  const double t_flat = flat_critical_temperature(3, 1.0) * std::pow(0.95, 2.0 / 3.0);
  EXPECT_NEAR(1.0 / beta / t_flat, 1.0, 0.15);
}

TEST(TcBounds, DegenerateConstants) {
  const auto b = tc_bounds(1.0, 3, BoundConstants{1.0, 1.0, 1.0, 1.0});
  const double want = std::pow(1.5 * std::tgamma(1.5) * o::zeta(1.5), -2.0 / 3.0);
  EXPECT_NEAR(b.lower, want, 1e-14);
  EXPECT_NEAR(b.upper, want, 1e-14);
}

TEST(TcBounds, DensityScalingAndOrdering) {
  BoundConstants k{1.0, 2.0, 3.0, 5.0};
  const auto a = tc_bounds(1.0, 3, k), b = tc_bounds(8.0, 3, k);
  EXPECT_NEAR(b.lower / a.lower, 4.0, 1e-12);
  EXPECT_NEAR(b.upper / a.upper, 4.0, 1e-12);
  const auto s = build_box({6.0, 6.0, 6.0}, 60.0);
  auto cal = *eigenvalue_bounds_check(s, {}, s.mode_count() - 1, BoundMode::calibrate).calibrated;
  cal.C_tilde = 1.0;
  cal.A_ratio = std::pow(s.diameter(), 3) / s.volume();
  ASSERT_GE(cal.A_ratio * std::pow(cal.B / cal.C, 1.5), 1.0);
  const auto t = tc_bounds(1.0, 3, cal);
  EXPECT_LE(t.lower, t.upper);
  EXPECT_THROW(tc_bounds(1.0, 2, k), DomainError);
}

TEST(FlatReference, ClosedForms) {
  for (double m : {0.5, 1.0, 3.0}) EXPECT_NEAR(dos_factor(3, m) * std::tgamma(1.5), std::pow(m / (2 * pi), 1.5), 1e-12);
  for (double beta : {0.3, 1.0, 4.0}) {
    EXPECT_NEAR(flat_reference_density(3, beta), o::zeta(1.5) / std::pow(4.0 * pi * beta, 1.5), 1e-14);
    EXPECT_NEAR(flat_reference_density(3, 2.0 * beta) / flat_reference_density(3, beta), std::pow(2.0, -1.5), 1e-14);
    EXPECT_NEAR(flat_reference_density(5, 2.0 * beta) / flat_reference_density(5, beta), std::pow(2.0, -2.5), 1e-14);
  }
  EXPECT_NEAR(flat_reference_density(3, 1.0 / flat_critical_temperature(3, 2.0)), 2.0, 1e-12);
  EXPECT_THROW(flat_reference_density(2, 1.0), DomainError);
}

TEST(FlatReference, MomentumIntegralOracle) {
  const double beta = 0.8;
  auto f = [&](double k) { return beta * k * k < 1e-300 ? 1.0 / beta : k * k / std::expm1(beta * k * k); };
  EXPECT_LE(o::rel_diff(flat_reference_density(3, beta), o::integrate_half_line(f) / (2.0 * pi * pi)), 1e-10);
}

TEST(Sandwich, ThermodynamicBoundsOnLargeBox) {
  const auto s = build_box({20.0, 20.0, 20.0}, 60.0);
  auto k = *eigenvalue_bounds_check(s, {}, s.mode_count() - 1, BoundMode::calibrate).calibrated;
  k.C_tilde = 1.0;
  k.A_ratio = std::pow(s.diameter(), 3) / s.volume();
  for (double beta : {0.5, 1.0, 3.0}) {
    const double ne = excited_density(s, beta, -1e-12, DensityForm::direct, SeriesSpec{1e-6});
    const auto sw = excited_density_sandwich(k, 3, s.volume(), s.diameter(), beta);
    EXPECT_LE(sw.lower, ne) << beta;
    EXPECT_LE(ne, sw.upper) << beta;
  }
}

TEST(D2Probe, SlopeMonotoneAndSuppressed) {
  const double beta = 2.0;
  std::vector<double> ascending;
  for (double e = -2; e >= -9; --e) ascending.push_back(-std::pow(10.0, e));
  const auto t = d2_condensation_probe(beta, ascending);
  EXPECT_NEAR(t.slope * 4.0 * pi * beta, 1.0, 0.05);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GT(t.rows[i].value, t.rows[i - 1].value);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    EXPECT_NEAR(t.rows[i].value, o::e1(beta * std::abs(ascending[i])) / (4.0 * pi * beta), 1e-14);
  double prev = 1e300;
  for (double b : {1.0, 10.0, 100.0, 1000.0}) {
    const double v = d2_condensation_probe(b, {-0.2, -0.1}).rows[0].value;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-40);
  EXPECT_THROW(d2_condensation_probe(beta, {-1e-3, -1e-2}), ValidationError);
}
