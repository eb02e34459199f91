#include "qmb/evolve.hpp"
#include "qmb/profiles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qmb;

namespace {

SpectralState gaussian(double L = 20.0, int M = 64, double amp = 0.5) {
  return SpectralState::from_function(L, M, [=](double x) { return amp * std::exp(-x * x); });
}

}  // namespace

TEST(SpectralState, Construction) {
  EXPECT_THROW(SpectralState(10.0, 100, std::vector<double>(100, 0.0)), PreconditionError);
  EXPECT_THROW(SpectralState(10.0, 8, std::vector<double>(8, 0.0)), PreconditionError);
  EXPECT_THROW(SpectralState(0.0, 16, std::vector<double>(16, 0.0)), PreconditionError);
  EXPECT_THROW(SpectralState(10.0, 16, std::vector<double>(15, 0.0)), StructuralError);
  std::vector<double> bad(16, 0.0);
  bad[3] = std::nan("");
  EXPECT_THROW(SpectralState(10.0, 16, bad), PreconditionError);

  const SpectralState s = gaussian();
  EXPECT_EQ(s.modes(), 64);
  EXPECT_EQ(s.spectrum().size(), 33u);
  EXPECT_DOUBLE_EQ(s.dx(), 20.0 / 64);
  EXPECT_DOUBLE_EQ(s.x(0), -10.0);
  EXPECT_DOUBLE_EQ(s.wavenumber(5), 2 * std::numbers::pi * 5 / 20.0);
  EXPECT_TRUE(s.kept(21));
  EXPECT_FALSE(s.kept(22));
}

TEST(SpectralState, DealiasedOnConstruction) {
  // a pure grid-scale mode is removed by the 2/3 mask
  std::vector<double> u(32);
  for (int j = 0; j < 32; ++j) u[j] = (j % 2 ? -1.0 : 1.0);
  const SpectralState s(10.0, 32, u);
  EXPECT_LT(s.max_abs(), 1e-15);
  for (int j = 0; j <= 16; ++j)
    if (!s.kept(j)) EXPECT_EQ(s.spectrum()[j], std::complex<double>(0.0));
}

TEST(SpectralState, Invariants) {
  const SpectralState s = gaussian(20.0, 128, 1.0);
  EXPECT_NEAR(s.mass(), std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(s.l2(), std::sqrt(std::numbers::pi / 2), 1e-12);
  EXPECT_NEAR(s.max_abs(), 1.0, 1e-12);
}

TEST(SpectralState, Reflection) {
  const SpectralState s = SpectralState::from_function(20.0, 64, [](double x) { return std::exp(-(x - 1) * (x - 1)); });
  const SpectralState r = s.reflected();
  for (int j = 0; j < 64; ++j) EXPECT_NEAR(r.samples()[j], s.samples()[(64 - j) % 64], 1e-15);
  const SpectralState rr = r.reflected();
  for (int j = 0; j < 64; ++j) EXPECT_NEAR(rr.samples()[j], s.samples()[j], 1e-15);
  EXPECT_NEAR(r.mass(), s.mass(), 1e-14);
}

TEST(Step, ZeroDatumStaysZero) {
  SpectralState s(40.0, 64, std::vector<double>(64, 0.0));
  for (int n = 0; n < 10; ++n) s = step(s, 0.01, 3);
  EXPECT_EQ(s.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(s.time(), 0.1);
}

TEST(Step, AiryPhaseRotation) {
  const double L = 20.0;
  const double k = 2 * std::numbers::pi * 3 / L;
  SpectralState s = SpectralState::from_function(L, 32, [=](double x) { return std::cos(k * x); });
  const double dt = 0.37;
  for (int n = 0; n < 8; ++n) s = step(s, dt, 3, 0.0);
  const double t = 8 * dt;
  for (int j = 0; j < 32; ++j) EXPECT_NEAR(s.samples()[j], std::cos(k * s.x(j) + k * k * k * t), 1e-12);
}

TEST(Step, MassExactlyConserved) {
  SpectralState s = gaussian(20.0, 64, 0.8);
  const double m0 = s.mass();
  const double dt = 0.5 * stability_bound(s, 3);
  for (int n = 0; n < 20; ++n) s = step(s, dt, 3);
  EXPECT_EQ(s.mass(), m0);
  for (int q : {2, 4, 5}) {
    SpectralState w = gaussian(20.0, 64, 0.8);
    w = step(w, 0.5 * stability_bound(w, q), q);
    EXPECT_EQ(w.mass(), m0);
  }
}

TEST(Step, StabilityBound) {
  const SpectralState s = gaussian(20.0, 64, 0.5);
  const double kmax = 2 * std::numbers::pi * 21 / 20.0, u = s.max_abs();
  EXPECT_NEAR(u, 0.5, 1e-5);  // the mask trims the peak slightly
  EXPECT_NEAR(stability_bound(s, 3), 2 * std::sqrt(2.0) / (2 * 3 * u * u * kmax), 1e-12);
  EXPECT_NEAR(stability_bound(s, 5, 1.0), 2 * std::sqrt(2.0) / (5 * std::pow(u, 4) * kmax), 1e-12);
  EXPECT_TRUE(std::isinf(stability_bound(s, 3, 0.0)));
  EXPECT_THROW(step(s, 1.01 * stability_bound(s, 3), 3), PreconditionError);
  EXPECT_THROW(step(s, 0.0, 3), PreconditionError);
  EXPECT_THROW(step(s, 1e-3, 1), DomainError);
}

TEST(Step, DivergenceIsDetected) {
  const SpectralState s = gaussian(20.0, 64, 2e6);
  EXPECT_THROW(step(s, 0.01, 3, 0.0), DivergenceError);
}

TEST(Persistence, DefaultSteps) {
  const SpectralState s = SpectralState::from_function(40.0, 256, [](double x) { return gamma0_breather(0.5, 0, 0, 0, x); });
  const int n = default_steps(0.5, 256, 40.0);
  EXPECT_EQ(n, static_cast<int>(std::ceil(gamma0_period(0.5) / (0.05 * stability_bound(s, 3)))));
  EXPECT_GE(default_steps(0.5, 256, 40.0, 2.0), 2 * n - 1);
  EXPECT_THROW(default_steps(0.5, 256, 40.0, 0.0), PreconditionError);
}

// the reference resolution; 256 and 512 modes sit at the spatial floor (7e-2, 7e-5)
TEST(Persistence, OnePeriod) {
  const int n = default_steps(0.5, 1024, 40.0);
  EvolveOptions o;
  o.record_every = n / 4;
  const PersistenceReport r = breather_persistence(0.5, 1024, 40.0, n, o);
  EXPECT_DOUBLE_EQ(r.T, gamma0_period(0.5));
  EXPECT_DOUBLE_EQ(r.dt, r.T / n);
  EXPECT_LT(r.tail, 1e-12);
  EXPECT_LT(r.max_deviation, 1e-4);
  EXPECT_LT(r.l2_drift, 1e-8);
  EXPECT_LT(r.mass_drift, 1e-13);
  ASSERT_GE(r.series.size(), 5u);
  EXPECT_EQ(r.series.front().t, 0.0);
  EXPECT_NEAR(r.series.back().t, r.T, 1e-12);
  for (std::size_t i = 1; i < r.series.size(); ++i) {
    EXPECT_GT(r.series[i].t, r.series[i - 1].t);
    EXPECT_EQ(r.series[i].mass, r.series[0].mass);
    EXPECT_LT(r.series[i].deviation, 1e-4);
  }
}

TEST(Persistence, Preconditions) {
  EXPECT_THROW(breather_persistence(0.5, 256, 10.0, 10), PreconditionError);  // tail too large
  EXPECT_THROW(breather_persistence(0.5, 256, 40.0, 0), PreconditionError);
  EXPECT_THROW(breather_persistence(-0.5, 256, 40.0, 10), PreconditionError);
  EXPECT_THROW(breather_persistence(0.5, 256, 40.0, 10), PreconditionError);  // dt above the bound
  EXPECT_THROW(dt_halving(0.5, 256, 40.0, 100, 1), PreconditionError);
  EXPECT_THROW(time_reversal(0.5, 256, 40.0, 0), PreconditionError);
}

TEST(Persistence, Deterministic) {
  const int n = default_steps(0.5, 128, 40.0);
  const PersistenceReport a = breather_persistence(0.5, 128, 40.0, n);
  const PersistenceReport b = breather_persistence(0.5, 128, 40.0, n);
  EXPECT_EQ(a.max_deviation, b.max_deviation);
  EXPECT_EQ(a.l2_drift, b.l2_drift);
}

TEST(Reversal, RecoversDatum) {
  const int n = default_steps(0.5, 1024, 40.0);
  const ReversalReport r = time_reversal(0.5, 1024, 40.0, (n + 1) / 2);
  EXPECT_LT(r.max_deviation, 1e-6);
}

TEST(Halving, FourthOrder) {
  const SpectralState s = SpectralState::from_function(40.0, 1024, [](double x) { return gamma0_breather(0.5, 0, 0, 0, x); });
  const int n0 = static_cast<int>(std::ceil(1.6 * gamma0_period(0.5) / stability_bound(s, 3)));
  const HalvingReport h = dt_halving(0.5, 1024, 40.0, n0, 3);
  ASSERT_EQ(h.ratio.size(), 2u);
  EXPECT_EQ(h.steps[1], 2 * n0);
  for (double r : h.ratio) EXPECT_GE(r, 8.0);
}
