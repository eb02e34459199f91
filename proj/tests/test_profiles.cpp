#include "qmb/errors.hpp"
#include "qmb/profiles.hpp"
#include "qmb/residual.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace qmb;

namespace {

using cd = std::complex<double>;

// -2 arctan((beta/alpha) sin(th)/cosh(ph)) and its x-derivative by complex step.
double mkdv_oracle(const BreatherParams& p, double t, double x) {
  const double h = 1e-30;
  const cd z(x, h);
  const cd th = 2.0 * p.alpha * z + p.delta() * t + p.shift1;
  const cd ph = 2.0 * p.beta * z + p.gamma() * t + p.shift2;
  const cd w = -2.0 * std::atan((p.beta / p.alpha) * std::sin(th) / std::cosh(ph));
  return w.imag() / h;
}

// d_t u + u_xxx + q 2 u^{q-1} u_x assembled from single derivatives.
double flow_residual(const Profile& u, int q, double t, double x) {
  const double v = u.value(t, x);
  const double ux = u.derivative(t, {x}, {1, 0});
  const double uxxx = u.derivative(t, {x}, {3, 0});
  const double ut = u.derivative(t, {x}, {0, 1});
  return ut + uxxx + 2.0 * q * std::pow(v, q - 1) * ux;
}

double gardner_point_residual(const Profile& u, double mu, double t, double x) {
  const double v = u.value(t, x);
  const double ux = u.derivative(t, {x}, {1, 0});
  return u.derivative(t, {x}, {0, 1}) + u.derivative(t, {x}, {3, 0}) + 2 * v * ux + 3 * mu * v * v * ux;
}

struct Pt {
  double t, x;
};

std::vector<Pt> random_points(int n, std::uint64_t seed, double tr, double xr) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> T(-tr, tr), X(-xr, xr);
  std::vector<Pt> out;
  for (int i = 0; i < n; ++i) {
    const double t = T(g);
    out.push_back({t, X(g)});
  }
  return out;
}

const std::vector<BreatherParams> kBreathers = {{1.0, 1.0, 0.0, 0.0}, {0.5, 0.8, 0.3, -0.2}, {1.2, 0.4, -1.0, 0.5}};
const std::vector<GardnerParams> kGardner = {{1.0, 1.0, 1.0}, {0.8, 1.2, 2.0}, {1.5, 0.5, 0.7}};

}  // namespace

TEST(BreatherParams, DerivedFrequencies) {
  BreatherParams p{1.0, 1.0};
  EXPECT_DOUBLE_EQ(p.gamma(), 16.0);
  EXPECT_DOUBLE_EQ(p.delta(), -16.0);
  p.beta = 2.0;  // recomputed, never cached
  EXPECT_DOUBLE_EQ(p.gamma(), 16.0 * (3.0 - 4.0));
  EXPECT_THROW((BreatherParams{0.0, 1.0}.validate()), PreconditionError);
  EXPECT_THROW(mkdv_breather_profile(BreatherParams{1.0, -1.0}), PreconditionError);
}

TEST(MkdvBreather, MatchesComplexStepOracle) {
  for (const auto& p : kBreathers)
    for (const Pt& s : random_points(50, 3, 1.0, 6.0)) {
      const double want = mkdv_oracle(p, s.t, s.x);
      EXPECT_NEAR(mkdv_breather(p, s.t, s.x), want, 1e-12 * (1 + std::abs(want)));
    }
}

TEST(MkdvBreather, DecaysInSpace) {
  const BreatherParams p{1.0, 1.0};
  EXPECT_LT(std::abs(mkdv_breather(p, 0, 30)), 1e-20);
  EXPECT_LT(std::abs(mkdv_breather(p, 0, -30)), 1e-20);
}

TEST(MkdvBreather, ResidualAtRandomPoints) {
  for (const auto& p : kBreathers) {
    const Profile u = mkdv_breather_profile(p);
    for (const Pt& s : random_points(100, 5, 1.0, 5.0)) EXPECT_LT(std::abs(flow_residual(u, 3, s.t, s.x)), 1e-8);
  }
}

TEST(Gamma0, ValueAtOrigin) {
  for (double a : {0.25, 0.5, 1.0, 1.7}) EXPECT_NEAR(gamma0_breather(a, 0, 0, 0, 0), -4 * std::sqrt(3.0) * a, 1e-12);
}

TEST(Gamma0, SpecializesMkdv) {
  for (double a : {0.5, 1.0}) {
    const BreatherParams p{a, std::sqrt(3.0) * a, 0.2, -0.3};
    for (const Pt& s : random_points(50, 7, 1.0, 5.0 / a))
      EXPECT_NEAR(gamma0_breather(a, 0.2, -0.3, s.t, s.x), mkdv_breather(p, s.t, s.x), 1e-12);
  }
}

TEST(Gamma0, TimePeriodic) {
  for (double a : {0.5, 1.0}) {
    const double T = gamma0_period(a);
    for (const Pt& s : random_points(30, 9, 1.0, 4.0 / a))
      EXPECT_NEAR(gamma0_breather(a, 0, 0, s.t + T, s.x), gamma0_breather(a, 0, 0, s.t, s.x), 1e-10);
  }
}

TEST(Gamma0, ScalingSymmetry) {
  const double a = 0.6;
  for (double lam : {0.5, 1.3, 2.0})
    for (const Pt& s : random_points(50, 11, 0.5, 4.0)) {
      const double lhs = lam * gamma0_breather(a, 0, 0, lam * lam * lam * s.t, lam * s.x);
      EXPECT_NEAR(lhs, gamma0_breather(lam * a, 0, 0, s.t, s.x), 1e-10);
    }
}

TEST(Gamma0, ResidualOnDefaultGrid) {
  for (double a : {0.5, 1.0}) {
    const ResidualReport r = pde_residual(gamma0_profile(a), 3, 1, default_grid(a));
    EXPECT_LT(r.max_abs, 1e-8);
    EXPECT_EQ(r.points, 21u * 41u);
  }
  const ResidualReport r2 = pde_residual(gamma0_profile(0.5).lifted(2), 3, 2, default_grid(0.5, 2, 11, 11));
  EXPECT_LT(r2.max_abs, 1e-8);
}

TEST(Gamma0, WrongPowerIsAControl) {
  // the same profile under the q = 5 flow is not a solution
  const ResidualReport r = pde_residual(gamma0_profile(0.5), 5, 1, default_grid(0.5));
  EXPECT_GT(r.max_abs, 1e-3);
}

TEST(Decomposition, ParametersAndTaylorData) {
  for (double F1 : {-1.0, -2.5, 0.7}) {
    const BreatherDecomposition d = breather_decomposition(0.5, F1);
    EXPECT_DOUBLE_EQ(d.m, -8.0);
    EXPECT_NEAR(d.zeta0, 2 * std::sqrt(3.0) / std::abs(F1), 1e-14);
    const std::vector<double> Fd = d.F_derivatives(10);
    ASSERT_EQ(Fd.size(), 11u);
    EXPECT_NEAR(Fd[1], F1, 1e-14);
    EXPECT_NEAR(Fd[3], -0.5 * F1 * F1 * F1, 1e-12 * std::abs(F1 * F1 * F1));
    for (int k = 0; k <= 10; k += 2) EXPECT_LT(std::abs(Fd[k]), 1e-12) << k;
    EXPECT_NEAR(d.F(0.3), 2 * std::atan(F1 * 0.3 / 2), 1e-15);
  }
  EXPECT_THROW(breather_decomposition(0.5, 0.0), PreconditionError);
  EXPECT_THROW(breather_decomposition(-0.5, 1.0), PreconditionError);
}

TEST(Decomposition, ReproducesGamma0) {
  const double a = 0.5;
  const BreatherDecomposition neg = breather_decomposition(a, -1.3, 0.4, -0.2);
  const BreatherDecomposition pos = breather_decomposition(a, 1.3, 0.4, -0.2);
  for (const Pt& s : random_points(100, 13, 1.0, 8.0)) {
    const double g = gamma0_breather(a, 0.4, -0.2, s.t, s.x);
    EXPECT_NEAR(neg.u.value(s.t, s.x), g, 1e-10);
    EXPECT_NEAR(pos.u.value(s.t, s.x), -g, 1e-10);
  }
}

TEST(Decomposition, EnvelopeIsSech) {
  const BreatherDecomposition d = breather_decomposition(0.5, -1.0);
  for (double x : {-2.0, 0.0, 1.5}) EXPECT_NEAR(d.p(x), d.zeta0 / std::cosh(std::sqrt(3.0) * x), 1e-14);
}

TEST(Gardner, Existence) {
  EXPECT_THROW(gardner_profile(GardnerParams{0.1, 0.1, 1.0}), ExistenceError);
  EXPECT_THROW(gardner_breather(GardnerParams{0.2, 0.2, 2.0}, 0, 0), ExistenceError);
  EXPECT_THROW(gardner_profile(GardnerParams{1.0, 1.0, -1.0}), PreconditionError);
  EXPECT_NEAR((GardnerParams{1.0, 1.0, 1.0}).Delta(), 2.0 - 2.0 / 9.0, 1e-15);
}

TEST(Gardner, ResidualAtRandomPoints) {
  for (const auto& p : kGardner) {
    const Profile u = gardner_profile(p);
    for (const Pt& s : random_points(100, 17, 1.0, 5.0)) EXPECT_LT(std::abs(gardner_point_residual(u, p.mu, s.t, s.x)), 1e-8);
  }
}

TEST(Gardner, GridResidualAndControls) {
  for (const auto& p : kGardner) {
    EXPECT_LT(gardner_residual(p, square_grid(-1, 1, -5, 5, 21, 41)).max_abs, 1e-8);
    EXPECT_GT(gardner_residual(gardner_profile(p), 1.1 * p.mu, square_grid(-1, 1, -5, 5, 21, 41)).max_abs, 1e-3);
  }
}

// u itself decays, but the arctan potential does not return to its value at
// -infinity, so the mass is nonzero (the mKdV breather has zero mass).
TEST(Gardner, BoundedWithNonzeroMass) {
  auto mass = [](auto f) {
    const int n = 16000;
    const double a = -40, b = 40, h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
  };
  for (const auto& p : kGardner) {
    double sup = 0.0;
    for (double x = -40; x <= 40; x += 0.1) {
      const double v = gardner_breather(p, 0, x);
      ASSERT_TRUE(std::isfinite(v));
      sup = std::max(sup, std::abs(v));
    }
    EXPECT_LT(sup, 100.0);
    EXPECT_GT(std::abs(mass([&](double x) { return gardner_breather(p, 0, x); })), 0.1);
  }
  EXPECT_LT(std::abs(mass([](double x) { return mkdv_breather(kBreathers[0], 0, x); })), 1e-10);
}

TEST(Profile, TrivialSolutions) {
  EXPECT_EQ(pde_residual(zero_profile(), 3, 1, default_grid(1.0)).max_abs, 0.0);
  EXPECT_EQ(pde_residual(constant_profile(0.7), 3, 1, default_grid(1.0)).max_abs, 0.0);
  EXPECT_EQ(pde_residual(constant_profile(0.7, 2), 5, 2, default_grid(1.0, 2, 5, 5)).max_abs, 0.0);
}

TEST(Profile, LiftedIsFlatInNewDirections) {
  const Profile g = gamma0_profile(0.5);
  const Profile g2 = g.lifted(3);
  EXPECT_EQ(g2.dim(), 3);
  EXPECT_DOUBLE_EQ(g2.value(0.1, {0.4, 7.0, -3.0}), g.value(0.1, 0.4));
  EXPECT_EQ(g2.derivative(0.1, {0.4, 7.0, -3.0}, {0, 1, 0, 0}), 0.0);
  EXPECT_EQ(g2.derivative(0.1, {0.4, 7.0, -3.0}, {1, 0, 2, 0}), 0.0);
  EXPECT_THROW(g2.lifted(2), StructuralError);
}

TEST(Profile, Errors) {
  const Profile g = gamma0_profile(0.5);
  EXPECT_THROW(g.derivative(0, {0.0}, {g.max_order() + 1, 0}), StructuralError);
  EXPECT_THROW(g.derivative(0, {0.0}, {1}), StructuralError);
  EXPECT_THROW(g.derivative(0, {0.0}, {-1, 0}), DomainError);
  EXPECT_THROW(g.value(0, std::vector<double>{0.0, 1.0}), StructuralError);
  EXPECT_THROW(Profile().value(0, 0.0), StructuralError);
  EXPECT_THROW(gamma0_profile(0.0), PreconditionError);
}

TEST(Residual, ArgmaxIsWhereTheMaximumIs) {
  const BreatherDecomposition d = breather_decomposition(0.5, -1.0);
  const Profile bad = ansatz_profile(0.5, -4.0, d.F1, d.zeta0, std::sqrt(3.0));
  const ResidualReport r = pde_residual(bad, 3, 1, default_grid(0.5));
  ASSERT_GT(r.max_abs, 1e-3);
  ASSERT_EQ(r.arg_x.size(), 1u);
  EXPECT_NEAR(std::abs(flow_residual(bad, 3, r.arg_t, r.arg_x[0])), r.max_abs, 1e-10 * r.max_abs);
  EXPECT_LE(r.rms, r.max_abs);
  EXPECT_EQ(r.method, DerivMethod::AD);
}

TEST(Residual, Preconditions) {
  const Profile g = gamma0_profile(0.5);
  EXPECT_THROW(pde_residual(g, 1, 1, default_grid(0.5)), DomainError);
  EXPECT_THROW(pde_residual(g, 3, 2, default_grid(0.5)), StructuralError);
  EXPECT_THROW(gardner_residual(g.lifted(2), 1.0, default_grid(0.5, 2, 3, 3)), StructuralError);
}

TEST(Grid, Validation) {
  GridSpec g = square_grid(0, 1, -1, 1, 3, 3);
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(g.points(), 9u);
  g.nt = 1;
  EXPECT_THROW(g.validate(), DomainError);
  g = square_grid(0, 1, -1, 1, 3, 3);
  g.nx.push_back(3);
  EXPECT_THROW(g.validate(), StructuralError);
  EXPECT_THROW(square_grid(1, 1, -1, 1, 3, 3).validate(), DomainError);
  EXPECT_THROW(square_grid(0, 1, 2, 1, 3, 3).validate(), DomainError);
  EXPECT_THROW(default_grid(-1.0), PreconditionError);
  const GridSpec d = default_grid(0.5);
  EXPECT_DOUBLE_EQ(d.t_hi, gamma0_period(0.5));
  EXPECT_DOUBLE_EQ(d.x[0].second, 10.0);
}

// every catalog profile, every derivative up to third order
TEST(FdCrossCheck, CatalogProfiles) {
  std::vector<Profile> cat = {mkdv_breather_profile(kBreathers[1]), gamma0_profile(0.5, 0.3, -0.4),
                              breather_decomposition(0.5, -1.0, 0.1, 0.2).u, gardner_profile(kGardner[0])};
  const std::vector<std::vector<int>> orders = {{1, 0}, {2, 0}, {3, 0}, {0, 1}, {1, 1}, {0, 2}, {2, 1}};
  for (const Profile& u : cat)
    for (const Pt& s : random_points(5, 19, 0.3, 1.5))
      for (const auto& o : orders) {
        const FdReport f = fd_crosscheck(u, s.t, {s.x}, o);
        EXPECT_LT(f.rel_dev, 1e-6) << u.name() << " t=" << s.t << " x=" << s.x << " o=" << o[0] << "," << o[1];
        EXPECT_EQ(f.raw.size(), 3u);
      }
}

TEST(FdCrossCheck, Errors) {
  const Profile g = gamma0_profile(0.5);
  EXPECT_THROW(fd_crosscheck(g, 0, {0.0}, {1, 0}, {0.1, 0.05}), DomainError);
  EXPECT_THROW(fd_crosscheck(g, 0, {0.0}, {1, 0}, {0.1, -0.05, 0.01}), DomainError);
  EXPECT_THROW(fd_crosscheck(g, 0, {0.0}, {1}), StructuralError);
}
