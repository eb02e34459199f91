#include "qmb/reduced.hpp"

#include "qmb/ad.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <sstream>

namespace qmb {

namespace {

Rat two_pow(long e) { return rat_pow(Rat(2), e); }

void require_alpha(const Rat& alpha, const char* who) {
  if (sgn(alpha) <= 0) throw PreconditionError(std::string(who) + ": needs alpha > 0");
}

}  // namespace

// ---- q = 3 parameters and the sech envelope ----

Q3Parameters derive_q3_parameters(const Rat& alpha, const Rat& F1) {
  require_alpha(alpha, "derive_q3_parameters");
  if (is_zero(F1)) throw DegenerateError("derive_q3_parameters: F'(0) = 0 gives only the trivial solution");
  // Lcq with Lap_c p = 0: the p coefficient is affine in m, the p^3 one
  // (p^3 and p^q merge at q = 3) is affine in F3
  auto lcq = [&](const Rat& m, const Rat& F3) { return printed_elliptic_system(3, alpha, m, F1, F3).Lcq; };
  const Rat cp0 = lcq(0, 0).p1, cp1 = lcq(1, 0).p1;
  Q3Parameters r;
  r.m = -cp0 / (cp1 - cp0);
  const EllipticForm a = lcq(r.m, 0), b = lcq(r.m, 1);
  const Rat c30 = a.p3 + a.pq, c31 = b.p3 + b.pq;
  r.F3 = -c30 / (c31 - c30);
  return r;
}

SechResidual sech_residual(const EllipticForm& f, int q, const Rat& zeta0_sq, const Rat& k_sq) {
  if (q % 2 == 0 || q < 3) throw DomainError("sech_residual: q must be odd and >= 3");
  // divided by zeta0: d11 k^2 (S - 2 S^3) + p1 S + p3 zeta0^2 S^3 + pq zeta0^{q-1} S^q
  SechResidual r;
  r.c_sech = f.d11 * k_sq + f.p1;
  r.c_sech3 = -2 * f.d11 * k_sq + f.p3 * zeta0_sq;
  const Rat cq = f.pq * rat_pow(zeta0_sq, (q - 1) / 2);
  if (q == 3)
    r.c_sech3 += cq;
  else
    r.c_sechq = cq;
  return r;
}

SechReport check_sech_profile(const Rat& alpha, const Rat& F1) {
  SechReport rep;
  const Q3Parameters q3 = derive_q3_parameters(alpha, F1);
  rep.alpha = alpha;
  rep.F1 = F1;
  rep.m = q3.m;
  rep.F3 = q3.F3;
  rep.zeta0_sq = Rat(12) / (F1 * F1);
  rep.k_sq = 12 * alpha * alpha;
  const EllipticSystem sys = printed_elliptic_system(3, alpha, q3.m, F1, q3.F3);
  rep.L1q = sech_residual(sys.L1q, 3, rep.zeta0_sq, rep.k_sq);
  rep.Lcq = sech_residual(sys.Lcq, 3, rep.zeta0_sq, rep.k_sq);
  rep.lions_lin = sys.L1q.p1 / (sys.L1q.d11 * rep.k_sq);
  rep.lions_cub = (sys.L1q.p3 + sys.L1q.pq) * rep.zeta0_sq / (sys.L1q.d11 * rep.k_sq);

  // numeric cross-check, second derivative by AD rather than the sech identity
  const double z0 = std::sqrt(rep.zeta0_sq.get_d()), k = std::sqrt(rep.k_sq.get_d()), a = alpha.get_d();
  LayoutPtr L = Layout::make({"x"}, 2);
  auto eval = [](const EllipticForm& f, double p, double pxx) {
    return f.d11.get_d() * pxx + f.p1.get_d() * p + (f.p3.get_d() + f.pq.get_d()) * p * p * p;
  };
  for (int i = 0; i < 50; ++i) {
    const double x = -3.0 / a + 6.0 / a * i / 49.0;
    const MJet<double> p = jet_recip(jet_cosh(MJet<double>::variable(L, "x", x).scaled(k))).scaled(z0);
    const double pv = p.constant_term(), pxx = p.derivative_at_center({2});
    rep.numeric_max = std::max({rep.numeric_max, std::abs(eval(sys.L1q, pv, pxx)), std::abs(eval(sys.Lcq, pv, pxx))});
  }
  return rep;
}

// ---- arctan ODE ----

double ArctanSolution::ode_residual(double z) const {
  LayoutPtr L = Layout::make({"z"}, 2);
  const double r3 = std::sqrt(3.0);
  const MJet<double> F = jet_atan(MJet<double>::variable(L, "z", z).scaled(r3 / zeta0)).scaled(c1 / (r3 * zeta0));
  const double F1 = F.derivative_at_center({1}), F2 = F.derivative_at_center({2});
  return (3 * z * z + zeta0 * zeta0) * F2 + 6 * z * F1;
}

ArctanSolution solve_arctan_ode(double zeta0, double F1) {
  if (!(zeta0 > 0)) throw PreconditionError("solve_arctan_ode: needs zeta0 > 0");
  ArctanSolution s;
  s.zeta0 = zeta0;
  s.c1 = F1 * zeta0 * zeta0;
  const double c1 = s.c1, r3 = std::sqrt(3.0);
  // F(0) = 0 fixes c2 = 0
  s.F = [=](double z) { return c1 / (r3 * zeta0) * std::atan(r3 * z / zeta0); };
  for (int i = 0; i <= 100; ++i) {
    const double z = -zeta0 + 2 * zeta0 * i / 100.0;
    s.max_ode_residual = std::max(s.max_ode_residual, std::abs(s.ode_residual(z)));
  }
  return s;
}

// ---- q != 3 ----

IncompatibilityPoly incompatibility_poly(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3) {
  if (q == 3) throw NotApplicableError("incompatibility_poly: q = 3 is the integrable case");
  if (q < 5 || q % 2 == 0) throw DomainError("incompatibility_poly: needs q odd and >= 5");
  require_alpha(alpha, "incompatibility_poly");
  if (is_zero(F1)) throw PreconditionError("incompatibility_poly: needs F'(0) != 0");
  if (is_zero(m)) throw DegenerateError("incompatibility_poly: m = 0");

  // Both relations come straight from the engine: d_t E at the t1 slice and d_1 E,
  // with F2 = F4 = 0. p table: p = P, d_1 p = 1, d_1^3 p = D3, the rest 0.
  auto combo = [&](const Rat& P, const Rat& D3) -> Rat {
    AnsatzContext ctx;
    ctx.N = 1;
    ctx.q = q;
    ctx.alpha = alpha;
    ctx.m = m;
    ctx.F.assign(8, Rat(0));
    ctx.F[1] = F1;
    ctx.F[3] = F3;
    ctx.p = PDerivTable(1);
    for (int a = 0; a <= 6; ++a) ctx.p.set({a}, Rat(0));
    ctx.p.set({0}, P);
    ctx.p.set({1}, Rat(1));
    ctx.p.set({3}, D3);
    ctx.phase = Phase::Zero;
    return 4 * eval_dtk_at_phase(ctx, 1) - m * eval_dx1_at_phase(ctx);
  };
  if (combo(1, 1) != combo(1, 0))
    throw StructuralError("incompatibility_poly: third derivative did not cancel");
  std::vector<Rat> xs, ys;
  for (int i = 1; i <= q; ++i) {
    xs.push_back(Rat(i));
    ys.push_back(combo(Rat(i), 0));
  }
  std::vector<Rat> cP = interpolate(xs, ys);
  IncompatibilityPoly r;
  r.q = q;
  const Rat w = 2 * alpha * m * F1, s1 = alpha * F1;
  for (int k = 0; k < q; ++k) r.coeffs.push_back(cP[k] / w / rat_pow(s1, k));
  r.leading = r.coeffs[q - 1];
  bool all_zero = true;
  for (const Rat& c : r.coeffs)
    if (!is_zero(c)) all_zero = false;
  r.verdict = all_zero ? "compatible" : "incompatible";
  r.printed_constant_matches = r.coeffs[0] == m - 32 * alpha * alpha;
  return r;
}

// ---- even q ----

EvenQSolution even_q_solution(int q, const Rat& alpha, const Rat& F1, const Rat& F2, const Rat& c1, int base_points,
                              std::uint64_t seed) {
  if (q < 2 || q % 2) throw DomainError("even_q_solution: needs q even and >= 2");
  require_alpha(alpha, "even_q_solution");
  if (is_zero(F1)) throw PreconditionError("even_q_solution: F'(0) = 0 gives only the trivial solution");
  if (is_zero(F2)) throw PreconditionError("even_q_solution: F''(0) = 0 with F'(0) != 0 is inconsistent");
  if (q == 2 && is_zero(c1)) throw PreconditionError("even_q_solution: c1 = 0 is the trivial solution");
  EvenQSolution s;
  s.q = q;
  s.alpha = alpha;
  s.F1 = F1;
  s.F2 = F2;
  s.c1 = c1;
  s.K = rat_pow(2 * alpha * F1, q) / (12 * alpha * alpha * F2);
  const double K = s.K.get_d(), c = c1.get_d();
  if (q == 2) {
    s.p = [=](double x) { return c * std::exp(-K * x); };
    s.certificate = "non-decay";
    s.growth_direction = sgn(s.K) > 0 ? -1 : 1;
  } else {
    s.p = [=](double x) {
      const double b = (q - 2) * (K * x - c);
      return b > 0 ? std::pow(b, 1.0 / (2 - q)) : std::nan("");
    };
    s.certificate = "blow-up";
    s.blowup_x = c1 / s.K;
  }

  // exact residual of the jet of the closed form about points where p = r is rational
  const Rat C = two_pow(q - 1) * rat_pow(alpha, q - 2) * rat_pow(F1, q);
  const int D = 5;
  LayoutPtr L = Layout::make({"x1"}, D);
  LayoutPtr Ld = L->lowered(0, 1);
  const MJet<Rat> h = MJet<Rat>::variable(L, "x1");
  RatSampler rng(seed);
  s.residual_exact = true;
  for (int i = 0; i < base_points; ++i) {
    const Rat r = rng.positive();
    std::vector<Rat> cf(D + 1);
    MJet<Rat> p;
    if (q == 2) {
      // r exp(-K h)
      for (int k = 0; k <= D; ++k) cf[k] = r * rat_pow(-s.K, k) / factorial(k);
      p = mjet_compose(UJet<Rat>(cf), h);
    } else {
      // r (1 + u)^{1/(2-q)}, u = (q-2) K h / r^{2-q}
      const Rat a = rat(1, 2 - q);
      Rat b = 1;
      for (int k = 0; k <= D; ++k) {
        cf[k] = r * b;
        b *= Rat(a - k);
        b /= k + 1;
      }
      const Rat w0 = 1 / rat_pow(r, q - 2);
      p = mjet_compose(UJet<Rat>(cf), h.scaled(Rat(q - 2) * s.K / w0));
    }
    const MJet<Rat> pd = mjet_partial(p, "x1", 1);
    const MJet<Rat> pl = mjet_truncate(p, Ld);
    const MJet<Rat> res = (pl * pd).scaled(6 * F2) + mjet_pow(pl, q).scaled(C);
    if (!res.is_zero_jet()) s.residual_exact = false;
    ++s.residual_checks;
  }
  return s;
}

// ---- coefficient tables ----

EllipticCoeffs hop_coefficients(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3, const Rat& F5) {
  if (q % 2 == 0 || q < 3) throw DomainError("hop_coefficients: needs q odd >= 3");
  if (is_zero(F1)) throw PreconditionError("hop_coefficients: needs F'(0) != 0");
  if (is_zero(F3)) throw PreconditionError("hop_coefficients: needs F'''(0) != 0");
  const Rat a2 = alpha * alpha;
  EllipticCoeffs c;
  c.mu1 = two_pow(q) * rat_pow(alpha, q - 1) * rat_pow(F1, q - 1);
  c.mu2 = 12 * a2 * F3 / F1;
  c.mu3 = -12 * a2;
  c.l1 = -m / 3 - 4 * a2;
  c.l2_printed = two_pow(q - 1) * rat_pow(F1, q - 1) * rat_pow(alpha, q - 1) * (1 - Rat(q, 3));
  c.l2 = -c.l2_printed;
  c.l3 = Rat(1 - q) * two_pow(q - 1) * rat_pow(alpha, q - 1) * rat_pow(F1, q) / (3 * F3);
  c.l4 = -2 * a2 * F3 / F1 + 2 * a2 * F5 / (3 * F3);
  c.l5 = Rat(q * (q - 1)) * two_pow(q - 3) * rat_pow(alpha, q - 3) * rat_pow(F1, q) / (3 * F3);
  return c;
}

EllipticCoeffs hop_coefficients(const AnsatzContext& ctx) {
  return hop_coefficients(ctx.q, ctx.alpha, ctx.m, ctx.Fd(1), ctx.Fd(3), ctx.Fd(5));
}

IdentityReport check_hop_against_engine(const AnsatzContext& ctx0) {
  const EllipticCoeffs h = hop_coefficients(ctx0);
  if (is_zero(ctx0.m)) throw PreconditionError("check_hop_against_engine: needs m != 0");
  IdentityReport rep;
  rep.id = "hop_coefficients";
  rep.paper_ref = "elliptic coefficient tables";
  rep.N = ctx0.N;
  rep.q = ctx0.q;
  const int q = ctx0.q;

  const EllipticSystem sys = extract_elliptic_system(ctx0);
  const EllipticForm& e = sys.Lq_engine;
  bool mu_ok = e.d11 == 1 && e.lapc == 1 && e.p1 == h.mu3;
  mu_ok = mu_ok && (q == 3 ? e.p3 + e.pq == h.mu2 + h.mu1 : (e.p3 == h.mu2 && e.pq == h.mu1));
  rep.record(mu_ok, e.str(q), "mu1=" + to_string(h.mu1) + " mu2=" + to_string(h.mu2) + " mu3=" + to_string(h.mu3),
             mu_ok ? "" : "mu table differs from the extracted Lq");

  AnsatzContext ctx = ctx0;
  ctx.phase = Phase::Zero;
  ctx.p.set_dj(1, 2, sec1_solve_d11(ctx));
  const Rat& a = ctx.alpha;
  const Rat engine = eval_dtk_at_phase(ctx, 2) / (48 * ctx.Fd(3) * ctx.m * ctx.m * rat_pow(a, 3));
  const int N = ctx.N;
  const Rat p = ctx.p.at(std::vector<int>(N, 0)), p1 = ctx.p.d1(1);
  Rat gc = 0;
  for (int j = 2; j <= N; ++j) gc += ctx.p.dj(j, 1) * ctx.p.dj(j, 1);
  const Rat table = h.l1 * rat_pow(p, 3) + h.l2 * rat_pow(p, q + 2) + h.l3 * rat_pow(p, q) + h.l4 * rat_pow(p, 5) +
                    p * (gc + 3 * p1 * p1) + h.l5 * rat_pow(p, q - 2) * p1 * p1;
  rep.record(engine == table, to_string(engine), to_string(table),
             engine == table ? "" : "lambda table differs from the engine");
  const Rat printed = table + (h.l2_printed - h.l2) * rat_pow(p, q + 2);
  rep.note("printed_lambda2_matches", engine == printed ? "true" : "false");
  return rep;
}

bool sign_condition(const Rat& F1, const Rat& F3) { return rat_pow(F1, 3) > Rat(-3, 2) * F3; }

// ---- profile ODE ----

double ProfileODE::force(double p) const {
  return c_lin * p + c_cub * p * p * p + (c_q != 0.0 ? c_q * std::pow(p, q) : 0.0);
}

double ProfileODE::potential(double p) const {
  const double p2 = p * p;
  return c_lin * p2 / 2 + c_cub * p2 * p2 / 4 + (c_q != 0.0 ? c_q * std::pow(p, q + 1) / (q + 1) : 0.0);
}

ProfileODE lions_ode() { return ProfileODE{-1.0, 2.0, 0.0, 3}; }

ProfileODE l1q_ode(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3) {
  const EllipticForm f = printed_elliptic_system(q, alpha, m, F1, F3).L1q;
  ProfileODE o;
  o.q = q;
  o.c_lin = to_double(f.p1 / f.d11);
  if (q == 3) {
    o.c_cub = to_double((f.p3 + f.pq) / f.d11);
  } else {
    o.c_cub = to_double(f.p3 / f.d11);
    o.c_q = to_double(f.pq / f.d11);
  }
  return o;
}

ShotProfile shoot_profile(const ProfileODE& ode, double tol, double half_width, int samples) {
  if (!(ode.c_lin < 0)) throw PreconditionError("shoot_profile: c_lin must be negative for a decaying tail");
  if (!(ode.c_cub > 0)) throw PreconditionError("shoot_profile: c_cub must be positive");
  if (samples < 3 || !(half_width > 0)) throw DomainError("shoot_profile: bad sampling request");
  namespace ode_ns = boost::numeric::odeint;
  using State = std::array<double, 2>;
  ShotProfile out;

  // amplitude from U(A) = 0, i.e. U(A)/A^2 = 0
  auto g = [&](double A) { return ode.potential(A) / (A * A); };
  double lo = 1e-8, hi = 1.0;
  int grow = 0;
  while (g(hi) <= 0) {
    lo = hi;
    hi *= 2;
    if (++grow > 60) throw BracketError("shoot_profile: no turning point, the potential never returns to zero");
  }
  boost::uintmax_t iters = 200;
  auto br = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  out.amplitude_energy = 0.5 * (br.first + br.second);

  // start on the zero-energy level deep in the tail and integrate inward;
  // s = X - x, so dp/ds = -p' and dp'/ds = -p'' = force(p)
  const double kappa = std::sqrt(-ode.c_lin);
  const double eps = std::min(1e-10 * out.amplitude_energy, out.amplitude_energy * std::exp(-kappa * (half_width + 4)));
  out.tail_start = eps;
  auto sys = [&](const State& y, State& dy, double) {
    dy[0] = -y[1];
    dy[1] = ode.force(y[0]);
  };
  const State y0{eps, -std::sqrt(std::max(0.0, -2 * ode.potential(eps)))};
  auto stepper = ode_ns::make_dense_output(tol, tol, ode_ns::runge_kutta_dopri5<State>());
  stepper.initialize(y0, 0.0, 1e-3 / kappa);
  const double s_max = 200.0 / kappa + 100.0;
  while (true) {
    auto [t0, t1] = stepper.do_step(sys);
    if (stepper.current_state()[1] >= 0) {
      // refine p' = 0 on the last step with the dense output
      State tmp;
      auto dp = [&](double s) {
        stepper.calc_state(s, tmp);
        return tmp[1];
      };
      boost::uintmax_t it2 = 200;
      if (dp(t0) >= 0) throw BracketError("shoot_profile: turning point lost");
      auto r = boost::math::tools::toms748_solve(dp, t0, t1, boost::math::tools::eps_tolerance<double>(50), it2);
      const double s_star = 0.5 * (r.first + r.second);
      stepper.calc_state(s_star, tmp);
      out.amplitude = tmp[0];
      if (s_star < half_width) throw BracketError("shoot_profile: tail start too close to the center");

      // second pass: sample at s = s* - |xi|
      std::vector<double> xi(samples), times;
      for (int i = 0; i < samples; ++i) xi[i] = -half_width + 2 * half_width * i / (samples - 1);
      times.push_back(0.0);
      for (int i = samples - 1; i >= 0; --i)
        if (xi[i] >= 0) times.push_back(s_star - xi[i]);
      std::vector<State> at;
      State y = y0;
      auto st2 = ode_ns::make_dense_output(tol, tol, ode_ns::runge_kutta_dopri5<State>());
      ode_ns::integrate_times(st2, sys, y, times.begin(), times.end(), 1e-3 / kappa,
                              [&](const State& v, double) { at.push_back(v); });
      // at[0] is the start, at[k] matches times[k]
      std::vector<double> half(times.size() - 1);
      for (std::size_t k = 1; k < times.size(); ++k) {
        half[k - 1] = at[k][0];
        const double en = 0.5 * at[k][1] * at[k][1] + ode.potential(at[k][0]);
        out.max_energy_drift = std::max(out.max_energy_drift, std::abs(en));
      }
      // half is ordered from xi = half_width down to xi = 0
      out.x = xi;
      out.p.resize(samples);
      const std::size_t nh = half.size();
      for (int i = 0; i < samples; ++i) {
        const double ax = std::abs(xi[i]);
        // index in half: position of ax among the non-negative xi, descending
        std::size_t k = 0;
        double best = 1e300;
        for (std::size_t j = 0; j < nh; ++j) {
          const double d = std::abs(s_star - times[j + 1] - ax);
          if (d < best) {
            best = d;
            k = j;
          }
        }
        out.p[i] = half[k];
      }
      return out;
    }
    if (t1 > s_max || !std::isfinite(stepper.current_state()[0]))
      throw BracketError("shoot_profile: no decaying solution found within the bracket");
  }
}

}  // namespace qmb
