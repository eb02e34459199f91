#include "qmb/report.hpp"

#include "qmb/ansatz.hpp"
#include "qmb/bell.hpp"
#include "qmb/profiles.hpp"
#include "qmb/reduced.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace qmb {

std::string tool_version() { return "0.1.0"; }

bool Report::all_pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const Case& c) { return c.pass; });
}

void Report::sort_cases() {
  std::stable_sort(cases.begin(), cases.end(), [](const Case& a, const Case& b) { return a.id < b.id; });
}

Json Report::to_json() const {
  Json j;
  j["tool_version"] = tool_version();
  j["seed"] = seed;
  j["suite"] = suite;
  j["cases"] = Json::array();
  for (const Case& c : cases) {
    Json cj;
    cj["id"] = c.id;
    cj["paper_ref"] = c.paper_ref;
    cj["verdict"] = c.pass ? "pass" : "fail";
    cj["detail"] = c.detail;
    j["cases"].push_back(std::move(cj));
  }
  return j;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

std::vector<Case> run_cases(const std::vector<std::function<Case()>>& tasks, int workers, bool timing) {
  std::vector<Case> out(tasks.size());
  std::vector<std::exception_ptr> errs(tasks.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nw = std::max(1u, std::min<unsigned>(workers > 0 ? workers : hw, tasks.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        out[i] = tasks[i]();
        if (timing)
          out[i].detail["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

Json rats(const std::vector<Rat>& v) {
  Json a = Json::array();
  for (const Rat& r : v) a.push_back(to_string(r));
  return a;
}

Json notes_json(const IdentityReport& r) {
  Json n = Json::object();
  for (const auto& [k, v] : r.notes) n[k] = v;
  return n;
}

Case from_identity(const IdentityReport& r, const std::string& id) {
  Case c;
  c.id = id;
  c.paper_ref = r.paper_ref;
  c.pass = r.pass;
  c.detail["N"] = r.N;
  c.detail["q"] = r.q;
  c.detail["trials"] = r.trials;
  if (!r.samples.empty()) c.detail["first_trial"] = {{"lhs", r.samples[0].first}, {"rhs", r.samples[0].second}};
  if (!r.notes.empty()) c.detail["notes"] = notes_json(r);
  if (!r.pass) c.detail["counterexample"] = r.counterexample;
  return c;
}

Json residual_json(const ResidualReport& r) {
  Json j;
  j["max_abs"] = r.max_abs;
  j["rms"] = r.rms;
  j["arg_t"] = r.arg_t;
  j["arg_x"] = r.arg_x;
  j["method"] = to_string(r.method);
  j["grid"] = r.grid.describe();
  j["points"] = r.points;
  return j;
}

// S(n, k) by the triangle recurrence, independent of the index enumeration
Rat stirling2(int n, int k) {
  std::vector<std::vector<Rat>> S(n + 1, std::vector<Rat>(n + 1, Rat(0)));
  S[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j) S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1];
  return S[n][k];
}

}  // namespace

// ---- bell ----

Report bell_suite(const SuiteOptions& opt) {
  Report rep;
  rep.suite = "bell";
  rep.seed = opt.seed;
  std::vector<std::function<Case()>> tasks;

  tasks.push_back([] {
    Case c{"bell_table", "partial Bell polynomials and their index sequences"};
    Json table = Json::object();
    for (int n = 1; n <= 6; ++n)
      for (int k = 1; k <= n; ++k)
        table["B_{" + std::to_string(n) + "," + std::to_string(k) + "}"] = bell_polynomial_string(n, k);
    c.detail["polynomials"] = table;
    // B_{n,k}(1, ..., 1) counts set partitions
    for (int n = 1; n <= 10; ++n)
      for (int k = 1; k <= n; ++k)
        if (bell_eval(n, k, std::vector<Rat>(n - k + 1, Rat(1))) != stirling2(n, k)) {
          c.pass = false;
          c.detail["mismatch"] = {n, k};
        }
    c.detail["stirling_checked_up_to"] = 10;
    return c;
  });

  tasks.push_back([&opt] {
    Case c{"bell_homogeneity", "degree k homogeneity of B_{n,k}"};
    RatSampler rng(mix_seed(opt.seed, "bell_homogeneity"));
    int checks = 0;
    for (int n = 1; n <= 8; ++n)
      for (int k = 1; k <= n; ++k)
        for (int t = 0; t < opt.trials; ++t) {
          const Rat lam = rng.sample();
          std::vector<Rat> xs(n - k + 1), ys;
          for (Rat& x : xs) x = rng.sample();
          for (const Rat& x : xs) ys.push_back(lam * x);
          ++checks;
          if (bell_eval(n, k, ys) != rat_pow(lam, k) * bell_eval(n, k, xs)) c.pass = false;
        }
    c.detail["checks"] = checks;
    return c;
  });

  tasks.push_back([&opt] {
    Case c{"faa_di_bruno", "Faa di Bruno formula through partial Bell polynomials"};
    RatSampler rng(mix_seed(opt.seed, "faa_di_bruno"));
    const int D = 6;
    LayoutPtr L = Layout::make({"x", "y"}, D);
    int checks = 0;
    for (int t = 0; t < opt.trials; ++t) {
      std::vector<Rat> fc(D + 4);
      for (Rat& v : fc) v = rng.sample();
      UJet<Rat> F(fc);
      MJet<Rat> G(L);
      for (std::size_t i = 1; i < L->size(); ++i) {
        const int* e = L->exps(i);
        G.set({e[0], e[1]}, rng.sample());
      }
      const int ell = static_cast<int>(rng.integer(0, 3));
      UJet<Rat> Fl = F;
      for (int i = 0; i < ell; ++i) Fl = Fl.derivative();
      const MJet<Rat> comp = mjet_compose(Fl, G);
      for (const std::string var : {"x", "y"})
        for (int n = 1; n <= D; ++n) {
          ++checks;
          const Rat lhs = mjet_partial(comp, var, n).constant_term();
          const Rat rhs = faa_di_bruno(F, ell, G, var, n);
          if (lhs != rhs) {
            c.pass = false;
            c.detail["counterexample"] = {{"n", n}, {"ell", ell}, {"var", var}, {"compose", to_string(lhs)},
                                          {"bell_sum", to_string(rhs)}};
          }
        }
    }
    c.detail["checks"] = checks;
    c.detail["max_n"] = D;
    return c;
  });

  tasks.push_back([&opt] {
    Case c{"const_A0_parity", "time derivative Bell constants vanish for n-k odd"};
    RatSampler rng(mix_seed(opt.seed, "const_A0"));
    const Rat a = rng.nonzero(), m = rng.nonzero();
    int checks = 0;
    for (int n = 1; n <= 12; ++n)
      for (int k = 1; k <= n; ++k) {
        const Rat v = const_A0(n, k, a, m);
        ++checks;
        if ((n - k) % 2 == 1 && !is_zero(v)) c.pass = false;
        if (n == k && v != 1) c.pass = false;
      }
    Json grid = Json::object();
    for (int n = 1; n <= 6; ++n)
      for (int k = 1; k <= n; ++k)
        grid[std::to_string(n) + "," + std::to_string(k)] = to_string(const_A0(n, k, a, m));
    c.detail["checks"] = checks;
    c.detail["alpha"] = to_string(a);
    c.detail["m"] = to_string(m);
    c.detail["grid"] = grid;
    return c;
  });

  tasks.push_back([&opt] {
    Case c{"const_A1_vanishing", "product law constants vanish unless a <= h with equal parity"};
    RatSampler rng(mix_seed(opt.seed, "const_A1"));
    const Rat a = rng.nonzero();
    int checks = 0, zeros = 0;
    for (int i = 0; i <= 6; ++i)
      for (int b = 0; b <= 6; ++b)
        for (int h = 0; h <= 6; ++h) {
          ++checks;
          if (i > h || (h - i) % 2 != 0) {
            ++zeros;
            if (!is_zero(const_A1(i, b, h, a))) c.pass = false;
          }
        }
    c.detail["checks"] = checks;
    c.detail["forced_zeros"] = zeros;
    return c;
  });

  tasks.push_back([&opt] {
    Case c{"const_Ah_parity", "mixed derivative Bell constants parity table"};
    RatSampler rng(mix_seed(opt.seed, "const_Ah"));
    const Rat a = rng.nonzero(), m = rng.nonzero();
    int checks = 0, zeros = 0;
    for (int n = 1; n <= 8; ++n)
      for (int k = 1; k <= n; ++k)
        for (int h = 0; h <= 4; ++h) {
          const Rat v = const_Ah(n, k, h, a, m);
          ++checks;
          const bool same = (k - h) % 2 == 0;
          if ((n % 2 == 0 && !same) || (n % 2 == 1 && same)) {
            ++zeros;
            if (!is_zero(v)) c.pass = false;
          }
          if (h == 0 && v != const_A0(n, k, a, m)) c.pass = false;
        }
    c.detail["checks"] = checks;
    c.detail["forced_zeros"] = zeros;
    return c;
  });

  tasks.push_back([&opt] {
    Case c{"poly_C_oracle", "x1 derivative Bell polynomials of p sin at the slice"};
    RatSampler rng(mix_seed(opt.seed, "poly_C"));
    int checks = 0;
    for (int t = 0; t < opt.trials; ++t) {
      const Rat a = rng.nonzero(), m = rng.sample();
      const int D = 6;
      PDerivTable p = PDerivTable::random(1, D, rng);
      LayoutPtr L = Layout::make({"x1", "t"}, D);
      MJet<Rat> pj(L);
      for (int i = 0; i <= D; ++i) pj.set({i, 0}, p.d1(i) / factorial(i));
      const MJet<Rat> G = pj * sin_affine_jet(a, m, Phase::Zero, L);
      for (int n = 1; n <= D; ++n)
        for (int k = 1; k <= n; ++k) {
          std::vector<Rat> xs;
          for (int v = 1; v <= n - k + 1; ++v) xs.push_back(G.derivative_at_center({v, 0}));
          ++checks;
          if (bell_eval(n, k, xs) != poly_C(n, k, p, a) * rat_pow(2 * a, k)) c.pass = false;
        }
    }
    c.detail["checks"] = checks;
    return c;
  });

  rep.cases = run_cases(tasks, opt.workers, opt.timing);
  rep.sort_cases();
  return rep;
}

// ---- identities ----

Report identity_suite(const SuiteOptions& opt) {
  Report rep;
  rep.suite = "verify-identities";
  rep.seed = opt.seed;
  std::vector<std::function<Case()>> tasks;
  for (CheckId id : all_checks())
    for (int N : {1, 2, 3})
      for (int q : {2, 3, 5}) {
        if (!check_applicable(id, N, q)) continue;
        const std::string cid = check_name(id) + "/N=" + std::to_string(N) + "/q=" + std::to_string(q);
        tasks.push_back([=, &opt] { return from_identity(run_check(id, N, q, opt.trials, mix_seed(opt.seed, cid)), cid); });
      }
  for (int N : {1, 2, 3})
    for (int q : {3, 5}) {
      const std::string cid = "hop_coefficients/N=" + std::to_string(N) + "/q=" + std::to_string(q);
      tasks.push_back([=, &opt] {
        RatSampler rng(mix_seed(opt.seed, cid));
        ContextSpec cs;
        cs.N = N;
        cs.q = q;
        cs.f_order = 9;
        cs.even_F_zero = true;
        cs.nonzero_F1_F3 = true;
        IdentityReport total;
        for (int t = 0; t < opt.trials; ++t) {
          AnsatzContext ctx = random_context(cs, rng);
          while (is_zero(ctx.m)) ctx.m = rng.nonzero();
          IdentityReport r = check_hop_against_engine(ctx);
          if (t == 0) total = r;
          else total.merge(r);
        }
        total.trials = opt.trials;
        return from_identity(total, cid);
      });
    }
  rep.cases = run_cases(tasks, opt.workers, opt.timing);
  rep.sort_cases();
  return rep;
}

// ---- breathers ----

std::vector<std::string> breather_profiles() { return {"mkdv", "gamma0", "decomposition", "gardner", "fd"}; }

Report breather_suite(const SuiteOptions& opt, const BreatherSuiteOptions& b) {
  const auto names = breather_profiles();
  if (b.profile != "all" && std::find(names.begin(), names.end(), b.profile) == names.end())
    throw PreconditionError("unknown profile '" + b.profile + "'");
  auto want = [&](const std::string& n) { return b.profile == "all" || b.profile == n; };
  Report rep;
  rep.suite = "verify-breather";
  rep.seed = opt.seed;
  std::vector<std::function<Case()>> tasks;
  const double tol = b.tolerance, floor = b.control_floor;
  const int nt = b.nt, nx = b.nx;

  if (want("mkdv")) {
    const std::vector<BreatherParams> sets = {{1.0, 1.0, 0.0, 0.0}, {0.5, 0.8, 0.3, -0.2}, {1.2, 0.4, -1.0, 0.5}};
    for (std::size_t i = 0; i < sets.size(); ++i)
      tasks.push_back([=] {
        const BreatherParams& p = sets[i];
        Case c{"mkdv_breather/" + std::to_string(i), "mKdV breather closed form"};
        const ResidualReport r = pde_residual(mkdv_breather_profile(p), 3, 1, square_grid(-1, 1, -5, 5, nt, nx));
        c.pass = r.max_abs < tol;
        c.detail["params"] = {{"alpha", p.alpha}, {"beta", p.beta}, {"shift1", p.shift1}, {"shift2", p.shift2}};
        c.detail["residual"] = residual_json(r);
        c.detail["tolerance"] = tol;
        return c;
      });
  }
  if (want("gamma0")) {
    for (double a : {0.5, 1.0})
      for (int N : {1, 2})
        tasks.push_back([=] {
          Case c{"gamma0_breather/alpha=" + std::to_string(a).substr(0, 3) + "/N=" + std::to_string(N),
                 "gamma = 0 breather of the q = 3 flow"};
          const ResidualReport r = pde_residual(gamma0_profile(a), 3, N, default_grid(a, N, nt, N == 1 ? nx : 11));
          c.pass = r.max_abs < tol;
          c.detail["residual"] = residual_json(r);
          c.detail["tolerance"] = tol;
          return c;
        });
  }
  if (want("decomposition")) {
    tasks.push_back([=] {
      Case c{"decomposition", "quasimonochromatic form of the gamma = 0 breather"};
      const double a = 0.5;
      const BreatherDecomposition d = breather_decomposition(a, -1.0);
      const Profile g = gamma0_profile(a);
      const GridSpec grid = default_grid(a, 1, nt, nx);
      double diff = 0.0;
      for (int i = 0; i < grid.nt; ++i)
        for (int j = 0; j < grid.nx[0]; ++j) {
          const double t = grid.t_lo + (grid.t_hi - grid.t_lo) * i / (grid.nt - 1);
          const double x = grid.x[0].first + (grid.x[0].second - grid.x[0].first) * j / (grid.nx[0] - 1);
          diff = std::max(diff, std::abs(d.u.value(t, x) - g.value(t, x)));
        }
      const ResidualReport r = pde_residual(d.u, 3, 1, grid);
      const std::vector<double> Fd = d.F_derivatives(5);
      const bool even_zero = Fd[0] == 0.0 && std::abs(Fd[2]) < 1e-14 && std::abs(Fd[4]) < 1e-14;
      const bool f3 = std::abs(Fd[3] - d.F3) < 1e-12 * std::abs(d.F3);
      c.pass = r.max_abs < tol && diff < tol && even_zero && f3;
      c.detail["m"] = d.m;
      c.detail["zeta0"] = d.zeta0;
      c.detail["F1"] = d.F1;
      c.detail["F3"] = d.F3;
      c.detail["F3_from_jet"] = Fd[3];
      c.detail["max_diff_to_closed_form"] = diff;
      c.detail["residual"] = residual_json(r);
      return c;
    });
    tasks.push_back([=] {
      Case c{"decomposition_control", "ansatz with the wrong carrier speed"};
      const double a = 0.5;
      const BreatherDecomposition d = breather_decomposition(a, -1.0);
      const Profile bad = ansatz_profile(a, -16 * a * a, d.F1, d.zeta0, 2 * std::sqrt(3.0) * a);
      const ResidualReport r = pde_residual(bad, 3, 1, default_grid(a, 1, nt, nx));
      c.pass = r.max_abs > floor;
      c.detail["m"] = -16 * a * a;
      c.detail["residual"] = residual_json(r);
      c.detail["must_exceed"] = floor;
      return c;
    });
  }
  if (want("gardner")) {
    const std::vector<GardnerParams> sets = {{1.0, 1.0, 1.0}, {0.8, 1.2, 2.0}, {1.5, 0.5, 0.7}};
    for (std::size_t i = 0; i < sets.size(); ++i) {
      tasks.push_back([=] {
        const GardnerParams& p = sets[i];
        Case c{"gardner/" + std::to_string(i), "Gardner breather"};
        const ResidualReport r = gardner_residual(p, square_grid(-1, 1, -5, 5, nt, nx));
        c.pass = r.max_abs < tol;
        c.detail["params"] = {{"alpha", p.alpha}, {"beta", p.beta}, {"mu", p.mu}, {"Delta", p.Delta()}};
        c.detail["residual"] = residual_json(r);
        c.detail["tolerance"] = tol;
        return c;
      });
      tasks.push_back([=] {
        const GardnerParams& p = sets[i];
        Case c{"gardner_control/" + std::to_string(i), "Gardner breather against a perturbed cubic coefficient"};
        const ResidualReport r = gardner_residual(gardner_profile(p), 1.1 * p.mu, square_grid(-1, 1, -5, 5, nt, nx));
        c.pass = r.max_abs > floor;
        c.detail["mu_used"] = 1.1 * p.mu;
        c.detail["residual"] = residual_json(r);
        c.detail["must_exceed"] = floor;
        return c;
      });
    }
  }
  if (want("fd")) {
    tasks.push_back([] {
      Case c{"fd_crosscheck", "forward AD against extrapolated central differences"};
      const Profile g = gamma0_profile(0.5, 0.3, -0.4);
      Json rows = Json::array();
      for (const std::vector<int>& o : std::vector<std::vector<int>>{{1, 0}, {2, 0}, {3, 0}, {0, 1}, {1, 1}}) {
        const FdReport f = fd_crosscheck(g, 0.1, {0.3}, o);
        rows.push_back({{"orders", o}, {"ad", f.ad}, {"fd", f.fd}, {"rel_dev", f.rel_dev}});
        if (!(f.rel_dev < 1e-6)) c.pass = false;
      }
      c.detail["point"] = {{"t", 0.1}, {"x", 0.3}};
      c.detail["rows"] = rows;
      c.detail["tolerance"] = 1e-6;
      return c;
    });
  }
  rep.cases = run_cases(tasks, opt.workers, opt.timing);
  rep.sort_cases();
  return rep;
}

// ---- reduction ----

Report reduce_suite(const SuiteOptions& opt, const ReduceOptions& r) {
  const int q = r.q;
  if (q < 2) throw DomainError("reduce: q must be >= 2");
  if (is_zero(r.alpha)) throw DegenerateError("reduce: alpha must be nonzero");
  if (is_zero(r.F1)) throw DegenerateError("reduce: F'(0) must be nonzero");
  Report rep;
  rep.suite = "reduce";
  rep.seed = opt.seed;
  std::vector<std::function<Case()>> tasks;
  const Rat a = r.alpha, F1 = r.F1;
  const Rat m = r.m.value_or(-32 * a * a);
  const Rat F3 = r.F3.value_or(-F1 * F1 * F1 / 2);

  if (q == 3) {
    tasks.push_back([=] {
      Case c{"q3_parameters", "carrier speed and third F derivative for q = 3"};
      const Q3Parameters p = derive_q3_parameters(a, F1);
      c.pass = p.m == -32 * a * a && p.F3 == -F1 * F1 * F1 / 2;
      c.detail["alpha"] = to_string(a);
      c.detail["F1"] = to_string(F1);
      c.detail["m"] = to_string(p.m);
      c.detail["F3"] = to_string(p.F3);
      return c;
    });
    tasks.push_back([=] {
      Case c{"sech_profile", "sech envelope in the reduced elliptic equations"};
      const SechReport s = check_sech_profile(a, F1);
      c.pass = s.L1q.exact_zero() && s.Lcq.exact_zero() && s.numeric_max < 1e-10;
      c.detail["zeta0_sq"] = to_string(s.zeta0_sq);
      c.detail["k_sq"] = to_string(s.k_sq);
      c.detail["L1q"] = rats({s.L1q.c_sech, s.L1q.c_sech3, s.L1q.c_sechq});
      c.detail["Lcq"] = rats({s.Lcq.c_sech, s.Lcq.c_sech3, s.Lcq.c_sechq});
      c.detail["rescaled_ode"] = {{"lin", to_string(s.lions_lin)}, {"cub", to_string(s.lions_cub)}};
      c.detail["numeric_max"] = s.numeric_max;
      return c;
    });
    tasks.push_back([=] {
      Case c{"arctan_ode", "arctan solution of the F equation"};
      const double f1 = to_double(F1), z0 = std::sqrt(12.0) / std::abs(f1);
      const ArctanSolution s = solve_arctan_ode(z0, f1);
      c.pass = s.max_ode_residual < 1e-12;
      c.detail["zeta0"] = z0;
      c.detail["c1"] = s.c1;
      c.detail["max_ode_residual"] = s.max_ode_residual;
      c.detail["tolerance"] = 1e-12;
      return c;
    });
    tasks.push_back([=] {
      Case c{"gamma0_residual", "gamma = 0 breather of the q = 3 flow"};
      const double ad = to_double(a);
      if (!(ad > 0)) {
        c.pass = true;
        c.detail["skipped"] = "needs alpha > 0";
        return c;
      }
      const ResidualReport res = pde_residual(gamma0_profile(ad), 3, 1, default_grid(ad));
      c.pass = res.max_abs < 1e-8;
      c.detail["residual"] = residual_json(res);
      c.detail["tolerance"] = 1e-8;
      return c;
    });
    tasks.push_back([=] {
      Case c{"shooting", "ground state of the rescaled ODE by shooting"};
      const ShotProfile s = shoot_profile(lions_ode());
      double dev = 0.0;
      for (std::size_t i = 0; i < s.x.size(); ++i) dev = std::max(dev, std::abs(s.p[i] - 1.0 / std::cosh(s.x[i])));
      const ShotProfile l = shoot_profile(l1q_ode(3, a, m, F1, F3));
      const double z0 = std::sqrt(12.0) / std::abs(to_double(F1));
      const double rel = std::abs(l.amplitude - z0) / z0;
      c.pass = dev < 1e-8 && rel < 1e-8;
      c.detail["sech_deviation"] = dev;
      c.detail["l1q_amplitude"] = l.amplitude;
      c.detail["zeta0"] = z0;
      c.detail["max_energy_drift"] = std::max(s.max_energy_drift, l.max_energy_drift);
      return c;
    });
  }
  if (q % 2 == 1 && q >= 5) {
    tasks.push_back([=] {
      Case c{"incompatibility", "odd q >= 5 polynomial relation in alpha F1 p"};
      const IncompatibilityPoly P = incompatibility_poly(q, a, m, F1, F3);
      const Rat expect = rat_pow(Rat(2), q + 1) * q;
      c.pass = P.verdict == "incompatible" && P.leading == expect;
      c.detail["verdict"] = P.verdict;
      c.detail["leading"] = to_string(P.leading);
      c.detail["expected_leading"] = to_string(expect);
      c.detail["coefficients"] = rats(P.coeffs);
      c.detail["printed_constant_matches"] = P.printed_constant_matches;
      c.detail["m"] = to_string(m);
      c.detail["F3"] = to_string(F3);
      return c;
    });
  }
  if (q % 2 == 1) {
    tasks.push_back([=] {
      Case c{"sign_condition", "sign condition on F1 and F3"};
      c.pass = true;
      c.detail["F1"] = to_string(F1);
      c.detail["F3"] = to_string(F3);
      c.detail["holds"] = sign_condition(F1, F3);
      return c;
    });
    tasks.push_back([=] {
      Case c{"hop_coefficients", "elliptic coefficient tables"};
      const EllipticCoeffs h = hop_coefficients(q, a, m, F1, F3, Rat(0));
      c.detail["mu"] = rats({h.mu1, h.mu2, h.mu3});
      c.detail["lambda"] = rats({h.l1, h.l2, h.l3, h.l4, h.l5});
      c.detail["lambda2_printed"] = to_string(h.l2_printed);
      c.pass = true;
      return c;
    });
  }
  if (q % 2 == 0) {
    tasks.push_back([=, &opt] {
      Case c{"even_q_certificate", "even q first order envelope equation"};
      const EvenQSolution s = even_q_solution(q, a, F1, r.F2, r.c1, opt.trials, mix_seed(opt.seed, "even_q"));
      c.pass = s.residual_exact && (q == 2 ? s.certificate == "non-decay" : s.certificate == "blow-up");
      c.detail["K"] = to_string(s.K);
      c.detail["certificate"] = s.certificate;
      if (q > 2) c.detail["blowup_x"] = to_string(s.blowup_x);
      else c.detail["growth_direction"] = s.growth_direction;
      c.detail["residual_exact"] = s.residual_exact;
      c.detail["residual_checks"] = s.residual_checks;
      return c;
    });
  }
  rep.cases = run_cases(tasks, opt.workers, opt.timing);
  rep.sort_cases();
  return rep;
}

// ---- evolution ----

Report evolve_suite(const SuiteOptions& opt, const EvolveSuiteOptions& e) {
  Report rep;
  rep.suite = "evolve";
  rep.seed = opt.seed;
  std::vector<std::function<Case()>> tasks;
  const double T = e.periods * gamma0_period(e.alpha);
  const int steps = e.dt > 0 ? static_cast<int>(std::ceil(T / e.dt)) : default_steps(e.alpha, e.modes, e.length, e.periods);

  tasks.push_back([] {
    Case c{"zero_datum", "spectral integrator on the zero field"};
    SpectralState s(40.0, 64, std::vector<double>(64, 0.0));
    for (int i = 0; i < 10; ++i) s = step(s, 0.01, 3);
    c.pass = s.max_abs() == 0.0;
    c.detail["max_abs"] = s.max_abs();
    return c;
  });
  tasks.push_back([] {
    Case c{"airy_phase", "linear flow in transform space"};
    const double L = 2 * std::acos(-1.0);
    SpectralState s = SpectralState::from_function(L, 32, [](double x) { return std::cos(3 * x); });
    for (int i = 0; i < 10; ++i) s = step(s, 0.01, 3, 0.0);
    double err = 0.0;
    for (int j = 0; j < s.modes(); ++j) err = std::max(err, std::abs(s.samples()[j] - std::cos(3 * s.x(j) + 27 * s.time())));
    c.pass = err < 1e-12;
    c.detail["max_error"] = err;
    return c;
  });
  tasks.push_back([=] {
    Case c{"persistence", "temporal period of the gamma = 0 breather"};
    EvolveOptions o;
    o.periods = e.periods;
    const PersistenceReport p = breather_persistence(e.alpha, e.modes, e.length, steps, o);
    c.pass = p.max_deviation < e.deviation_tol && p.l2_drift < e.l2_tol && p.mass_drift < e.mass_tol;
    c.detail = {{"alpha", p.alpha}, {"modes", p.M},          {"length", p.L},
                {"T", p.T},         {"steps", p.steps},      {"dt", p.dt},
                {"tail", p.tail},   {"max_deviation", p.max_deviation}, {"l2_drift", p.l2_drift},
                {"mass_drift", p.mass_drift}};
    c.detail["tolerances"] = {{"deviation", e.deviation_tol}, {"l2", e.l2_tol}, {"mass", e.mass_tol}};
    return c;
  });
  if (e.reversal)
    tasks.push_back([=] {
      Case c{"time_reversal", "reversibility u(t, x) -> u(-t, -x)"};
      const int half = std::max(1, steps / 2);
      const ReversalReport r = time_reversal(e.alpha, e.modes, e.length, half);
      c.pass = r.max_deviation < e.reversal_tol;
      c.detail["steps_each_way"] = r.steps;
      c.detail["max_deviation"] = r.max_deviation;
      c.detail["tolerance"] = e.reversal_tol;
      return c;
    });
  if (e.halving)
    tasks.push_back([=] {
      Case c{"dt_halving", "fourth order convergence in dt"};
      // coarsest level sits just inside the stability bound
      const SpectralState s0 = SpectralState::from_function(
          e.length, e.modes, [&](double x) { return gamma0_breather(e.alpha, 0, 0, 0, x); });
      const int n0 = static_cast<int>(std::ceil(1.6 * T / stability_bound(s0, 3)));
      const HalvingReport h = dt_halving(e.alpha, e.modes, e.length, n0, 3);
      const double floor_dev = 1e-11;
      for (std::size_t i = 0; i < h.ratio.size(); ++i)
        if (h.deviation[i + 1] > floor_dev && !(h.ratio[i] >= 8.0)) c.pass = false;
      c.detail["steps"] = h.steps;
      c.detail["deviation"] = h.deviation;
      c.detail["ratio"] = h.ratio;
      c.detail["min_ratio"] = 8.0;
      return c;
    });
  rep.cases = run_cases(tasks, opt.workers, opt.timing);
  rep.sort_cases();
  return rep;
}

Report report_all(const SuiteOptions& opt) {
  Report all;
  all.suite = "report-all";
  all.seed = opt.seed;
  auto take = [&](const Report& r, const std::string& prefix) {
    for (Case c : r.cases) {
      c.id = prefix + "/" + c.id;
      all.cases.push_back(std::move(c));
    }
  };
  take(bell_suite(opt), "bell");
  take(identity_suite(opt), "identities");
  take(breather_suite(opt, {}), "breather");
  for (int q : {2, 3, 4, 5, 6, 7, 9}) {
    ReduceOptions r;
    r.q = q;
    take(reduce_suite(opt, r), "reduce/q=" + std::to_string(q));
  }
  take(evolve_suite(opt, {}), "evolve");
  all.sort_cases();
  return all;
}

}  // namespace qmb
