#include "cli.hpp"

#include "qmb/profiles.hpp"
#include "qmb/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>

namespace qmb::cli {

namespace {

// "3", "-1/2" or a plain decimal such as "0.25", read exactly
Rat parse_rat(const std::string& s) {
  static const std::regex frac(R"(^[+-]?\d+(/\d+)?$)");
  static const std::regex dec(R"(^([+-]?)(\d*)\.(\d+)$)");
  std::smatch mt;
  if (std::regex_match(s, frac)) {
    Rat r(s[0] == '+' ? s.substr(1) : s, 10);
    if (s.find('/') != std::string::npos && sgn(r.get_den()) == 0) throw CLI::ValidationError("zero denominator");
    r.canonicalize();
    return r;
  }
  if (std::regex_match(s, mt, dec)) {
    const std::string digits = mt[2].str() + mt[3].str();
    Rat r(mpz_class(digits.empty() ? "0" : digits, 10), mpz_class("1" + std::string(mt[3].length(), '0'), 10));
    r.canonicalize();
    return mt[1] == "-" ? Rat(-r) : r;
  }
  throw CLI::ValidationError("not a rational number: " + s);
}

struct Grid {
  int nt = 21, nx = 41;
};

Grid parse_grid(const std::string& s) {
  static const std::regex g(R"(^(\d+)x(\d+)$)");
  std::smatch mt;
  if (!std::regex_match(s, mt, g)) throw CLI::ValidationError("--grid expects NTxNX, e.g. 21x41");
  Grid r{std::stoi(mt[1]), std::stoi(mt[2])};
  if (r.nt < 2 || r.nx < 2) throw CLI::ValidationError("--grid needs at least 2 points per axis");
  return r;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

Profile named_profile(const std::string& name, double alpha, double beta, double mu) {
  if (name == "gamma0") return gamma0_profile(alpha);
  if (name == "mkdv") return mkdv_breather_profile({alpha, beta, 0.0, 0.0});
  if (name == "decomposition") return breather_decomposition(alpha, -1.0).u;
  if (name == "gardner") return gardner_profile({alpha, beta, mu});
  throw CLI::ValidationError("unknown profile '" + name + "' (gamma0, mkdv, decomposition, gardner)");
}

// (t, x, u, u_x, u_xx, u_xxx, u_t) on a tensor grid
std::string profile_csv(const Profile& u, double t0, double t1, int nt, double x0, double x1, int nx) {
  LayoutPtr L = Layout::make(profile_vars(1), 3, {3, 1});
  std::ostringstream os;
  os << "t,x,u,u_x,u_xx,u_xxx,u_t\n";
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) {
      const double t = nt == 1 ? t0 : t0 + (t1 - t0) * i / (nt - 1);
      const double x = nx == 1 ? x0 : x0 + (x1 - x0) * j / (nx - 1);
      const MJet<double> J = u.jet(t, {x}, L);
      os << csv_number(t) << ',' << csv_number(x);
      for (const std::vector<int>& e : std::vector<std::vector<int>>{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}})
        os << ',' << csv_number(J.derivative_at_center(e));
      os << '\n';
    }
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and numerical checks for quasimonochromatic gKdV/ZK breathers", "qmb"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key = value file ([subcommand] sections)");

  SuiteOptions so;
  if (const char* env = std::getenv("QMB_SEED")) {
    try {
      so.seed = std::stoull(env);
    } catch (...) {
      err << "error: QMB_SEED is not an unsigned integer\n";
      return 2;
    }
  }
  std::string report_path;
  bool quiet = false;
  app.add_option("--seed", so.seed, "Seed for randomized identity testing (default: $QMB_SEED or 42)");
  app.add_option("--trials", so.trials, "Random trials per identity")->check(CLI::PositiveNumber);
  app.add_option("--workers", so.workers, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_flag("--timing", so.timing, "Add wall times to the report (breaks byte reproducibility)");
  app.add_option("--report", report_path, "Also write the JSON report to this file");
  app.add_flag("--quiet", quiet, "Do not print the report on stdout");

  auto* bell = app.add_subcommand("bell", "Bell polynomial tables, Faa di Bruno and constant parity laws");
  auto* ids = app.add_subcommand("verify-identities", "Randomized exact checks of the expansion identities");

  auto* vb = app.add_subcommand("verify-breather", "Residuals of the closed-form breathers");
  BreatherSuiteOptions bo;
  std::string grid_s = "21x41", csv_path;
  vb->add_option("--profile", bo.profile, "mkdv | gamma0 | decomposition | gardner | fd | all");
  vb->add_option("--grid", grid_s, "Residual grid NTxNX");
  vb->add_option("--tolerance", bo.tolerance, "Max-abs residual tolerance")->check(CLI::PositiveNumber);
  vb->add_option("--csv", csv_path, "Dump (t, x, u, derivatives) of the gamma0 breather on the grid");

  auto* red = app.add_subcommand("reduce", "Reduced elliptic equations, certificates and parameters");
  std::string q_alpha = "1", q_f1 = "1", q_m, q_f3, q_f2 = "1", q_c1 = "1";
  int q = 3;
  red->add_option("--q", q, "Nonlinearity exponent")->check(CLI::Range(2, 99));
  red->add_option("--alpha", q_alpha, "Carrier parameter alpha (rational)");
  red->add_option("--f1", q_f1, "F'(0) (rational)");
  red->add_option("--m", q_m, "Carrier speed m (default -32 alpha^2)");
  red->add_option("--f3", q_f3, "F'''(0) (default -F1^3/2)");
  red->add_option("--f2", q_f2, "F''(0) for even q");
  red->add_option("--c1", q_c1, "Integration constant for even q");

  auto* ev = app.add_subcommand("evolve", "Spectral integration of the breather datum");
  EvolveSuiteOptions eo;
  std::string series_path;
  int every = 0;
  bool no_halving = false, no_reversal = false;
  ev->add_option("--alpha", eo.alpha, "Breather alpha")->check(CLI::PositiveNumber);
  ev->add_option("--modes", eo.modes, "Fourier modes M (power of two >= 16)");
  ev->add_option("--length", eo.length, "Periodic domain length L")->check(CLI::PositiveNumber);
  ev->add_option("--dt", eo.dt, "Time step (0: 0.05 of the stability bound)")->check(CLI::NonNegativeNumber);
  ev->add_option("--periods", eo.periods, "Temporal periods to integrate")->check(CLI::PositiveNumber);
  ev->add_option("--csv", series_path, "Time series of deviation and invariants");
  ev->add_option("--every", every, "Steps between time series rows (default: about 100 rows)");
  ev->add_flag("--no-halving", no_halving, "Skip the dt halving study");
  ev->add_flag("--no-reversal", no_reversal, "Skip the time reversal check");

  auto* all = app.add_subcommand("report-all", "Every suite at default settings");

  auto* prof = app.add_subcommand("profile", "Closed-form profiles");
  prof->require_subcommand(1);
  auto* peval = prof->add_subcommand("eval", "CSV of (t, x, u, u_x, u_xx, u_xxx, u_t)");
  std::string pname = "gamma0", pout;
  double pa = 0.5, pb = 1.0, pmu = 1.0, t0 = 0.0, t1 = -1.0, x0 = -10.0, x1 = 10.0;
  int pnt = 5, pnx = 201;
  peval->add_option("--name", pname, "gamma0 | mkdv | decomposition | gardner");
  peval->add_option("--alpha", pa, "alpha");
  peval->add_option("--beta", pb, "beta (mkdv, gardner)");
  peval->add_option("--mu", pmu, "mu (gardner)");
  peval->add_option("--t0", t0, "First time");
  peval->add_option("--t1", t1, "Last time (default: one gamma0 period)");
  peval->add_option("--nt", pnt, "Time samples")->check(CLI::PositiveNumber);
  peval->add_option("--x0", x0, "Left end");
  peval->add_option("--x1", x1, "Right end");
  peval->add_option("--nx", pnx, "Space samples")->check(CLI::PositiveNumber);
  peval->add_option("--out", pout, "Output file (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int rc = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return rc == 0 ? 0 : 2;
  }

  try {
    Report rep;
    if (*bell) {
      rep = bell_suite(so);
    } else if (*ids) {
      rep = identity_suite(so);
    } else if (*vb) {
      const Grid g = parse_grid(grid_s);
      bo.nt = g.nt;
      bo.nx = g.nx;
      rep = breather_suite(so, bo);
      if (!csv_path.empty()) {
        const GridSpec d = default_grid(0.5, 1, g.nt, g.nx);
        write_file(csv_path, profile_csv(gamma0_profile(0.5), d.t_lo, d.t_hi, g.nt, d.x[0].first, d.x[0].second, g.nx));
      }
    } else if (*red) {
      ReduceOptions ro;
      ro.q = q;
      ro.alpha = parse_rat(q_alpha);
      ro.F1 = parse_rat(q_f1);
      if (!q_m.empty()) ro.m = parse_rat(q_m);
      if (!q_f3.empty()) ro.F3 = parse_rat(q_f3);
      ro.F2 = parse_rat(q_f2);
      ro.c1 = parse_rat(q_c1);
      rep = reduce_suite(so, ro);
    } else if (*ev) {
      eo.halving = !no_halving;
      eo.reversal = !no_reversal;
      rep = evolve_suite(so, eo);
      if (!series_path.empty()) {
        const double T = eo.periods * gamma0_period(eo.alpha);
        const int steps = eo.dt > 0 ? static_cast<int>(std::ceil(T / eo.dt))
                                    : default_steps(eo.alpha, eo.modes, eo.length, eo.periods);
        EvolveOptions o;
        o.periods = eo.periods;
        o.record_every = every > 0 ? every : std::max(1, steps / 100);
        const PersistenceReport p = breather_persistence(eo.alpha, eo.modes, eo.length, steps, o);
        std::ostringstream os;
        os << "t,deviation,mass,l2\n";
        for (const EvolveSample& s : p.series)
          os << csv_number(s.t) << ',' << csv_number(s.deviation) << ',' << csv_number(s.mass) << ','
             << csv_number(s.l2) << '\n';
        write_file(series_path, os.str());
      }
    } else if (*all) {
      rep = report_all(so);
    } else if (*peval) {
      const Profile u = named_profile(pname, pa, pb, pmu);
      const double tend = t1 >= t0 ? t1 : t0 + gamma0_period(pa);
      const std::string csv = profile_csv(u, t0, tend, pnt, x0, x1, pnx);
      if (pout.empty())
        out << csv;
      else
        write_file(pout, csv);
      return 0;
    }
    const std::string text = rep.dump();
    if (!report_path.empty()) write_file(report_path, text);
    if (!quiet) out << text;
    return rep.all_pass() ? 0 : 1;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {  // precondition, degenerate, existence, not applicable
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    Json j;
    j["tool_version"] = tool_version();
    j["seed"] = so.seed;
    j["error"] = e.what();
    out << j.dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qmb::cli
