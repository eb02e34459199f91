#include "qmb/residual.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace qmb {

namespace {

double axis(double lo, double hi, int n, int i) { return lo + (hi - lo) * i / (n - 1); }

// Evaluate op at every grid point on a few threads, then reduce in grid order so
// the report does not depend on scheduling.
ResidualReport sweep(const GridSpec& g, const std::function<double(double, const std::vector<double>&)>& op) {
  g.validate();
  const std::size_t n = g.points();
  const int N = g.dim();
  auto point = [&](std::size_t idx, double& t, std::vector<double>& x) {
    x.assign(N, 0.0);
    for (int j = N - 1; j >= 0; --j) {
      int i = static_cast<int>(idx % g.nx[j]);
      idx /= g.nx[j];
      x[j] = axis(g.x[j].first, g.x[j].second, g.nx[j], i);
    }
    t = axis(g.t_lo, g.t_hi, g.nt, static_cast<int>(idx));
  };
  std::vector<double> vals(n);
  const unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(hw);
  for (unsigned w = 0; w < hw; ++w) {
    pool.emplace_back([&, w] {
      try {
        double t;
        std::vector<double> x;
        for (std::size_t i = w; i < n; i += hw) {
          point(i, t, x);
          vals[i] = op(t, x);
        }
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  ResidualReport r;
  r.grid = g;
  r.points = n;
  double ss = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(vals[i]);
    if (std::isnan(a)) throw DivergenceError("residual evaluated to NaN");
    ss += a * a;
    if (a > r.max_abs) {
      r.max_abs = a;
      arg = i;
    }
  }
  r.rms = std::sqrt(ss / static_cast<double>(n));
  point(arg, r.arg_t, r.arg_x);
  return r;
}

}  // namespace

std::size_t GridSpec::points() const {
  std::size_t n = static_cast<std::size_t>(nt);
  for (int c : nx) n *= static_cast<std::size_t>(c);
  return n;
}

void GridSpec::validate() const {
  if (x.empty() || x.size() != nx.size()) throw StructuralError("grid: one x range and count per dimension");
  if (nt < 2) throw DomainError("grid: need at least 2 points per axis");
  for (int c : nx)
    if (c < 2) throw DomainError("grid: need at least 2 points per axis");
  if (!(t_hi > t_lo)) throw DomainError("grid: degenerate t range");
  for (auto& [lo, hi] : x)
    if (!(hi > lo)) throw DomainError("grid: degenerate x range");
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "t[" << t_lo << "," << t_hi << "]x" << nt;
  for (std::size_t j = 0; j < x.size(); ++j) os << " x" << j + 1 << "[" << x[j].first << "," << x[j].second << "]x" << nx[j];
  return os.str();
}

GridSpec default_grid(double alpha, int N, int nt, int nx) {
  if (!(alpha > 0)) throw PreconditionError("default_grid needs alpha > 0");
  GridSpec g;
  g.t_lo = 0.0;
  g.t_hi = gamma0_period(alpha);
  g.nt = nt;
  g.x.assign(N, {-5.0 / alpha, 5.0 / alpha});
  g.nx.assign(N, nx);
  return g;
}

GridSpec square_grid(double t_lo, double t_hi, double x_lo, double x_hi, int nt, int nx, int N) {
  GridSpec g;
  g.t_lo = t_lo;
  g.t_hi = t_hi;
  g.nt = nt;
  g.x.assign(N, {x_lo, x_hi});
  g.nx.assign(N, nx);
  return g;
}

std::string to_string(DerivMethod m) { return m == DerivMethod::AD ? "AD" : "FD"; }

ResidualReport pde_residual(const Profile& u0, int q, int N, const GridSpec& grid) {
  if (q < 2) throw DomainError("pde_residual: q must be >= 2");
  if (grid.dim() != N) throw StructuralError("pde_residual: grid dimension differs from N");
  const Profile u = u0.dim() == N ? u0 : u0.lifted(N);
  // caps: 3 in x1, 2 in the other x_j, 1 in t
  std::vector<int> caps(N + 1, 2);
  caps[0] = 3;
  caps[N] = 1;
  LayoutPtr L = Layout::make(profile_vars(N), 3, caps);
  if (u.max_order() < 3) throw StructuralError("pde_residual: profile lacks third derivatives");
  auto e = [&](int j, int a, int ta) {
    std::vector<int> v(N + 1, 0);
    if (a) v[j] = a;
    v[N] = ta;
    return v;
  };
  return sweep(grid, [&](double t, const std::vector<double>& x) {
    const MJet<double> J = u.jet(t, x, L);
    double r = J.derivative_at_center(e(0, 0, 1)) + J.derivative_at_center(e(0, 3, 0));
    for (int j = 1; j < N; ++j) {
      std::vector<int> v(N + 1, 0);
      v[0] = 1;
      v[j] = 2;
      r += J.derivative_at_center(v);
    }
    const double u0v = J.constant_term(), ux = J.derivative_at_center(e(0, 1, 0));
    r += 2.0 * q * std::pow(u0v, q - 1) * ux;
    return r;
  });
}

ResidualReport gardner_residual(const Profile& u, double mu, const GridSpec& grid) {
  if (grid.dim() != 1 || u.dim() != 1) throw StructuralError("gardner_residual is one dimensional");
  LayoutPtr L = Layout::make(profile_vars(1), 3, {3, 1});
  ResidualReport r = sweep(grid, [&](double t, const std::vector<double>& x) {
    const MJet<double> J = u.jet(t, x, L);
    const double v = J.constant_term(), vx = J.derivative_at_center({1, 0});
    return J.derivative_at_center({0, 1}) + J.derivative_at_center({3, 0}) + 2 * v * vx + 3 * mu * v * v * vx;
  });
  return r;
}

ResidualReport gardner_residual(const GardnerParams& params, const GridSpec& grid) {
  return gardner_residual(gardner_profile(params), params.mu, grid);
}

FdReport fd_crosscheck(const Profile& u, double t, const std::vector<double>& x, const std::vector<int>& orders,
                       const std::vector<double>& h_ladder) {
  if (h_ladder.size() < 3) throw DomainError("fd_crosscheck: need a ladder of at least 3 steps");
  const int N = u.dim();
  if (static_cast<int>(orders.size()) != N + 1) throw StructuralError("fd_crosscheck: orders must cover (x1..xN, t)");
  for (double h : h_ladder)
    if (!(h > 0)) throw DomainError("fd_crosscheck: steps must be positive");

  FdReport rep;
  rep.ad = u.derivative(t, x, orders);

  // tensor product of central stencils: d^n f ~ h^-n sum_k (-1)^k C(n,k) f(x + (n/2 - k) h)
  auto central = [&](double h) {
    std::vector<double> pt(N + 1);
    for (int j = 0; j < N; ++j) pt[j] = x[j];
    pt[N] = t;
    std::function<double(int)> rec = [&](int v) -> double {
      if (v == N + 1) return u.value(pt[N], std::vector<double>(pt.begin(), pt.begin() + N));
      const int n = orders[v];
      if (n == 0) return rec(v + 1);
      const double c0 = pt[v];
      double s = 0.0;
      for (int k = 0; k <= n; ++k) {
        pt[v] = c0 + (0.5 * n - k) * h;
        const double w = binomial(n, k).get_d() * (k % 2 ? -1.0 : 1.0);
        s += w * rec(v + 1);
      }
      pt[v] = c0;
      return s / std::pow(h, n);
    };
    return rec(0);
  };
  for (double h : h_ladder) rep.raw.push_back(central(h));

  // Neville extrapolation in h^2 to zero
  std::vector<double> P(rep.raw);
  const std::size_t m = h_ladder.size();
  for (std::size_t k = 1; k < m; ++k)
    for (std::size_t i = m - 1; i >= k; --i) {
      const double hi = h_ladder[i] * h_ladder[i], hk = h_ladder[i - k] * h_ladder[i - k];
      P[i] = (hk * P[i] - hi * P[i - 1]) / (hk - hi);
      if (i == k) break;
    }
  rep.fd = P[m - 1];
  rep.abs_dev = std::abs(rep.fd - rep.ad);
  if (rep.ad == 0.0 && rep.fd == 0.0)
    rep.rel_dev = 0.0;
  else
    rep.rel_dev = rep.abs_dev / std::max(std::abs(rep.ad), 1e-300);
  return rep;
}

}  // namespace qmb
