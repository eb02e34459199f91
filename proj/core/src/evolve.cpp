#include "qmb/evolve.hpp"

#include "qmb/profiles.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace qmb {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread safe, execution with the new-array API is.
struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

struct PlanCache {
  std::mutex mu;
  std::map<int, Plans> plans;
  ~PlanCache() {
    for (auto& [M, p] : plans) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
    fftw_cleanup();
  }
};

const Plans& plans_for(int M) {
  static PlanCache cache;
  std::lock_guard<std::mutex> lock(cache.mu);
  auto it = cache.plans.find(M);
  if (it != cache.plans.end()) return it->second;
  double* r = fftw_alloc_real(M);
  fftw_complex* c = fftw_alloc_complex(M / 2 + 1);
  Plans p;
  p.r2c = fftw_plan_dft_r2c_1d(M, r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_1d(M, c, r, FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
  fftw_free(r);
  fftw_free(c);
  return cache.plans.emplace(M, p).first->second;
}

void forward(int M, std::vector<double>& in, std::vector<cplx>& out) {
  out.resize(M / 2 + 1);
  fftw_execute_dft_r2c(plans_for(M).r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
}

// scratch is destroyed; out = c2r(in) / M
void backward(int M, const std::vector<cplx>& in, std::vector<cplx>& scratch, std::vector<double>& out) {
  scratch = in;
  out.resize(M);
  fftw_execute_dft_c2r(plans_for(M).c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  for (double& v : out) v /= M;
}

bool power_of_two(int M) { return M > 0 && (M & (M - 1)) == 0; }

double ipow(double x, int q) {
  double r = 1.0;
  for (int i = 0; i < q; ++i) r *= x;
  return r;
}

}  // namespace

SpectralState::SpectralState(double L, int M, std::vector<double> samples, double time)
    : L_(L), M_(M), time_(time), u_(std::move(samples)) {
  if (!(L > 0)) throw PreconditionError("spectral domain length must be positive");
  if (M < 16 || !power_of_two(M)) throw PreconditionError("mode count must be a power of two >= 16");
  if (static_cast<int>(u_.size()) != M) throw StructuralError("sample count differs from mode count");
  for (double v : u_)
    if (!std::isfinite(v)) throw PreconditionError("non-finite initial sample");
  std::vector<double> tmp(u_);
  forward(M_, tmp, uh_);
  for (int j = 0; j <= M_ / 2; ++j)
    if (!kept(j)) uh_[j] = 0.0;
  sync_samples();
}

SpectralState SpectralState::from_function(double L, int M, const std::function<double(double)>& f, double time) {
  if (M < 16 || !power_of_two(M)) throw PreconditionError("mode count must be a power of two >= 16");
  std::vector<double> u(M);
  for (int j = 0; j < M; ++j) u[j] = f(-0.5 * L + j * L / M);
  return SpectralState(L, M, std::move(u), time);
}

double SpectralState::wavenumber(int j) const { return 2.0 * std::numbers::pi * j / L_; }

bool SpectralState::kept(int j) const { return 3 * j <= M_; }

void SpectralState::sync_samples() {
  std::vector<cplx> scratch;
  backward(M_, uh_, scratch, u_);
}

double SpectralState::mass() const { return dx() * uh_[0].real(); }

double SpectralState::l2() const {
  double s = 0.0;
  for (double v : u_) s += v * v;
  return dx() * s;
}

double SpectralState::max_abs() const {
  double m = 0.0;
  for (double v : u_) m = std::max(m, std::abs(v));
  return m;
}

SpectralState SpectralState::reflected() const {
  std::vector<double> r(M_);
  for (int j = 0; j < M_; ++j) r[j] = u_[(M_ - j) % M_];
  return SpectralState(L_, M_, std::move(r), time_);
}

double stability_bound(const SpectralState& s, int q, double coupling) {
  const double kmax = s.wavenumber(s.modes() / 3);
  const double lam = std::abs(coupling) * q * std::pow(s.max_abs(), q - 1) * kmax;
  if (lam == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::sqrt2 / lam;
}

SpectralState step(const SpectralState& s, double dt, int q, double coupling) {
  if (q < 2) throw DomainError("step: q must be >= 2");
  if (!(dt > 0)) throw PreconditionError("step: dt must be positive");
  const double bound = stability_bound(s, q, coupling);
  if (dt > bound) {
    std::ostringstream os;
    os << "step: dt = " << dt << " exceeds the stability bound " << bound;
    throw PreconditionError(os.str());
  }
  const int M = s.M_, H = M / 2 + 1;
  std::vector<cplx> ik(H), E1(H), Eh(H);
  for (int j = 0; j < H; ++j) {
    const double k = s.wavenumber(j);
    ik[j] = s.kept(j) ? cplx(0.0, k) : cplx(0.0);
    E1[j] = std::polar(1.0, k * k * k * dt);
    Eh[j] = std::polar(1.0, k * k * k * dt / 2);
  }
  std::vector<cplx> scratch;
  std::vector<double> r;
  // N(w) = -coupling i k FFT((IFFT w)^q), top third zeroed
  auto nonlinear = [&](const std::vector<cplx>* w, const std::vector<double>* phys, std::vector<cplx>& out) {
    if (phys)
      r = *phys;
    else
      backward(M, *w, scratch, r);
    for (double& v : r) v = ipow(v, q);
    forward(M, r, out);
    for (int j = 0; j < H; ++j) out[j] *= -coupling * ik[j];
  };

  const std::vector<cplx>& u = s.uh_;
  std::vector<cplx> a, b, c, d, w(H);
  nonlinear(nullptr, &s.u_, a);
  for (int j = 0; j < H; ++j) w[j] = Eh[j] * (u[j] + 0.5 * dt * a[j]);
  nonlinear(&w, nullptr, b);
  for (int j = 0; j < H; ++j) w[j] = Eh[j] * u[j] + 0.5 * dt * b[j];
  nonlinear(&w, nullptr, c);
  for (int j = 0; j < H; ++j) w[j] = E1[j] * u[j] + dt * Eh[j] * c[j];
  nonlinear(&w, nullptr, d);

  SpectralState n;
  n.L_ = s.L_;
  n.M_ = M;
  n.time_ = s.time_ + dt;
  n.uh_.resize(H);
  for (int j = 0; j < H; ++j)
    n.uh_[j] = E1[j] * u[j] + dt / 6.0 * (E1[j] * a[j] + 2.0 * Eh[j] * (b[j] + c[j]) + d[j]);
  n.sync_samples();
  for (double v : n.u_)
    if (!std::isfinite(v) || std::abs(v) > 1e6) {
      std::ostringstream os;
      os << "spectral integration diverged at t = " << n.time_;
      throw DivergenceError(os.str());
    }
  return n;
}

namespace {

double deviation(const SpectralState& s, const Profile& exact) {
  double m = 0.0;
  for (int j = 0; j < s.modes(); ++j)
    m = std::max(m, std::abs(s.samples()[j] - exact.value(s.time(), {s.x(j)})));
  return m;
}

Profile datum(double alpha) { return gamma0_profile(alpha, 0.0, 0.0); }

SpectralState initial(const Profile& u, int M, double L) {
  return SpectralState::from_function(L, M, [&](double x) { return u.value(0.0, {x}); });
}

}  // namespace

int default_steps(double alpha, int M, double L, double periods) {
  if (!(periods > 0)) throw PreconditionError("periods must be positive");
  const SpectralState s = initial(datum(alpha), M, L);
  const double T = periods * gamma0_period(alpha);
  return static_cast<int>(std::ceil(T / (0.05 * stability_bound(s, 3))));
}

PersistenceReport breather_persistence(double alpha, int M, double L, int steps, const EvolveOptions& opt) {
  if (!(alpha > 0)) throw PreconditionError("breather_persistence needs alpha > 0");
  if (steps < 1) throw PreconditionError("breather_persistence needs at least one step");
  if (!(opt.periods > 0)) throw PreconditionError("periods must be positive");
  const Profile u = datum(alpha);
  PersistenceReport rep;
  rep.alpha = alpha;
  rep.L = L;
  rep.M = M;
  rep.steps = steps;
  rep.T = opt.periods * gamma0_period(alpha);
  rep.dt = rep.T / steps;
  // the envelope does not move, so a few times per period cover the edge
  for (int i = 0; i <= 16; ++i) {
    const double t = gamma0_period(alpha) * i / 16;
    rep.tail = std::max({rep.tail, std::abs(u.value(t, {-0.5 * L})), std::abs(u.value(t, {0.5 * L}))});
  }
  if (!(rep.tail < opt.tail_tolerance)) {
    std::ostringstream os;
    os << "domain too short: breather tail " << rep.tail << " at x = +-L/2 exceeds " << opt.tail_tolerance;
    throw PreconditionError(os.str());
  }

  SpectralState s = initial(u, M, L);
  const double mass0 = s.mass(), l20 = s.l2();
  auto record = [&] { rep.series.push_back({s.time(), deviation(s, u), s.mass(), s.l2()}); };
  if (opt.record_every > 0) record();
  for (int n = 1; n <= steps; ++n) {
    s = step(s, rep.dt, 3);
    if (opt.record_every > 0 && (n % opt.record_every == 0 || n == steps)) record();
  }
  rep.max_deviation = deviation(s, u);
  rep.l2_drift = std::abs(s.l2() - l20) / l20;
  rep.mass_drift = std::abs(s.mass() - mass0);
  return rep;
}

ReversalReport time_reversal(double alpha, int M, double L, int steps_half) {
  if (steps_half < 1) throw PreconditionError("time_reversal needs at least one step");
  const Profile u = datum(alpha);
  const SpectralState s0 = initial(u, M, L);
  const double dt = 0.5 * gamma0_period(alpha) / steps_half;
  SpectralState s = s0;
  for (int n = 0; n < steps_half; ++n) s = step(s, dt, 3);
  // u(-t, -x) solves the same equation
  s = s.reflected();
  for (int n = 0; n < steps_half; ++n) s = step(s, dt, 3);
  s = s.reflected();
  ReversalReport rep;
  rep.steps = steps_half;
  for (int j = 0; j < M; ++j) rep.max_deviation = std::max(rep.max_deviation, std::abs(s.samples()[j] - s0.samples()[j]));
  return rep;
}

HalvingReport dt_halving(double alpha, int M, double L, int steps0, int levels) {
  if (levels < 2) throw PreconditionError("dt_halving needs at least two levels");
  HalvingReport rep;
  for (int i = 0, n = steps0; i < levels; ++i, n *= 2) {
    rep.steps.push_back(n);
    rep.deviation.push_back(breather_persistence(alpha, M, L, n).max_deviation);
    if (i > 0) rep.ratio.push_back(rep.deviation[i - 1] / rep.deviation[i]);
  }
  return rep;
}

}  // namespace qmb
