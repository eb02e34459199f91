#pragma once

#include "qmb/errors.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace qmb {

// Periodic samples u(x_j), x_j = -L/2 + j L/M. The r2c spectrum is the evolving
// quantity; u is kept in sync with it after every step.
class SpectralState {
 public:
  SpectralState(double L, int M, std::vector<double> samples, double time = 0.0);
  static SpectralState from_function(double L, int M, const std::function<double(double)>& f, double time = 0.0);

  double length() const { return L_; }
  int modes() const { return M_; }
  double time() const { return time_; }
  double dx() const { return L_ / M_; }
  double x(int j) const { return -0.5 * L_ + j * dx(); }
  const std::vector<double>& samples() const { return u_; }
  const std::vector<std::complex<double>>& spectrum() const { return uh_; }  // unnormalized, M/2 + 1 entries
  double wavenumber(int j) const;
  bool kept(int j) const;  // 2/3 rule: |j| <= M/3

  double mass() const;  // integral of u, from the zero mode
  double l2() const;    // integral of u^2 (Parseval, dealiased spectrum)
  double max_abs() const;

  // u(t, x) -> u(t, -x) on the grid, j -> (M - j) mod M
  SpectralState reflected() const;

 private:
  friend SpectralState step(const SpectralState&, double, int, double);
  SpectralState() = default;
  void sync_samples();

  double L_ = 0.0;
  int M_ = 0;
  double time_ = 0.0;
  std::vector<double> u_;
  std::vector<std::complex<double>> uh_;
};

// RK4 on the imaginary axis is stable for |lambda dt| < 2 sqrt(2); lambda is bounded by
// coupling q max|u|^{q-1} k_max with k_max the largest kept wavenumber.
double stability_bound(const SpectralState& s, int q, double coupling = 2.0);

// One integrating-factor RK4 (Lawson) step of u_t + (u_xx + coupling u^q)_x = 0.
// The Airy part is exact in transform space; coupling = 0 leaves only it.
SpectralState step(const SpectralState& s, double dt, int q, double coupling = 2.0);

struct EvolveSample {
  double t = 0.0;
  double deviation = 0.0;  // max |u - closed form| on the grid
  double mass = 0.0;
  double l2 = 0.0;
};

struct PersistenceReport {
  double alpha = 0.0, L = 0.0;
  int M = 0;
  int steps = 0;
  double T = 0.0, dt = 0.0;
  double tail = 0.0;           // |closed form| at the domain edge
  double max_deviation = 0.0;  // at t = T
  double l2_drift = 0.0;       // relative
  double mass_drift = 0.0;     // absolute
  std::vector<EvolveSample> series;
};

struct EvolveOptions {
  double tail_tolerance = 1e-12;
  int record_every = 0;  // 0: no time series
  double periods = 1.0;
};

// Steps covering `periods` temporal periods at 0.05 of the stability bound of the datum
// (0.1 leaves the L2 drift within a factor 1.3 of 1e-8).
int default_steps(double alpha, int M, double L, double periods = 1.0);

// gamma0 breather datum integrated over `periods` temporal periods and compared with
// the closed form at the final time.
PersistenceReport breather_persistence(double alpha, int M, double L, int steps, const EvolveOptions& opt = {});

struct ReversalReport {
  double max_deviation = 0.0;  // datum vs forward T/2, reflect, forward T/2, reflect
  int steps = 0;
};

ReversalReport time_reversal(double alpha, int M, double L, int steps_half);

struct HalvingReport {
  std::vector<int> steps;
  std::vector<double> deviation;
  std::vector<double> ratio;  // deviation[i-1] / deviation[i]
};

HalvingReport dt_halving(double alpha, int M, double L, int steps0, int levels);

}  // namespace qmb
