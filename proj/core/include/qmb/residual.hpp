#pragma once

#include "qmb/profiles.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qmb {

struct GridSpec {
  double t_lo = 0.0, t_hi = 1.0;
  std::vector<std::pair<double, double>> x;  // one range per space dimension
  int nt = 2;
  std::vector<int> nx;

  int dim() const { return static_cast<int>(x.size()); }
  std::size_t points() const;
  void validate() const;
  std::string describe() const;
};

// t in [0, pi/(32 alpha^3)], x in [-5/alpha, 5/alpha] (sech stays far above denormals there).
GridSpec default_grid(double alpha, int N = 1, int nt = 21, int nx = 41);
GridSpec square_grid(double t_lo, double t_hi, double x_lo, double x_hi, int nt, int nx, int N = 1);

enum class DerivMethod { AD, FD };
std::string to_string(DerivMethod m);

struct ResidualReport {
  double max_abs = 0.0;
  double rms = 0.0;
  double arg_t = 0.0;
  std::vector<double> arg_x;
  DerivMethod method = DerivMethod::AD;
  GridSpec grid;
  std::size_t points = 0;
};

// d_t u + d_1(Lap u + 2 u^q) on the grid, derivatives by forward AD.
ResidualReport pde_residual(const Profile& u, int q, int N, const GridSpec& grid);
// d_t u + d_x(u_xx + u^2 + mu u^3).
ResidualReport gardner_residual(const GardnerParams& params, const GridSpec& grid);
// Same operator for an arbitrary profile and mu (negative controls).
ResidualReport gardner_residual(const Profile& u, double mu, const GridSpec& grid);

struct FdReport {
  double ad = 0.0;
  double fd = 0.0;          // Richardson-extrapolated
  double abs_dev = 0.0;
  double rel_dev = 0.0;     // abs_dev / max(|ad|, 1e-300); 0 when both vanish
  std::vector<double> raw;  // plain central differences, one per step
};

// Central differences on a step ladder, extrapolated in h^2 to h = 0.
// orders are indexed (x1..xN, t).
FdReport fd_crosscheck(const Profile& u, double t, const std::vector<double>& x, const std::vector<int>& orders,
                       const std::vector<double>& h_ladder = {0.01, 0.005, 0.0025});

}  // namespace qmb
