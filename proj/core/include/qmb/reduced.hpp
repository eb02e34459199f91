#pragma once

#include "qmb/ansatz.hpp"
#include "qmb/rational.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qmb {

struct Q3Parameters {
  Rat m;
  Rat F3;
};

// Solves the p and p^3 coefficient equations of Lcq with Lap_c p = 0, q = 3.
Q3Parameters derive_q3_parameters(const Rat& alpha, const Rat& F1);

// p = zeta0 sech(k x), k = 2 sqrt(3) alpha, plugged into a form {d11, lapc, p, p^3, p^q}
// with N = 1 (lapc p = 0). Using sech'' = k^2 (sech - 2 sech^3) the residual is
// zeta0 (c_sech sech + c_sech3 sech^3 + c_sechq sech^q) with rational c's
// (the sech^q column is folded into sech^3 at q = 3).
struct SechResidual {
  Rat c_sech;
  Rat c_sech3;
  Rat c_sechq;
  bool exact_zero() const { return is_zero(c_sech) && is_zero(c_sech3) && is_zero(c_sechq); }
};

struct SechReport {
  Rat alpha, F1, m, F3;
  Rat zeta0_sq;  // 12 / F1^2
  Rat k_sq;      // 12 alpha^2
  SechResidual L1q, Lcq;
  // L1q rescaled by p = zeta0 ptilde(k x): ptilde'' + lions_lin ptilde + lions_cub ptilde^3 = 0
  Rat lions_lin, lions_cub;
  double numeric_max = 0.0;  // |L1q| and |Lcq| at 50 points, closed-form sech
};

SechResidual sech_residual(const EllipticForm& f, int q, const Rat& zeta0_sq, const Rat& k_sq);
SechReport check_sech_profile(const Rat& alpha, const Rat& F1);

// F(z) = c1/(sqrt(3) zeta0) arctan(sqrt(3) z / zeta0), c1 = F1 zeta0^2 so F'(0) = F1.
struct ArctanSolution {
  double zeta0 = 0.0;
  double c1 = 0.0;
  std::function<double(double)> F;
  double max_ode_residual = 0.0;  // (3 z^2 + zeta0^2) F'' + 6 z F' on [-zeta0, zeta0], F' and F'' by AD
  double ode_residual(double z) const;
};

ArctanSolution solve_arctan_ode(double zeta0, double F1 = 1.0);

struct IncompatibilityPoly {
  int q = 0;
  std::vector<Rat> coeffs;  // in s = alpha F1 p, lowest degree first
  Rat leading;              // coefficient of s^{q-1}
  std::string verdict;      // "incompatible" unless every coefficient vanishes
  bool printed_constant_matches = false;  // constant printed as m - 32 alpha^2
};

// From 4 eqvt_rhs - m x1_identity_rhs, divided by 2 alpha m F1 d_1 p.
IncompatibilityPoly incompatibility_poly(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3);

struct EvenQSolution {
  int q = 0;
  Rat alpha, F1, F2, c1;
  Rat K;  // (2 alpha F1)^q / (12 alpha^2 F2)
  std::function<double(double)> p;
  std::string certificate;  // "blow-up" (q > 2) or "non-decay" (q = 2)
  Rat blowup_x;             // x* = c1 / K, q > 2
  int growth_direction = 0; // q = 2: p grows as x -> growth_direction * infinity
  bool residual_exact = false;
  int residual_checks = 0;
};

// Closed-form solution of 6 F2 p p' + 2^{q-1} alpha^{q-2} F1^q p^q = 0; the residual is
// checked exactly with jets about `base_points` random points.
EvenQSolution even_q_solution(int q, const Rat& alpha, const Rat& F1, const Rat& F2, const Rat& c1,
                              int base_points = 20, std::uint64_t seed = 7);

struct EllipticCoeffs {
  Rat mu1, mu2, mu3;
  Rat l1, l2, l3, l4, l5;
  Rat l2_printed;  // table value, sign differs from the engine for q != 3
};

EllipticCoeffs hop_coefficients(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3, const Rat& F5);
EllipticCoeffs hop_coefficients(const AnsatzContext& ctx);
// Compares the table with the engine: mu's against the extracted Lq, lambdas against
// d_t^2 E / (48 F3 m^2 alpha^3) with d_1^2 p taken on the sec1_rhs = 0 manifold.
IdentityReport check_hop_against_engine(const AnsatzContext& ctx);

// F1^3 > -(3/2) F3
bool sign_condition(const Rat& F1, const Rat& F3);

// 0 = p'' + c_lin p + c_cub p^3 + c_q p^q
struct ProfileODE {
  double c_lin = -1.0;
  double c_cub = 2.0;
  double c_q = 0.0;
  int q = 3;

  double force(double p) const;      // c_lin p + c_cub p^3 + c_q p^q
  double potential(double p) const;  // U with U' = force, U(0) = 0
};

ProfileODE lions_ode();
// L1q at the given parameters, normalized so the d_1^2 p coefficient is 1.
ProfileODE l1q_ode(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3);

struct ShotProfile {
  double amplitude = 0.0;         // p at the turning point of the shot
  double amplitude_energy = 0.0;  // root of U(A) = 0
  double tail_start = 0.0;
  std::vector<double> x, p;       // symmetric samples about the center
  double max_energy_drift = 0.0;  // |p'^2/2 + U(p)| along the samples
};

ShotProfile shoot_profile(const ProfileODE& ode, double tol = 1e-12, double half_width = 10.0, int samples = 201);

}  // namespace qmb
