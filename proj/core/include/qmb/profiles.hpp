#pragma once

#include "qmb/jet.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qmb {

// mKdV breather parameters; gamma and delta are always recomputed.
struct BreatherParams {
  double alpha = 1.0;
  double beta = 1.0;
  double shift1 = 0.0;
  double shift2 = 0.0;

  double gamma() const { return 8.0 * beta * (3.0 * alpha * alpha - beta * beta); }
  double delta() const { return 8.0 * alpha * (alpha * alpha - 3.0 * beta * beta); }
  void validate() const;
};

struct GardnerParams {
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 1.0;

  double Delta() const { return alpha * alpha + beta * beta - 2.0 / (9.0 * mu); }
  void validate() const;  // ExistenceError when Delta <= 0
};

// Jet variables of a profile in N space dimensions: x1..xN, t.
std::vector<std::string> profile_vars(int N);
LayoutPtr profile_layout(int N, int order);

// u(t, x) together with its Taylor jets at any point. The jet function gets
// the coordinate jets (x1..xN, t) already centered at the evaluation point.
class Profile {
 public:
  using JetFn = std::function<MJet<double>(const std::vector<MJet<double>>& x, const MJet<double>& t)>;

  Profile() = default;
  Profile(std::string name, int dim, JetFn fn, int max_order = 16);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int max_order() const { return max_order_; }

  double value(double t, const std::vector<double>& x) const;
  double value(double t, double x) const { return value(t, std::vector<double>{x}); }
  // Jet over `layout` (vars x1..xN, t) about (t, x).
  MJet<double> jet(double t, const std::vector<double>& x, const LayoutPtr& layout) const;
  // Mixed partial; orders indexed as (x1..xN, t).
  double derivative(double t, const std::vector<double>& x, const std::vector<int>& orders) const;

  // Same formula in more space dimensions (a line profile depending on x1 only).
  Profile lifted(int N) const;

 private:
  std::string name_;
  int dim_ = 1;
  JetFn fn_;
  int max_order_ = 16;
};

Profile zero_profile(int N = 1);
Profile constant_profile(double c, int N = 1);

double mkdv_breather(const BreatherParams& p, double t, double x);
Profile mkdv_breather_profile(const BreatherParams& p);

// beta = sqrt(3) alpha; carrier 2 alpha (x - 32 alpha^2 t) + shift1.
double gamma0_breather(double alpha, double shift1, double shift2, double t, double x);
Profile gamma0_profile(double alpha, double shift1 = 0.0, double shift2 = 0.0);
inline double gamma0_period(double alpha) { return 3.14159265358979323846 / (32.0 * alpha * alpha * alpha); }

// u = d_1 F(p(x) sin(2 alpha (x + m t) + shift1)) with F(z) = 2 arctan(F1 z / 2),
// p = zeta0 sech(2 sqrt(3) alpha x + shift2). F1 < 0 reproduces gamma0_breather,
// F1 > 0 its negative.
struct BreatherDecomposition {
  double alpha = 1.0;
  double F1 = -1.0;
  double shift1 = 0.0;
  double shift2 = 0.0;
  double m = 0.0;
  double zeta0 = 0.0;
  double F3 = 0.0;
  std::function<double(double)> F;
  std::function<double(double)> p;
  Profile u;  // composed through AD, independent of the closed form

  // F^{(k)}(0), k = 0..order.
  std::vector<double> F_derivatives(int order) const;
};

// The general form d_1 F(p(x) sin(2 alpha (x + m t) + shift1)) with the arctan F and
// sech envelope above, but free m, zeta0 and envelope rate. Used for perturbed controls.
Profile ansatz_profile(double alpha, double m, double F1, double zeta0, double rate, double shift1 = 0.0,
                       double shift2 = 0.0);

BreatherDecomposition breather_decomposition(double alpha, double F1, double shift1 = 0.0, double shift2 = 0.0);

double gardner_breather(const GardnerParams& p, double t, double x);
Profile gardner_profile(const GardnerParams& p);

}  // namespace qmb
