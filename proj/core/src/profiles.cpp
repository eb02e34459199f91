#include "qmb/profiles.hpp"

#include "qmb/ad.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qmb {

namespace {

using J = MJet<double>;

J affine(const J& x, const J& t, double a, double b, double c) {
  return add_constant(x.scaled(a) + t.scaled(b), c);
}

// room for one more x1 derivative
LayoutPtr raised_x1(const LayoutPtr& L) {
  std::vector<int> caps = L->caps();
  if (caps[0] != kNoCap) caps[0] += 1;
  return Layout::make(L->vars(), L->order() + 1, caps);
}

std::vector<J> coordinate_jets(const LayoutPtr& L, int N, double t, const std::vector<double>& x, J& tj) {
  std::vector<J> xs;
  for (int j = 0; j < N; ++j) xs.push_back(J::variable(L, "x" + std::to_string(j + 1), x[j]));
  tj = J::variable(L, "t", t);
  return xs;
}

}  // namespace

void BreatherParams::validate() const {
  if (!(alpha > 0) || !(beta > 0)) throw PreconditionError("breather needs alpha > 0 and beta > 0");
}

void GardnerParams::validate() const {
  if (!(alpha > 0) || !(beta > 0) || !(mu > 0)) throw PreconditionError("Gardner breather needs alpha, beta, mu > 0");
  if (!(Delta() > 0)) {
    std::ostringstream os;
    os << "Gardner breather does not exist: Delta = " << Delta() << " <= 0";
    throw ExistenceError(os.str());
  }
}

std::vector<std::string> profile_vars(int N) {
  if (N < 1) throw StructuralError("profile dimension must be >= 1");
  std::vector<std::string> v;
  for (int j = 1; j <= N; ++j) v.push_back("x" + std::to_string(j));
  v.push_back("t");
  return v;
}

LayoutPtr profile_layout(int N, int order) { return Layout::make(profile_vars(N), order); }

Profile::Profile(std::string name, int dim, JetFn fn, int max_order)
    : name_(std::move(name)), dim_(dim), fn_(std::move(fn)), max_order_(max_order) {
  if (dim < 1) throw StructuralError("profile dimension must be >= 1");
}

MJet<double> Profile::jet(double t, const std::vector<double>& x, const LayoutPtr& layout) const {
  if (!fn_) throw StructuralError("empty profile");
  if (static_cast<int>(x.size()) != dim_) throw StructuralError("profile point has wrong dimension");
  if (layout->vars() != profile_vars(dim_)) throw StructuralError("profile jet layout must be (x1..xN, t)");
  if (layout->order() > max_order_) throw StructuralError("profile " + name_ + ": derivative order unavailable");
  J tj;
  std::vector<J> xs = coordinate_jets(layout, dim_, t, x, tj);
  return mjet_truncate(fn_(xs, tj), layout);
}

double Profile::value(double t, const std::vector<double>& x) const {
  return jet(t, x, profile_layout(dim_, 0)).constant_term();
}

double Profile::derivative(double t, const std::vector<double>& x, const std::vector<int>& orders) const {
  if (static_cast<int>(orders.size()) != dim_ + 1) throw StructuralError("derivative orders must cover (x1..xN, t)");
  for (int o : orders)
    if (o < 0) throw DomainError("negative derivative order");
  const int total = std::accumulate(orders.begin(), orders.end(), 0);
  if (total > max_order_) throw StructuralError("profile " + name_ + ": derivative order unavailable");
  LayoutPtr L = Layout::make(profile_vars(dim_), total, orders);
  return jet(t, x, L).derivative_at_center(orders);
}

Profile Profile::lifted(int N) const {
  if (N < dim_) throw StructuralError("cannot lift a profile to fewer dimensions");
  return Profile(name_, N, fn_, max_order_);
}

Profile zero_profile(int N) {
  return Profile("zero", N, [](const std::vector<J>& x, const J&) { return J(x[0].layout()); });
}

Profile constant_profile(double c, int N) {
  return Profile("constant", N, [c](const std::vector<J>& x, const J&) { return J::constant(x[0].layout(), c); });
}

// -2 d_x arctan(k sin(th)/cosh(ph)) expanded by the quotient rule:
// -2 k (th_x cos th cosh ph - ph_x sin th sinh ph) / (cosh^2 ph + k^2 sin^2 th)
static J arctan_breather_jet(const J& th, const J& ph, double k, double th_x, double ph_x) {
  const J s = jet_sin(th), c = jet_cos(th), ch = jet_cosh(ph), sh = jet_sinh(ph);
  const J num = (c * ch).scaled(th_x) - (s * sh).scaled(ph_x);
  const J den = ch * ch + (s * s).scaled(k * k);
  return (num * jet_recip(den)).scaled(-2.0 * k);
}

Profile mkdv_breather_profile(const BreatherParams& p) {
  p.validate();
  const double a = p.alpha, b = p.beta, g = p.gamma(), d = p.delta(), s1 = p.shift1, s2 = p.shift2;
  return Profile("mkdv_breather", 1, [=](const std::vector<J>& x, const J& t) {
    const J th = affine(x[0], t, 2 * a, d, s1);
    const J ph = affine(x[0], t, 2 * b, g, s2);
    return arctan_breather_jet(th, ph, b / a, 2 * a, 2 * b);
  });
}

double mkdv_breather(const BreatherParams& p, double t, double x) { return mkdv_breather_profile(p).value(t, x); }

Profile gamma0_profile(double alpha, double shift1, double shift2) {
  if (!(alpha > 0)) throw PreconditionError("gamma0 breather needs alpha > 0");
  const double a = alpha, r3 = std::sqrt(3.0);
  return Profile("gamma0_breather", 1, [=](const std::vector<J>& x, const J& t) {
    // 2 alpha (x - 32 alpha^2 t) + shift1
    const J th = affine(x[0], t, 2 * a, -64 * a * a * a, shift1);
    const J ph = affine(x[0], t, 2 * r3 * a, 0.0, shift2);
    return arctan_breather_jet(th, ph, r3, 2 * a, 2 * r3 * a);
  });
}

double gamma0_breather(double alpha, double shift1, double shift2, double t, double x) {
  return gamma0_profile(alpha, shift1, shift2).value(t, x);
}

std::vector<double> BreatherDecomposition::F_derivatives(int order) const {
  LayoutPtr L = Layout::make({"z"}, order);
  const J z = J::variable(L, "z");
  const J Fz = jet_atan(z.scaled(F1 / 2)).scaled(2.0);
  std::vector<double> d;
  for (int k = 0; k <= order; ++k) d.push_back(Fz.derivative_at_center({k}));
  return d;
}

Profile ansatz_profile(double alpha, double m, double F1, double zeta0, double rate, double shift1, double shift2) {
  if (!(alpha > 0)) throw PreconditionError("ansatz profile needs alpha > 0");
  return Profile("ansatz_profile", 1, [=](const std::vector<J>& x, const J& t) {
    // rebuild the coordinates one x1 order higher, then differentiate once
    LayoutPtr R = raised_x1(x[0].layout());
    const J xr = J::variable(R, "x1", x[0].constant_term());
    const J tr = J::variable(R, "t", t.constant_term());
    const J p = jet_recip(jet_cosh(affine(xr, tr, rate, 0.0, shift2))).scaled(zeta0);
    const J s = jet_sin(affine(xr, tr, 2 * alpha, 2 * alpha * m, shift1));
    const J v = jet_atan((p * s).scaled(F1 / 2)).scaled(2.0);
    return mjet_truncate(mjet_partial(v, "x1", 1), x[0].layout());
  });
}

BreatherDecomposition breather_decomposition(double alpha, double F1, double shift1, double shift2) {
  if (!(alpha > 0)) throw PreconditionError("breather_decomposition needs alpha > 0");
  if (F1 == 0.0) throw PreconditionError("breather_decomposition needs F'(0) != 0");
  BreatherDecomposition d;
  d.alpha = alpha;
  d.F1 = F1;
  d.shift1 = shift1;
  d.shift2 = shift2;
  d.m = -32 * alpha * alpha;
  d.zeta0 = 2 * std::sqrt(3.0 / (F1 * F1));
  d.F3 = -0.5 * F1 * F1 * F1;
  const double k = 2 * std::sqrt(3.0) * alpha, z0 = d.zeta0, m = d.m;
  d.F = [F1](double z) { return 2 * std::atan(F1 * z / 2); };
  d.p = [=](double x) { return z0 / std::cosh(k * x + shift2); };
  d.u = ansatz_profile(alpha, m, F1, z0, k, shift1, shift2);
  return d;
}

Profile gardner_profile(const GardnerParams& prm) {
  prm.validate();
  const double a = prm.alpha, b = prm.beta, mu = prm.mu, D = prm.Delta();
  const double rab = std::sqrt(a * a + b * b);
  const double A = b * rab / (a * std::sqrt(D));
  const double B = std::sqrt(2.0) * b / (3 * std::sqrt(mu) * D);
  const double C = std::sqrt(2.0) * b / (3 * std::sqrt(mu) * a * std::sqrt(D) * rab);
  const double K = 2 * std::sqrt(2.0 / mu);
  const double del = a * a - 3 * b * b, gam = 3 * a * a - b * b;
  return Profile("gardner_breather", 1, [=](const std::vector<J>& x, const J& t) {
    const J y1 = affine(x[0], t, a, a * del, 0.0);  // alpha y1
    const J y2 = affine(x[0], t, b, b * gam, 0.0);  // beta y2
    const J s = jet_sin(y1), c = jet_cos(y1), e = jet_exp(y2);
    const J G = s.scaled(A) - e.scaled(B);
    const J Gx = c.scaled(A * a) - e.scaled(B * b);
    const J F = jet_cosh(y2) - (c.scaled(a) - s.scaled(b)).scaled(C);
    const J Fx = jet_sinh(y2).scaled(b) + (s.scaled(a * a) + c.scaled(a * b)).scaled(C);
    // d_x arctan(G/F) = (Gx F - G Fx)/(F^2 + G^2), no branch needed
    const J den = F * F + G * G;
    const double d0 = den.constant_term();
    if (!(d0 > 1e-300)) {
      std::ostringstream os;
      os << "Gardner breather singular: F and G vanish together at (t, x) = (" << t.constant_term() << ", "
         << x[0].constant_term() << ")";
      throw SingularError(os.str());
    }
    return ((Gx * F - G * Fx) * jet_recip(den)).scaled(K);
  });
}

double gardner_breather(const GardnerParams& p, double t, double x) { return gardner_profile(p).value(t, x); }

}  // namespace qmb
