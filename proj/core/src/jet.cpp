#include "qmb/jet.hpp"
#include "qmb/ad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace qmb {

namespace {

constexpr int kMaxVars = 8;
constexpr int kMaxExp = 255;
constexpr std::size_t kMulTableLimit = 1600;

std::string layout_key(const std::vector<std::string>& vars, int order, const std::vector<int>& caps) {
  std::ostringstream os;
  for (const auto& v : vars) os << v << '\x1f';
  os << '|' << order << '|';
  for (int c : caps) os << c << ',';
  return os.str();
}

}  // namespace

std::uint64_t Layout::pack(const int* e, int n) {
  std::uint64_t key = 0;
  for (int i = 0; i < n; ++i) key |= static_cast<std::uint64_t>(e[i]) << (8 * i);
  return key;
}

Layout::Layout(std::vector<std::string> vars, int order, std::vector<int> caps)
    : vars_(std::move(vars)), order_(order), caps_(std::move(caps)) {
  const int n = nvars();
  // enumerate by total degree, then lexicographically, so index 0 is the constant
  std::vector<int> e(n, 0);
  for (int deg = 0; deg <= order_; ++deg) {
    std::fill(e.begin(), e.end(), 0);
    // recursive fill of compositions of deg into n parts respecting caps
    std::vector<int> cur(n, 0);
    auto rec = [&](auto&& self, int v, int left) -> void {
      if (v == n - 1) {
        if (caps_[v] != kNoCap && left > caps_[v]) return;
        cur[v] = left;
        for (int i = 0; i < n; ++i) exps_.push_back(cur[i]);
        degree_.push_back(deg);
        return;
      }
      int hi = left;
      if (caps_[v] != kNoCap) hi = std::min(hi, caps_[v]);
      for (int a = hi; a >= 0; --a) {
        cur[v] = a;
        self(self, v + 1, left - a);
      }
    };
    if (n == 0) {
      if (deg == 0) degree_.push_back(0);
      continue;
    }
    rec(rec, 0, deg);
  }
  for (std::size_t i = 0; i < degree_.size(); ++i) index_.emplace(pack(exps(i), n), static_cast<long>(i));
  if (size() <= kMulTableLimit) {
    mul_.assign(size() * size(), -1);
    std::vector<int> s(n);
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i; j < size(); ++j) {
        if (degree_[i] + degree_[j] > order_) continue;
        for (int v = 0; v < n; ++v) s[v] = exps(i)[v] + exps(j)[v];
        long k = find(s.data());
        mul_[i * size() + j] = static_cast<int>(k);
        mul_[j * size() + i] = static_cast<int>(k);
      }
  }
}

Layout::Ptr Layout::make(std::vector<std::string> vars, int order, std::vector<int> caps) {
  if (order < 0) throw StructuralError("jet order must be >= 0");
  if (static_cast<int>(vars.size()) > kMaxVars) throw StructuralError("too many jet variables");
  if (order > kMaxExp) throw StructuralError("jet order too large");
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j]) throw StructuralError("duplicate jet variable: " + vars[i]);
  if (caps.empty()) caps.assign(vars.size(), kNoCap);
  if (caps.size() != vars.size()) throw StructuralError("caps length does not match variables");
  for (int& c : caps) {
    if (c != kNoCap && c < 0) c = 0;
    if (c >= order) c = kNoCap;
  }

  static std::mutex mu;
  static std::map<std::string, Ptr> cache;
  const std::string key = layout_key(vars, order, caps);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Ptr p(new Layout(std::move(vars), order, std::move(caps)));
  cache.emplace(key, p);
  return p;
}

int Layout::var_index(const std::string& name) const {
  for (int i = 0; i < nvars(); ++i)
    if (vars_[i] == name) return i;
  throw StructuralError("unknown jet variable: " + name);
}

bool Layout::has_var(const std::string& name) const {
  return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
}

long Layout::find(const int* e) const {
  int deg = 0;
  for (int v = 0; v < nvars(); ++v) {
    if (e[v] < 0 || e[v] > kMaxExp) return -1;
    if (caps_[v] != kNoCap && e[v] > caps_[v]) return -1;
    deg += e[v];
  }
  if (deg > order_) return -1;
  auto it = index_.find(pack(e, nvars()));
  return it == index_.end() ? -1 : it->second;
}

long Layout::mul_index(std::size_t i, std::size_t j) const {
  if (!mul_.empty()) return mul_[i * size() + j];
  if (degree_[i] + degree_[j] > order_) return -1;
  int s[kMaxVars];
  for (int v = 0; v < nvars(); ++v) s[v] = exps(i)[v] + exps(j)[v];
  return find(s);
}

Layout::Ptr Layout::lowered(int v, int k) const {
  std::vector<int> caps = caps_;
  if (caps[v] != kNoCap) caps[v] = std::max(0, caps[v] - k);
  return make(vars_, order_ - k, caps);
}

std::string Layout::describe() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < nvars(); ++i) {
    if (i) os << ',';
    os << vars_[i];
    if (caps_[i] != kNoCap) os << "<=" << caps_[i];
  }
  os << "; D=" << order_ << ')';
  return os.str();
}

const Rat& factorial(int n) {
  static const std::vector<Rat> table = [] {
    std::vector<Rat> t(65);
    t[0] = 1;
    for (int i = 1; i <= 64; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0) throw DomainError("factorial of a negative number");
  if (n <= 64) return table[n];
  thread_local Rat big;
  mpz_class z;
  mpz_fac_ui(z.get_mpz_t(), static_cast<unsigned long>(n));
  big = Rat(z);
  return big;
}

Rat binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return Rat(0);
  mpz_class z;
  mpz_bin_uiui(z.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rat(z);
}

namespace {

// (-1)^((n-1)/2) for odd n, 0 for even n: n-th derivative of sin at 0.
int sin_deriv_at_zero(int n) {
  if (n % 2 == 0) return 0;
  return ((n - 1) / 2) % 2 == 0 ? 1 : -1;
}

}  // namespace

MJet<Rat> sin_affine_jet(const Rat& alpha, const Rat& m, Phase phase, const LayoutPtr& layout,
                         const std::string& x1_name, const std::string& t_name) {
  if (is_zero(alpha)) throw DegenerateError("sin_affine_jet: alpha = 0");
  const int ix = layout->var_index(x1_name);
  const int it = layout->var_index(t_name);
  const Rat kx = 2 * alpha;
  const Rat kt = 2 * alpha * m;
  const int sign = phase == Phase::Zero ? 1 : -1;
  std::vector<Rat> dense(layout->size());
  for (std::size_t i = 0; i < layout->size(); ++i) {
    const int* e = layout->exps(i);
    bool other = false;
    for (int v = 0; v < layout->nvars(); ++v)
      if (v != ix && v != it && e[v] != 0) other = true;
    if (other) continue;
    const int a = e[ix], b = e[it];
    int d = sin_deriv_at_zero(a + b) * sign;
    if (d == 0) continue;
    dense[i] = Rat(d) * rat_pow(kx, a) * rat_pow(kt, b) / (factorial(a) * factorial(b));
  }
  return MJet<Rat>::from_dense(layout, dense);
}

MJet<Rat> sin_affine_jet(const Rat& alpha, const Rat& m, Phase phase, int order) {
  return sin_affine_jet(alpha, m, phase, Layout::make({"x1", "t"}, order));
}

MJet<double> sin_affine_jet(double alpha, double m, double theta0, const LayoutPtr& layout,
                            const std::string& x1_name, const std::string& t_name) {
  if (alpha == 0.0) throw DegenerateError("sin_affine_jet: alpha = 0");
  const int ix = layout->var_index(x1_name);
  const int it = layout->var_index(t_name);
  const double kx = 2 * alpha;
  const double kt = 2 * alpha * m;
  std::vector<double> dense(layout->size(), 0.0);
  for (std::size_t i = 0; i < layout->size(); ++i) {
    const int* e = layout->exps(i);
    bool other = false;
    for (int v = 0; v < layout->nvars(); ++v)
      if (v != ix && v != it && e[v] != 0) other = true;
    if (other) continue;
    const int a = e[ix], b = e[it];
    double d = std::sin(theta0 + (a + b) * M_PI / 2);
    dense[i] = d * std::pow(kx, a) * std::pow(kt, b) / (to_double(factorial(a)) * to_double(factorial(b)));
  }
  return MJet<double>::from_dense(layout, dense);
}

std::string to_string(const MJet<Rat>& a) {
  if (a.is_zero_jet()) return "0";
  std::ostringstream os;
  const Layout& L = *a.layout();
  bool first = true;
  for (const auto& [i, c] : a.terms()) {
    std::string cs = to_string(c);
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << '-';
    first = false;
    Rat ac = abs(c);
    bool unit = ac == 1;
    bool any = false;
    if (!unit || L.degree(i) == 0) {
      os << to_string(ac);
      any = true;
    }
    for (int v = 0; v < L.nvars(); ++v) {
      int e = L.exps(i)[v];
      if (e == 0) continue;
      if (any) os << '*';
      os << L.vars()[v];
      if (e > 1) os << '^' << e;
      any = true;
    }
  }
  return os.str();
}

// ---- double-precision elementary functions on jets ----

MJet<double> apply_taylor(const MJet<double>& g, const std::vector<double>& coeffs) {
  const double c = g.constant_term();
  MJet<double> h = add_constant(g, -c);
  const int D = g.layout()->order();
  std::vector<double> cf(coeffs);
  cf.resize(static_cast<std::size_t>(D) + 1, 0.0);
  return mjet_compose(UJet<double>(cf), h);
}

namespace {

std::vector<double> trig_coeffs(double phase, int D) {
  std::vector<double> c(static_cast<std::size_t>(D) + 1);
  double f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k) f *= k;
    c[k] = std::sin(phase + k * M_PI / 2) / f;
  }
  return c;
}

}  // namespace

MJet<double> jet_sin(const MJet<double>& g) {
  return apply_taylor(g, trig_coeffs(g.constant_term(), g.layout()->order()));
}

MJet<double> jet_cos(const MJet<double>& g) {
  return apply_taylor(g, trig_coeffs(g.constant_term() + M_PI / 2, g.layout()->order()));
}

MJet<double> jet_exp(const MJet<double>& g) {
  const int D = g.layout()->order();
  std::vector<double> c(static_cast<std::size_t>(D) + 1);
  double e = std::exp(g.constant_term()), f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k) f *= k;
    c[k] = e / f;
  }
  return apply_taylor(g, c);
}

MJet<double> jet_cosh(const MJet<double>& g) {
  const int D = g.layout()->order();
  const double x = g.constant_term();
  std::vector<double> c(static_cast<std::size_t>(D) + 1);
  double f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k) f *= k;
    c[k] = (k % 2 == 0 ? std::cosh(x) : std::sinh(x)) / f;
  }
  return apply_taylor(g, c);
}

MJet<double> jet_sinh(const MJet<double>& g) {
  const int D = g.layout()->order();
  const double x = g.constant_term();
  std::vector<double> c(static_cast<std::size_t>(D) + 1);
  double f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k) f *= k;
    c[k] = (k % 2 == 0 ? std::sinh(x) : std::cosh(x)) / f;
  }
  return apply_taylor(g, c);
}

MJet<double> jet_recip(const MJet<double>& g) {
  const double x = g.constant_term();
  if (x == 0.0) throw SingularError("reciprocal of a jet vanishing at the center");
  const int D = g.layout()->order();
  std::vector<double> c(static_cast<std::size_t>(D) + 1);
  double p = 1.0 / x;
  for (int k = 0; k <= D; ++k) {
    c[k] = (k % 2 == 0 ? p : -p);
    p /= x;
  }
  return apply_taylor(g, c);
}

MJet<double> jet_div(const MJet<double>& a, const MJet<double>& b) { return a * jet_recip(b); }

MJet<double> jet_atan(const MJet<double>& g) {
  const int D = g.layout()->order();
  const double x = g.constant_term();
  // atan'(x + h) = 1 / (1 + (x + h)^2); integrate the series term by term
  UJet<double> den(std::vector<double>(static_cast<std::size_t>(D) + 1, 0.0));
  den[0] = 1 + x * x;
  if (D >= 1) den[1] = 2 * x;
  if (D >= 2) den[2] = 1;
  UJet<double> d = den.reciprocal();
  std::vector<double> c(static_cast<std::size_t>(D) + 1, 0.0);
  c[0] = std::atan(x);
  for (int k = 1; k <= D; ++k) c[k] = d[k - 1] / k;
  return apply_taylor(g, c);
}

}  // namespace qmb
