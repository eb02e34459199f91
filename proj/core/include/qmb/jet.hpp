#pragma once

#include "qmb/errors.hpp"
#include "qmb/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qmb {

inline constexpr int kDefaultOrder = 8;
inline constexpr int kNoCap = -1;

// Set of admissible exponent multi-indices: total degree <= order and, per
// variable, exponent <= cap (kNoCap means only the total bound applies).
// Layouts are interned, so two jets are compatible iff their layout pointers
// are equal.
class Layout {
 public:
  using Ptr = std::shared_ptr<const Layout>;

  static Ptr make(std::vector<std::string> vars, int order, std::vector<int> caps = {});

  const std::vector<std::string>& vars() const { return vars_; }
  int nvars() const { return static_cast<int>(vars_.size()); }
  int order() const { return order_; }
  const std::vector<int>& caps() const { return caps_; }
  std::size_t size() const { return degree_.size(); }

  int var_index(const std::string& name) const;
  bool has_var(const std::string& name) const;

  const int* exps(std::size_t i) const { return exps_.data() + i * vars_.size(); }
  int degree(std::size_t i) const { return degree_[i]; }

  // -1 if the multi-index is not admissible.
  long find(const int* e) const;
  long find(const std::vector<int>& e) const { return find(e.data()); }

  // Index of the product monomial, -1 if truncated away.
  long mul_index(std::size_t i, std::size_t j) const;

  // Layout after differentiating k times in variable v.
  Ptr lowered(int v, int k) const;

  std::string describe() const;

 private:
  Layout(std::vector<std::string> vars, int order, std::vector<int> caps);
  static std::uint64_t pack(const int* e, int n);

  std::vector<std::string> vars_;
  int order_;
  std::vector<int> caps_;
  std::vector<int> exps_;
  std::vector<int> degree_;
  std::unordered_map<std::uint64_t, long> index_;
  std::vector<int> mul_;  // size()*size() when small enough, else empty
};

using LayoutPtr = Layout::Ptr;

const Rat& factorial(int n);
Rat binomial(int n, int k);

// Truncated univariate series sum c_k z^k, k = 0..order.
template <class S>
class UJet {
 public:
  UJet() : c_(1, from_int<S>(0)) {}
  explicit UJet(int order) : c_(static_cast<std::size_t>(order) + 1, from_int<S>(0)) {
    if (order < 0) throw StructuralError("UJet order must be >= 0");
  }
  explicit UJet(std::vector<S> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw StructuralError("UJet needs at least one coefficient");
  }

  // From derivative values d_k = f^(k)(0), k = 0..order.
  static UJet from_derivatives(const std::vector<S>& d) {
    UJet u(static_cast<int>(d.size()) - 1);
    for (std::size_t k = 0; k < d.size(); ++k) u.c_[k] = d[k] / from_rat<S>(factorial(static_cast<int>(k)));
    return u;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const S& operator[](std::size_t k) const { return c_[k]; }
  S& operator[](std::size_t k) { return c_[k]; }
  const std::vector<S>& coeffs() const { return c_; }

  S derivative_at_zero(int k) const {
    if (k > order()) return from_int<S>(0);
    return c_[k] * from_rat<S>(factorial(k));
  }

  UJet operator+(const UJet& o) const {
    check(o);
    UJet r(*this);
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] += o.c_[k];
    return r;
  }
  UJet operator-(const UJet& o) const {
    check(o);
    UJet r(*this);
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] -= o.c_[k];
    return r;
  }
  UJet operator*(const UJet& o) const {
    check(o);
    UJet r(order());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (is_zero(c_[i])) continue;
      for (std::size_t j = 0; i + j < c_.size(); ++j) r.c_[i + j] += c_[i] * o.c_[j];
    }
    return r;
  }
  UJet scaled(const S& s) const {
    UJet r(*this);
    for (auto& v : r.c_) v *= s;
    return r;
  }

  // d/dz, order drops by one.
  UJet derivative() const {
    if (order() == 0) return UJet(0);
    UJet r(order() - 1);
    for (int k = 1; k <= order(); ++k) r.c_[k - 1] = c_[k] * from_int<S>(k);
    return r;
  }

  // Series of 1/f; requires f(0) != 0.
  UJet reciprocal() const {
    if (is_zero(c_[0])) throw PreconditionError("reciprocal of a series with zero constant term");
    UJet r(order());
    r.c_[0] = from_int<S>(1) / c_[0];
    for (int k = 1; k <= order(); ++k) {
      S acc = from_int<S>(0);
      for (int j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
      r.c_[k] = -acc / c_[0];
    }
    return r;
  }

  UJet pow(int e) const {
    if (e < 0) return reciprocal().pow(-e);
    UJet result(order());
    result.c_[0] = from_int<S>(1);
    UJet base(*this);
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return result;
  }

  // Exact Taylor shift of the truncated polynomial: coefficients of f(c + z).
  UJet shifted(const S& c) const {
    UJet r(order());
    for (int k = 0; k <= order(); ++k) {
      S acc = from_int<S>(0);
      S cp = from_int<S>(1);
      for (int j = k; j <= order(); ++j) {
        acc += c_[j] * from_rat<S>(binomial(j, k)) * cp;
        cp *= c;
      }
      r.c_[k] = acc;
    }
    return r;
  }

  S eval(const S& z) const {
    S acc = from_int<S>(0);
    for (int k = order(); k >= 0; --k) acc = acc * z + c_[k];
    return acc;
  }

  bool operator==(const UJet& o) const { return c_ == o.c_; }

 private:
  void check(const UJet& o) const {
    if (o.order() != order()) throw StructuralError("UJet order mismatch");
  }
  std::vector<S> c_;
};

// Truncated multivariate Taylor series over a Layout. Sparse storage:
// (index, value) pairs sorted by index, zeros never stored.
template <class S>
class MJet {
 public:
  using Term = std::pair<std::uint32_t, S>;

  MJet() = default;
  explicit MJet(LayoutPtr layout) : layout_(std::move(layout)) {}

  static MJet constant(LayoutPtr layout, const S& c) {
    MJet r(std::move(layout));
    if (!is_zero(c)) r.terms_.emplace_back(0u, c);
    return r;
  }

  // center + (variable name).
  static MJet variable(LayoutPtr layout, const std::string& name, const S& center = from_int<S>(0)) {
    MJet r = constant(layout, center);
    std::vector<int> e(layout->nvars(), 0);
    e[layout->var_index(name)] = 1;
    if (layout->find(e) >= 0) r.set(e, from_int<S>(1));  // order 0 keeps only the center
    return r;
  }

  static MJet from_dense(LayoutPtr layout, const std::vector<S>& dense) {
    if (dense.size() != layout->size()) throw StructuralError("dense size does not match layout");
    MJet r(std::move(layout));
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (!is_zero(dense[i])) r.terms_.emplace_back(static_cast<std::uint32_t>(i), dense[i]);
    return r;
  }

  const LayoutPtr& layout() const { return layout_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero_jet() const { return terms_.empty(); }

  S coeff_index(std::size_t idx) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), idx,
                               [](const Term& t, std::size_t i) { return t.first < i; });
    if (it != terms_.end() && it->first == idx) return it->second;
    return from_int<S>(0);
  }

  S coeff(const std::vector<int>& e) const {
    check_arity(e);
    long idx = layout_->find(e);
    if (idx < 0) return from_int<S>(0);
    return coeff_index(static_cast<std::size_t>(idx));
  }

  // Mixed partial derivative at the center: coeff * prod(e_i!).
  S derivative_at_center(const std::vector<int>& e) const {
    S c = coeff(e);
    for (int v : e) c *= from_rat<S>(factorial(v));
    return c;
  }

  S constant_term() const { return coeff_index(0); }

  void set(const std::vector<int>& e, const S& value) {
    check_arity(e);
    long idx = layout_->find(e);
    if (idx < 0) throw StructuralError("multi-index exceeds jet truncation: " + layout_->describe());
    auto it = std::lower_bound(terms_.begin(), terms_.end(), static_cast<std::uint32_t>(idx),
                               [](const Term& t, std::uint32_t i) { return t.first < i; });
    if (it != terms_.end() && it->first == static_cast<std::uint32_t>(idx)) {
      if (is_zero(value))
        terms_.erase(it);
      else
        it->second = value;
    } else if (!is_zero(value)) {
      terms_.insert(it, Term(static_cast<std::uint32_t>(idx), value));
    }
  }

  std::vector<S> dense() const {
    std::vector<S> d(layout_->size(), from_int<S>(0));
    for (const auto& [i, v] : terms_) d[i] = v;
    return d;
  }

  MJet operator-() const {
    MJet r(*this);
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  MJet scaled(const S& s) const {
    if (is_zero(s)) return MJet(layout_);
    MJet r(*this);
    for (auto& t : r.terms_) t.second *= s;
    return r;
  }

  bool operator==(const MJet& o) const {
    check_same(o);
    return terms_ == o.terms_;
  }
  bool operator!=(const MJet& o) const { return !(*this == o); }

  void check_same(const MJet& o) const {
    if (layout_ != o.layout_)
      throw StructuralError("jets over different variables/orders: " + describe_layout(layout_) + " vs " +
                            describe_layout(o.layout_));
  }

  // Internal: replace terms wholesale (must be sorted, zero free).
  void assign_terms(std::vector<Term> t) { terms_ = std::move(t); }

 private:
  static std::string describe_layout(const LayoutPtr& l) { return l ? l->describe() : std::string("<empty>"); }
  void check_arity(const std::vector<int>& e) const {
    if (!layout_ || static_cast<int>(e.size()) != layout_->nvars())
      throw StructuralError("multi-index arity does not match jet variables");
  }

  LayoutPtr layout_;
  std::vector<Term> terms_;
};

template <class S>
MJet<S> mjet_add(const MJet<S>& a, const MJet<S>& b) {
  a.check_same(b);
  std::vector<typename MJet<S>::Term> out;
  out.reserve(a.terms().size() + b.terms().size());
  auto ia = a.terms().begin(), ib = b.terms().begin();
  while (ia != a.terms().end() || ib != b.terms().end()) {
    if (ib == b.terms().end() || (ia != a.terms().end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.terms().end() || ib->first < ia->first) {
      out.push_back(*ib++);
    } else {
      S v = ia->second + ib->second;
      if (!is_zero(v)) out.emplace_back(ia->first, v);
      ++ia;
      ++ib;
    }
  }
  MJet<S> r(a.layout());
  r.assign_terms(std::move(out));
  return r;
}

template <class S>
MJet<S> mjet_sub(const MJet<S>& a, const MJet<S>& b) {
  return mjet_add(a, -b);
}

template <class S>
MJet<S> mjet_mul(const MJet<S>& a, const MJet<S>& b) {
  a.check_same(b);
  const Layout& L = *a.layout();
  std::vector<S> acc(L.size(), from_int<S>(0));
  std::vector<char> touched(L.size(), 0);
  for (const auto& [i, x] : a.terms()) {
    for (const auto& [j, y] : b.terms()) {
      long k = L.mul_index(i, j);
      if (k < 0) continue;
      acc[k] += x * y;
      touched[k] = 1;
    }
  }
  std::vector<typename MJet<S>::Term> out;
  for (std::size_t k = 0; k < acc.size(); ++k)
    if (touched[k] && !is_zero(acc[k])) out.emplace_back(static_cast<std::uint32_t>(k), std::move(acc[k]));
  MJet<S> r(a.layout());
  r.assign_terms(std::move(out));
  return r;
}

template <class S>
MJet<S> operator+(const MJet<S>& a, const MJet<S>& b) { return mjet_add(a, b); }
template <class S>
MJet<S> operator-(const MJet<S>& a, const MJet<S>& b) { return mjet_sub(a, b); }
template <class S>
MJet<S> operator*(const MJet<S>& a, const MJet<S>& b) { return mjet_mul(a, b); }

template <class S>
MJet<S> add_constant(const MJet<S>& a, const S& c) {
  return a + MJet<S>::constant(a.layout(), c);
}

template <class S>
MJet<S> mjet_pow(const MJet<S>& a, int e) {
  if (e < 0) throw DomainError("negative jet power");
  MJet<S> result = MJet<S>::constant(a.layout(), from_int<S>(1));
  MJet<S> base = a;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

// k-fold derivative in `var`; the result lives on the lowered layout.
template <class S>
MJet<S> mjet_partial(const MJet<S>& a, const std::string& var, int k) {
  const Layout& L = *a.layout();
  int v = L.var_index(var);
  if (k < 0) throw DomainError("negative derivative order");
  if (k == 0) return a;
  if (k > L.order()) throw DomainError("derivative order exceeds jet order");
  LayoutPtr out = L.lowered(v, k);
  std::vector<typename MJet<S>::Term> terms;
  std::vector<int> e(L.nvars());
  for (const auto& [i, c] : a.terms()) {
    const int* ei = L.exps(i);
    if (ei[v] < k) continue;
    std::copy(ei, ei + L.nvars(), e.begin());
    e[v] -= k;
    long j = out->find(e);
    if (j < 0) continue;
    Rat f = factorial(ei[v]) / factorial(ei[v] - k);
    terms.emplace_back(static_cast<std::uint32_t>(j), c * from_rat<S>(f));
  }
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  MJet<S> r(out);
  r.assign_terms(std::move(terms));
  return r;
}

// Keep only the monomials admissible in `target` (same variable list).
template <class S>
MJet<S> mjet_truncate(const MJet<S>& a, const LayoutPtr& target) {
  const Layout& L = *a.layout();
  if (L.vars() != target->vars()) throw StructuralError("truncate: variable lists differ");
  if (a.layout() == target) return a;
  // target must be a sub-layout, otherwise missing coefficients would read as 0
  if (target->order() > L.order()) throw StructuralError("truncate: target order exceeds source");
  for (int v = 0; v < L.nvars(); ++v) {
    int cs = L.caps()[v] == kNoCap ? L.order() : L.caps()[v];
    int ct = target->caps()[v] == kNoCap ? target->order() : target->caps()[v];
    if (ct > cs) throw StructuralError("truncate: target cap exceeds source in " + L.vars()[v]);
  }
  std::vector<typename MJet<S>::Term> terms;
  for (const auto& [i, c] : a.terms()) {
    long j = target->find(L.exps(i));
    if (j >= 0) terms.emplace_back(static_cast<std::uint32_t>(j), c);
  }
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  MJet<S> r(target);
  r.assign_terms(std::move(terms));
  return r;
}

// Re-express a jet on a layout with more variables (missing ones get exponent 0).
template <class S>
MJet<S> mjet_embed(const MJet<S>& a, const LayoutPtr& target) {
  const Layout& L = *a.layout();
  std::vector<int> map(L.nvars());
  for (int v = 0; v < L.nvars(); ++v) map[v] = target->var_index(L.vars()[v]);
  std::vector<typename MJet<S>::Term> terms;
  std::vector<int> e(target->nvars());
  for (const auto& [i, c] : a.terms()) {
    std::fill(e.begin(), e.end(), 0);
    const int* ei = L.exps(i);
    for (int v = 0; v < L.nvars(); ++v) e[map[v]] = ei[v];
    long j = target->find(e);
    if (j >= 0) terms.emplace_back(static_cast<std::uint32_t>(j), c);
  }
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  MJet<S> r(target);
  r.assign_terms(std::move(terms));
  return r;
}

// f o g with g(center) = 0, by Horner's scheme in the truncated ring.
template <class S>
MJet<S> mjet_compose(const UJet<S>& f, const MJet<S>& g) {
  if (!is_zero(g.constant_term()))
    throw PreconditionError("compose: inner jet has nonzero constant term");
  int D = g.layout()->order();
  if (f.order() < D) throw StructuralError("compose: outer series order below jet order");
  MJet<S> r = MJet<S>::constant(g.layout(), f[D]);
  for (int k = D - 1; k >= 0; --k) r = add_constant(r * g, f[k]);
  return r;
}

enum class Phase { Zero, Pi };

// Jet of sin(2 alpha (x1 + m t)) about a point where the phase is 0 or pi,
// over (x1, t) with total order D.
MJet<Rat> sin_affine_jet(const Rat& alpha, const Rat& m, Phase phase, int order);
// Same, placed on a caller-supplied layout that contains x1_name and t_name.
MJet<Rat> sin_affine_jet(const Rat& alpha, const Rat& m, Phase phase, const LayoutPtr& layout,
                         const std::string& x1_name = "x1", const std::string& t_name = "t");
// Double version about an arbitrary phase theta0.
MJet<double> sin_affine_jet(double alpha, double m, double theta0, const LayoutPtr& layout,
                            const std::string& x1_name = "x1", const std::string& t_name = "t");

std::string to_string(const MJet<Rat>& a);

}  // namespace qmb
