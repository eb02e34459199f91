#pragma once

#include "qmb/errors.hpp"
#include "qmb/jet.hpp"
#include "qmb/rational.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qmb {

// (j_1, ..., j_{n-k+1}) with sum j_i = k and sum i*j_i = n.
struct IndexSeq {
  std::vector<int> j;
  int n = 0;
  int k = 0;
  bool operator==(const IndexSeq& o) const { return j == o.j && n == o.n && k == o.k; }
};

// Values of spatial partials of p at a fixed point, keyed by (a_1, ..., a_N).
class PDerivTable {
 public:
  explicit PDerivTable(int dim = 1) : dim_(dim) {
    if (dim < 1) throw StructuralError("PDerivTable dimension must be >= 1");
  }

  int dim() const { return dim_; }
  void set(const std::vector<int>& idx, const Rat& v);
  const Rat& at(const std::vector<int>& idx) const;
  bool has(const std::vector<int>& idx) const { return values_.count(idx) != 0; }
  // derivative only in x_1 (or x_j, 1-based)
  const Rat& d1(int a) const { return dj(1, a); }
  const Rat& dj(int j, int a) const;
  void set_dj(int j, int a, const Rat& v);
  const std::map<std::vector<int>, Rat>& values() const { return values_; }

  // Every multi-index with total order <= max_order, filled from the sampler.
  static PDerivTable random(int dim, int max_order, RatSampler& rng);
  // Same, but x_j exponents (j >= 2) capped at cap_other.
  static PDerivTable random(int dim, int max_order, int cap1, int cap_other, RatSampler& rng);

 private:
  int dim_;
  std::map<std::vector<int>, Rat> values_;
};

std::vector<IndexSeq> bell_index_sequences(int n, int k);

// n! / prod(j_a! (a!)^{j_a}) for one index sequence.
Rat bell_term_coefficient(const IndexSeq& s);

inline Rat ring_scale(const Rat& x, const Rat& c) { return x * c; }
inline double ring_scale(double x, const Rat& c) { return x * c.get_d(); }
template <class S>
MJet<S> ring_scale(const MJet<S>& x, const Rat& c) { return x.scaled(from_rat<S>(c)); }

// B_{n,k}(xs) over any commutative ring with unit `one`.
template <class R>
R bell_eval_ring(int n, int k, const std::vector<R>& xs, const R& one) {
  if (k < 0 || n < 0) throw DomainError("bell_eval: negative index");
  if (k > n) throw DomainError("bell_eval: k > n");
  if (k == 0) return n == 0 ? one : ring_scale(one, Rat(0));
  if (static_cast<int>(xs.size()) != n - k + 1)
    throw StructuralError("bell_eval: argument vector must have length n-k+1");
  R total = ring_scale(one, Rat(0));
  for (const IndexSeq& s : bell_index_sequences(n, k)) {
    R term = one;
    for (std::size_t a = 0; a < s.j.size(); ++a)
      for (int r = 0; r < s.j[a]; ++r) term = term * xs[a];
    total = total + ring_scale(term, bell_term_coefficient(s));
  }
  return total;
}

Rat bell_eval(int n, int k, const std::vector<Rat>& xs);
double bell_eval(int n, int k, const std::vector<double>& xs);

// Human-readable B_{n,k}(x_1, ...), e.g. "3*x1*x2".
std::string bell_polynomial_string(int n, int k);

// sum_{k=1}^{n} F^{(l+k)}(0) B_{n,k}(d_j G, d_j^2 G, ...) at the center of G.
Rat faa_di_bruno(const UJet<Rat>& F, int ell, const MJet<Rat>& G, const std::string& var, int n);

Rat const_A0(int n, int k, const Rat& alpha, const Rat& m);
Rat const_A1(int a, int b, int h, const Rat& alpha);
Rat const_Ah(int n, int k, int h, const Rat& alpha, const Rat& m);

// The inner sums y_a = sum_l binom(a, 2l+1) d_1^{a-2l-1} p (-1)^l (2 alpha)^{2l}.
Rat poly_C_inner(int a, const PDerivTable& p, const Rat& alpha);
Rat poly_C(int n, int k, const PDerivTable& p, const Rat& alpha);

}  // namespace qmb
