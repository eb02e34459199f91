#include "qmb/bell.hpp"

#include <mutex>
#include <sstream>

namespace qmb {

void PDerivTable::set(const std::vector<int>& idx, const Rat& v) {
  if (static_cast<int>(idx.size()) != dim_) throw StructuralError("PDerivTable index arity mismatch");
  values_[idx] = v;
}

const Rat& PDerivTable::at(const std::vector<int>& idx) const {
  auto it = values_.find(idx);
  if (it == values_.end()) {
    std::ostringstream os;
    os << "PDerivTable: missing derivative entry (";
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
    os << ')';
    throw StructuralError(os.str());
  }
  return it->second;
}

const Rat& PDerivTable::dj(int j, int a) const {
  if (j < 1 || j > dim_) throw StructuralError("PDerivTable: direction out of range");
  std::vector<int> idx(dim_, 0);
  idx[j - 1] = a;
  return at(idx);
}

void PDerivTable::set_dj(int j, int a, const Rat& v) {
  if (j < 1 || j > dim_) throw StructuralError("PDerivTable: direction out of range");
  std::vector<int> idx(dim_, 0);
  idx[j - 1] = a;
  values_[idx] = v;
}

PDerivTable PDerivTable::random(int dim, int max_order, RatSampler& rng) {
  return random(dim, max_order, max_order, max_order, rng);
}

PDerivTable PDerivTable::random(int dim, int max_order, int cap1, int cap_other, RatSampler& rng) {
  PDerivTable t(dim);
  std::vector<int> cur(dim, 0);
  auto rec = [&](auto&& self, int v, int left) -> void {
    if (v == dim) {
      t.values_[cur] = rng.sample();
      return;
    }
    int cap = v == 0 ? cap1 : cap_other;
    for (int a = 0; a <= std::min(left, cap); ++a) {
      cur[v] = a;
      self(self, v + 1, left - a);
    }
    cur[v] = 0;
  };
  rec(rec, 0, max_order);
  return t;
}

namespace {

std::vector<IndexSeq> enumerate(int n, int k) {
  // depth-first over j_1, j_2, ... with both constraints pruned as we go;
  // each j runs downward so output is lexicographically decreasing
  const int len = n - k + 1;
  std::vector<IndexSeq> out;
  std::vector<int> j(len, 0);
  auto rec = [&](auto&& self, int pos, int kleft, int nleft) -> void {
    if (pos == len) {
      if (kleft == 0 && nleft == 0) out.push_back({j, n, k});
      return;
    }
    const int w = pos + 1;
    // remaining parts have weight >= w, so kleft * w <= nleft is needed
    if (kleft * w > nleft) return;
    // and at most weight len, so nleft <= kleft * len
    if (nleft > kleft * len) return;
    for (int c = std::min(kleft, nleft / w); c >= 0; --c) {
      j[pos] = c;
      self(self, pos + 1, kleft - c, nleft - c * w);
    }
    j[pos] = 0;
  };
  rec(rec, 0, k, n);
  return out;
}

}  // namespace

std::vector<IndexSeq> bell_index_sequences(int n, int k) {
  if (n < 1) throw DomainError("bell_index_sequences: n must be >= 1");
  if (k < 1) throw DomainError("bell_index_sequences: k must be >= 1");
  if (k > n) throw DomainError("bell_index_sequences: k > n");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<IndexSeq>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({n, k});
  if (it != cache.end()) return it->second;
  auto seqs = enumerate(n, k);
  cache.emplace(std::make_pair(n, k), seqs);
  return seqs;
}

Rat bell_term_coefficient(const IndexSeq& s) {
  Rat den = 1;
  for (std::size_t a = 0; a < s.j.size(); ++a) {
    den *= factorial(s.j[a]);
    den *= rat_pow(factorial(static_cast<int>(a) + 1), s.j[a]);
  }
  return factorial(s.n) / den;
}

Rat bell_eval(int n, int k, const std::vector<Rat>& xs) { return bell_eval_ring<Rat>(n, k, xs, Rat(1)); }

double bell_eval(int n, int k, const std::vector<double>& xs) { return bell_eval_ring<double>(n, k, xs, 1.0); }

std::string bell_polynomial_string(int n, int k) {
  if (k == 0) return n == 0 ? "1" : "0";
  std::ostringstream os;
  bool first = true;
  for (const IndexSeq& s : bell_index_sequences(n, k)) {
    if (!first) os << " + ";
    first = false;
    Rat c = bell_term_coefficient(s);
    bool any = false;
    if (c != 1) {
      os << to_string(c);
      any = true;
    }
    for (std::size_t a = 0; a < s.j.size(); ++a) {
      if (s.j[a] == 0) continue;
      if (any) os << '*';
      os << 'x' << (a + 1);
      if (s.j[a] > 1) os << '^' << s.j[a];
      any = true;
    }
  }
  return os.str();
}

Rat faa_di_bruno(const UJet<Rat>& F, int ell, const MJet<Rat>& G, const std::string& var, int n) {
  if (!is_zero(G.constant_term())) throw PreconditionError("faa_di_bruno: G must vanish at the center");
  if (n < 1) throw DomainError("faa_di_bruno: n must be >= 1");
  const Layout& L = *G.layout();
  const int v = L.var_index(var);
  std::vector<Rat> d(n);
  std::vector<int> e(L.nvars(), 0);
  for (int r = 1; r <= n; ++r) {
    e[v] = r;
    d[r - 1] = G.derivative_at_center(e);
  }
  Rat total = 0;
  for (int k = 1; k <= n; ++k) {
    Rat fk = F.derivative_at_zero(ell + k);
    if (is_zero(fk)) continue;
    std::vector<Rat> xs(d.begin(), d.begin() + (n - k + 1));
    total += fk * bell_eval(n, k, xs);
  }
  return total;
}

Rat const_A0(int n, int k, const Rat& alpha, const Rat& m) {
  if (k < 1 || k > n) throw DomainError("const_A0: need 1 <= k <= n");
  if ((n - k) % 2 != 0) return Rat(0);
  Rat sum = 0;
  for (const IndexSeq& s : bell_index_sequences(n, k)) {
    bool odd_only = true;
    for (std::size_t a = 1; a < s.j.size(); a += 2)
      if (s.j[a] != 0) odd_only = false;  // a+1 even
    if (!odd_only) continue;
    Rat den = 1;
    for (std::size_t a = 0; a < s.j.size(); a += 2) {
      den *= factorial(s.j[a]);
      den *= rat_pow(factorial(static_cast<int>(a) + 1), s.j[a]);
    }
    sum += factorial(n) / den;
  }
  const int half = (n - k) / 2;
  Rat sign = half % 2 == 0 ? 1 : -1;
  return sign * rat_pow(2 * alpha * m, n - k) * sum;
}

namespace {

// sum of multinomial(h; c_1..c_a, d_1..d_b) over odd c_i >= 1 and even d_j >= 0
Rat odd_even_multinomial_sum(int a, int b, int h) {
  // count ordered tuples weighted by h!/prod(parts!)
  // dp over parts: weight(part) = 1/part!
  std::vector<Rat> dp(h + 1);
  dp[0] = 1;
  auto add_part = [&](bool odd) {
    std::vector<Rat> nx(h + 1);
    for (int s = 0; s <= h; ++s) {
      if (is_zero(dp[s])) continue;
      for (int c = odd ? 1 : 0; s + c <= h; c += 2) nx[s + c] += dp[s] / factorial(c);
    }
    dp = std::move(nx);
  };
  for (int i = 0; i < a; ++i) add_part(true);
  for (int i = 0; i < b; ++i) add_part(false);
  return dp[h] * factorial(h);
}

}  // namespace

Rat const_A1(int a, int b, int h, const Rat& alpha) {
  if (a < 0 || b < 0 || h < 0) throw DomainError("const_A1: negative index");
  if (a > h || (h - a) % 2 != 0) return Rat(0);
  const int half = (h - a) / 2;
  Rat sign = half % 2 == 0 ? 1 : -1;
  return sign * rat_pow(2 * alpha, h - a) * odd_even_multinomial_sum(a, b, h);
}

Rat const_Ah(int n, int k, int h, const Rat& alpha, const Rat& m) {
  if (k < 1 || k > n) throw DomainError("const_Ah: need 1 <= k <= n");
  if (h < 0) throw DomainError("const_Ah: h must be >= 0");
  if (is_zero(m)) throw DegenerateError("const_Ah: m = 0 makes d_t s vanish at the slice");
  const int len = n - k + 1;
  LayoutPtr full = Layout::make({"x1", "t"}, h + len);
  LayoutPtr x1only = Layout::make({"x1", "t"}, h, {kNoCap, 0});
  MJet<Rat> s = sin_affine_jet(alpha, m, Phase::Zero, full);
  std::vector<MJet<Rat>> xs;
  for (int v = 1; v <= len; ++v) xs.push_back(mjet_truncate(mjet_partial(s, "t", v), x1only));
  MJet<Rat> one = MJet<Rat>::constant(x1only, Rat(1));
  MJet<Rat> B = bell_eval_ring(n, k, xs, one);
  Rat dh = B.derivative_at_center({h, 0});
  return dh / rat_pow(2 * alpha * m, k);
}

Rat poly_C_inner(int a, const PDerivTable& p, const Rat& alpha) {
  Rat y = 0;
  const Rat fa2 = (2 * alpha) * (2 * alpha);
  Rat w = 1;
  for (int l = 0; 2 * l + 1 <= a; ++l) {
    Rat term = binomial(a, 2 * l + 1) * p.d1(a - 2 * l - 1) * w;
    if (l % 2) term = -term;
    y += term;
    w *= fa2;
  }
  return y;
}

Rat poly_C(int n, int k, const PDerivTable& p, const Rat& alpha) {
  if (k < 1 || k > n) throw DomainError("poly_C: need 1 <= k <= n");
  std::vector<Rat> ys;
  for (int a = 1; a <= n - k + 1; ++a) ys.push_back(poly_C_inner(a, p, alpha));
  return bell_eval(n, k, ys);
}

}  // namespace qmb
