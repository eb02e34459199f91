#include "qmb/ansatz.hpp"
#include "qmb/ad.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace qmb {

namespace {

std::string xname(int j) { return "x" + std::to_string(j); }

std::vector<std::string> ansatz_vars(int N) {
  std::vector<std::string> v;
  for (int j = 1; j <= N; ++j) v.push_back(xname(j));
  v.push_back("t");
  return v;
}

std::vector<int> unit(int N, int j, int a) {
  std::vector<int> e(N, 0);
  e[j - 1] = a;
  return e;
}

Rat pw(const Rat& x, long e) { return rat_pow(x, e); }
Rat two_pow(long e) { return rat_pow(Rat(2), e); }

std::string describe(const AnsatzContext& ctx) {
  std::ostringstream os;
  os << "N=" << ctx.N << " q=" << ctx.q << " alpha=" << to_string(ctx.alpha) << " m=" << to_string(ctx.m)
     << " phase=" << (ctx.phase == Phase::Zero ? "zero" : "pi") << " F=[";
  for (std::size_t k = 0; k < ctx.F.size(); ++k) os << (k ? "," : "") << to_string(ctx.F[k]);
  os << "] p={";
  bool first = true;
  for (const auto& [idx, v] : ctx.p.values()) {
    if (is_zero(v)) continue;
    os << (first ? "" : ",") << '(';
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
    os << "):" << to_string(v);
    first = false;
  }
  os << '}';
  return os.str();
}

// Pointwise quantities of the p table used by the closed forms.
struct PVals {
  Rat p, p1, d11, d111, lap, lapc, grad2, d1lap;
};

PVals pvals(const AnsatzContext& ctx) {
  const PDerivTable& t = ctx.p;
  const int N = ctx.N;
  PVals v;
  std::vector<int> z(N, 0);
  v.p = t.at(z);
  v.p1 = t.d1(1);
  v.d11 = t.d1(2);
  v.d111 = t.d1(3);
  v.lap = v.d11;
  v.lapc = 0;
  v.grad2 = v.p1 * v.p1;
  v.d1lap = v.d111;
  for (int j = 2; j <= N; ++j) {
    const Rat& djj = t.dj(j, 2);
    v.lap += djj;
    v.lapc += djj;
    v.grad2 += t.dj(j, 1) * t.dj(j, 1);
    std::vector<int> e = unit(N, j, 2);
    e[0] = 1;
    v.d1lap += t.at(e);
  }
  return v;
}

UJet<Rat> f_series(const AnsatzContext& ctx, int order) {
  std::vector<Rat> d(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) d[k] = ctx.Fd(k);
  return UJet<Rat>::from_derivatives(d);
}

struct Trial {
  bool ok = true;
  std::string lhs, rhs, failed;
  void cmp(const std::string& name, const Rat& a, const Rat& b) {
    if (lhs.empty()) {
      lhs = to_string(a);
      rhs = to_string(b);
    }
    if (a != b && ok) {
      ok = false;
      failed = name + ": " + to_string(a) + " != " + to_string(b);
    }
  }
  void require(const std::string& name, bool cond, const std::string& what = "") {
    if (!cond && ok) {
      ok = false;
      failed = name + (what.empty() ? "" : ": " + what);
    }
  }
};

IdentityReport single(CheckId id, const AnsatzContext& ctx, const Trial& t) {
  IdentityReport r;
  r.id = check_name(id);
  r.paper_ref = check_paper_ref(id);
  r.N = ctx.N;
  r.q = ctx.q;
  r.record(t.ok, t.lhs, t.rhs, t.ok ? "" : t.failed + " at " + describe(ctx));
  return r;
}

// Jets shared by the engine side and the assembled right-hand sides.
template <class S>
struct Pieces {
  LayoutPtr L, Lc;
  MJet<S> P, Sj, G;
  std::function<MJet<S>(int)> Fk;  // F^(k)(G)
};

template <class S>
MJet<S> assemble_flow(const MJet<S>& v, const LayoutPtr& Lc, int N, int q, FlowParts parts) {
  auto T = [&](const MJet<S>& a) { return mjet_truncate(a, Lc); };
  MJet<S> E(Lc);
  if (parts != FlowParts::Nonlinear) {
    E = E + T(mjet_partial(v, "t", 1));
    E = E + T(mjet_partial(v, "x1", 3));
    for (int j = 2; j <= N; ++j) E = E + T(mjet_partial(mjet_partial(v, xname(j), 2), "x1", 1));
  }
  if (parts != FlowParts::Linear) {
    MJet<S> d1 = T(mjet_partial(v, "x1", 1));
    E = E + mjet_pow(d1, q).scaled(from_int<S>(2));
  }
  return E;
}

// The four-part right-hand side of the expansion lemma, as a jet.
template <class S>
MJet<S> expansion_rhs(const Pieces<S>& pc, int N, int q) {
  const LayoutPtr& Lc = pc.Lc;
  auto T = [&](const MJet<S>& a) { return mjet_truncate(a, Lc); };
  const MJet<S> one = MJet<S>::constant(Lc, from_int<S>(1));
  std::vector<MJet<S>> d1G;
  for (int r = 1; r <= 3; ++r) d1G.push_back(T(mjet_partial(pc.G, "x1", r)));
  const MJet<S> F1G = T(pc.Fk(1));

  MJet<S> r = F1G * T(pc.P) * T(mjet_partial(pc.Sj, "t", 1));
  r = r + mjet_pow(F1G * d1G[0], q).scaled(from_int<S>(2));
  for (int k = 1; k <= 3; ++k) {
    std::vector<MJet<S>> xs(d1G.begin(), d1G.begin() + (3 - k + 1));
    r = r + T(pc.Fk(k)) * bell_eval_ring(3, k, xs, one);
  }
  for (int j = 2; j <= N; ++j) {
    const std::string xj = xname(j);
    MJet<S> dP2 = mjet_partial(pc.P, xj, 2);
    MJet<S> dP1 = mjet_truncate(mjet_partial(pc.P, xj, 1), dP2.layout());
    const MJet<S> oneJ = MJet<S>::constant(dP2.layout(), from_int<S>(1));
    for (int k = 1; k <= 2; ++k) {
      std::vector<MJet<S>> xs = {dP1, dP2};
      xs.resize(2 - k + 1);
      MJet<S> B = bell_eval_ring(2, k, xs, oneJ);
      MJet<S> Sk = mjet_pow(pc.Sj, k);
      // d_1 of the triple product, one factor at a time
      r = r + T(pc.Fk(k + 1)) * d1G[0] * T(B) * T(Sk);
      r = r + T(pc.Fk(k)) * T(mjet_partial(B, "x1", 1)) * T(Sk);
      r = r + T(pc.Fk(k)) * T(B) * T(mjet_partial(Sk, "x1", 1));
    }
  }
  return r;
}

Pieces<Rat> rat_pieces(const AnsatzContext& ctx, int t_order, int x1_extra) {
  Pieces<Rat> pc;
  pc.L = ansatz_layout(ctx.N, t_order, x1_extra);
  pc.Lc = flow_layout(ctx.N, t_order, x1_extra);
  pc.P = p_jet(ctx.p, pc.L);
  pc.Sj = sin_affine_jet(ctx.alpha, ctx.m, ctx.phase, pc.L);
  pc.G = pc.P * pc.Sj;
  const int D = pc.L->order();
  UJet<Rat> Fu = f_series(ctx, D + 5);
  MJet<Rat> G = pc.G;
  pc.Fk = [Fu, G, D](int k) {
    UJet<Rat> f = Fu;
    for (int i = 0; i < k; ++i) f = f.derivative();
    if (f.order() < D) throw StructuralError("F series too short");
    return mjet_compose(f, G);
  };
  return pc;
}

Pieces<double> double_pieces(const AnsatzContext& ctx, double theta0, int t_order) {
  Pieces<double> pc;
  pc.L = ansatz_layout(ctx.N, t_order, 0);
  pc.Lc = flow_layout(ctx.N, t_order, 0);
  std::vector<double> dense(pc.L->size(), 0.0);
  MJet<Rat> Pr = p_jet(ctx.p, pc.L);
  for (const auto& [i, c] : Pr.terms()) dense[i] = c.get_d();
  pc.P = MJet<double>::from_dense(pc.L, dense);
  pc.Sj = sin_affine_jet(ctx.alpha.get_d(), ctx.m.get_d(), theta0, pc.L);
  pc.G = pc.P * pc.Sj;
  const int D = pc.L->order();
  std::vector<double> fd;
  for (int k = 0; k <= D + 5; ++k) fd.push_back(ctx.Fd(k).get_d());
  UJet<double> Fu = UJet<double>::from_derivatives(fd);
  MJet<double> G = pc.G;
  pc.Fk = [Fu, G](int k) {
    UJet<double> f = Fu;
    for (int i = 0; i < k; ++i) f = f.derivative();
    return apply_taylor(G, f.shifted(G.constant_term()).coeffs());
  };
  return pc;
}

}  // namespace

void AnsatzContext::validate() const {
  if (N < 1) throw StructuralError("ansatz: N must be >= 1");
  if (q < 2) throw DomainError("ansatz: q must be >= 2");
  if (sgn(alpha) <= 0) throw DegenerateError("ansatz: alpha must be > 0");
  if (F.empty() || !is_zero(F[0])) throw PreconditionError("ansatz: F(0) must be 0");
  if (p.dim() != N) throw StructuralError("ansatz: p table dimension differs from N");
}

void IdentityReport::record(bool ok, const std::string& lhs, const std::string& rhs, const std::string& where) {
  ++trials;
  if (samples.size() < 3) samples.emplace_back(lhs, rhs);
  if (!ok && pass) {
    pass = false;
    counterexample = where;
  }
}

void IdentityReport::note(const std::string& key, const std::string& value) {
  for (auto& [k, v] : notes)
    if (k == key) {
      if (v != value) v = "mixed";
      return;
    }
  notes.emplace_back(key, value);
}

void IdentityReport::merge(const IdentityReport& o) {
  trials += o.trials;
  for (const auto& s : o.samples)
    if (samples.size() < 3) samples.push_back(s);
  if (!o.pass && pass) {
    pass = false;
    counterexample = o.counterexample;
  }
  for (const auto& [k, v] : o.notes) note(k, v);
}

LayoutPtr ansatz_layout(int N, int t_order, int x1_extra) {
  std::vector<int> caps(N + 1, 2);
  caps[0] = 3 + x1_extra;
  caps[N] = t_order + 1;
  return Layout::make(ansatz_vars(N), t_order + 3 + x1_extra, caps);
}

LayoutPtr flow_layout(int N, int t_order, int x1_extra) {
  std::vector<int> caps(N + 1, 0);
  caps[0] = x1_extra;
  caps[N] = t_order;
  return Layout::make(ansatz_vars(N), t_order + x1_extra, caps);
}

MJet<Rat> p_jet(const PDerivTable& p, const LayoutPtr& layout) {
  const Layout& L = *layout;
  const int N = p.dim();
  const int it = L.var_index("t");
  std::vector<Rat> dense(L.size());
  std::vector<int> idx(N);
  for (std::size_t i = 0; i < L.size(); ++i) {
    const int* e = L.exps(i);
    if (e[it] != 0) continue;
    Rat den = 1;
    for (int j = 1; j <= N; ++j) {
      int a = e[L.var_index(xname(j))];
      idx[j - 1] = a;
      den *= factorial(a);
    }
    dense[i] = p.at(idx) / den;
  }
  return MJet<Rat>::from_dense(layout, dense);
}

MJet<Rat> build_v_jet(const AnsatzContext& ctx, const LayoutPtr& layout) {
  ctx.validate();
  MJet<Rat> G = p_jet(ctx.p, layout) * sin_affine_jet(ctx.alpha, ctx.m, ctx.phase, layout);
  return mjet_compose(f_series(ctx, layout->order()), G);
}

MJet<Rat> build_v_jet(const AnsatzContext& ctx, int order) {
  return build_v_jet(ctx, Layout::make(ansatz_vars(ctx.N), order));
}

MJet<Rat> flow_jet(const AnsatzContext& ctx, int t_order, int x1_extra, FlowParts parts) {
  MJet<Rat> v = build_v_jet(ctx, ansatz_layout(ctx.N, t_order, x1_extra));
  return assemble_flow(v, flow_layout(ctx.N, t_order, x1_extra), ctx.N, ctx.q, parts);
}

Rat eval_dtk_at_phase(const AnsatzContext& ctx, int k, FlowParts parts) {
  if (k < 0) throw DomainError("eval_dtk_at_phase: k must be >= 0");
  MJet<Rat> E = flow_jet(ctx, k, 0, parts);
  std::vector<int> e(ctx.N + 1, 0);
  e[ctx.N] = k;
  return E.derivative_at_center(e);
}

Rat eval_dx1_at_phase(const AnsatzContext& ctx) {
  MJet<Rat> E = flow_jet(ctx, 0, 1);
  std::vector<int> e(ctx.N + 1, 0);
  e[0] = 1;
  return E.derivative_at_center(e);
}

AnsatzContext random_context(const ContextSpec& spec, RatSampler& rng) {
  AnsatzContext ctx;
  ctx.N = spec.N;
  ctx.q = spec.q;
  ctx.phase = spec.phase;
  ctx.alpha = rng.positive();
  ctx.m = rng.nonzero();
  ctx.F.assign(static_cast<std::size_t>(spec.f_order) + 1, Rat(0));
  for (int k = 1; k <= spec.f_order; ++k) {
    if (spec.even_F_zero && k % 2 == 0) continue;
    bool need_nonzero = k == 1 || (spec.nonzero_F1_F3 && k == 3);
    ctx.F[k] = need_nonzero ? rng.nonzero() : rng.sample();
  }
  ctx.p = PDerivTable::random(spec.N, spec.p_order, 4, 2, rng);
  if (spec.sec1_manifold) ctx.p.set_dj(1, 2, sec1_solve_d11(ctx));
  return ctx;
}

// ---- closed forms ----

Rat sec1_rhs(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  const int q = ctx.q;
  Rat r = 4 * a * F1 * (ctx.m * v.p - 4 * a * a * v.p + v.lap + 2 * v.d11);
  r += 16 * pw(a, 3) * F3 * pw(v.p, 3);
  r += 2 * (1 - (q % 2 ? -1 : 1)) * pw(2 * a, q) * pw(F1, q) * pw(v.p, q);
  return r;
}

Rat sec2_rhs(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat F1 = ctx.Fd(1), F2 = ctx.Fd(2);
  const int q = ctx.q;
  Rat r = 8 * a * a * (6 * F2 * v.p * v.p1);
  r += 2 * (1 + (q % 2 ? -1 : 1)) * pw(2 * a, q) * pw(F1, q) * pw(v.p, q);
  return r;
}

Rat x1_identity_rhs(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  const int q = ctx.q;
  return 8 * a * F1 * v.d111 + 2 * a * ctx.m * F1 * v.p1 - 32 * pw(a, 3) * F1 * v.p1 +
         96 * pw(a, 3) * F3 * v.p * v.p * v.p1 + two_pow(q + 2) * q * pw(a, q) * pw(F1, q) * pw(v.p, q - 1) * v.p1;
}

Rat eqvt_rhs(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat& m = ctx.m;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  const int q = ctx.q;
  return 2 * a * m * F1 * v.d1lap - 24 * m * pw(a, 3) * F1 * v.p1 + 72 * m * pw(a, 3) * F3 * v.p * v.p * v.p1 +
         two_pow(q + 1) * q * pw(a, q) * m * pw(F1, q) * pw(v.p, q - 1) * v.p1;
}

Rat gradient_linear_rhs(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat& m = ctx.m;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3), F5 = ctx.Fd(5);
  const int q = ctx.q;
  const Rat m2 = m * m;
  Rat r = 48 * v.p * F3 * m2 * pw(a, 3) * (v.grad2 + 2 * v.p1 * v.p1);
  r -= 16 * pw(v.p, 3) * F3 * pw(m, 3) * pw(a, 3);
  r += two_pow(q + 3) * pw(v.p, q) * pw(F1, q) * m2 * pw(a, q + 2);
  r -= 3 * two_pow(q + 3) * pw(v.p, q + 2) * F3 * pw(F1, q - 1) * m2 * pw(a, q + 2);
  r -= 96 * pw(v.p, 5) * m2 * pw(a, 5) * F3 * F3 / F1;
  r -= 192 * pw(v.p, 3) * F3 * m2 * pw(a, 5);
  r += 32 * F5 * m2 * pw(a, 5) * pw(v.p, 5);
  return r;
}

Rat gradient_nonlinear_rhs(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat& m = ctx.m;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  const int q = ctx.q;
  const Rat m2 = m * m;
  return -two_pow(q + 3) * q * pw(v.p, q) * pw(F1, q) * m2 * pw(a, q + 2) +
         Rat(q * (q - 1)) * two_pow(q + 1) * v.p1 * v.p1 * pw(v.p, q - 2) * pw(F1, q) * m2 * pw(a, q) +
         two_pow(q + 3) * q * F3 * pw(F1, q - 1) * pw(v.p, q + 2) * m2 * pw(a, q + 2);
}

Rat sec1_solve_d11(const AnsatzContext& ctx) {
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  if (is_zero(F1)) throw PreconditionError("sec1 manifold needs F'(0) != 0");
  const int q = ctx.q;
  // 3 d11 + lapc = p(4 a^2 - m) - 4 a^2 (F3/F1) p^3 - 2^q a^(q-1) F1^(q-1) p^q
  Rat rhs = v.p * (4 * a * a - ctx.m) - 4 * a * a * (F3 / F1) * pw(v.p, 3) -
            two_pow(q) * pw(a, q - 1) * pw(F1, q - 1) * pw(v.p, q);
  return (rhs - v.lapc) / 3;
}

// ---- per-context checks ----

IdentityReport check_expansion_lemma(const AnsatzContext& ctx, std::uint64_t seed) {
  ctx.validate();
  Trial t;
  const int k = 1;
  Pieces<Rat> pc = rat_pieces(ctx, k, 0);
  MJet<Rat> v = pc.Fk(0);
  MJet<Rat> lhs = assemble_flow(v, pc.Lc, ctx.N, ctx.q, FlowParts::All);
  MJet<Rat> rhs = expansion_rhs(pc, ctx.N, ctx.q);
  t.lhs = to_string(lhs.constant_term());
  t.rhs = to_string(rhs.constant_term());
  t.require("exact jet equality at the slice", lhs == rhs, to_string(lhs) + " vs " + to_string(rhs));

  // same identity in floating point at a generic phase
  RatSampler rng(mix_seed(seed, "expansion-phase"));
  const double theta0 = rng.uniform(0.0, 2 * M_PI);
  Pieces<double> pd = double_pieces(ctx, theta0, k);
  MJet<double> vd = pd.Fk(0);
  MJet<double> ld = assemble_flow(vd, pd.Lc, ctx.N, ctx.q, FlowParts::All);
  MJet<double> rd = expansion_rhs(pd, ctx.N, ctx.q);
  double scale = 0.0, diff = 0.0;
  std::vector<double> a = ld.dense(), b = rd.dense();
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  const double rel = scale > 0 ? diff / scale : diff;
  std::ostringstream os;
  os << "theta0=" << theta0 << " rel=" << rel;
  t.require("generic phase (double)", rel <= 1e-10, os.str());
  IdentityReport r = single(CheckId::Expansion, ctx, t);
  return r;
}

IdentityReport check_flat_second(const AnsatzContext& ctx) {
  ctx.validate();
  AnsatzContext z = ctx, pi = ctx;
  z.phase = Phase::Zero;
  pi.phase = Phase::Pi;
  const Rat e0 = eval_dtk_at_phase(z, 0);
  const Rat e1 = eval_dtk_at_phase(pi, 0);
  Trial t;
  t.cmp("difference of slices", e0 - e1, sec1_rhs(ctx));
  t.cmp("sum of slices", e0 + e1, sec2_rhs(ctx));
  return single(CheckId::FlatSecond, ctx, t);
}

IdentityReport check_dtne(const AnsatzContext& ctx, int n) {
  ctx.validate();
  if (n < 2) throw DomainError("check_dtne: n must be >= 2");
  const int k = 2 * n - 3;
  AnsatzContext z = ctx;
  z.phase = Phase::Zero;
  z.F.resize(static_cast<std::size_t>(k) + 4, Rat(0));
  const Rat base = eval_dtk_at_phase(z, k);
  auto bumped = [&](int l, const Rat& by) -> Rat {
    AnsatzContext c = z;
    c.F[l] += by;
    return eval_dtk_at_phase(c, k);
  };
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat& m = ctx.m;
  const Rat dts = 2 * a * m;
  Trial t;
  Rat c2n = bumped(2 * n, 1) - base;
  Rat c2n1 = bumped(2 * n - 1, 1) - base;
  // affine in the two top derivatives
  t.cmp("affine in F^(2n)", bumped(2 * n, 2) - base, 2 * c2n);
  t.cmp("affine in F^(2n-1)", bumped(2 * n - 1, 2) - base, 2 * c2n1);
  const Rat xi2n = pw(v.p, 2 * n) / pw(m, 3);
  const Rat xi2n1_mid = 3 * pw(v.p, 2 * n - 2) * v.p1 * Rat(2 * n - 1) / (m * m);
  const Rat xi2n1_printed = 3 * pw(v.p, 2 * n - 2) * v.p1 * (Rat(2 * n - 3) * v.p * v.p + 2) / (m * m);
  t.cmp("coefficient of F^(2n)", c2n, pw(dts, 2 * n) * xi2n);
  t.cmp("coefficient of F^(2n-1)", c2n1, pw(dts, 2 * n - 1) * xi2n1_mid);
  if (!is_zero(v.p) && !is_zero(v.p1)) {
    t.require("top coefficients nonzero", !is_zero(c2n) && !is_zero(c2n1));
  }
  // dependence on the slice only through d_1 s: F^(l) -> (-1)^l F^(l)
  AnsatzContext pi = z, flipped = z;
  pi.phase = Phase::Pi;
  for (std::size_t l = 1; l < flipped.F.size(); l += 2) flipped.F[l] = -flipped.F[l];
  t.cmp("slice sign structure", eval_dtk_at_phase(pi, k), eval_dtk_at_phase(flipped, k));
  IdentityReport r = single(n == 2 ? CheckId::Dtne2 : CheckId::Dtne3, ctx, t);
  if (!is_zero(v.p1) && !is_zero(v.p)) {
    r.note("zeta2n-1_middle_line_matches", "true");
    r.note("zeta2n-1_final_line_matches", c2n1 == pw(dts, 2 * n - 1) * xi2n1_printed ? "true" : "false");
  }
  r.note("xi_convention", "coefficients taken against (d_t s)^l");
  return r;
}

IdentityReport check_x1_identity(const AnsatzContext& ctx) {
  ctx.validate();
  if (ctx.N != 1) throw PreconditionError("check_x1_identity: needs N = 1");
  if (ctx.q % 2 == 0) throw PreconditionError("check_x1_identity: needs q odd");
  AnsatzContext z = ctx;
  z.phase = Phase::Zero;
  Trial t;
  t.cmp("d_1 E at the slice", eval_dx1_at_phase(z), x1_identity_rhs(ctx));
  return single(CheckId::X1Identity, ctx, t);
}

IdentityReport check_integrated(const AnsatzContext& ctx) {
  ctx.validate();
  if (ctx.q % 2 == 0) throw PreconditionError("check_integrated: needs q odd");
  AnsatzContext z = ctx;
  z.phase = Phase::Zero;
  const Rat engine = eval_dtk_at_phase(z, 1);
  const PVals v = pvals(ctx);
  const Rat& a = ctx.alpha;
  const Rat& m = ctx.m;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  const int q = ctx.q;
  // x_1-derivative of F1 (Lap p - 12 a^2 p + 12 a^2 (F3/F1) p^3 + 2^q a^(q-1) F1^(q-1) p^q)
  Rat bracket_d1 = v.d1lap - 12 * a * a * v.p1;
  Rat tail = 0;
  if (!is_zero(F1)) {
    bracket_d1 += 36 * a * a * (F3 / F1) * v.p * v.p * v.p1;
    tail = Rat(q) * two_pow(q) * pw(a, q - 1) * pw(F1, q - 1) * pw(v.p, q - 1) * v.p1;
  }
  bracket_d1 += tail;
  Trial t;
  t.cmp("d_t E at t1", engine, eqvt_rhs(ctx));
  if (!is_zero(F1)) {
    t.cmp("primitive (2 alpha m on the right)", engine, 2 * a * m * F1 * bracket_d1);
  }
  IdentityReport r = single(CheckId::Integrated, ctx, t);
  if (!is_zero(F1)) {
    bool printed = engine == F1 * bracket_d1 / (2 * a * m);
    r.note("printed_form_matches", printed ? "true" : "false");
  }
  return r;
}

namespace {

struct HopLambdas {
  Rat l1, l2, l2_printed, l3, l4, l5;
};

HopLambdas prop54_lambdas(const AnsatzContext& ctx) {
  const Rat& a = ctx.alpha;
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3), F5 = ctx.Fd(5);
  const int q = ctx.q;
  HopLambdas h;
  h.l1 = -ctx.m / 3 - 4 * a * a;
  h.l2_printed = two_pow(q - 1) * pw(F1, q - 1) * pw(a, q - 1) * (1 - Rat(q, 3));
  h.l2 = -h.l2_printed;
  h.l3 = Rat(1 - q) * two_pow(q - 1) * pw(a, q - 1) * pw(F1, q) / (3 * F3);
  h.l4 = -2 * a * a * F3 / F1 + 2 * a * a * F5 / (3 * F3);
  h.l5 = Rat(q * (q - 1)) * two_pow(q - 3) * pw(a, q - 3) * pw(F1, q) / (3 * F3);
  return h;
}

Rat prop54_value(const AnsatzContext& ctx, const Rat& l2) {
  const PVals v = pvals(ctx);
  const HopLambdas h = prop54_lambdas(ctx);
  const int q = ctx.q;
  return v.p * (v.grad2 + 2 * v.p1 * v.p1) + pw(v.p, q - 2) * v.p1 * v.p1 * h.l5 + pw(v.p, 3) * h.l1 +
         pw(v.p, 5) * h.l4 + pw(v.p, q) * h.l3 + pw(v.p, q + 2) * l2;
}

}  // namespace

IdentityReport check_gradient_squared(const AnsatzContext& ctx) {
  ctx.validate();
  if (ctx.q % 2 == 0) throw PreconditionError("check_gradient_squared: needs q odd");
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  if (is_zero(F1) || is_zero(F3) || is_zero(ctx.m))
    throw PreconditionError("check_gradient_squared: needs F'(0), F'''(0), m nonzero");
  AnsatzContext z = ctx;
  z.phase = Phase::Zero;
  const Rat lin = eval_dtk_at_phase(z, 2, FlowParts::Linear);
  const Rat nl = eval_dtk_at_phase(z, 2, FlowParts::Nonlinear);
  const Rat norm = 48 * F3 * ctx.m * ctx.m * pw(ctx.alpha, 3);
  const PVals v = pvals(ctx);
  Trial t;
  t.cmp("linear part", lin, gradient_linear_rhs(ctx));
  t.cmp("power part", nl, gradient_nonlinear_rhs(ctx));
  const HopLambdas h = prop54_lambdas(ctx);
  t.cmp("normalized sum", (lin + nl) / norm, prop54_value(ctx, h.l2));
  // p(|grad p|^2 + 2 (d_1 p)^2) and p(|grad_c p|^2 + 3 (d_1 p)^2) are the same quantity
  t.cmp("gradient form", v.p * (v.grad2 + 2 * v.p1 * v.p1), v.p * (v.grad2 - v.p1 * v.p1 + 3 * v.p1 * v.p1));
  IdentityReport r = single(CheckId::GradientSquared, ctx, t);
  const bool printed = (lin + nl) / norm == prop54_value(ctx, h.l2_printed);
  r.note("printed_lambda2_matches", printed ? "true" : "false");
  r.note("substitution", "d_1^2 p solved from sec1_rhs = 0 before comparison");
  return r;
}

// ---- elliptic system ----

std::string EllipticForm::str(int q) const {
  std::ostringstream os;
  os << to_string(d11) << "*d11p + " << to_string(lapc) << "*Lapc_p + " << to_string(p1) << "*p + " << to_string(p3)
     << "*p^3 + " << to_string(pq) << "*p^" << q;
  return os.str();
}

std::vector<Rat> interpolate(const std::vector<Rat>& xs, const std::vector<Rat>& ys) {
  const std::size_t n = xs.size();
  if (ys.size() != n || n == 0) throw StructuralError("interpolate: size mismatch");
  // Newton divided differences, then expand to monomials
  std::vector<Rat> c(ys);
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      if (xs[i] == xs[i - j]) throw DomainError("interpolate: repeated node");
      c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  std::vector<Rat> poly(n);
  for (std::size_t kk = n; kk-- > 0;) {
    // poly = poly * (x - xs[kk]) + c[kk]
    std::vector<Rat> nx(n);
    for (std::size_t d = 0; d + 1 < n; ++d) nx[d + 1] += poly[d];
    for (std::size_t d = 0; d < n; ++d) nx[d] -= poly[d] * xs[kk];
    nx[0] += c[kk];
    poly = std::move(nx);
  }
  return poly;
}

EllipticSystem printed_elliptic_system(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3) {
  if (is_zero(F1)) throw PreconditionError("elliptic system: F'(0) = 0 forces the trivial solution");
  const Rat a2 = alpha * alpha;
  const Rat r = F3 / F1;
  const Rat mu1 = two_pow(q) * pw(alpha, q - 1) * pw(F1, q - 1);
  EllipticSystem s;
  s.sec1r = {3, 1, m - 4 * a2, 4 * a2 * r, mu1};
  s.Lq = {1, 1, -12 * a2, 12 * a2 * r, mu1};
  s.L1q = {1, 0, m / 2 + 4 * a2, -4 * a2 * r, 0};
  s.Lcq = {0, 1, -(m / 2 + 16 * a2), 16 * a2 * r, mu1};
  s.L1q_combination = s.L1q == (s.sec1r - s.Lq).scaled(Rat(1, 2));
  s.Lcq_combination = s.Lcq == s.Lq - s.L1q;
  return s;
}

EllipticSystem extract_elliptic_system(const AnsatzContext& ctx) {
  ctx.validate();
  if (ctx.q % 2 == 0) throw PreconditionError("extract_elliptic_system: needs q odd");
  const Rat F1 = ctx.Fd(1), F3 = ctx.Fd(3);
  const Rat& a = ctx.alpha;
  const Rat& m = ctx.m;
  const int q = ctx.q;
  const int N = ctx.N;
  EllipticSystem s = printed_elliptic_system(q, a, m, F1, F3);

  using Entries = std::vector<std::pair<std::vector<int>, Rat>>;
  auto with_table = [&](const Entries& entries, Phase ph) {
    AnsatzContext c = ctx;
    c.phase = ph;
    c.p = PDerivTable(N);
    for (const auto& [idx, val] : ctx.p.values()) c.p.set(idx, Rat(0));
    for (const auto& [idx, val] : entries) c.p.set(idx, val);
    return c;
  };
  const std::vector<int> z0(N, 0);

  // sec1 from the difference of the two slices, divided by 4 alpha F1
  auto sec1_at = [&](const Entries& entries) -> Rat {
    Rat d = eval_dtk_at_phase(with_table(entries, Phase::Zero), 0) -
            eval_dtk_at_phase(with_table(entries, Phase::Pi), 0);
    return d / (4 * a * F1);
  };
  std::vector<Rat> xs, ys;
  for (int i = 1; i <= q + 1; ++i) {
    xs.push_back(Rat(i));
    ys.push_back(sec1_at(Entries{{z0, Rat(i)}}));
  }
  std::vector<Rat> c = interpolate(xs, ys);
  bool clean = true;
  for (int d = 0; d <= q; ++d)
    if (d != 1 && d != 3 && d != q && !is_zero(c[d])) clean = false;
  // at q = 3 the p^3 and p^q columns are one monomial and only their sum is
  // identifiable, so the engine total is split with the printed p^q share
  auto split = [q](EllipticForm& f, const Rat& c3, const Rat& cq, const Rat& printed_pq) {
    f.p3 = q == 3 ? c3 - printed_pq : c3;
    f.pq = q == 3 ? printed_pq : cq;
  };
  s.sec1r_engine.p1 = c[1];
  split(s.sec1r_engine, c[3], c[q], s.sec1r.pq);
  s.sec1r_engine.d11 = sec1_at(Entries{{unit(N, 1, 2), Rat(1)}});
  // no transverse directions at N = 1, the column is formal
  s.sec1r_engine.lapc = N >= 2 ? sec1_at(Entries{{unit(N, 2, 2), Rat(1)}}) : s.sec1r.lapc;
  s.sec1r_matches = clean && s.sec1r_engine == s.sec1r;

  // Lq from the t1 propagation: coefficient of p^j d_1p is (j+1) 2 alpha m F1 [Lq p^(j+1)]
  const Rat w = 2 * a * m * F1;
  xs.clear();
  ys.clear();
  for (int i = 1; i <= q; ++i) {
    xs.push_back(Rat(i));
    ys.push_back(eval_dtk_at_phase(with_table(Entries{{z0, Rat(i)}, {unit(N, 1, 1), Rat(1)}}, Phase::Zero), 1));
  }
  c = interpolate(xs, ys);
  clean = true;
  for (int d = 0; d < q; ++d)
    if (d != 0 && d != 2 && d != q - 1 && !is_zero(c[d])) clean = false;
  s.Lq_engine.p1 = c[0] / w;
  split(s.Lq_engine, c[2] / (3 * w), c[q - 1] / (Rat(q) * w), s.Lq.pq);
  s.Lq_engine.d11 = eval_dtk_at_phase(with_table(Entries{{unit(N, 1, 3), Rat(1)}}, Phase::Zero), 1) / w;
  if (N >= 2) {
    std::vector<int> e = unit(N, 2, 2);
    e[0] = 1;
    s.Lq_engine.lapc = eval_dtk_at_phase(with_table(Entries{{e, Rat(1)}}, Phase::Zero), 1) / w;
  } else {
    s.Lq_engine.lapc = s.Lq.lapc;
  }
  s.Lq_matches = clean && s.Lq_engine == s.Lq;
  return s;
}

IdentityReport check_elliptic_system(const AnsatzContext& ctx) {
  EllipticSystem s = extract_elliptic_system(ctx);
  Trial t;
  t.lhs = s.sec1r_engine.str(ctx.q);
  t.rhs = s.sec1r.str(ctx.q);
  t.require("sec1 coefficients", s.sec1r_matches, s.sec1r_engine.str(ctx.q) + " vs " + s.sec1r.str(ctx.q));
  t.require("Lq coefficients", s.Lq_matches, s.Lq_engine.str(ctx.q) + " vs " + s.Lq.str(ctx.q));
  t.require("L1q = (sec1 - Lq)/2", s.L1q_combination);
  t.require("Lcq = Lq - L1q", s.Lcq_combination);
  // with F'''(0) = 0 the x_1 equation is linear with constant coefficients
  EllipticSystem lin = printed_elliptic_system(ctx.q, ctx.alpha, ctx.m, ctx.Fd(1), Rat(0));
  t.require("L1q cubic term vanishes when F'''(0) = 0", is_zero(lin.L1q.p3) && is_zero(lin.L1q.pq));
  return single(CheckId::Elliptic, ctx, t);
}

// ---- drivers ----

std::vector<CheckId> all_checks() {
  return {CheckId::Expansion, CheckId::FlatSecond,      CheckId::Dtne2,   CheckId::Dtne3,
          CheckId::X1Identity, CheckId::Integrated, CheckId::GradientSquared, CheckId::Elliptic};
}

std::string check_name(CheckId id) {
  switch (id) {
    case CheckId::Expansion: return "expansion_lemma";
    case CheckId::FlatSecond: return "flat_second";
    case CheckId::Dtne2: return "dtne_n2";
    case CheckId::Dtne3: return "dtne_n3";
    case CheckId::X1Identity: return "x1_identity";
    case CheckId::Integrated: return "integrated";
    case CheckId::GradientSquared: return "gradient_squared";
    case CheckId::Elliptic: return "elliptic_system";
  }
  return "unknown";
}

std::string check_paper_ref(CheckId id) {
  switch (id) {
    case CheckId::Expansion: return "four-part expansion of the reduced flow";
    case CheckId::FlatSecond: return "flat second derivative of F (slice difference and sum)";
    case CheckId::Dtne2:
    case CheckId::Dtne3: return "propagation of odd time derivatives, top F coefficients";
    case CheckId::X1Identity: return "x1 derivative identity at the slice";
    case CheckId::Integrated: return "integrated propagation, q odd";
    case CheckId::GradientSquared: return "gradient squared identity and its normalized sum";
    case CheckId::Elliptic: return "rigidity elliptic system and its combinations";
  }
  return "";
}

bool check_applicable(CheckId id, int N, int q) {
  const bool odd = q % 2 == 1;
  switch (id) {
    case CheckId::Expansion:
    case CheckId::FlatSecond:
    case CheckId::Dtne2:
    case CheckId::Dtne3: return true;
    case CheckId::X1Identity: return odd && N == 1;
    case CheckId::Integrated:
    case CheckId::GradientSquared:
    case CheckId::Elliptic: return odd;
  }
  return false;
}

IdentityReport run_check(CheckId id, int N, int q, int trials, std::uint64_t seed) {
  IdentityReport total;
  total.id = check_name(id);
  total.paper_ref = check_paper_ref(id);
  total.N = N;
  total.q = q;
  if (!check_applicable(id, N, q)) throw NotApplicableError(total.id + " not applicable for this (N, q)");
  RatSampler rng(mix_seed(seed, total.id + "/N" + std::to_string(N) + "/q" + std::to_string(q)));
  ContextSpec spec;
  spec.N = N;
  spec.q = q;
  spec.f_order = 9;
  spec.p_order = 8;
  switch (id) {
    case CheckId::X1Identity:
    case CheckId::Integrated:
    case CheckId::Elliptic: spec.even_F_zero = true; break;
    case CheckId::GradientSquared:
      spec.even_F_zero = true;
      spec.nonzero_F1_F3 = true;
      spec.sec1_manifold = true;
      break;
    default: break;
  }
  for (int i = 0; i < trials; ++i) {
    spec.phase = (id == CheckId::Expansion && i % 2 == 1) ? Phase::Pi : Phase::Zero;
    AnsatzContext ctx = random_context(spec, rng);
    IdentityReport r;
    switch (id) {
      case CheckId::Expansion: r = check_expansion_lemma(ctx, rng.engine()()); break;
      case CheckId::FlatSecond: r = check_flat_second(ctx); break;
      case CheckId::Dtne2: r = check_dtne(ctx, 2); break;
      case CheckId::Dtne3: r = check_dtne(ctx, 3); break;
      case CheckId::X1Identity: r = check_x1_identity(ctx); break;
      case CheckId::Integrated: r = check_integrated(ctx); break;
      case CheckId::GradientSquared: r = check_gradient_squared(ctx); break;
      case CheckId::Elliptic: r = check_elliptic_system(ctx); break;
    }
    total.merge(r);
  }
  return total;
}

}  // namespace qmb
