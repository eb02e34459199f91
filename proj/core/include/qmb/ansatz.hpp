#pragma once

#include "qmb/bell.hpp"
#include "qmb/jet.hpp"
#include "qmb/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qmb {

// Everything needed to evaluate v = F(p(x) sin(2 alpha (x1 + m t))) near a
// phase-slice point.
struct AnsatzContext {
  int N = 1;
  int q = 3;
  Rat alpha = 1;
  Rat m = 1;
  std::vector<Rat> F;  // F^(k)(0), k = 0..
  PDerivTable p{1};
  Phase phase = Phase::Zero;

  void validate() const;
  Rat Fd(int k) const { return k < static_cast<int>(F.size()) ? F[k] : Rat(0); }
};

struct IdentityReport {
  std::string id;
  std::string paper_ref;
  int N = 0;
  int q = 0;
  int trials = 0;
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> samples;  // (lhs, rhs) of the first trials
  std::string counterexample;
  std::vector<std::pair<std::string, std::string>> notes;

  void record(bool ok, const std::string& lhs, const std::string& rhs, const std::string& where);
  void note(const std::string& key, const std::string& value);
  void merge(const IdentityReport& other);
};

// Which parts of E[v] = d_t v + d_1(Lap v) + 2 (d_1 v)^q to assemble.
enum class FlowParts { All, Linear, Nonlinear };

// Jet layout over (x1..xN, t): enough room for d_t^k E and d_1^e E at the point.
LayoutPtr ansatz_layout(int N, int t_order, int x1_extra = 0);
// Layout of E itself (after the third order spatial derivative).
LayoutPtr flow_layout(int N, int t_order, int x1_extra = 0);

MJet<Rat> p_jet(const PDerivTable& p, const LayoutPtr& layout);
MJet<Rat> build_v_jet(const AnsatzContext& ctx, const LayoutPtr& layout);
MJet<Rat> build_v_jet(const AnsatzContext& ctx, int order);
MJet<Rat> flow_jet(const AnsatzContext& ctx, int t_order, int x1_extra = 0, FlowParts parts = FlowParts::All);

// d_t^k E[v] at the slice point.
Rat eval_dtk_at_phase(const AnsatzContext& ctx, int k, FlowParts parts = FlowParts::All);
// d_1 E[v] at the slice point.
Rat eval_dx1_at_phase(const AnsatzContext& ctx);

// Sampling options for random contexts.
struct ContextSpec {
  int N = 1;
  int q = 3;
  int f_order = 8;
  int p_order = 8;
  bool even_F_zero = false;
  bool nonzero_F1_F3 = false;
  bool sec1_manifold = false;  // solve sec1_rhs = 0 for d_1^2 p
  Phase phase = Phase::Zero;
};
AnsatzContext random_context(const ContextSpec& spec, RatSampler& rng);

// Per-context checks, one trial each.
IdentityReport check_expansion_lemma(const AnsatzContext& ctx, std::uint64_t seed = 0);
IdentityReport check_flat_second(const AnsatzContext& ctx);
IdentityReport check_dtne(const AnsatzContext& ctx, int n);
IdentityReport check_x1_identity(const AnsatzContext& ctx);
IdentityReport check_integrated(const AnsatzContext& ctx);
IdentityReport check_gradient_squared(const AnsatzContext& ctx);

// Closed forms of the right-hand sides, exposed for tests and the reduced module.
Rat sec1_rhs(const AnsatzContext& ctx);
Rat sec2_rhs(const AnsatzContext& ctx);
Rat x1_identity_rhs(const AnsatzContext& ctx);
Rat eqvt_rhs(const AnsatzContext& ctx);
Rat gradient_linear_rhs(const AnsatzContext& ctx);
Rat gradient_nonlinear_rhs(const AnsatzContext& ctx);
// d_1^2 p that puts the table on the sec1_rhs = 0 manifold (q odd).
Rat sec1_solve_d11(const AnsatzContext& ctx);

// Linear forms in the basis {d_1^2 p, Lap_c p, p, p^3, p^q}.
struct EllipticForm {
  Rat d11, lapc, p1, p3, pq;
  bool operator==(const EllipticForm& o) const {
    return d11 == o.d11 && lapc == o.lapc && p1 == o.p1 && p3 == o.p3 && pq == o.pq;
  }
  EllipticForm operator-(const EllipticForm& o) const {
    return {d11 - o.d11, lapc - o.lapc, p1 - o.p1, p3 - o.p3, pq - o.pq};
  }
  EllipticForm scaled(const Rat& s) const { return {d11 * s, lapc * s, p1 * s, p3 * s, pq * s}; }
  std::string str(int q) const;
};

struct EllipticSystem {
  EllipticForm sec1r, Lq, L1q, Lcq;          // printed coefficient tables
  EllipticForm sec1r_engine, Lq_engine;      // extracted from the jet engine
  bool sec1r_matches = false;
  bool Lq_matches = false;
  bool L1q_combination = false;  // L1q = (sec1r - Lq) / 2
  bool Lcq_combination = false;  // Lcq = Lq - L1q
};

EllipticSystem printed_elliptic_system(int q, const Rat& alpha, const Rat& m, const Rat& F1, const Rat& F3);
EllipticSystem extract_elliptic_system(const AnsatzContext& ctx);
IdentityReport check_elliptic_system(const AnsatzContext& ctx);

// Multi-trial drivers.
enum class CheckId { Expansion, FlatSecond, Dtne2, Dtne3, X1Identity, Integrated, GradientSquared, Elliptic };

std::string check_name(CheckId id);
std::string check_paper_ref(CheckId id);
bool check_applicable(CheckId id, int N, int q);
IdentityReport run_check(CheckId id, int N, int q, int trials, std::uint64_t seed);
std::vector<CheckId> all_checks();

// Exact coefficients of the polynomial through (xs[i], ys[i]); lowest degree first.
std::vector<Rat> interpolate(const std::vector<Rat>& xs, const std::vector<Rat>& ys);

}  // namespace qmb
