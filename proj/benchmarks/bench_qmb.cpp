#include "qmb/ansatz.hpp"
#include "qmb/bell.hpp"
#include "qmb/evolve.hpp"
#include "qmb/profiles.hpp"
#include "qmb/residual.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace qmb;

namespace {

MJet<Rat> random_jet(const LayoutPtr& L, RatSampler& rng) {
  MJet<Rat> j(L);
  for (std::size_t i = 1; i < L->size(); ++i) {
    std::vector<int> e(L->exps(i), L->exps(i) + L->vars().size());
    j.set(e, rng.sample());
  }
  return j;
}

void BM_BellEvalRat(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), k = n / 2;
  RatSampler rng(1);
  std::vector<Rat> xs(n - k + 1);
  for (Rat& x : xs) x = rng.sample();
  for (auto _ : st) benchmark::DoNotOptimize(bell_eval(n, k, xs));
}
BENCHMARK(BM_BellEvalRat)->Arg(4)->Arg(8)->Arg(12);

void BM_BellEvalDouble(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), k = n / 2;
  std::vector<double> xs(n - k + 1, 0.7);
  for (auto _ : st) benchmark::DoNotOptimize(bell_eval(n, k, xs));
}
BENCHMARK(BM_BellEvalDouble)->Arg(4)->Arg(8)->Arg(12);

void BM_JetMul(benchmark::State& st) {
  LayoutPtr L = Layout::make({"x1", "x2", "t"}, static_cast<int>(st.range(0)));
  RatSampler rng(2);
  const MJet<Rat> a = random_jet(L, rng), b = random_jet(L, rng);
  for (auto _ : st) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetMul)->Arg(3)->Arg(5)->Arg(7);

void BM_JetCompose(benchmark::State& st) {
  const int D = static_cast<int>(st.range(0));
  LayoutPtr L = Layout::make({"x", "y"}, D);
  RatSampler rng(3);
  const MJet<Rat> G = random_jet(L, rng);
  std::vector<Rat> fc(D + 1);
  for (Rat& v : fc) v = rng.sample();
  const UJet<Rat> F(fc);
  for (auto _ : st) benchmark::DoNotOptimize(mjet_compose(F, G));
}
BENCHMARK(BM_JetCompose)->Arg(4)->Arg(6)->Arg(8);

void BM_IdentityCheck(benchmark::State& st) {
  const CheckId id = static_cast<CheckId>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_check(id, 1, 3, 1, 7));
  st.SetLabel(check_name(id));
}
BENCHMARK(BM_IdentityCheck)->DenseRange(0, 7)->Unit(benchmark::kMillisecond);

void BM_PdeResidual(benchmark::State& st) {
  const Profile g = gamma0_profile(0.5);
  const GridSpec grid = default_grid(0.5);
  for (auto _ : st) benchmark::DoNotOptimize(pde_residual(g, 3, 1, grid));
}
BENCHMARK(BM_PdeResidual)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SpectralStep(benchmark::State& st) {
  const int M = static_cast<int>(st.range(0));
  const SpectralState s = SpectralState::from_function(40.0, M, [](double x) { return gamma0_breather(0.5, 0, 0, 0, x); });
  const double dt = 0.05 * stability_bound(s, 3);
  for (auto _ : st) benchmark::DoNotOptimize(step(s, dt, 3));
}
BENCHMARK(BM_SpectralStep)->Arg(256)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
