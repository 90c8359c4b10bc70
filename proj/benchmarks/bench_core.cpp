#include <benchmark/benchmark.h>

#include "kobalab/discs.hpp"
#include "kobalab/lower.hpp"
#include "kobalab/sibony.hpp"
#include "kobalab/upper.hpp"

using namespace kobalab;

namespace {

FamilyParams f3_params(double eps) {
  FamilyParams p;
  p.eps = eps;
  p.delta = 0.9 * eps;
  p.mu = 2.0;
  return p;
}

void BM_DiscEval(benchmark::State& state) {
  const auto d = paper_disc(Family::F3, f3_params(1e-3));
  std::vector<Complex> zs;
  for (int k = 0; k < 64; ++k) zs.push_back(std::polar(0.9 * (k + 1) / 64.0, 0.7 * k));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(d.eval(zs[i++ & 63]));
}
BENCHMARK(BM_DiscEval);

void BM_GridScan(benchmark::State& state) {
  const auto d = paper_disc(Family::F3, f3_params(1e-3));
  const auto G = DomainSpec::g_plain(2.0);
  GridParams g;
  g.angles = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_scan(d, G, g).worst_margin);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.angles) *
                          (g.rings + g.interior_linear + g.interior_geometric));
}
BENCHMARK(BM_GridScan)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_LempertExplicit(benchmark::State& state) {
  const auto G = DomainSpec::g_plain(2.0);
  const double eps = 1e-4;
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
  for (auto _ : state) benchmark::DoNotOptimize(lempert_upper(G, z, w, o).value);
}
BENCHMARK(BM_LempertExplicit)->Unit(benchmark::kMillisecond);

void BM_ChainExplicit(benchmark::State& state) {
  const auto G = DomainSpec::g_plain(2.0);
  const double eps = 1e-4;
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
  for (auto _ : state) benchmark::DoNotOptimize(lempert_chain_upper(G, z, w, 2, o).aggregate_ell());
}
BENCHMARK(BM_ChainExplicit)->Unit(benchmark::kMillisecond);

void BM_PolyOptPolydisc(benchmark::State& state) {
  const auto P = DomainSpec::polydisc(2);
  UpperOptions o;
  o.strategy = Strategy::PolyOpt;
  o.poly.restarts = static_cast<int>(state.range(0));
  const CPoint z{0.2, Complex{0.0, 0.1}}, w{-0.1, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(lempert_upper(P, z, w, o).value);
}
BENCHMARK(BM_PolyOptPolydisc)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_SqrtTrick(benchmark::State& state) {
  const auto G = DomainSpec::g_plain(2.0);
  double eps = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqrt_trick_lower(G, 0.5 * eps, eps).value);
    eps = eps < 1e-8 ? 1e-3 : eps * 0.9;
  }
}
BENCHMARK(BM_SqrtTrick);

void BM_SqrtTrickPsi(benchmark::State& state) {
  const auto G = DomainSpec::g_psi(ModulusOfContinuity::log_type());
  for (auto _ : state) benchmark::DoNotOptimize(sqrt_trick_lower(G, 0.5e-4, 1e-4).value);
}
BENCHMARK(BM_SqrtTrickPsi);

void BM_SibonyCandidate(benchmark::State& state) {
  SamplingOptions s;
  s.samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sibony_candidate(2.0, 1e-3, 1.0, 0.0, 2, s).L);
}
BENCHMARK(BM_SibonyCandidate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_LeviFiniteDifference(benchmark::State& state) {
  CandidateFunction c;
  c.mu = 2.0;
  c.eps = 1e-3;
  const ScalarField f = f_branch(c);
  const CPoint p{-c.eps, 0.0}, X{1.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(levi_form(f, p, X, true).value);
}
BENCHMARK(BM_LeviFiniteDifference);

}  // namespace

BENCHMARK_MAIN();
