#include <annuity/annuity.hpp>
#include <benchmark/benchmark.h>

using namespace annuity;

static void BM_Solve(benchmark::State& state) {
  const auto p = preset(state.range(0) == 0 ? "m1" : "m3");
  for (auto _ : state) benchmark::DoNotOptimize(BoundarySolver(DualUtility(p)).solve());
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_ShadowOfWealth(benchmark::State& state) {
  const Policy pol(preset("m3"));
  double x = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pol.solver().shadow_of_wealth(x, pol.solution()));
    x = x > 2000 ? 10 : x + 7;
  }
}
BENCHMARK(BM_ShadowOfWealth);

static void BM_PolicyAtShadow(benchmark::State& state) {
  const Policy pol(preset("m3"));
  const double y = pol.solution().y_star * 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pol.optimal_consumption(y));
    benchmark::DoNotOptimize(pol.optimal_portfolio(y));
  }
}
BENCHMARK(BM_PolicyAtShadow);

static void BM_Cohort(benchmark::State& state) {
  const Policy pol(preset("m3"));
  SimulationConfig cfg;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_cohort(pol, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Cohort)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
