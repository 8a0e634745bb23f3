#include <benchmark/benchmark.h>

#include "selfcal/crlb.hpp"
#include "selfcal/estimator.hpp"
#include "selfcal/harness.hpp"
#include "selfcal/simulate.hpp"

using namespace selfcal;

static void BM_FisherInversion(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto t = Topology::daisy(m, (m + 1) / 2);
  const ScenarioParams s;
  const auto gains = draw_gains(m, s, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlb_numeric(fisher_matrix(t, gains, s)));
  }
}
BENCHMARK(BM_FisherInversion)->Arg(9)->Arg(33)->Arg(129);

static void BM_ClosedFormCrlb(benchmark::State& state) {
  const auto t = Topology::daisy(static_cast<int>(state.range(0)), 64);
  const ScenarioParams s;
  for (auto _ : state) benchmark::DoNotOptimize(crlb_closed_form(t, s));
}
BENCHMARK(BM_ClosedFormCrlb)->Arg(129);

static void BM_Synthesize(benchmark::State& state) {
  const auto t = Topology::daisy(129, 64);
  const auto s = ScenarioParams{}.with_snr_db(30);
  const auto gains = draw_gains(129, s, 1);
  const int reps = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(t, gains, s, reps, ++seed));
  state.SetItemsProcessed(state.iterations() * 256 * reps);
}
BENCHMARK(BM_Synthesize)->Arg(1)->Arg(64);

static void BM_EstimateTrial(benchmark::State& state) {
  const auto t = state.range(0) == 0 ? Topology::star(129, 64) : Topology::daisy(129, 64);
  const auto s = ScenarioParams{}.with_snr_db(30);
  const auto gains = draw_gains(129, s, 1);
  const auto ms = collapse_repetitions(synthesize(t, gains, s, 1, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ml_estimate(ms, t, s, gains.alpha_of(64), gains.beta_of(64)));
  }
}
BENCHMARK(BM_EstimateTrial)->Arg(0)->Arg(1);

static void BM_SweepPoint(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.topology = TopologyKind::Daisy;
  cfg.budget_mode = BudgetMode::Time;
  cfg.budget_value = 256;
  cfg.snr_grid_db = {30};
  cfg.trials = 100;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_snr_sweep(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_SweepPoint)->Unit(benchmark::kMillisecond);

static void BM_EnumerateTrees(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    TreeEnumerator e(m, 1);
    std::int64_t count = 0;
    while (auto tree = e.next()) count += max_degree(*tree);
    benchmark::DoNotOptimize(count);
  }
}
BENCHMARK(BM_EnumerateTrees)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
