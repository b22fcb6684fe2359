#include <benchmark/benchmark.h>

#include "ddscope/coherence.hpp"
#include "ddscope/filter_function.hpp"
#include "ddscope/monte_carlo.hpp"
#include "ddscope/noise_synthesis.hpp"
#include "ddscope/welch.hpp"

using namespace ddscope;

namespace {

void BM_FilterExact(benchmark::State& state) {
  const auto seq = make_cpmg(static_cast<int>(state.range(0)), 1.0);
  FilterEvaluator g(seq, FilterEvaluator::Mode::ExactSum);
  double u = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g(u));
    u += 0.7;
    if (u > 4000.0) u = 0.3;
  }
}
BENCHMARK(BM_FilterExact)->Arg(1)->Arg(10)->Arg(64);

void BM_FilterClosed(benchmark::State& state) {
  const auto seq = make_cpmg(static_cast<int>(state.range(0)), 1.0);
  FilterEvaluator g(seq);
  double u = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g(u));
    u += 0.7;
    if (u > 4000.0) u = 0.3;
  }
}
BENCHMARK(BM_FilterClosed)->Arg(1)->Arg(10)->Arg(64);

void BM_ChiNumericPowerLaw(benchmark::State& state) {
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  const auto seq = make_cpmg(static_cast<int>(state.range(0)), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_numeric(s, seq).chi);
  }
}
BENCHMARK(BM_ChiNumericPowerLaw)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ChiNumericResonance(benchmark::State& state) {
  const NoiseSpectrum s(GaussianResonance{50.0, 628.3, 12.6});
  const auto seq = make_cpmg(8, 0.12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_numeric(s, seq).chi);
  }
}
BENCHMARK(BM_ChiNumericResonance)->Unit(benchmark::kMillisecond);

void BM_GenerateNoise(benchmark::State& state) {
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_noise(s, 1e-4, n, ++seed).samples.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(n));
}
BENCHMARK(BM_GenerateNoise)->Arg(1 << 11)->Arg(1 << 14)->Arg(1 << 17);

void BM_McVisibility(benchmark::State& state) {
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  const auto seq = make_cpmg(4, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_visibility(s, seq, 100, 7).visibility_mean);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 100);
}
BENCHMARK(BM_McVisibility)->Unit(benchmark::kMillisecond);

void BM_WelchPsd(benchmark::State& state) {
  const NoiseSpectrum s(PowerLaw{1.0, 0.89});
  const auto ts = generate_noise(s, 1e-4, 1 << 18, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(welch_psd(ts, 1 << 12, 0.5, PsdWindow::Hann).value.data());
  }
}
BENCHMARK(BM_WelchPsd)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
