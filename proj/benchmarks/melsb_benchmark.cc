#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "melsb/beamformer.h"
#include "melsb/scene.h"
#include "melsb/stft.h"
#include "melsb/subband.h"

namespace melsb {
namespace {

std::vector<double> Noise(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.1);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

void BM_StftRoundTrip(benchmark::State& state) {
  const Waveform w = Waveform::Mono(16000, Noise(16000, 1));
  const StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Istft(Stft(w, cfg)));
  state.SetItemsProcessed(state.iterations() * 16000);
}
BENCHMARK(BM_StftRoundTrip);

void BM_SimulateRir(benchmark::State& state) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = state.range(0) / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(SimulateRir(spec, spec.zones[0]));
}
BENCHMARK(BM_SimulateRir)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_OracleMvdr(benchmark::State& state) {
  const int frames = 63, bins = 257, dim = 3;
  CovarianceSeries ss(frames, bins, dim), zz(frames, bins, dim);
  const auto r = Noise(2 * frames * bins * dim, 2);
  for (int t = 0; t < frames; ++t)
    for (int f = 0; f < bins; ++f)
      for (int i = 0; i < dim; ++i) {
        const size_t k = (static_cast<size_t>(t) * bins + f) * dim + i;
        ss.at(t, f, i, i) = 1.0 + r[2 * k] * r[2 * k];
        zz.at(t, f, i, i) = 1.0 + r[2 * k + 1] * r[2 * k + 1];
      }
  for (auto _ : state) benchmark::DoNotOptimize(OracleMvdrWeights(ss, zz));
}
BENCHMARK(BM_OracleMvdr)->Unit(benchmark::kMillisecond);

void BM_SubbandRoundTrip(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const BandPlan plan = MakeBandPlan(257, k, 16000);
  const auto filters = SubbandFilters::Orthonormal(plan, 32, 3);
  const int frames = 63, dim = 60;
  const auto feat = Noise(static_cast<size_t>(frames) * 257 * dim, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        Synthesize(Analyze(feat, frames, dim, plan, filters), plan, filters));
}
BENCHMARK(BM_SubbandRoundTrip)->Arg(8)->Arg(16)->Arg(32)->Arg(64)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace melsb

BENCHMARK_MAIN();
