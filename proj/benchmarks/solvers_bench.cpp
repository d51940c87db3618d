#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "relsha/evaluation.hpp"
#include "relsha/ingest.hpp"
#include "relsha/solver_cha.hpp"
#include "relsha/solver_ha.hpp"
#include "relsha/solver_relsha.hpp"

using namespace relsha;

namespace {

const std::filesystem::path kData = RELSHA_BENCH_DATA_DIR;

struct Inputs {
  ConstituentCatalog catalog = load_catalog(kData / "noaa37.csv");
  HarmonicSolution truth = load_harmonics(kData / "synthetic_truth.csv", catalog).solution;
  Eigen::VectorXd reference = load_harmonics(kData / "reference.csv", catalog).solution.amplitudes;
  GaugeHarmonics ref_a = load_gauge_harmonics(kData / "reference_a.csv", catalog);
  GaugeHarmonics ref_b = load_gauge_harmonics(kData / "reference_b.csv", catalog);
  TruthSource source = synthetic_truth(truth, catalog, 366.0 * 24.0, 0.1);
};

const Inputs& inputs() {
  static const Inputs in;
  return in;
}

WaterLevelSeries sampled(double interval) {
  return resample(inputs().source.base, SamplingPlan{interval, 365.0 * 24.0, 1});
}

void BM_HaFit(benchmark::State& state) {
  const auto series = sampled(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(ha_fit(series, inputs().catalog));
  state.counters["samples"] = static_cast<double>(series.size());
}
BENCHMARK(BM_HaFit)->Arg(1)->Arg(10)->Arg(2376)->Unit(benchmark::kMillisecond);

void BM_ChaFit(benchmark::State& state) {
  const auto series = sampled(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(cha_fit(series, inputs().ref_a, inputs().ref_b, inputs().catalog));
  state.counters["samples"] = static_cast<double>(series.size());
}
BENCHMARK(BM_ChaFit)->Arg(10)->Arg(2376)->Unit(benchmark::kMillisecond);

void BM_RelshaFit(benchmark::State& state) {
  const auto series = sampled(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(relsha_fit(series, inputs().reference, inputs().catalog));
  state.counters["samples"] = static_cast<double>(series.size());
}
BENCHMARK(BM_RelshaFit)->Arg(10)->Arg(2376)->Arg(2640)->Unit(benchmark::kMillisecond);

void BM_RelshaGradient(benchmark::State& state) {
  const auto m = state.range(0);
  const auto n = state.range(1);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd H(m, 2 * n);
  Eigen::VectorXd h(m), q(n), x(2 * n);
  for (Eigen::Index i = 0; i < H.size(); ++i) H.data()[i] = g(rng);
  for (auto& v : h) v = g(rng);
  for (auto& v : q) v = std::abs(g(rng));
  for (auto& v : x) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(relsha_gradient(x, H, h, q, 0.5));
}
BENCHMARK(BM_RelshaGradient)->Args({37, 37})->Args({74, 37})->Args({8760, 37});

}  // namespace
BENCHMARK_MAIN();
