// Serial reference paths against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "raqr/config.hpp"
#include "raqr/coverage_analytics.hpp"
#include "raqr/detuning_search.hpp"
#include "raqr/network_simulator.hpp"

using namespace raqr;

namespace {

TrialConfig trial_config() {
  TrialConfig cfg;
  cfg.net.bs_density = 1e-4;
  cfg.mode = SimMode::raqr_bussgang;
  cfg.coeffs = coefficient_preset("cs_optimized");
  cfg.n_trials = 5000;
  return cfg;
}

void BM_TrialsSerial(benchmark::State& state) {
  const TrialConfig cfg = trial_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_trials_serial(cfg));
}

void BM_TrialsParallel(benchmark::State& state) {
  const TrialConfig cfg = trial_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_trials(cfg));
}

GridSpec small_grid() { return GridSpec::uniform(-kTwoPi * 20e6, kTwoPi * 20e6, 6, 6, 0.0); }

void BM_LandscapeSerial(benchmark::State& state) {
  const AtomicConfig atoms = cesium_profile();
  const GridSpec grid = small_grid();
  for (auto _ : state) benchmark::DoNotOptimize(scan_landscape_serial(atoms, grid));
}

void BM_LandscapeParallel(benchmark::State& state) {
  const AtomicConfig atoms = cesium_profile();
  const GridSpec grid = small_grid();
  for (auto _ : state) benchmark::DoNotOptimize(scan_landscape(atoms, grid));
}

const SweepSpec kThetaSweep{AxisKind::theta_db, {-10, -5, 0, 5, 10, 15, 20}, 0.0};

void BM_CurveSerial(benchmark::State& state) {
  NetworkConfig net;
  net.correlation = 0.5;
  const Receiver rx = Receiver::conventional();
  for (auto _ : state) benchmark::DoNotOptimize(analytic_curve_serial(net, rx, kThetaSweep));
}

void BM_CurveParallel(benchmark::State& state) {
  NetworkConfig net;
  net.correlation = 0.5;
  const Receiver rx = Receiver::conventional();
  for (auto _ : state) benchmark::DoNotOptimize(analytic_curve(net, rx, kThetaSweep));
}

// Smooth stand-in objective so the benchmark measures the restart loop.
double bowl(const DetuningTriple& d) {
  const double s = 1e-7;
  return -((d.probe * s - 1.0) * (d.probe * s - 1.0) + (d.coupling * s + 2.0) * (d.coupling * s + 2.0) +
           d.lo * s * d.lo * s);
}

SearchSpec search_spec() {
  SearchSpec spec;
  spec.n_starts = 32;
  return spec;
}

void BM_MultiStartSerial(benchmark::State& state) {
  const SearchSpec spec = search_spec();
  for (auto _ : state) benchmark::DoNotOptimize(multi_start_maximize_serial(bowl, spec));
}

void BM_MultiStartParallel(benchmark::State& state) {
  const SearchSpec spec = search_spec();
  for (auto _ : state) benchmark::DoNotOptimize(multi_start_maximize(bowl, spec));
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LandscapeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LandscapeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiStartSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiStartParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
