// OpenMP kernels against their plain-loop references. Run with
// --benchmark_min_time if the default sampling is too noisy.

#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "wlr/geometry.hpp"
#include "wlr/harness.hpp"
#include "wlr/rng.hpp"
#include "wlr/scenarios.hpp"
#include "wlr/threshold.hpp"

namespace {

struct SweepFixture {
  wlr::Scene scene;
  wlr::RenderSetup setup;
  wlr::DisplacementError err{2.0, -1.0, wlr::ErrorMode::fit};
};

const SweepFixture& sweep_fixture() {
  static const SweepFixture fx = [] {
    SweepFixture f;
    std::tie(f.scene, f.setup) = wlr::build_scenario("vr-grid-near");
    return f;
  }();
  return fx;
}

struct ContourFixture {
  wlr::GpModel model;
  wlr::PosteriorFn posterior;
  wlr::Limits limits;
  wlr::AcquisitionGrid grid;
};

// One fitted 110-trial model shared by the contour/acquisition benchmarks.
const ContourFixture& contour_fixture() {
  static const ContourFixture fx = [] {
    ContourFixture f;
    wlr::SimulatedObserver observer(wlr::ObserverSpec{}, 1);
    std::vector<wlr::TrialRecord> trials;
    for (const auto& [xn, zn] : wlr::init_design(25)) {
      const double x = xn * f.limits.lx_mm, z = zn * f.limits.lz_mm;
      trials.push_back({"s", "c", x, z, observer.respond(x, z)});
    }
    wlr::Rng rng(3);
    for (int k = 0; k < 85; ++k) {
      const double x = (2.0 * rng.uniform01() - 1.0) * f.limits.lx_mm;
      const double z = (2.0 * rng.uniform01() - 1.0) * f.limits.lz_mm;
      trials.push_back({"s", "c", x, z, observer.respond(x, z)});
    }
    auto [model, hp] = wlr::fit_response_model(trials, f.limits);
    f.model = std::move(model);
    f.posterior = wlr::model_posterior_fn(f.model);
    f.grid = wlr::make_acquisition_grid();
    return f;
  }();
  return fx;
}

void BM_VorSweepSerial(benchmark::State& state) {
  const auto& fx = sweep_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(wlr::vor_sweep_serial(fx.scene, fx.err, fx.setup));
}
BENCHMARK(BM_VorSweepSerial)->Unit(benchmark::kMillisecond);

void BM_VorSweepParallel(benchmark::State& state) {
  const auto& fx = sweep_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(wlr::vor_sweep(fx.scene, fx.err, fx.setup));
}
BENCHMARK(BM_VorSweepParallel)->Unit(benchmark::kMillisecond);

void BM_ExtractContourSerial(benchmark::State& state) {
  const auto& fx = contour_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(wlr::extract_contour_serial(fx.posterior, fx.limits));
}
BENCHMARK(BM_ExtractContourSerial)->Unit(benchmark::kMillisecond);

void BM_ExtractContourParallel(benchmark::State& state) {
  const auto& fx = contour_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(wlr::extract_contour(fx.posterior, fx.limits));
}
BENCHMARK(BM_ExtractContourParallel)->Unit(benchmark::kMillisecond);

// Acquisition over the full 33x33 lattice (one batched posterior sweep).
void BM_AcquireNext(benchmark::State& state) {
  const auto& fx = contour_fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(wlr::acquire_next(fx.posterior, fx.grid));
}
BENCHMARK(BM_AcquireNext)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
