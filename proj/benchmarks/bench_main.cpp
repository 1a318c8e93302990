#include <benchmark/benchmark.h>

#include "driftless/models.hpp"
#include "driftless/schedule.hpp"
#include "driftless/simulator.hpp"
#include "driftless/synthesis.hpp"

namespace {

using namespace driftless;

void BM_PinvWide(benchmark::State& state) {
  const Mat b = admire_model().input_map(Vec::zeros(3));
  for (auto _ : state) benchmark::DoNotOptimize(pinv(b));
}
BENCHMARK(BM_PinvWide);

void BM_HarmonicSchedule(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_schedule(1.0, count));
}
BENCHMARK(BM_HarmonicSchedule)->Arg(1000)->Arg(100000);

void BM_SolveTUpper(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_t_upper(0.5, 2.6143));
}
BENCHMARK(BM_SolveTUpper);

void BM_IntegrateSegmentVdp(benchmark::State& state) {
  const SystemModel model = vdp_model(0.2);
  const Vec x0{2.90, 0.17};
  const Vec u{0.25};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_segment(model, x0, u, 0.0, 1.0, 1e-3));
}
BENCHMARK(BM_IntegrateSegmentVdp);

void BM_ClosedLoopAdmire(benchmark::State& state) {
  ProblemSpec spec;
  spec.model = admire_model();
  spec.x0 = Vec{4.86, 1.23, 3.07};
  spec.xtg = Vec{0.0, 0.0, 0.0};
  spec.t_star = 10.0;
  spec.n_checkpoints = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_closed_loop(spec));
}
BENCHMARK(BM_ClosedLoopAdmire)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
