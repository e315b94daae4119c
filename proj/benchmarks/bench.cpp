#include <benchmark/benchmark.h>

#include "sitesim/coordination.hpp"
#include "sitesim/episode.hpp"
#include "sitesim/observation.hpp"

namespace {

using namespace sitesim;

ScenarioConfig bench_config() {
  ScenarioConfig config;
  config.seed = 99;
  return config;
}

void BM_RenderGlobal(benchmark::State& state) {
  const SiteState site = generate_scenario(bench_config(), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_global(site.map));
  }
}
BENCHMARK(BM_RenderGlobal);

void BM_RenderLocal(benchmark::State& state) {
  const SiteState site = generate_scenario(bench_config(), 0);
  const Pose pose{125.0, 125.0, 0.4, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_local(site.map, pose));
  }
}
BENCHMARK(BM_RenderLocal);

void BM_DetectConflict(benchmark::State& state) {
  const AgentSpecs specs;
  const SawParams saw;
  const TimedTrajectory dozer = TimedTrajectory::from_waypoints({
      {30.0f, 125.0f, 0.0f},
      {220.0f, 125.0f, 12.7f},
  });
  const TimedTrajectory dumper = TimedTrajectory::from_waypoints({
      {125.0f, 30.0f, 0.0f},
      {125.0f, 220.0f, 12.7f},
  });
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_conflict(dozer, dumper, specs, saw));
  }
}
BENCHMARK(BM_DetectConflict);

void BM_DozerPush(benchmark::State& state) {
  const ScenarioConfig config = bench_config();
  for (auto _ : state) {
    state.PauseTiming();
    SiteState site = generate_scenario(config, 1);
    site.dozer = {125.0, 170.0, -kPi / 2.0, 0.0};
    state.ResumeTiming();
    for (int i = 0; i < 100; ++i) dozer_push_step(site, 1.5, config.dozer_spec);
    benchmark::DoNotOptimize(site.cleared_volume);
  }
}
BENCHMARK(BM_DozerPush);

void BM_SawEpisode(benchmark::State& state) {
  const ScenarioConfig config = bench_config();
  uint64_t episode = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episode(config, Mode::Saw, episode++).metrics);
  }
}
BENCHMARK(BM_SawEpisode)->Unit(benchmark::kMillisecond);

}  // namespace
