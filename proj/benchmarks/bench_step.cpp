#include <benchmark/benchmark.h>

#include "flapsim/config_io.hpp"
#include "flapsim/dynamics.hpp"
#include "flapsim/harness.hpp"

using namespace flapsim;

namespace {

const std::string kData = FLAPSIM_BENCH_DATA_DIR;

RobotModel robot(int elements) {
  RobotModel m = load_robot(kData + "/aerobat.json");
  m.n_elements = elements;
  return m;
}

void BM_MassMatrix(benchmark::State& state) {
  const RobotModel m = robot(16);
  Vec8 q;
  q << 0.1, 0.2, 0.3, 0.1, -0.2, 0.3, 0.4, -0.5;
  for (auto _ : state) benchmark::DoNotOptimize(mass_matrix(m, q));
}
BENCHMARK(BM_MassMatrix);

void BM_BiasForces(benchmark::State& state) {
  const RobotModel m = robot(16);
  Vec8 q, qd;
  q << 0.1, 0.2, 0.3, 0.1, -0.2, 0.3, 0.4, -0.5;
  qd.setConstant(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(bias_forces(m, q, qd));
}
BENCHMARK(BM_BiasForces);

void BM_Step(benchmark::State& state) {
  const auto mode = static_cast<Mode>(state.range(1));
  const RobotModel m = robot(static_cast<int>(state.range(0)));
  GaitSchedule g = load_gait(kData + "/gait_default.json");
  Simulator sim(m, g, {mode, AeroModel::unsteady, headwind(1.0), 0.1});
  FullState s = sim.initial_state({});
  for (auto _ : state) {
    sim.step(s, {}, 5e-4);
    if (s.time > 0.2) s = sim.initial_state({});
  }
}
BENCHMARK(BM_Step)
    ->ArgsProduct({{8, 16, 32}, {static_cast<long>(Mode::tethered), static_cast<long>(Mode::free_flight)}})
    ->ArgNames({"elements", "mode"});

void BM_TetheredRun(benchmark::State& state) {
  const RobotModel m = robot(16);
  const GaitSchedule g = load_gait(kData + "/gait_default.json");
  ScenarioConfig s = load_scenario(kData + "/scenario_tethered.json");
  s.duration_s = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(m, g, s));
}
BENCHMARK(BM_TetheredRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
