#include <benchmark/benchmark.h>

#include <random>

#include "costreach/solver.hpp"
#include "costreach/systems.hpp"

namespace {

using namespace costreach;

ValueField make_random_field(GridSpec grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> values(grid.node_count());
  for (double& v : values) v = dist(rng);
  return ValueField(std::move(grid), std::move(values), {});
}

void BM_Interpolate2D(benchmark::State& state) {
  const ValueField field =
      make_random_field(GridSpec({{-1.0, 1.0, 201, false}, {-1.0, 1.0, 201, false}}), 1);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vec> points(1024);
  for (Vec& p : points) p = Vec{dist(rng), dist(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field.interpolate(points[i++ & 1023]));
  }
}
BENCHMARK(BM_Interpolate2D);

void BM_Interpolate3D(benchmark::State& state) {
  const ValueField field = make_random_field(
      GridSpec({{-4.0, 4.0, 65, false}, {-4.0, 4.0, 65, false}, {0.0, 6.283185307179586, 64, true}}),
      3);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> xy(-4.0, 4.0);
  std::uniform_real_distribution<double> theta(0.0, 6.28);
  std::vector<Vec> points(1024);
  for (Vec& p : points) p = Vec{xy(rng), xy(rng), theta(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field.interpolate(points[i++ & 1023]));
  }
}
BENCHMARK(BM_Interpolate3D);

void BM_Rk4StepPlanarFlight(benchmark::State& state) {
  const BuiltinProblem problem = builtin_system("planar_flight");
  const Vec s{0.3, -1.2, 1.1};
  const Vec u{0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_step(problem.model, s, u, 0.02));
  }
}
BENCHMARK(BM_Rk4StepPlanarFlight);

void BM_BellmanStep2D(benchmark::State& state) {
  const BuiltinProblem problem = builtin_system("two_dim_poly");
  const GridSpec grid({{-1.0, 1.0, 41, false}, {-1.0, 1.0, 41, false}});
  SolverConfig config = SolverConfig::from_steps(0.02, 1);
  config.threads = static_cast<int>(state.range(0));
  const ValueField terminal = init_terminal(grid, problem.costs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bellman_step(terminal, problem.model, problem.costs, problem.target, config));
  }
}
BENCHMARK(BM_BellmanStep2D)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BellmanStep3D(benchmark::State& state) {
  const BuiltinProblem problem = builtin_system("planar_flight");
  const GridSpec grid(
      {{-4.0, 4.0, 33, false}, {-4.0, 4.0, 33, false}, {0.0, 6.283185307179586, 32, true}});
  SolverConfig config = SolverConfig::from_steps(0.04, 1);
  config.threads = static_cast<int>(state.range(0));
  const ValueField terminal = init_terminal(grid, problem.costs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bellman_step(terminal, problem.model, problem.costs, problem.target, config));
  }
}
BENCHMARK(BM_BellmanStep3D)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
