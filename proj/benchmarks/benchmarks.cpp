#include <benchmark/benchmark.h>

#include <random>

#include "eans/pipeline.hpp"
#include "eans/planner.hpp"
#include "eans/world.hpp"

using namespace eans;

namespace {

constexpr double kTwoPi = 6.283185307179586;

Scenario bench_scenario(double density, std::uint64_t seed) {
    GenParams p;
    p.bounds = {{0, 0}, {40, 20}};
    p.zone_densities = {density};
    p.seed = seed;
    p.sensor.max_range = 8.0;
    p.sensor.fov = kTwoPi;
    p.sensor.ray_count = 128;
    p.sensor.pixel_capacity = 128;
    return generate_scenario(p);
}

OccupancyGrid mapped_grid(const Scenario& s, double cell) {
    OccupancyGrid grid(s.bounds.min, {s.bounds.width(), s.bounds.height()}, cell, 1);
    double t = 0.0;
    for (double x = 2.0; x < 38.0; x += 4.0) {
        grid.integrate_frame(sense({x, 10.0}, 0.0, s, t));
        t += 0.1;
    }
    return grid;
}

void bm_integrate_frame(benchmark::State& state) {
    Scenario s = bench_scenario(0.10, 1);
    double cell = state.range(0) / 100.0;
    OccupancyGrid grid(s.bounds.min, {s.bounds.width(), s.bounds.height()}, cell, 3);
    SensorFrame frame = sense({10, 10}, 0.0, s);
    double t = 0.0;
    for (auto _ : state) {
        frame.timestamp = t;
        t += 0.01;
        benchmark::DoNotOptimize(grid.integrate_frame(frame));
    }
}
BENCHMARK(bm_integrate_frame)->Arg(10)->Arg(25)->Arg(50);  // cell size in cm

void bm_plan(benchmark::State& state) {
    Scenario s = bench_scenario(0.10, 2);
    OccupancyGrid grid = mapped_grid(s, state.range(0) / 100.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(plan(grid, s.start, s.goal, 0.5));
    }
}
BENCHMARK(bm_plan)->Arg(10)->Arg(25)->Arg(50);

void bm_closest_approach(benchmark::State& state) {
    Scenario s = bench_scenario(0.10, 3);
    OccupancyGrid grid = mapped_grid(s, 0.1);
    auto traj = plan(grid, s.start, s.goal, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(closest_approach(*traj, grid, 8.0, 0.05));
    }
}
BENCHMARK(bm_closest_approach);

void bm_run_mission(benchmark::State& state) {
    Scenario s = bench_scenario(0.08, 4);
    MissionConfig cfg;
    StrategyMode mode =
        state.range(0) == 0 ? StrategyMode::Baseline : StrategyMode::Eans;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_mission(s, mode, cfg, 1));
    }
}
BENCHMARK(bm_run_mission)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
