#include <benchmark/benchmark.h>

#include <cstdint>

#include "cournot/basin.hpp"
#include "cournot/hjc.hpp"

using namespace cournot;

namespace {

// The unit integrator with every step divided by `refine`; the velocity
// step h*u stays on the lattice, so the basin keeps its shape.
ProblemSpec refined_problem(int refine) {
  ProblemSpec p = unit_integrator_problem();
  const double h = 0.25 / refine;
  p.grid = GridSpec::make(Axis::make(0, 4, h), Axis::make(0, 4, h), {Axis::make(-2, 2, h)});
  validate_problem(p);
  return p;
}

void BM_CaptureBasin(benchmark::State& state) {
  const ProblemSpec p = refined_problem(static_cast<int>(state.range(0)));
  const StepRule r = step_rule(p, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(capture_basin(p, r));
  state.counters["cells"] = static_cast<double>(p.grid.cell_count());
}
BENCHMARK(BM_CaptureBasin)->ArgsProduct({{1, 2, 4, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_EpigraphSolution(benchmark::State& state) {
  const int refine = static_cast<int>(state.range(0));
  const ProblemSpec p = refined_problem(refine);
  const StepRule r = step_rule(p);
  const CostSpec costs = parse_costs(R"({"departure": {"family": "zero-on-C"},
      "lagrangian": {"family": "constant", "params": {"value": 1}}})");
  const Axis y = Axis::make(0, 4.5, 0.25 / refine);
  for (auto _ : state) benchmark::DoNotOptimize(epigraph_solution(p, r, costs, y));
  state.counters["cells"] = static_cast<double>(p.grid.cell_count() * y.count);
}
BENCHMARK(BM_EpigraphSolution)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
