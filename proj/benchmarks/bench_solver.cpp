#include <benchmark/benchmark.h>

#include <cmath>

#include "nlpde/solver.hpp"

namespace {

using namespace nlpde;

CauchyExteriorProblem bench_problem() {
  CauchyExteriorProblem p;
  p.kernel = make_holder_modulated(1, 1.3, 1.0, 2.0, 0.5, HolderModulation{0.4, false});
  p.rhs = [](const Point& x, double) { return std::cos(x[0]); };
  p.domain_radius = 1.0;
  p.t_start = -0.05;
  p.t_end = 0.0;
  p.exterior = ExteriorRule::callable(
      [](const Point& x, double) { return 0.3 * std::exp(-x[0] * x[0]); });
  return p;
}

// Dominated by one assembly + factorization plus a handful of steps.
void BM_solve_short(benchmark::State& state) {
  const CauchyExteriorProblem p = bench_problem();
  SolveOptions o;
  o.h = 2.0 / state.range(0);
  o.dt = 0.01;
  o.static_data = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(p, o));
  }
}
BENCHMARK(BM_solve_short)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_steady_residual(benchmark::State& state) {
  const CauchyExteriorProblem p = bench_problem();
  SolveOptions o;
  o.h = 2.0 / 128;
  o.dt = 0.01;
  const SpaceTimeSolution u = solve(p, o);
  for (auto _ : state) {
    benchmark::DoNotOptimize(steady_residual(u, p));
  }
}
BENCHMARK(BM_steady_residual)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
