#include <benchmark/benchmark.h>

#include <cmath>

#include "nlpde/nonlocal_operator.hpp"

namespace {

using namespace nlpde;

void BM_quadrature_table_build(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_quadrature_table(1, 1.0, 2.0 / nodes, 1.3, false));
  }
}
BENCHMARK(BM_quadrature_table_build)->Arg(256)->Arg(1024)->Arg(4096);

void BM_apply_L(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  GridFunction u = GridFunction::sample(1, 1.0, 2.0 / nodes, ExteriorRule::zero(),
                                        [](const Point& x) { return std::cos(3.0 * x[0]); });
  const KernelSpec k =
      make_holder_modulated(1, 1.3, 1.0, 2.0, 0.5, HolderModulation{0.4, true});
  const QuadratureTable q = build_quadrature_table(u, k.sigma);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_L(u, k, nodes / 2, 0, -0.1, q));
  }
}
BENCHMARK(BM_apply_L)->Arg(256)->Arg(1024)->Arg(4096);

void BM_holder_integral(benchmark::State& state) {
  const KernelSpec k =
      make_holder_modulated(1, 1.3, 1.0, 2.0, 0.5, HolderModulation{0.4, true});
  for (auto _ : state) {
    benchmark::DoNotOptimize(holder_integral(k, point1(1.2), -0.4, 0.5));
  }
}
BENCHMARK(BM_holder_integral);

void BM_certify(benchmark::State& state) {
  const KernelSpec k =
      make_holder_modulated(1, 1.3, 1.0, 2.0, 0.5, HolderModulation{0.4, true});
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_hypotheses(k, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_certify)->Arg(500)->Arg(2000);

}  // namespace
