#include <benchmark/benchmark.h>

#include "thermoform/convex.hpp"
#include "thermoform/gibbs.hpp"
#include "thermoform/nonlinear_pressure.hpp"
#include "thermoform/shift_model.hpp"

using namespace thermoform;

static void BM_LinearPressure(benchmark::State& state) {
  const ShiftModel m = builtin_model("potts:" + std::to_string(state.range(0)));
  const Vec y = Vec::LinSpaced(m.dim(), -0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(linear_pressure(m, y).pressure);
}
BENCHMARK(BM_LinearPressure)->Arg(3)->Arg(5);

static void BM_EntropyAt(benchmark::State& state) {
  const ShiftModel m = builtin_model("asymmetric_cw");
  const Vec z = Vec::Constant(1, 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_at(m, z).h);
}
BENCHMARK(BM_EntropyAt);

static void BM_NlPressureCurieWeiss(benchmark::State& state) {
  const ShiftModel m = builtin_model("curie_weiss");
  const NonlinearEnergy e = NonlinearEnergy::quadratic(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(nl_pressure(m, e).pressure);
}
BENCHMARK(BM_NlPressureCurieWeiss)->Unit(benchmark::kMillisecond);

static void BM_NlPressurePotts3(benchmark::State& state) {
  const ShiftModel m = builtin_model("potts:3");
  const NonlinearEnergy e = NonlinearEnergy::quadratic(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(nl_pressure(m, e).pressure);
}
BENCHMARK(BM_NlPressurePotts3)->Unit(benchmark::kMillisecond);

static void BM_ZetaExact(benchmark::State& state) {
  const ShiftModel m = builtin_model("curie_weiss");
  const NonlinearEnergy e = NonlinearEnergy::quadratic(0.5);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zeta_exact(m, e, n).log_zeta);
}
BENCHMARK(BM_ZetaExact)->Arg(100)->Arg(2000);

static void BM_ZetaExactGolden(benchmark::State& state) {
  const ShiftModel m = validate_model(RawModel{{"a", "b"}, {{1, 1}, {1, 0}}, {{1.0}, {-1.0}}});
  const NonlinearEnergy e = NonlinearEnergy::quadratic(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(zeta_exact(m, e, 200).log_zeta);
}
BENCHMARK(BM_ZetaExactGolden)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
