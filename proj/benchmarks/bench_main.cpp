#include <benchmark/benchmark.h>

#include "popsteady/config.hpp"
#include "popsteady/fixedpoint.hpp"
#include "popsteady/levelset.hpp"
#include "popsteady/selmut.hpp"
#include "popsteady/spectral.hpp"

using namespace popsteady;

namespace {

Model load(const char* name) {
  return build_model(load_config(std::string(POPSTEADY_SOURCE_DIR "/configs/") + name));
}

void BM_CharacteristicValue(benchmark::State& state) {
  const TransportSystem sys(load("ja_const.cfg"), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(characteristic_value(sys, {0.5, 0.5}, 0.3));
}
BENCHMARK(BM_CharacteristicValue)->Arg(500)->Arg(2000)->Arg(8000);

void BM_SpectralBound(benchmark::State& state) {
  const TransportSystem sys(load("eh_const.cfg"), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_bound(sys, {0.2, 0.6}).bound);
}
BENCHMARK(BM_SpectralBound)->Arg(500)->Arg(2000);

void BM_TraceZeroSet(benchmark::State& state) {
  const TransportSystem sys(load("ja_const.cfg"), 2000);
  TraceOptions o;
  o.n_rays = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_zero_set(spectral_level_function(sys), o).samples.size());
}
BENCHMARK(BM_TraceZeroSet)->Arg(33)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_KernelRadius(benchmark::State& state) {
  const SelMutSystem sys(std::get<SelectionMutationModel>(load("sm_unif.cfg")), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sys.radius({0.5, 0.5}, 0.1));
}
BENCHMARK(BM_KernelRadius)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
