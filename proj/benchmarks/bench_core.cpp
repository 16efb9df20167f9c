#include <benchmark/benchmark.h>

#include <cmath>

#include "sjl/angle_reduction.hpp"
#include "sjl/equidist.hpp"
#include "sjl/pruefer.hpp"
#include "sjl/rng.hpp"
#include "sjl/transfer.hpp"

using namespace sjl;

namespace {

SpectralConfig config_with_depth(std::size_t depth) {
  SpectralConfig config;
  config.coupling = ConstantCoupling{0.5};
  config.energy = EnergyPoint::from_lambda(0.7);
  config.disorder.seed = 1;
  config.depth = depth;
  return config;
}

}  // namespace

// a * varphi mod pi for a ~ 2^bits.
static void BM_ReduceAngle(benchmark::State& state) {
  const auto bits = static_cast<std::size_t>(state.range(0));
  BigInt a;
  mpz_ui_pow_ui(a.get_mpz_t(), 3, static_cast<unsigned long>(bits * 0.631));
  const PhaseReducer reducer(std::acos(0.35), bits + 96);
  for (auto _ : state) benchmark::DoNotOptimize(reducer.reduce(a));
}
BENCHMARK(BM_ReduceAngle)->RangeMultiplier(4)->Range(64, 16384);

static void BM_BlockNorms(benchmark::State& state) {
  const auto config = config_with_depth(static_cast<std::size_t>(state.range(0)));
  const auto realization = realize(config, 0);
  const auto schedule = rotation_schedule(config, realization);
  for (auto _ : state) benchmark::DoNotOptimize(block_norms(config, realization, schedule));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BlockNorms)->RangeMultiplier(4)->Range(64, 4096);

// Includes the rotation schedule, which dominates at large depth.
static void BM_RunTrajectory(benchmark::State& state) {
  const auto config = config_with_depth(static_cast<std::size_t>(state.range(0)));
  const auto realization = realize(config, 0);
  for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(config, realization));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrajectory)->RangeMultiplier(4)->Range(64, 4096);

static void BM_StarDiscrepancy(benchmark::State& state) {
  CounterRng rng(2, 0, 0);
  std::vector<double> theta(static_cast<std::size_t>(state.range(0)));
  for (auto& t : theta) t = std::ldexp(static_cast<double>(rng.next() >> 11), -53) * 3.141592653589793;
  for (auto _ : state) benchmark::DoNotOptimize(star_discrepancy(theta));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StarDiscrepancy)->RangeMultiplier(8)->Range(64, 1 << 18)->Complexity(benchmark::oNLogN);
BENCHMARK_MAIN();
