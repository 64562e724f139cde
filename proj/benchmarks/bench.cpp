#include <benchmark/benchmark.h>

#include "screpair/agents.hpp"
#include "screpair/generator.hpp"
#include "screpair/iis.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/model_builder.hpp"
#include "screpair/simplex.hpp"
#include "support.hpp"

namespace sr = screpair;

namespace {

sr::ScInstance sized_instance(int echelons, int periods) {
  sr::GeneratorConfig cfg;
  cfg.echelons = {echelons};
  cfg.periods = {periods};
  return sr::sample_instance(cfg, 7);
}

void BM_BuildLp(benchmark::State& state) {
  const auto in = sized_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(sr::build_lp(in));
}
BENCHMARK(BM_BuildLp)->Args({2, 12})->Args({5, 24});

void BM_Solve(benchmark::State& state) {
  const auto model = sr::build_lp(sized_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  for (auto _ : state) benchmark::DoNotOptimize(sr::solve(model));
  state.counters["rows"] = model.num_constraints();
}
BENCHMARK(BM_Solve)->Args({2, 12})->Args({3, 16})->Args({4, 20})->Args({5, 24})->Unit(benchmark::kMillisecond);

void BM_Iis(benchmark::State& state) {
  const auto spec = sr::testing::desk_episode();
  for (auto _ : state) benchmark::DoNotOptimize(sr::compute_iis(spec.model));
}
BENCHMARK(BM_Iis)->Unit(benchmark::kMillisecond);

void BM_LpTextRoundTrip(benchmark::State& state) {
  const auto model = sr::build_lp(sized_instance(4, 20));
  for (auto _ : state) benchmark::DoNotOptimize(sr::read_lp_text(sr::write_lp_text(model)));
}
BENCHMARK(BM_LpTextRoundTrip)->Unit(benchmark::kMillisecond);

void BM_GreedyEpisode(benchmark::State& state) {
  const auto spec = sr::testing::desk_episode();
  for (auto _ : state) {
    sr::Environment env;
    sr::GreedyIisAgent agent;
    benchmark::DoNotOptimize(sr::run_episode(env, spec, agent));
  }
}
BENCHMARK(BM_GreedyEpisode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
