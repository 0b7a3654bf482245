#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "liposim/engine.hpp"
#include "liposim/population.hpp"
#include "liposim/speclang/lower.hpp"
#include "liposim/speclang/parser.hpp"

namespace {

using namespace liposim;

std::string scenario_text(const std::string& name) {
  std::ifstream in(std::string(LIPOSIM_SOURCE_DIR) + "/scenarios/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

speclang::Scenario scenario(const std::string& name) {
  const std::string src = scenario_text(name);
  auto parsed = speclang::parse(src);
  auto lowered = speclang::lower(*parsed.ast, src);
  return std::move(*lowered.scenario);
}

void BM_SamplePopulation(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sample_population(GeneratorParams{}, n, 1));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_SamplePopulation)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PopulationStats(benchmark::State& st) {
  const auto pop = sample_population(GeneratorParams{}, 10000, 1);
  for (auto _ : st) benchmark::DoNotOptimize(population_stats(pop));
}
BENCHMARK(BM_PopulationStats)->Unit(benchmark::kMillisecond);

void BM_FibonacciMaximalStep(benchmark::State& st) {
  const auto base = scenario("fibonacci.psys");
  for (auto _ : st) {
    SystemState s = base.state;
    Rng rng = derive_stream(1, 0);
    for (int i = 0; i < 10; ++i) benchmark::DoNotOptimize(engine::maximal_step(s, rng));
  }
}
BENCHMARK(BM_FibonacciMaximalStep);

void BM_UreaseRun(benchmark::State& st) {
  const auto base = scenario("urease.psys");
  for (auto _ : st) {
    SystemState s = base.state;
    benchmark::DoNotOptimize(engine::run(s, base.config, base.schedule, base.atoms));
  }
}
BENCHMARK(BM_UreaseRun)->Unit(benchmark::kMillisecond);

void BM_ParseUrease(benchmark::State& st) {
  const std::string src = scenario_text("urease.psys");
  for (auto _ : st) benchmark::DoNotOptimize(speclang::parse(src));
  st.SetBytesProcessed(st.iterations() * static_cast<std::int64_t>(src.size()));
}
BENCHMARK(BM_ParseUrease);

}  // namespace

BENCHMARK_MAIN();
