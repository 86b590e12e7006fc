#include <benchmark/benchmark.h>

#include "rosyn/io/io.hpp"
#include "rosyn/logic/compiler.hpp"
#include "rosyn/pipeline.hpp"

using namespace rosyn;

namespace {

RunConfig toy(std::size_t cells) {
  auto c = parse_config(io::read_text(std::string(ROSYN_CONFIG_DIR) + "/toy.json"), ROSYN_CONFIG_DIR);
  c.grid_counts = {cells};
  return c;
}

void BM_CompileBoundedAlways(benchmark::State& state) {
  const Alphabet ab({"a", "k"});
  const auto f = logic::parse_scltl("F (G<=" + std::to_string(state.range(0)) + " k) & (a U k)", ab);
  for (auto _ : state) benchmark::DoNotOptimize(logic::compile_dfa(f, ab).num_locations());
}
BENCHMARK(BM_CompileBoundedAlways)->Arg(3)->Arg(6)->Arg(10);

void BM_BuildAbstraction(benchmark::State& state) {
  const auto cfg = toy(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(prepare_abstraction(cfg).abstraction.kernel.num_entries());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildAbstraction)->Arg(200)->Arg(800)->Arg(3200)->Complexity();

void BM_RobustScltl(benchmark::State& state) {
  const auto cfg = toy(static_cast<std::size_t>(state.range(0)));
  const auto prep = prepare_abstraction(cfg);
  const auto dfa = automaton(cfg);
  for (auto _ : state) {
    auto r = synthesis::robust_scltl(prep.abstraction, dfa, cfg.labels, 1.2266, cfg.delta, synthesis::Horizon::unbounded());
    benchmark::DoNotOptimize(r.values.values.data());
  }
}
BENCHMARK(BM_RobustScltl)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const auto cfg = toy(200);
  const auto prep = prepare_abstraction(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(certify_stage(cfg, prep).result.feasible());
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto cfg = toy(200);
  const auto prep = prepare_abstraction(cfg);
  const auto cert = *certify_stage(cfg, prep).result.certificate;
  const auto dfa = automaton(cfg);
  refinement::ClosedLoop loop{cfg.model, prep.abstraction, cert, {}, dfa, cfg.labels};
  loop.policy = synthesis_stage(cfg, prep, loop.dfa, cert).result.policy;
  refinement::MonteCarloOptions opt;
  opt.runs = state.range(0);
  opt.horizon = 200;
  for (auto _ : state) benchmark::DoNotOptimize(refinement::monte_carlo(loop, opt).successes);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
