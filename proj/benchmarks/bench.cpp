// Microbenchmarks for the hot paths: grounding, the MAP solve, and one
// greedy selection step.

#include <benchmark/benchmark.h>

#include "kgeval/control.hpp"
#include "kgeval/estimator.hpp"
#include "kgeval/synthetic.hpp"

using namespace kgeval;

namespace {

const SyntheticData& dataset(int bets) {
  static std::map<int, SyntheticData> cache;
  auto it = cache.find(bets);
  if (it == cache.end()) {
    SyntheticSpec spec;
    spec.betCount = bets;
    spec.rngSeed = 11;
    it = cache.emplace(bets, generate_synthetic(spec)).first;
  }
  return it->second;
}

void BM_Ground(benchmark::State& state) {
  const SyntheticData& d = dataset(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Ecg ecg = Ecg::ground(d.kg, d.ruleset.rules);
    benchmark::DoNotOptimize(ecg.constraints().size());
  }
}
BENCHMARK(BM_Ground)->Arg(400)->Arg(1860);

void BM_MapSolve(benchmark::State& state) {
  const SyntheticData& d = dataset(static_cast<int>(state.range(0)));
  Ecg ecg = Ecg::ground(d.kg, d.ruleset.rules);
  Rng rng(3);
  std::vector<std::pair<int, int>> evidence;
  for (int bet : rng.sample(d.kg.size(), d.kg.size() / 10))
    evidence.emplace_back(bet, *d.kg.bet(bet).gold);
  InferenceConfig cfg;
  for (auto _ : state) {
    InferenceResult res = map_solve(ecg, evidence, cfg);
    benchmark::DoNotOptimize(res.energy);
  }
}
BENCHMARK(BM_MapSolve)->Arg(400)->Arg(1860);

void BM_GreedyStep(benchmark::State& state) {
  const SyntheticData& d = dataset(static_cast<int>(state.range(0)));
  Ecg ecg = Ecg::ground(d.kg, d.ruleset.rules);
  Rng rng(3);
  std::vector<std::pair<int, int>> evidence;
  for (int bet : rng.sample(d.kg.size(), 50)) evidence.emplace_back(bet, *d.kg.bet(bet).gold);
  InferenceConfig cfg;
  InferenceResult base = map_solve(ecg, evidence, cfg);
  std::vector<char> covered(d.kg.size(), 0), inferable(d.kg.size(), 0);
  for (int b : base.inferable) covered[b] = inferable[b] = 1;
  auto lookahead = [&](int bet) { return *d.kg.bet(bet).gold; };
  for (auto _ : state) {
    SelectionView view{ecg, evidence, covered, inferable};
    auto [bet, size] = greedy_select(view, cfg, 5, lookahead);
    benchmark::DoNotOptimize(bet + size);
  }
}
BENCHMARK(BM_GreedyStep)->Arg(1860);

}  // namespace

BENCHMARK_MAIN();
