#include <benchmark/benchmark.h>

#include <vector>

#include "teqkd/physics.hpp"
#include "teqkd/protocol.hpp"
#include "teqkd/scenario.hpp"
#include "teqkd/session.hpp"
#include "teqkd/stats.hpp"

namespace {

using namespace teqkd;

void BM_SampleDelay(benchmark::State& state) {
  const auto d = physics::delay_distribution({0, 1e9, 1}, {0, 1e2, 1});
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(physics::sample_delay(d, rng));
}
BENCHMARK(BM_SampleDelay);

void BM_RunRound(benchmark::State& state) {
  auto s = scenario::reference_baseline();
  s.adversary.enabled = state.range(0) != 0;
  const auto ctx = s.round_context();
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(protocol::run_round(i++, ctx, 7));
}
BENCHMARK(BM_RunRound)->Arg(0)->Arg(1)->ArgName("eve");

void BM_RunSession(benchmark::State& state) {
  auto s = scenario::reference_baseline();
  s.adversary.enabled = true;
  s.n_rounds = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_session(s, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunSession)->Arg(200)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_EavesdropTest(benchmark::State& state) {
  std::vector<protocol::RoundRecord> recs;
  RandomStream rng(3);
  for (std::int64_t i = 0; i < state.range(0); ++i)
    recs.push_back({static_cast<std::uint64_t>(i), protocol::DetectorChoice::wide, protocol::DetectorChoice::wide,
                    protocol::Timing{0.0, (rng.uniform() - 0.5) * 1e-8}});
  for (auto _ : state) benchmark::DoNotOptimize(stats::eavesdrop_test(recs, 1e-8));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EavesdropTest)->Arg(50)->Arg(5000);

}  // namespace

// The distribution's static benchmark_main is built with a different LTO version.
BENCHMARK_MAIN();
