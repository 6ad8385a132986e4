#include <benchmark/benchmark.h>

#include <random>

#include "flg/bounds.hpp"
#include "flg/constructions.hpp"
#include "flg/dynamics.hpp"
#include "flg/equilibria.hpp"
#include "flg/instance.hpp"
#include "flg/optimum.hpp"

namespace {

using namespace flg;

GameInstance random_instance(std::uint64_t seed, int m, int n) {
  std::mt19937_64 rng(seed);
  auto u01 = [&] { return (rng() >> 11) * 0x1.0p-53; };
  GameInstance inst;
  inst.node_count = m;
  inst.distances.assign(static_cast<size_t>(m) * m, 0.0);
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) inst.set_dist(u, v, 0.1 + 1.9 * u01());
  }
  for (int v = 0; v < m; ++v) inst.facility_costs.push_back(0.3 + 1.2 * u01());
  for (int i = 0; i < n; ++i) {
    inst.agents.push_back(Agent{static_cast<int>(rng() % m), 1.0});
  }
  inst.validate();
  return inst;
}

void BM_SocialOptimum(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  GameInstance inst = random_instance(7, m, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(social_optimum(inst, m).cost);
  }
}
BENCHMARK(BM_SocialOptimum)->Arg(8)->Arg(12)->Arg(16);

void BM_BestResponse(benchmark::State& state) {
  GameInstance inst = random_instance(11, 8, 8);
  StrategyProfile s(8, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_response(inst, s, 3));
  }
}
BENCHMARK(BM_BestResponse);

void BM_EnumerateNash(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GameInstance inst = random_instance(3, 4, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_equilibria(inst, 1.0, EquilibriumKind::kNash).size());
  }
}
BENCHMARK(BM_EnumerateNash)->Arg(6)->Arg(8)->Arg(10);

void BM_EnumerateStrong(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GameInstance inst = random_instance(5, 4, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        enumerate_equilibria(inst, 1.0, EquilibriumKind::kStrong).size());
  }
}
BENCHMARK(BM_EnumerateStrong)->Arg(5)->Arg(6)->Arg(7);

void BM_CoalitionScan(benchmark::State& state) {
  GameInstance inst = random_instance(13, 6, 7);
  StrategyProfile s(7, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_coalition_deviation(inst, s, 1.0, DeviationMode::kJoint));
  }
}
BENCHMARK(BM_CoalitionScan);

void BM_IbrMetricPos(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GeneratedInstance gen = gen_metric_pos(n, 0.27, 1e-4);
  for (auto _ : state) {
    DynamicsTrace trace = run_ibr(gen.instance, gen.s_star, OrderPolicy::kFacilityConsecutive,
                                  default_max_steps(gen.instance));
    benchmark::DoNotOptimize(trace.steps.size());
  }
}
BENCHMARK(BM_IbrMetricPos)->Arg(16)->Arg(64);

void BM_ChargingAudit(benchmark::State& state) {
  GeneratedInstance gen = gen_metric_pos(16, 0.27, 1e-4);
  DynamicsTrace trace = run_ibr(gen.instance, gen.s_star, OrderPolicy::kFacilityConsecutive,
                                default_max_steps(gen.instance));
  for (auto _ : state) {
    benchmark::DoNotOptimize(charging_audit(gen.instance, trace, gen.s_star).pass);
  }
}
BENCHMARK(BM_ChargingAudit);

void BM_PosLbTable(benchmark::State& state) {
  bounds::PosLbTableQuery q;
  q.n = state.range(0);
  q.remain_fraction = 0.27;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bounds::pos_lb_table(q).value);
  }
}
BENCHMARK(BM_PosLbTable)->Arg(10000)->Arg(1000000)->Arg(100000000);

void BM_MetricClosure(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  EdgeListInstance part;
  part.node_count = m;
  part.facility_costs.assign(m, 1.0);
  part.agents = {Agent{0, 1.0}};
  std::mt19937_64 rng(4);
  for (int v = 1; v < m; ++v) {
    part.edges.push_back({static_cast<int>(rng() % v), v, 0.1 + (rng() % 100) * 0.01});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(metric_closure(part).node_count);
  }
}
BENCHMARK(BM_MetricClosure)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
