#include <benchmark/benchmark.h>

#include <cstdint>
#include <numeric>
#include <vector>

#include "passnet/coupling.hpp"
#include "passnet/graph.hpp"
#include "passnet/lti.hpp"
#include "passnet/sim.hpp"

using namespace passnet;

namespace {

const lti::RationalTransfer& agent() {
  static const auto h = lti::tf_new({1, 1.4, 0.45}, {1, 1.23, 0.344, 0});
  return h;
}

sim::NetworkModel model() {
  const std::vector<std::pair<int, int>> pairs{{1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}};
  const auto g = graph::Graph::from_edge_list(5, pairs);
  const std::vector<lti::RationalTransfer> tfs{
      lti::tf_new({1, 0.8}, {1, 0.57, 0}), lti::tf_new({1, 1}, {1, 0.7, 0}), lti::tf_new({1, 1.5}, {1, 1, 0}),
      lti::tf_new({1, 1.1, 0.2925}, {1, 1.0, 0.24, 0}), agent()};
  std::vector<coupling::SectorCoupling> cs;
  for (double a : {0.65, 0.40, 0.34, 0.33, 0.44}) cs.emplace_back(coupling::SaturatedSine{a}, a * 0.6366, a);
  return sim::assemble(g, tfs, coupling::CouplingBank(std::move(cs)));
}

sim::SimConfig config() {
  sim::SimConfig c;
  c.dt = 1e-3;
  c.t_final = 5.0;
  c.y0 = {-0.3, -0.25, -0.625, 0.5963, -0.2725};
  c.noise = {sim::NoiseKind::GaussianZoh, 0.1, 1};
  c.record_stride = 10;
  return c;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto grid = lti::log_grid(1e-4, 1e4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lti::real_part_sweep_serial(agent(), grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto grid = lti::log_grid(1e-4, 1e4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lti::real_part_sweep(agent(), grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchSerial(benchmark::State& state) {
  const auto m = model();
  const auto c = config();
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(state.range(0)));
  std::iota(seeds.begin(), seeds.end(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_batch_serial(m, c, seeds));
}

void BM_BatchParallel(benchmark::State& state) {
  const auto m = model();
  const auto c = config();
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(state.range(0)));
  std::iota(seeds.begin(), seeds.end(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_batch(m, c, seeds));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(2048)->Arg(1 << 16);
BENCHMARK(BM_SweepParallel)->Arg(2048)->Arg(1 << 16);
BENCHMARK(BM_BatchSerial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
