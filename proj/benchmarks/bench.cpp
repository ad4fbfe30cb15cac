// Microbenchmarks for the hot paths: packet synthesis, dataset assembly,
// feature extraction, and the regressors.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "uwbrss/channel_sim.hpp"
#include "uwbrss/dataset.hpp"
#include "uwbrss/evaluation.hpp"
#include "uwbrss/features.hpp"
#include "uwbrss/regressors.hpp"

namespace {

using namespace uwbrss;

// Shared mid-size dataset: 13 distances x 68 gains x 4 packets.
const Dataset& hallway_dataset() {
  static const Dataset ds = [] {
    SimPreset p = preset("hallway_agc_off", 1);
    p.scenario.packets_per_cell = 4;
    return simulate(p.env, p.rx, p.scenario);
  }();
  return ds;
}

FeatureMatrix random_matrix(std::size_t n_rows, std::size_t n_cols,
                            std::uint64_t seed) {
  FeatureMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  Rng rng(seed);
  for (std::size_t j = 0; j < n_cols; ++j)
    m.column_names.push_back("x" + std::to_string(j));
  m.values.resize(n_rows * n_cols);
  for (auto& v : m.values) v = rng.uniform(-1.0, 1.0);
  m.targets.resize(n_rows);
  for (auto& t : m.targets) t = rng.uniform(0.5, 6.5);
  m.gains.assign(n_rows, kMaxGainDb);
  return m;
}

void BM_SimulatePacket(benchmark::State& state) {
  SimPreset p = preset("hallway_agc_off", 1);
  Rng rng(7);
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_packet(p.env, p.rx, 3.0, 20.0, rng));
}
BENCHMARK(BM_SimulatePacket);

void BM_SimulateGrid(benchmark::State& state) {
  SimPreset p = preset("hallway_agc_off", 1);
  p.scenario.packets_per_cell = 1;  // 13 x 68 packets per iteration
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(p.env, p.rx, p.scenario));
  state.SetItemsProcessed(state.iterations() * 13 * 68);
}
BENCHMARK(BM_SimulateGrid);

void BM_BuildMatrixCir(benchmark::State& state) {
  const Dataset& ds = hallway_dataset();
  FeatureSpec spec = FeatureSpec::preset("cir32_gain");
  for (auto _ : state) benchmark::DoNotOptimize(build_matrix(ds, spec));
}
BENCHMARK(BM_BuildMatrixCir);

void BM_KnnPredict(benchmark::State& state) {
  FeatureMatrix train = random_matrix(state.range(0), 33, 11);
  KnnRegressor model;
  model.train(train);
  std::vector<double> query(33, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(query));
}
BENCHMARK(BM_KnnPredict)->Arg(1024)->Arg(8192);

void BM_OlsTrain(benchmark::State& state) {
  FeatureMatrix train = random_matrix(4096, 33, 13);
  for (auto _ : state) {
    LinearRegressor model;
    model.train(train);
    benchmark::DoNotOptimize(model.coefficients());
  }
}
BENCHMARK(BM_OlsTrain);

void BM_TreeTrain(benchmark::State& state) {
  FeatureMatrix train = random_matrix(2048, 8, 17);
  TreeConfig config;
  config.max_depth = 12;
  for (auto _ : state) {
    TreeRegressor model(config);
    model.train(train);
    benchmark::DoNotOptimize(model.predict(train.row(0)));
  }
}
BENCHMARK(BM_TreeTrain);

}  // namespace

BENCHMARK_MAIN();
