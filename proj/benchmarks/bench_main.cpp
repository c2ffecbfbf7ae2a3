#include <benchmark/benchmark.h>

#include <numeric>
#include <string>
#include <vector>

#include "h2pc/bayesnet.hpp"
#include "h2pc/dataset.hpp"
#include "h2pc/indep_test.hpp"
#include "h2pc/local_discovery.hpp"
#include "h2pc/score.hpp"
#include "h2pc/structure_search.hpp"

namespace {

using namespace h2pc;

const BayesNet& network(const std::string& name) {
  static const BayesNet child = load_bif(H2PC_DATA_DIR "/networks/child.bif");
  static const BayesNet alarm = load_bif(H2PC_DATA_DIR "/networks/alarm.bif");
  return name == "child" ? child : alarm;
}

const Dataset& alarm_rows(std::size_t rows) {
  static const Dataset d500 = ancestral_sample(network("alarm"), 500, 7);
  static const Dataset d5000 = ancestral_sample(network("alarm"), 5000, 7);
  return rows == 500 ? d500 : d5000;
}

void BM_ContingencyTable(benchmark::State& state) {
  const Dataset& data = alarm_rows(5000);
  std::vector<Var> z(static_cast<std::size_t>(state.range(0)));
  std::iota(z.begin(), z.end(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(contingency_table(data, 0, 1, z));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.num_rows()));
}
BENCHMARK(BM_ContingencyTable)->DenseRange(0, 3);

void BM_G2Test(benchmark::State& state) {
  const StatisticalEngine engine(alarm_rows(5000));
  const std::vector<Var> z{13, 22};
  for (auto _ : state) benchmark::DoNotOptimize(engine.test(21, 29, z));
}
BENCHMARK(BM_G2Test);

void BM_BdeuFamily(benchmark::State& state) {
  const Dataset& data = alarm_rows(5000);
  std::vector<Var> parents(static_cast<std::size_t>(state.range(0)));
  std::iota(parents.begin(), parents.end(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(bdeu_family(data, 0, parents, 10.0));
}
BENCHMARK(BM_BdeuFamily)->DenseRange(0, 3);

void BM_Skeleton(benchmark::State& state) {
  const Dataset& data = alarm_rows(static_cast<std::size_t>(state.range(1)));
  const auto learner = state.range(0) == 0 ? PcLearner::hpc : PcLearner::mmpc;
  for (auto _ : state) {
    const StatisticalEngine engine(data);
    benchmark::DoNotOptimize(build_skeleton(engine, learner));
  }
  state.SetLabel(std::string(to_string(learner)));
}
BENCHMARK(BM_Skeleton)->ArgsProduct({{0, 1}, {500, 5000}})->Unit(benchmark::kMillisecond);

void BM_HillClimb(benchmark::State& state) {
  const Dataset& data = alarm_rows(5000);
  const StatisticalEngine engine(data);
  const SkeletonResult skeleton = build_skeleton(engine, PcLearner::hpc);
  for (auto _ : state) {
    const FamilyScorer scorer(data, ScoreConfig{});
    benchmark::DoNotOptimize(hill_climb(scorer, skeleton.neighbors));
  }
}
BENCHMARK(BM_HillClimb)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
