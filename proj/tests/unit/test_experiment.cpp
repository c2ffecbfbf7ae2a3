#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "h2pc/experiment.hpp"
#include "oracles.hpp"

using namespace h2pc;

namespace {

const std::string kChild = H2PC_DATA_DIR "/networks/child.bif";

std::string runs_text(const MetricsReport& r) {
  std::ostringstream out;
  write_runs_csv(out, r.runs);
  return out.str();
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.network = kChild;
  c.sizes = {500};
  c.repetitions = 2;
  c.test_size = 1000;
  c.record_wall_time = false;
  return c;
}

}  // namespace

TEST(Experiment, RowAndCellCounts) {
  const MetricsReport r = run_experiment(small_config());
  ASSERT_EQ(r.runs.size(), 4u);
  EXPECT_EQ(r.aggregates.size(), 2u);
  for (const RunRow& row : r.runs) {
    EXPECT_TRUE(row.ok()) << row.status;
    EXPECT_EQ(row.benchmark, "child");
    EXPECT_GT(row.skeleton.tests_performed, 0u);
    EXPECT_GT(row.dag.score_calls, 0u);
  }
  EXPECT_EQ(r.runs[0].algorithm, Algorithm::h2pc);
  EXPECT_EQ(r.runs[1].algorithm, Algorithm::mmhc);
  EXPECT_EQ(r.runs[0].seed, r.runs[1].seed);  // both algorithms see the same data
  EXPECT_NE(r.runs[0].seed, r.runs[2].seed);
}

TEST(Experiment, SameSeedSameReport) {
  const ExperimentConfig c = small_config();
  EXPECT_EQ(runs_text(run_experiment(c)), runs_text(run_experiment(c)));
  ExperimentConfig threaded = c;
  threaded.jobs = 2;
  EXPECT_EQ(runs_text(run_experiment(c)), runs_text(run_experiment(threaded)));
}

TEST(Experiment, SubsetRerunReproducesRows) {
  ExperimentConfig full = small_config();
  full.sizes = {100, 500};
  full.repetitions = 3;
  ExperimentConfig subset = small_config();
  subset.algorithms = {Algorithm::mmhc};
  const MetricsReport a = run_experiment(full), b = run_experiment(subset);
  for (const RunRow& row : b.runs) {
    bool found = false;
    for (const RunRow& other : a.runs) {
      if (other.n != row.n || other.rep != row.rep || other.algorithm != row.algorithm) continue;
      found = true;
      EXPECT_EQ(metric_values(other), metric_values(row));
      EXPECT_EQ(other.seed, row.seed);
    }
    EXPECT_TRUE(found);
  }
  EXPECT_EQ(run_seed(5, 500, 1), run_seed(5, 500, 1));
  EXPECT_NE(run_seed(5, 500, 1), run_seed(5, 500, 2));
  EXPECT_NE(run_seed(5, 500, 1), run_seed(5, 200, 1));
}

TEST(Experiment, WritesFilesAndAggregatesMatchCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "h2pc_experiment_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = small_config();
  c.sizes = {100, 300};
  c.repetitions = 3;
  c.output = dir;
  c.dump_graphs = true;
  run_experiment(c);
  std::ifstream runs_in(dir / "runs.csv"), agg_in(dir / "aggregate.csv");
  std::stringstream runs_buf, agg_buf;
  runs_buf << runs_in.rdbuf();
  agg_buf << agg_in.rdbuf();
  const auto runs = split_csv(runs_buf.str());
  const auto agg = split_csv(agg_buf.str());
  ASSERT_EQ(runs.size(), 13u);
  ASSERT_EQ(agg.size(), 5u);
  EXPECT_EQ(runs[0].size(), 19u);
  const auto& cols = metric_columns();
  for (std::size_t a = 1; a < agg.size(); ++a) {
    std::vector<std::vector<double>> values;
    for (std::size_t r = 1; r < runs.size(); ++r) {
      if (runs[r][0] != agg[a][0] || runs[r][1] != agg[a][1] || runs[r][2] != agg[a][2]) continue;
      std::vector<double> v;
      for (std::size_t c2 = 0; c2 < cols.size(); ++c2) v.push_back(std::stod(runs[r][5 + c2]));
      values.push_back(v);
    }
    ASSERT_EQ(values.size(), 3u);
    EXPECT_EQ(agg[a][3], "3");
    for (std::size_t c2 = 0; c2 < cols.size(); ++c2) {
      double mean = 0;
      for (const auto& v : values) mean += v[c2];
      mean /= values.size();
      double ss = 0;
      for (const auto& v : values) ss += (v[c2] - mean) * (v[c2] - mean);
      const double sd = std::sqrt(ss / (values.size() - 1));
      EXPECT_NEAR(std::stod(agg[a][5 + 2 * c2]), mean, 1e-12 * std::max(1.0, std::abs(mean))) << cols[c2];
      EXPECT_NEAR(std::stod(agg[a][6 + 2 * c2]), sd, 1e-12 * std::max(1.0, std::abs(mean))) << cols[c2];
    }
  }
  std::size_t graphs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "graphs")) graphs += entry.is_regular_file();
  EXPECT_EQ(graphs, 12u);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, ErrorRowsAreKeptAndExcludedFromMeans) {
  RunRow good;
  good.benchmark = "b";
  good.n = 10;
  good.skeleton.precision = 0.5;
  RunRow bad = good;
  bad.status = "error: out of memory";
  bad.skeleton.precision = 0.9;
  const auto agg = aggregate({good, bad});
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_EQ(agg[0].runs, 1);
  EXPECT_EQ(agg[0].errors, 1);
  EXPECT_EQ(agg[0].mean[0], 0.5);
  std::ostringstream out;
  write_runs_csv(out, {good, bad});
  const auto rows = split_csv(out.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].back(), "error: out of memory");
  EXPECT_EQ(rows[2][5], "");
}

TEST(Experiment, ValidatesConfig) {
  ExperimentConfig c = small_config();
  c.repetitions = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.sizes = {0};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.alpha = 1.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.network = "/nonexistent.bif";
  EXPECT_THROW(run_experiment(c), std::exception);
}

TEST(Algorithm, Names) {
  EXPECT_EQ(parse_algorithm("h2pc"), Algorithm::h2pc);
  EXPECT_EQ(parse_algorithm("mmhc"), Algorithm::mmhc);
  EXPECT_FALSE(parse_algorithm("pc"));
  EXPECT_EQ(to_string(Algorithm::mmhc), "mmhc");
}
