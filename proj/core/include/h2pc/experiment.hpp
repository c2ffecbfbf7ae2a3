#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "h2pc/bayesnet.hpp"
#include "h2pc/evaluation.hpp"
#include "h2pc/indep_test.hpp"
#include "h2pc/local_discovery.hpp"
#include "h2pc/structure_search.hpp"

namespace h2pc {

enum class Algorithm { h2pc, mmhc };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct LearnOptions {
  TestOptions test;
  ScoreConfig score;
  SearchOptions search;
  DiscoveryOptions discovery;
  unsigned threads = 1;
};

struct LearnResult {
  Dag dag;
  SkeletonResult skeleton;
  std::uint64_t tests = 0;
  std::uint64_t score_calls = 0;
  double score = 0.0;
  std::vector<TraceEntry> trace;
};

/// Skeleton phase (HPC for h2pc, MMPC for mmhc) followed by the shared
/// constrained hill-climbing.
LearnResult learn_structure(const Dataset& data, Algorithm algorithm, const LearnOptions& options = {});

struct ExperimentConfig {
  std::filesystem::path network;
  std::vector<Algorithm> algorithms{Algorithm::h2pc, Algorithm::mmhc};
  std::vector<std::size_t> sizes{50, 100, 200, 500, 1500, 5000};
  int repetitions = 10;
  double alpha = 0.05;
  double ess = 10.0;
  double power_threshold = 5.0;
  std::size_t test_size = 5000;
  std::uint64_t seed = 20130101;
  /// Directory receiving runs.csv and aggregate.csv; empty writes nothing.
  std::filesystem::path output;
  unsigned jobs = 1;
  /// When false, wall_ms is written as 0 so runs.csv is byte-reproducible.
  bool record_wall_time = true;
  bool dump_graphs = false;
};

/// Throws std::invalid_argument on an out-of-range field.
void validate(const ExperimentConfig& config);

struct RunRow {
  std::string benchmark;
  Algorithm algorithm = Algorithm::h2pc;
  std::size_t n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  SkeletonMetrics skeleton;
  DagMetrics dag;
  double wall_ms = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Column order shared by runs.csv and the aggregate mean_/sd_ columns.
const std::vector<std::string>& metric_columns();
std::vector<double> metric_values(const RunRow& row);

struct AggregateRow {
  std::string benchmark;
  Algorithm algorithm = Algorithm::h2pc;
  std::size_t n = 0;
  int runs = 0;
  int errors = 0;
  std::vector<double> mean;  // per metric_columns()
  std::vector<double> sd;    // sample standard deviation, 0 for a single run
};

struct MetricsReport {
  std::vector<RunRow> runs;
  std::vector<AggregateRow> aggregates;
};

/// Seed of one (size, repetition) cell; a pure function of its inputs.
std::uint64_t run_seed(std::uint64_t master, std::size_t n, int rep);

/// Loads `config.network`, runs the protocol, and writes the CSVs when
/// `config.output` is set. The benchmark name is the file stem.
MetricsReport run_experiment(const ExperimentConfig& config);
MetricsReport run_experiment(const BayesNet& net, const std::string& benchmark, const ExperimentConfig& config);

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& runs);

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& runs);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace h2pc
