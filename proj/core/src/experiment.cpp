#include "h2pc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "h2pc/rng.hpp"

namespace h2pc {

std::string_view to_string(Algorithm algorithm) { return algorithm == Algorithm::h2pc ? "h2pc" : "mmhc"; }

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "h2pc") return Algorithm::h2pc;
  if (name == "mmhc") return Algorithm::mmhc;
  return std::nullopt;
}

LearnResult learn_structure(const Dataset& data, Algorithm algorithm, const LearnOptions& options) {
  const StatisticalEngine engine(data, options.test);
  LearnResult out;
  out.skeleton = build_skeleton(engine, algorithm == Algorithm::h2pc ? PcLearner::hpc : PcLearner::mmpc,
                                options.discovery, options.threads);
  out.tests = engine.test_count();
  const FamilyScorer scorer(data, options.score);
  SearchResult search = hill_climb(scorer, out.skeleton.neighbors, options.search);
  out.dag = std::move(search.dag);
  out.score = search.score;
  out.score_calls = search.score_evaluations;
  out.trace = std::move(search.trace);
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
  if (c.sizes.empty()) throw std::invalid_argument("at least one sample size is required");
  for (std::size_t n : c.sizes)
    if (n == 0) throw std::invalid_argument("sample sizes must be positive");
  if (c.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(c.ess > 0.0)) throw std::invalid_argument("ess must be positive");
  if (!(c.power_threshold > 0.0)) throw std::invalid_argument("power threshold must be positive");
  if (c.test_size == 0) throw std::invalid_argument("test size must be positive");
}

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> columns{"precision", "recall",    "euclid",   "fpr",       "fnr",
                                                "n_tests",   "bdeu_train", "bic_train", "bdeu_test", "bic_test",
                                                "shd",       "n_scores",  "wall_ms"};
  return columns;
}

std::vector<double> metric_values(const RunRow& r) {
  return {r.skeleton.precision,
          r.skeleton.recall,
          r.skeleton.euclidean_distance,
          r.skeleton.false_positive_rate,
          r.skeleton.false_negative_rate,
          static_cast<double>(r.skeleton.tests_performed),
          r.dag.bdeu_train,
          r.dag.bic_train,
          r.dag.bdeu_test,
          r.dag.bic_test,
          static_cast<double>(r.dag.shd),
          static_cast<double>(r.dag.score_calls),
          r.wall_ms};
}

std::uint64_t run_seed(std::uint64_t master, std::size_t n, int rep) {
  return derive_seed(derive_seed(master, n), static_cast<std::uint64_t>(rep));
}

namespace {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

struct Cell {
  std::size_t n;
  int rep;
};

std::vector<RunRow> run_cell(const BayesNet& net, const std::string& benchmark, const ExperimentConfig& config,
                             const Cell& cell) {
  const std::uint64_t seed = run_seed(config.seed, cell.n, cell.rep);
  std::vector<RunRow> rows;
  const LinkSet truth = skeleton_of(net.dag());
  const std::size_t p = net.num_vars();
  const std::size_t pairs = p * (p - 1) / 2;

  std::optional<Dataset> train;
  std::optional<Dataset> test;
  std::string sample_error;
  try {
    train.emplace(ancestral_sample(net, cell.n, derive_seed(seed, 0)));
    test.emplace(ancestral_sample(net, config.test_size, derive_seed(seed, 1)));
  } catch (const std::exception& e) {
    sample_error = e.what();
  }

  LearnOptions options;
  options.test = {config.alpha, config.power_threshold};
  options.score = {ScoreKind::bdeu, config.ess};

  for (Algorithm algorithm : config.algorithms) {
    RunRow row;
    row.benchmark = benchmark;
    row.algorithm = algorithm;
    row.n = cell.n;
    row.rep = cell.rep;
    row.seed = seed;
    if (!sample_error.empty()) {
      row.status = "error: " + sanitize(sample_error);
      rows.push_back(std::move(row));
      continue;
    }
    try {
      const auto start = std::chrono::steady_clock::now();
      LearnResult learned = learn_structure(*train, algorithm, options);
      const auto stop = std::chrono::steady_clock::now();
      row.skeleton = skeleton_metrics(learned.skeleton.neighbors.links(), truth, pairs);
      row.skeleton.tests_performed = learned.tests;
      row.dag = evaluate_dag(learned.dag, net, *train, *test, options.score);
      row.dag.score_calls = learned.score_calls;
      if (config.record_wall_time) row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      if (config.dump_graphs && !config.output.empty()) {
        const auto dir = config.output / "graphs";
        std::filesystem::create_directories(dir);
        std::ofstream out(dir / (benchmark + "_" + std::string(to_string(algorithm)) + "_n" + std::to_string(cell.n) +
                                 "_r" + std::to_string(cell.rep) + ".txt"));
        write_edge_list(out, learned.dag, net.names());
      }
    } catch (const std::exception& e) {
      row = RunRow{benchmark, algorithm, cell.n, cell.rep, seed, {}, {}, 0.0, "error: " + sanitize(e.what())};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

MetricsReport run_experiment(const BayesNet& net, const std::string& benchmark, const ExperimentConfig& config) {
  validate(config);
  std::vector<Cell> cells;
  for (std::size_t n : config.sizes)
    for (int rep = 0; rep < config.repetitions; ++rep) cells.push_back({n, rep});

  std::vector<std::vector<RunRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(net, benchmark, config, cells[i]);
  };
  if (config.jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < config.jobs && t < cells.size(); ++t) pool.emplace_back(worker);
  }

  MetricsReport report;
  for (auto& rows : results)
    for (auto& row : rows) report.runs.push_back(std::move(row));
  report.aggregates = aggregate(report.runs);

  if (!config.output.empty()) {
    std::filesystem::create_directories(config.output);
    std::ofstream runs(config.output / "runs.csv", std::ios::binary);
    std::ofstream agg(config.output / "aggregate.csv", std::ios::binary);
    if (!runs || !agg) throw std::runtime_error("cannot write to '" + config.output.string() + "'");
    write_runs_csv(runs, report.runs);
    write_aggregate_csv(agg, report.aggregates);
  }
  return report;
}

MetricsReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const BayesNet net = load_bif(config.network);
  return run_experiment(net, config.network.stem().string(), config);
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& runs) {
  using Key = std::tuple<std::string, int, std::size_t>;
  std::map<Key, std::vector<const RunRow*>> groups;
  std::vector<Key> order;
  for (const RunRow& r : runs) {
    Key key{r.benchmark, static_cast<int>(r.algorithm), r.n};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  const std::size_t m = metric_columns().size();
  std::vector<AggregateRow> out;
  for (const Key& key : order) {
    const auto& members = groups[key];
    AggregateRow row;
    row.benchmark = std::get<0>(key);
    row.algorithm = static_cast<Algorithm>(std::get<1>(key));
    row.n = std::get<2>(key);
    row.mean.assign(m, 0.0);
    row.sd.assign(m, 0.0);
    std::vector<std::vector<double>> values;
    for (const RunRow* r : members) {
      if (r->ok()) {
        values.push_back(metric_values(*r));
      } else {
        ++row.errors;
      }
    }
    row.runs = static_cast<int>(values.size());
    if (!values.empty()) {
      for (std::size_t c = 0; c < m; ++c) {
        double sum = 0.0;
        for (const auto& v : values) sum += v[c];
        row.mean[c] = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
          double ss = 0.0;
          for (const auto& v : values) ss += (v[c] - row.mean[c]) * (v[c] - row.mean[c]);
          row.sd[c] = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
      }
    } else {
      row.mean.assign(m, std::nan(""));
      row.sd.assign(m, std::nan(""));
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& runs) {
  out << "benchmark,algorithm,n,rep,seed";
  for (const auto& c : metric_columns()) out << ',' << c;
  out << ",status\n";
  for (const RunRow& r : runs) {
    out << r.benchmark << ',' << to_string(r.algorithm) << ',' << r.n << ',' << r.rep << ',' << r.seed;
    if (r.ok()) {
      const auto values = metric_values(r);
      for (std::size_t c = 0; c < values.size(); ++c) {
        const bool integral = metric_columns()[c] == "n_tests" || metric_columns()[c] == "shd" ||
                              metric_columns()[c] == "n_scores";
        out << ',' << (integral ? std::to_string(static_cast<long long>(values[c])) : format_double(values[c]));
      }
    } else {
      for (std::size_t c = 0; c < metric_columns().size(); ++c) out << ',';
    }
    out << ',' << r.status << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "benchmark,algorithm,n,runs,errors";
  for (const auto& c : metric_columns()) out << ",mean_" << c << ",sd_" << c;
  out << '\n';
  for (const AggregateRow& r : rows) {
    out << r.benchmark << ',' << to_string(r.algorithm) << ',' << r.n << ',' << r.runs << ',' << r.errors;
    for (std::size_t c = 0; c < r.mean.size(); ++c) out << ',' << format_double(r.mean[c]) << ',' << format_double(r.sd[c]);
    out << '\n';
  }
}

}  // namespace h2pc
