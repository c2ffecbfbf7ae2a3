// Command-line front end: experiment harness, single-dataset learning, sampling.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "h2pc/experiment.hpp"
#include "h2pc/rng.hpp"

namespace {

using namespace h2pc;

std::string algorithm_names() { return "h2pc, mmhc"; }

Algorithm require_algorithm(const std::string& name) {
  if (auto a = parse_algorithm(name)) return *a;
  throw CLI::ValidationError("--algo", "unknown algorithm '" + name + "' (valid: " + algorithm_names() + ")");
}

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

struct LearnArgs {
  std::string data;
  std::string algo = "h2pc";
  std::string ref;
  double alpha = 0.05;
  double ess = 10.0;
  double power_threshold = 5.0;
  std::size_t test_size = 5000;
  std::uint64_t seed = 20130101;
  std::string out_graph;
  std::string trace;
  bool no_header = false;
};

int run_learn(const LearnArgs& args) {
  const Algorithm algorithm = require_algorithm(args.algo);
  Dataset data = load_csv(args.data, !args.no_header);
  std::optional<BayesNet> ref;
  if (!args.ref.empty()) {
    ref.emplace(load_bif(args.ref));
    data = align_levels(data, ref->names(), ref->levels());
  }

  LearnOptions options;
  options.test = {args.alpha, args.power_threshold};
  options.score = {ScoreKind::bdeu, args.ess};
  options.search.record_trace = !args.trace.empty();
  const LearnResult learned = learn_structure(data, algorithm, options);

  write_edge_list(std::cout, learned.dag, data.names());
  if (!args.out_graph.empty()) {
    std::ofstream out(args.out_graph);
    if (!out) throw std::runtime_error("cannot write '" + args.out_graph + "'");
    write_edge_list(out, learned.dag, data.names());
  }
  if (!args.trace.empty()) {
    std::ofstream out(args.trace);
    if (!out) throw std::runtime_error("cannot write '" + args.trace + "'");
    write_trace_csv(out, learned.trace, data.names());
  }

  std::cout << "\n# algorithm " << to_string(algorithm) << '\n';
  std::cout << "# edges " << learned.dag.num_edges() << '\n';
  std::cout << "# n_tests " << learned.tests << '\n';
  std::cout << "# n_scores " << learned.score_calls << '\n';
  if (!ref) {
    std::cout << "# bdeu_train " << fmt(network_score(data, learned.dag, options.score)) << '\n';
    std::cout << "# bic_train " << fmt(network_score(data, learned.dag, {ScoreKind::bic, args.ess})) << '\n';
    return 0;
  }
  const Dataset test = ancestral_sample(*ref, args.test_size, derive_seed(args.seed, 1));
  DagMetrics m = evaluate_dag(learned.dag, *ref, data, test, options.score);
  const std::size_t p = ref->num_vars();
  SkeletonMetrics s = skeleton_metrics(learned.skeleton.neighbors.links(), skeleton_of(ref->dag()), p * (p - 1) / 2);
  std::cout << "# precision " << fmt(s.precision) << '\n'
            << "# recall " << fmt(s.recall) << '\n'
            << "# euclid " << fmt(s.euclidean_distance) << '\n'
            << "# fpr " << fmt(s.false_positive_rate) << '\n'
            << "# fnr " << fmt(s.false_negative_rate) << '\n'
            << "# bdeu_train " << fmt(m.bdeu_train) << '\n'
            << "# bic_train " << fmt(m.bic_train) << '\n'
            << "# bdeu_test " << fmt(m.bdeu_test) << '\n'
            << "# bic_test " << fmt(m.bic_test) << '\n'
            << "# shd " << m.shd << '\n';
  return 0;
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(require_algorithm(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian-network structure learning: H2PC and MMHC"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  ExperimentConfig config;
  std::string net_path;
  std::string out_path;
  std::vector<std::string> algos{"h2pc", "mmhc"};
  bool no_wall_time = false;
  auto* experiment = app.add_subcommand("experiment", "Sample, learn, evaluate, and aggregate over a grid of sizes");
  experiment->add_option("--net", net_path, "BIF network file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--algos", algos, "Algorithms (h2pc, mmhc)")->delimiter(',');
  experiment->add_option("--sizes", config.sizes, "Training sample sizes")->delimiter(',');
  experiment->add_option("--reps", config.repetitions, "Repetitions per size");
  experiment->add_option("--alpha", config.alpha, "Significance level");
  experiment->add_option("--ess", config.ess, "BDeu equivalent sample size");
  experiment->add_option("--power-threshold", config.power_threshold, "Minimum samples per contingency cell");
  experiment->add_option("--test-size", config.test_size, "Rows of each fresh test set");
  experiment->add_option("--seed", config.seed, "Master seed");
  experiment->add_option("--out", out_path, "Output directory for runs.csv and aggregate.csv")->required();
  experiment->add_option("--jobs", config.jobs, "Worker threads over (size, repetition) cells");
  experiment->add_flag("--no-wall-time", no_wall_time, "Write wall_ms as 0 for byte-reproducible output");
  experiment->add_flag("--dump-graphs", config.dump_graphs, "Write each learned DAG under <out>/graphs");

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "Learn one structure from a CSV dataset");
  learn->add_option("--data", learn_args.data, "CSV dataset with a header row")->required()->check(CLI::ExistingFile);
  learn->add_option("--algo", learn_args.algo, "Algorithm (h2pc, mmhc)");
  learn->add_option("--ref", learn_args.ref, "Reference BIF network for gold-standard metrics")
      ->check(CLI::ExistingFile);
  learn->add_option("--alpha", learn_args.alpha, "Significance level");
  learn->add_option("--ess", learn_args.ess, "BDeu equivalent sample size");
  learn->add_option("--power-threshold", learn_args.power_threshold, "Minimum samples per contingency cell");
  learn->add_option("--test-size", learn_args.test_size, "Rows of the test set sampled from --ref");
  learn->add_option("--seed", learn_args.seed, "Seed of the test set sampled from --ref");
  learn->add_option("--out-graph", learn_args.out_graph, "Also write the edge list to this file");
  learn->add_option("--trace", learn_args.trace, "Write the hill-climbing trace as CSV");
  learn->add_flag("--no-header", learn_args.no_header, "The CSV has no header row");

  std::string sample_net;
  std::string sample_out;
  std::size_t sample_rows = 1000;
  std::uint64_t sample_seed = 1;
  auto* sample = app.add_subcommand("sample", "Draw a CSV dataset from a BIF network");
  sample->add_option("--net", sample_net, "BIF network file")->required()->check(CLI::ExistingFile);
  sample->add_option("--rows", sample_rows, "Number of rows");
  sample->add_option("--seed", sample_seed, "Seed");
  sample->add_option("--out", sample_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
    if (*experiment) {
      config.network = net_path;
      config.output = out_path;
      config.algorithms = parse_algorithms(algos);
      config.record_wall_time = !no_wall_time;
      const MetricsReport report = run_experiment(config);
      write_aggregate_csv(std::cout, report.aggregates);
      std::size_t errors = 0;
      for (const auto& r : report.runs) errors += r.ok() ? 0 : 1;
      if (errors) std::cerr << errors << " run(s) failed; see the status column of runs.csv\n";
      return errors ? 1 : 0;
    }
    if (*learn) return run_learn(learn_args);
    if (*sample) {
      const BayesNet net = load_bif(sample_net);
      if (sample_rows == 0) throw CLI::ValidationError("--rows", "must be positive");
      const Dataset data = ancestral_sample(net, sample_rows, sample_seed);
      if (sample_out.empty()) {
        write_csv(data, std::cout);
      } else {
        save_csv(data, sample_out);
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage error shares code 2.
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
