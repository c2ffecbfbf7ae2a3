#include "h2pc/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace h2pc {

SkeletonMetrics skeleton_metrics(const LinkSet& learned, const LinkSet& truth, std::size_t total_pairs) {
  std::size_t tp = 0;
  for (const Link& l : learned) tp += truth.count(l);
  const std::size_t fp = learned.size() - tp;
  const std::size_t fn = truth.size() - tp;

  SkeletonMetrics m;
  if (learned.empty()) {
    m.precision = truth.empty() ? 1.0 : 0.0;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(learned.size());
  }
  m.recall = truth.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(truth.size());
  m.euclidean_distance = std::hypot(1.0 - m.precision, 1.0 - m.recall);
  const std::size_t negatives = total_pairs > truth.size() ? total_pairs - truth.size() : 0;
  m.false_positive_rate = negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0;
  m.false_negative_rate = truth.empty() ? 0.0 : static_cast<double>(fn) / static_cast<double>(truth.size());
  return m;
}

int shd(const Pdag& a, const Pdag& b) {
  if (a.num_nodes() != b.num_nodes()) throw std::invalid_argument("shd: graphs differ in node count");
  int distance = 0;
  for (Var u = 0; u < a.num_nodes(); ++u)
    for (Var v = u + 1; v < a.num_nodes(); ++v)
      if (a.state(u, v) != b.state(u, v)) ++distance;
  return distance;
}

DagMetrics evaluate_dag(const Dag& learned, const BayesNet& truth, const Dataset& train, const Dataset& test,
                        const ScoreConfig& config) {
  const auto p = truth.num_vars();
  if (static_cast<std::size_t>(learned.num_nodes()) != p || train.num_vars() != p || test.num_vars() != p) {
    throw std::invalid_argument("evaluate_dag: inputs disagree on the variable set");
  }
  if (train.names() != truth.names() || test.names() != truth.names()) {
    throw std::invalid_argument("evaluate_dag: datasets must follow the network's variable order");
  }
  const ScoreConfig bdeu{ScoreKind::bdeu, config.equivalent_sample_size};
  const ScoreConfig bic{ScoreKind::bic, config.equivalent_sample_size};
  const FamilyScorer bdeu_train(train, bdeu), bic_train(train, bic), bdeu_test(test, bdeu), bic_test(test, bic);

  DagMetrics m;
  m.bdeu_train = network_score(bdeu_train, learned);
  m.bic_train = network_score(bic_train, learned);
  m.bdeu_test = network_score(bdeu_test, learned);
  m.bic_test = network_score(bic_test, learned);
  m.shd = shd(dag_to_cpdag(learned), dag_to_cpdag(truth.dag()));
  return m;
}

}  // namespace h2pc
