#pragma once

#include <cstdint>

#include "h2pc/bayesnet.hpp"
#include "h2pc/dataset.hpp"
#include "h2pc/graph.hpp"
#include "h2pc/score.hpp"

namespace h2pc {

struct SkeletonMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double euclidean_distance = 0.0;  // sqrt((1 - precision)^2 + (1 - recall)^2)
  double false_positive_rate = 0.0;  // FP over true non-edges
  double false_negative_rate = 0.0;  // FN over true edges
  std::uint64_t tests_performed = 0;
};

/// Compares undirected edge sets. An empty learned set has precision 1
/// when the truth is also empty and 0 otherwise; an empty truth has
/// recall 1 and false negative rate 0.
SkeletonMetrics skeleton_metrics(const LinkSet& learned, const LinkSet& truth, std::size_t total_pairs);

/// Structural Hamming distance: number of node pairs whose edge status
/// (absent, a -> b, b -> a, undirected) differs.
int shd(const Pdag& a, const Pdag& b);

struct DagMetrics {
  double bdeu_train = 0.0;
  double bic_train = 0.0;
  double bdeu_test = 0.0;
  double bic_test = 0.0;
  int shd = 0;
  std::uint64_t score_calls = 0;
};

/// Scores `learned` on both datasets and compares CPDAGs with the truth.
/// All inputs must share the network's variable order.
DagMetrics evaluate_dag(const Dag& learned, const BayesNet& truth, const Dataset& train, const Dataset& test,
                        const ScoreConfig& config);

}  // namespace h2pc
