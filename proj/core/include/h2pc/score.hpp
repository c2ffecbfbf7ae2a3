#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "h2pc/dataset.hpp"
#include "h2pc/graph.hpp"

namespace h2pc {

enum class ScoreKind { bdeu, bic };

struct ScoreConfig {
  ScoreKind kind = ScoreKind::bdeu;
  double equivalent_sample_size = 10.0;
};

/// Log BDeu marginal likelihood of one family with uniform Dirichlet
/// hyperparameters ess / (q r). Unobserved parent configurations
/// contribute exactly zero and are skipped.
double bdeu_family(const Dataset& data, Var child, std::span<const Var> parents, double ess);

/// Maximized log-likelihood minus q (r - 1) / 2 log n.
double bic_family(const Dataset& data, Var child, std::span<const Var> parents);

/// Child plus sorted parent set.
struct FamilyKey {
  Var child = 0;
  std::vector<Var> parents;

  friend bool operator==(const FamilyKey&, const FamilyKey&) = default;
};

struct FamilyKeyHash {
  std::size_t operator()(const FamilyKey& key) const noexcept;
};

/// Memoizing family scorer bound to one dataset. Lookups and inserts are
/// safe from several threads; every uncached evaluation bumps the counter.
class FamilyScorer {
 public:
  /// Keeps a reference to `data`, which must outlive the scorer.
  FamilyScorer(const Dataset& data, ScoreConfig config, bool use_cache = true);

  double family(Var child, std::span<const Var> parents) const;

  const Dataset& data() const { return data_; }
  const ScoreConfig& config() const { return config_; }
  std::uint64_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  double evaluate(Var child, std::span<const Var> parents) const;

  const Dataset& data_;
  ScoreConfig config_;
  bool use_cache_;
  std::uint64_t fingerprint_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<FamilyKey, double, FamilyKeyHash> cache_;
};

double network_score(const FamilyScorer& scorer, const Dag& dag);
double network_score(const Dataset& data, const Dag& dag, ScoreConfig config);

}  // namespace h2pc
