#include "h2pc/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "h2pc/rng.hpp"
#include "h2pc/special_functions.hpp"

namespace h2pc {

namespace {

struct FamilyCounts {
  int arity = 0;
  int configs = 0;           // observed parent configurations
  std::vector<int> counts;   // [j][k]
  std::vector<int> totals;   // N_j
};

FamilyCounts tally(const Dataset& data, Var child, std::span<const Var> parents) {
  const auto p = static_cast<Var>(data.num_vars());
  if (child < 0 || child >= p) throw std::invalid_argument("family score: unknown child");
  for (Var v : parents) {
    if (v < 0 || v >= p || v == child) throw std::invalid_argument("family score: bad parent");
  }
  const Strata strata = stratify(data, parents);
  FamilyCounts out;
  out.arity = data.arity(child);
  out.configs = strata.count;
  out.counts.assign(static_cast<std::size_t>(out.configs) * out.arity, 0);
  out.totals.assign(out.configs, 0);
  const auto column = data.column(child);
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    ++out.counts[static_cast<std::size_t>(strata.id[r]) * out.arity + column[r]];
    ++out.totals[strata.id[r]];
  }
  return out;
}

double parent_space(const Dataset& data, std::span<const Var> parents) {
  double q = 1.0;
  for (Var v : parents) q *= data.arity(v);
  return q;
}

}  // namespace

double bdeu_family(const Dataset& data, Var child, std::span<const Var> parents, double ess) {
  if (!(ess > 0.0)) throw std::invalid_argument("bdeu: equivalent sample size must be positive");
  const FamilyCounts f = tally(data, child, parents);
  const double q = parent_space(data, parents);
  const double alpha_j = ess / q;
  const double alpha_jk = ess / (q * f.arity);
  const double lg_alpha_j = math::log_gamma(alpha_j);
  const double lg_alpha_jk = math::log_gamma(alpha_jk);
  double score = 0.0;
  for (int j = 0; j < f.configs; ++j) {
    score += lg_alpha_j - math::log_gamma(alpha_j + f.totals[j]);
    for (int k = 0; k < f.arity; ++k) {
      const int n = f.counts[static_cast<std::size_t>(j) * f.arity + k];
      if (n > 0) score += math::log_gamma(alpha_jk + n) - lg_alpha_jk;
    }
  }
  return score;
}

double bic_family(const Dataset& data, Var child, std::span<const Var> parents) {
  const FamilyCounts f = tally(data, child, parents);
  double loglik = 0.0;
  for (int j = 0; j < f.configs; ++j) {
    const double nj = f.totals[j];
    for (int k = 0; k < f.arity; ++k) {
      const int n = f.counts[static_cast<std::size_t>(j) * f.arity + k];
      if (n > 0) loglik += n * std::log(n / nj);
    }
  }
  const double q = parent_space(data, parents);
  const double n = static_cast<double>(data.num_rows());
  const double penalty = n > 0 ? 0.5 * q * (f.arity - 1) * std::log(n) : 0.0;
  return loglik - penalty;
}

std::size_t FamilyKeyHash::operator()(const FamilyKey& key) const noexcept {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(key.child));
  for (Var v : key.parents) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

FamilyScorer::FamilyScorer(const Dataset& data, ScoreConfig config, bool use_cache)
    : data_(data), config_(config), use_cache_(use_cache), fingerprint_(data.fingerprint()) {
  if (config_.kind == ScoreKind::bdeu && !(config_.equivalent_sample_size > 0.0)) {
    throw std::invalid_argument("equivalent sample size must be positive");
  }
}

double FamilyScorer::evaluate(Var child, std::span<const Var> parents) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  return config_.kind == ScoreKind::bdeu ? bdeu_family(data_, child, parents, config_.equivalent_sample_size)
                                         : bic_family(data_, child, parents);
}

double FamilyScorer::family(Var child, std::span<const Var> parents) const {
  FamilyKey key{child, std::vector<Var>(parents.begin(), parents.end())};
  std::sort(key.parents.begin(), key.parents.end());
  if (!use_cache_) return evaluate(child, key.parents);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double value = evaluate(child, key.parents);
  std::unique_lock lock(mutex_);
  cache_.insert_or_assign(std::move(key), value);
  return value;
}

double network_score(const FamilyScorer& scorer, const Dag& dag) {
  if (static_cast<std::size_t>(dag.num_nodes()) != scorer.data().num_vars()) {
    throw std::invalid_argument("network_score: graph and dataset disagree on variable count");
  }
  double total = 0.0;
  for (Var v = 0; v < dag.num_nodes(); ++v) total += scorer.family(v, dag.parents(v));
  return total;
}

double network_score(const Dataset& data, const Dag& dag, ScoreConfig config) {
  return network_score(FamilyScorer(data, config), dag);
}

}  // namespace h2pc
