#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "h2pc/graph.hpp"
#include "h2pc/indep_test.hpp"

namespace h2pc {

/// Separating sets found for pairs declared independent, keyed by the
/// unordered pair.
class SepsetCache {
 public:
  void store(Var a, Var b, std::vector<Var> separator);
  const std::vector<Var>* find(Var a, Var b) const;
  std::size_t size() const { return sets_.size(); }
  const std::map<Link, std::vector<Var>>& entries() const { return sets_; }

 private:
  std::map<Link, std::vector<Var>> sets_;
};

/// Estimated parents-and-children set of every variable.
struct NeighborhoodMap {
  std::vector<std::vector<Var>> pc;  // each sorted ascending

  NeighborhoodMap() = default;
  explicit NeighborhoodMap(std::size_t num_vars) : pc(num_vars) {}

  std::size_t num_vars() const { return pc.size(); }
  bool contains(Var target, Var x) const;
  bool is_symmetric() const;
  LinkSet links() const;

  /// Symmetric map whose neighborhoods are the adjacencies of `links`.
  static NeighborhoodMap from_links(std::size_t num_vars, const LinkSet& links);
};

struct DiscoveryOptions {
  /// Largest conditioning set enumerated by the Inter-IAPC spouse
  /// removal and the MMPC subset searches. Unset means no cap.
  std::optional<std::size_t> max_subset_size;
};

struct SupersetResult {
  std::vector<Var> pcs;  // sorted ascending
  SepsetCache sepsets;
};

/// Parents-and-children superset with conditioning sets of size <= 1.
/// Pass 0 drops X with T ⊥ X | ∅; pass 1 visits survivors by decreasing
/// association and drops X if T ⊥ X | {Z} for another current candidate Z.
SupersetResult de_pcs(Var target, const IndependenceEngine& engine);

/// Spouse superset. For each X in `pcs`, non-candidates Y that become
/// dependent on T given dSep(T, Y) ∪ {X} form a pool; a pool member is
/// pruned if T ⊥ Y | dSep(T, Y) ∪ {X, Z} for another pool member Z.
std::vector<Var> de_sps(Var target, const IndependenceEngine& engine, std::span<const Var> pcs,
                        const SepsetCache& sepsets);

/// Weak PC learner: interleaved grow/shrink Markov blanket search
/// restricted to `scope`, followed by removal of variables that some
/// subset of the blanket separates from the target.
std::vector<Var> inter_iapc(Var target, const IndependenceEngine& engine, std::span<const Var> scope,
                            const DiscoveryOptions& options = {});

/// Hybrid parents-and-children: superset filtering, Inter-IAPC on
/// T ∪ PCS ∪ SPS, then the decentralized search that adds X ∈ PCS when T
/// appears in Inter-IAPC(X) over the same scope.
std::vector<Var> hpc(Var target, const IndependenceEngine& engine, const DiscoveryOptions& options = {});

/// MMPC without the symmetry correction: max-min forward selection then
/// backward elimination over subsets of the candidate set.
std::vector<Var> mmpc_candidates(Var target, const IndependenceEngine& engine, const DiscoveryOptions& options = {});

/// MMPC: the candidates X of T that also list T among their own candidates.
std::vector<Var> mmpc(Var target, const IndependenceEngine& engine, const DiscoveryOptions& options = {});

enum class PcLearner { hpc, mmpc };

std::string_view to_string(PcLearner learner);

struct SkeletonResult {
  NeighborhoodMap neighbors;                 // AND-rule skeleton
  std::vector<std::vector<Var>> local;       // raw per-target learner output
  std::vector<std::uint64_t> tests_per_target;
};

/// Runs the learner once per variable and keeps X - Y only when each lists
/// the other. For MMPC the per-target run is mmpc_candidates: under the
/// AND rule this gives the same skeleton as mmpc at a third of the cost.
/// `threads` > 1 spreads targets over workers; results do not depend on it.
SkeletonResult build_skeleton(const IndependenceEngine& engine, PcLearner learner,
                              const DiscoveryOptions& options = {}, unsigned threads = 1);

}  // namespace h2pc
