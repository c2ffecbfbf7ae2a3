#include "h2pc/local_discovery.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>
#include <thread>

namespace h2pc {

void SepsetCache::store(Var a, Var b, std::vector<Var> separator) {
  std::sort(separator.begin(), separator.end());
  sets_.insert_or_assign(make_link(a, b), std::move(separator));
}

const std::vector<Var>* SepsetCache::find(Var a, Var b) const {
  auto it = sets_.find(make_link(a, b));
  return it == sets_.end() ? nullptr : &it->second;
}

bool NeighborhoodMap::contains(Var target, Var x) const {
  const auto& set = pc.at(target);
  return std::binary_search(set.begin(), set.end(), x);
}

bool NeighborhoodMap::is_symmetric() const {
  for (std::size_t v = 0; v < pc.size(); ++v) {
    for (Var u : pc[v]) {
      if (u == static_cast<Var>(v) || !contains(u, static_cast<Var>(v))) return false;
    }
  }
  return true;
}

LinkSet NeighborhoodMap::links() const {
  LinkSet out;
  for (std::size_t v = 0; v < pc.size(); ++v)
    for (Var u : pc[v])
      if (contains(u, static_cast<Var>(v))) out.insert(make_link(u, static_cast<Var>(v)));
  return out;
}

NeighborhoodMap NeighborhoodMap::from_links(std::size_t num_vars, const LinkSet& links) {
  NeighborhoodMap out(num_vars);
  for (const auto& [a, b] : links) {
    out.pc.at(a).push_back(b);
    out.pc.at(b).push_back(a);
  }
  for (auto& set : out.pc) std::sort(set.begin(), set.end());
  return out;
}

namespace {

bool contains_var(std::span<const Var> set, Var v) { return std::find(set.begin(), set.end(), v) != set.end(); }

void erase_var(std::vector<Var>& set, Var v) { set.erase(std::remove(set.begin(), set.end(), v), set.end()); }

std::vector<Var> without(std::span<const Var> set, Var v) {
  std::vector<Var> out;
  out.reserve(set.size());
  for (Var u : set)
    if (u != v) out.push_back(u);
  return out;
}

std::vector<Var> sorted_union(std::span<const Var> base, std::initializer_list<Var> extra) {
  std::vector<Var> out(base.begin(), base.end());
  for (Var v : extra)
    if (!contains_var(out, v)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

// Visits subsets of `pool` by increasing size (lexicographic within a
// size) until `visit` returns true. Returns whether it stopped early.
template <typename Visit>
bool any_subset(std::span<const Var> pool, std::size_t max_size, Visit&& visit) {
  const std::size_t n = pool.size();
  const std::size_t limit = std::min(n, max_size);
  std::vector<Var> subset;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k <= limit; ++k) {
    idx.resize(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      subset.clear();
      for (std::size_t i : idx) subset.push_back(pool[i]);
      if (visit(std::span<const Var>(subset))) return true;
      // next combination
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return false;
}

struct Ranked {
  Var var;
  AssociationKey key;
};

// Decreasing association, ties by variable index.
void sort_by_association(std::vector<Ranked>& items) {
  std::stable_sort(items.begin(), items.end(), [](const Ranked& a, const Ranked& b) {
    if (b.key < a.key) return true;
    if (a.key < b.key) return false;
    return a.var < b.var;
  });
}

std::size_t cap_of(const DiscoveryOptions& options) {
  return options.max_subset_size.value_or(static_cast<std::size_t>(-1));
}

void check_target(Var target, const IndependenceEngine& engine) {
  if (target < 0 || static_cast<std::size_t>(target) >= engine.num_vars()) {
    throw std::invalid_argument("unknown target variable " + std::to_string(target));
  }
}

// Forwards every test to a shared engine while counting locally.
class CountingView final : public IndependenceEngine {
 public:
  explicit CountingView(const IndependenceEngine& base) : base_(base) {}
  std::size_t num_vars() const override { return base_.num_vars(); }
  bool has_association() const override { return base_.has_association(); }

 protected:
  TestOutcome decide(Var x, Var y, std::span<const Var> z) const override { return base_.test(x, y, z); }

 private:
  const IndependenceEngine& base_;
};

}  // namespace

SupersetResult de_pcs(Var target, const IndependenceEngine& engine) {
  check_target(target, engine);
  SupersetResult out;
  std::vector<Ranked> survivors;
  const auto p = static_cast<Var>(engine.num_vars());
  for (Var x = 0; x < p; ++x) {
    if (x == target) continue;
    const TestOutcome outcome = engine.test(target, x, {});
    if (outcome.independent()) {
      out.sepsets.store(target, x, {});
    } else {
      survivors.push_back({x, association_key(outcome)});
    }
  }
  sort_by_association(survivors);

  std::vector<Var> current;
  for (const Ranked& r : survivors) current.push_back(r.var);
  for (const Ranked& r : survivors) {
    const Var x = r.var;
    if (!contains_var(current, x)) continue;
    for (Var z : current) {
      if (z == x) continue;
      const Var cond[] = {z};
      if (engine.test(target, x, cond).independent()) {
        out.sepsets.store(target, x, {z});
        erase_var(current, x);
        break;
      }
    }
  }
  std::sort(current.begin(), current.end());
  out.pcs = std::move(current);
  return out;
}

std::vector<Var> de_sps(Var target, const IndependenceEngine& engine, std::span<const Var> pcs,
                        const SepsetCache& sepsets) {
  check_target(target, engine);
  const auto p = static_cast<Var>(engine.num_vars());
  std::set<Var> spouses;
  for (Var x : pcs) {
    std::vector<Ranked> pool;
    for (Var y = 0; y < p; ++y) {
      if (y == target || contains_var(pcs, y)) continue;
      const std::vector<Var>* sep = sepsets.find(target, y);
      const std::vector<Var> cond = sorted_union(sep ? std::span<const Var>(*sep) : std::span<const Var>(), {x});
      if (contains_var(cond, y)) continue;
      const TestOutcome outcome = engine.test(target, y, cond);
      if (outcome.dependent()) pool.push_back({y, association_key(outcome)});
    }
    sort_by_association(pool);
    std::vector<Var> members;
    for (const Ranked& r : pool) members.push_back(r.var);
    for (const Ranked& r : pool) {
      const Var y = r.var;
      const std::vector<Var>* sep = sepsets.find(target, y);
      const std::span<const Var> base = sep ? std::span<const Var>(*sep) : std::span<const Var>();
      for (Var z : std::vector<Var>(members)) {
        if (z == y) continue;
        const std::vector<Var> cond = sorted_union(base, {x, z});
        if (engine.test(target, y, cond).independent()) {
          erase_var(members, y);
          break;
        }
      }
    }
    spouses.insert(members.begin(), members.end());
  }
  return {spouses.begin(), spouses.end()};
}

std::vector<Var> inter_iapc(Var target, const IndependenceEngine& engine, std::span<const Var> scope,
                            const DiscoveryOptions& options) {
  check_target(target, engine);
  if (!contains_var(scope, target)) throw std::invalid_argument("inter_iapc: target must belong to the scope");
  std::vector<Var> variables;
  for (Var v : scope)
    if (v != target) variables.push_back(v);
  std::sort(variables.begin(), variables.end());
  variables.erase(std::unique(variables.begin(), variables.end()), variables.end());

  std::vector<Var> blanket;
  std::set<std::vector<Var>> visited{blanket};
  while (true) {
    bool changed = false;
    // Grow: the most associated outsider joins if it is dependent.
    std::optional<Ranked> best;
    bool best_dependent = false;
    for (Var x : variables) {
      if (contains_var(blanket, x)) continue;
      const TestOutcome outcome = engine.test(target, x, blanket);
      const AssociationKey key = association_key(outcome);
      if (!best || best->key < key) {
        best = Ranked{x, key};
        best_dependent = outcome.dependent();
      }
    }
    if (best && best_dependent) {
      blanket.push_back(best->var);
      changed = true;
    }
    // Shrink: drop members independent of the target given the rest.
    for (Var x : std::vector<Var>(blanket)) {
      const std::vector<Var> rest = without(blanket, x);
      if (engine.test(target, x, rest).independent()) {
        erase_var(blanket, x);
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Var> state = blanket;
    std::sort(state.begin(), state.end());
    // A revisited blanket means the grow/shrink steps are cycling.
    if (!visited.insert(std::move(state)).second) break;
  }

  std::sort(blanket.begin(), blanket.end());
  std::vector<Var> pc = blanket;
  const std::size_t cap = cap_of(options);
  for (Var x : blanket) {
    const std::vector<Var> others = without(blanket, x);
    const bool separated = any_subset(others, cap, [&](std::span<const Var> z) {
      return engine.test(target, x, z).independent();
    });
    if (separated) erase_var(pc, x);
  }
  return pc;
}

std::vector<Var> hpc(Var target, const IndependenceEngine& engine, const DiscoveryOptions& options) {
  SupersetResult superset = de_pcs(target, engine);
  const std::vector<Var> spouses = de_sps(target, engine, superset.pcs, superset.sepsets);

  std::vector<Var> scope{target};
  scope.insert(scope.end(), superset.pcs.begin(), superset.pcs.end());
  scope.insert(scope.end(), spouses.begin(), spouses.end());
  std::sort(scope.begin(), scope.end());

  std::vector<Var> pc;
  for (Var x : inter_iapc(target, engine, scope, options))
    if (contains_var(superset.pcs, x)) pc.push_back(x);

  for (Var x : superset.pcs) {
    if (contains_var(pc, x)) continue;
    const std::vector<Var> reverse = inter_iapc(x, engine, scope, options);
    if (contains_var(reverse, target)) pc.push_back(x);
  }
  std::sort(pc.begin(), pc.end());
  return pc;
}

std::vector<Var> mmpc_candidates(Var target, const IndependenceEngine& engine, const DiscoveryOptions& options) {
  check_target(target, engine);
  const auto p = static_cast<Var>(engine.num_vars());
  const std::size_t cap = cap_of(options);

  struct Candidate {
    Var var;
    AssociationKey min_key;
    bool eliminated = false;
  };
  std::vector<Candidate> open;
  for (Var x = 0; x < p; ++x) {
    if (x == target) continue;
    const TestOutcome outcome = engine.test(target, x, {});
    if (outcome.dependent()) open.push_back({x, association_key(outcome)});
  }

  std::vector<Var> selected;
  while (true) {
    // Max-min heuristic over the open candidates.
    Candidate* best = nullptr;
    for (Candidate& c : open) {
      if (c.eliminated) continue;
      if (!best || best->min_key < c.min_key) best = &c;
    }
    if (!best) break;
    const Var added = best->var;
    best->eliminated = true;
    selected.push_back(added);
    // Only subsets containing the newcomer are new for the other candidates.
    const std::vector<Var> previous = without(selected, added);
    if (cap == 0) continue;
    const std::size_t inner = cap == static_cast<std::size_t>(-1) ? cap : cap - 1;
    for (Candidate& c : open) {
      if (c.eliminated) continue;
      std::vector<Var> cond;
      any_subset(previous, inner, [&](std::span<const Var> subset) {
        cond.assign(subset.begin(), subset.end());
        cond.push_back(added);
        const TestOutcome outcome = engine.test(target, c.var, cond);
        if (outcome.independent()) {
          c.eliminated = true;
          return true;
        }
        c.min_key = std::min(c.min_key, association_key(outcome));
        return false;
      });
    }
  }

  std::sort(selected.begin(), selected.end());
  std::vector<Var> pc = selected;
  for (Var x : selected) {
    const std::vector<Var> others = without(pc, x);
    const bool separated = any_subset(others, cap, [&](std::span<const Var> z) {
      return engine.test(target, x, z).independent();
    });
    if (separated) erase_var(pc, x);
  }
  return pc;
}

std::vector<Var> mmpc(Var target, const IndependenceEngine& engine, const DiscoveryOptions& options) {
  std::vector<Var> out;
  for (Var x : mmpc_candidates(target, engine, options)) {
    if (contains_var(mmpc_candidates(x, engine, options), target)) out.push_back(x);
  }
  return out;
}

std::string_view to_string(PcLearner learner) { return learner == PcLearner::hpc ? "hpc" : "mmpc"; }

SkeletonResult build_skeleton(const IndependenceEngine& engine, PcLearner learner, const DiscoveryOptions& options,
                              unsigned threads) {
  const std::size_t p = engine.num_vars();
  SkeletonResult out;
  out.local.resize(p);
  out.tests_per_target.resize(p);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t v = next++; v < p; v = next++) {
      CountingView view(engine);
      const auto target = static_cast<Var>(v);
      out.local[v] = learner == PcLearner::hpc ? hpc(target, view, options) : mmpc_candidates(target, view, options);
      out.tests_per_target[v] = view.test_count();
    }
  };
  if (threads <= 1 || p < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, p); ++t) pool.emplace_back(worker);
  }

  out.neighbors = NeighborhoodMap(p);
  for (std::size_t v = 0; v < p; ++v) {
    for (Var u : out.local[v]) {
      if (contains_var(out.local[u], static_cast<Var>(v))) out.neighbors.pc[v].push_back(u);
    }
    std::sort(out.neighbors.pc[v].begin(), out.neighbors.pc[v].end());
  }
  return out;
}

}  // namespace h2pc
