#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "h2pc/bayesnet.hpp"
#include "h2pc/structure_search.hpp"
#include "oracles.hpp"

using namespace h2pc;

namespace {

NeighborhoodMap full_constraint(std::size_t p) {
  LinkSet links;
  for (Var a = 0; a < static_cast<Var>(p); ++a)
    for (Var b = a + 1; b < static_cast<Var>(p); ++b) links.insert({a, b});
  return NeighborhoodMap::from_links(p, links);
}

void apply(Dag& g, const Move& m) {
  switch (m.kind) {
    case MoveKind::add: g.add_edge(m.from, m.to); break;
    case MoveKind::remove: g.delete_edge(m.from, m.to); break;
    case MoveKind::reverse: g.reverse_edge(m.from, m.to); break;
  }
}

Dataset chain_data(std::uint64_t seed) {
  const BayesNet net = parse_bif(R"(network chain {}
variable A { type discrete [2] { a0, a1 }; }
variable B { type discrete [2] { b0, b1 }; }
variable C { type discrete [2] { c0, c1 }; }
probability ( A ) { table 0.4, 0.6; }
probability ( B | A ) { (a0) 0.85, 0.15; (a1) 0.2, 0.8; }
probability ( C | B ) { (b0) 0.75, 0.25; (b1) 0.1, 0.9; }
)");
  return ancestral_sample(net, 2000, seed);
}

}  // namespace

TEST(TabuList, RingOfExactStructures) {
  TabuList tabu(2);
  Dag a(3), b(3), c(3);
  b.add_edge(0, 1);
  c.add_edge(1, 0);
  tabu.push(a);
  tabu.push(b);
  EXPECT_TRUE(tabu.contains(a));
  EXPECT_TRUE(tabu.contains(b));
  EXPECT_FALSE(tabu.contains(c));
  tabu.push(c);
  EXPECT_EQ(tabu.size(), 2u);
  EXPECT_FALSE(tabu.contains(a));
  EXPECT_TRUE(tabu.contains(c));
}

TEST(DeltaScore, InverseMovesCancel) {
  const Dataset d = chain_data(1);
  const FamilyScorer s(d, {});
  Dag g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const double del = delta_score(g, {MoveKind::remove, 0, 1}, s);
  g.delete_edge(0, 1);
  const double add = delta_score(g, {MoveKind::add, 0, 1}, s);
  EXPECT_NEAR(del + add, 0.0, 1e-10);
}

TEST(DeltaScore, MatchesFullRescore) {
  std::mt19937_64 rng(61);
  const Dataset d = oracle::random_dataset({2, 3, 2, 4, 3, 2}, 500, rng);
  const FamilyScorer s(d, {});
  for (int trial = 0; trial < 40; ++trial) {
    Dag g = oracle::random_dag(6, 0.35, rng);
    for (int step = 0; step < 20; ++step) {
      const Var a = static_cast<Var>(rng() % 6), b = static_cast<Var>(rng() % 6);
      if (a == b) continue;
      Move m{static_cast<MoveKind>(rng() % 3), a, b};
      const bool legal = m.kind == MoveKind::add       ? (!g.adjacent(a, b) && g.can_add_edge(a, b))
                         : m.kind == MoveKind::remove  ? g.has_edge(a, b)
                                                       : (g.has_edge(a, b) && g.can_reverse_edge(a, b));
      if (!legal) {
        EXPECT_THROW(delta_score(g, m, s), std::invalid_argument);
        continue;
      }
      const double before = network_score(s, g);
      const double delta = delta_score(g, m, s);
      apply(g, m);
      EXPECT_NEAR(delta, network_score(s, g) - before, 1e-9);
    }
  }
}

TEST(DeltaScore, ReverseIsTwoFamilyDeltas) {
  const Dataset d = chain_data(2);
  const FamilyScorer s(d, {});
  Dag g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const std::vector<Var> none, a{0}, b{1}, ac{0, 2};
  // B -> C reversed: C loses B, B gains C.
  const double direct = (s.family(1, ac) - s.family(1, a)) + (s.family(2, none) - s.family(2, b));
  EXPECT_NEAR(delta_score(g, {MoveKind::reverse, 1, 2}, s), direct, 1e-12);
}

TEST(HillClimb, EmptyConstraintReturnsEmptyGraph) {
  const Dataset d = chain_data(3);
  const FamilyScorer s(d, {});
  const SearchResult r = hill_climb(s, NeighborhoodMap(3), {});
  EXPECT_EQ(r.dag.num_edges(), 0u);
  EXPECT_EQ(r.moves, 0u);
  EXPECT_NEAR(r.score, network_score(s, Dag(3)), 1e-12);
}

TEST(HillClimb, ChainRecoveredUpToEquivalence) {
  Dag chain(3);
  chain.add_edge(0, 1);
  chain.add_edge(1, 2);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = chain_data(seed);
    const FamilyScorer s(d, {});
    const SearchResult r = hill_climb(s, full_constraint(3), {});
    // Exhaustive oracle over all 25 DAGs.
    const auto& all = oracle::all_dags(3);
    ASSERT_EQ(all.size(), 25u);
    const Dag* best = &all[0];
    for (const Dag& g : all)
      if (network_score(s, g) > network_score(s, *best)) best = &g;
    EXPECT_EQ(dag_to_cpdag(r.dag), dag_to_cpdag(*best));
    EXPECT_EQ(dag_to_cpdag(r.dag), dag_to_cpdag(chain));
  }
}

TEST(HillClimb, TraceRespectsConstraintAndTabu) {
  const BayesNet net = load_bif(H2PC_DATA_DIR "/networks/alarm.bif");
  const Dataset d = ancestral_sample(net, 1000, 62);
  const FamilyScorer s(d, {});
  const StatisticalEngine engine(d);
  const NeighborhoodMap constraint = build_skeleton(engine, PcLearner::hpc).neighbors;
  SearchOptions opts;
  opts.record_trace = true;
  const SearchResult r = hill_climb(s, constraint, opts);
  ASSERT_EQ(r.trace.size(), r.moves);
  Dag g(37);
  std::vector<Dag> visited{g};
  double best = network_score(s, g);
  for (const TraceEntry& t : r.trace) {
    if (t.move.kind == MoveKind::add) {
      EXPECT_TRUE(constraint.contains(t.move.from, t.move.to));
    }
    apply(g, t.move);  // throws if the step created a cycle
    for (const Edge& e : g.edges()) EXPECT_TRUE(constraint.contains(e.from, e.to));
    EXPECT_NEAR(t.score, network_score(s, g), 1e-8);
    best = std::max(best, t.score);
    EXPECT_NEAR(t.best_score, best, 1e-8);
    const std::size_t window = std::min<std::size_t>(visited.size(), 100);
    for (std::size_t i = visited.size() - window; i < visited.size(); ++i) EXPECT_FALSE(visited[i] == g);
    visited.push_back(g);
  }
  EXPECT_NEAR(r.score, network_score(s, r.dag), 1e-8);
  EXPECT_NEAR(r.score, best, 1e-8);
  EXPECT_GE(r.score, network_score(s, Dag(37)));
  // The run ends after `patience` moves without progress, so the final
  // structure is typically worse than the returned one.
  ASSERT_GE(r.trace.size(), 15u);
  for (std::size_t i = r.trace.size() - 15; i < r.trace.size(); ++i)
    EXPECT_LE(r.trace[i].score, r.trace[r.trace.size() - 16].best_score + 1e-6);
}

TEST(HillClimb, Deterministic) {
  const BayesNet net = load_bif(H2PC_DATA_DIR "/networks/child.bif");
  const Dataset d = ancestral_sample(net, 800, 63);
  const StatisticalEngine engine(d);
  const NeighborhoodMap constraint = build_skeleton(engine, PcLearner::mmpc).neighbors;
  const FamilyScorer s1(d, {}), s2(d, {});
  const SearchResult a = hill_climb(s1, constraint), b = hill_climb(s2, constraint);
  EXPECT_EQ(a.dag, b.dag);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(a.moves, b.moves);
}

TEST(HillClimb, RejectsAsymmetricConstraint) {
  const Dataset d = chain_data(4);
  const FamilyScorer s(d, {});
  NeighborhoodMap m(3);
  m.pc[0] = {1};
  EXPECT_THROW(hill_climb(s, m), std::invalid_argument);
}

TEST(HillClimb, TraceCsv) {
  const Dataset d = chain_data(5);
  const FamilyScorer s(d, {});
  SearchOptions opts;
  opts.record_trace = true;
  const SearchResult r = hill_climb(s, full_constraint(3), opts);
  std::ostringstream out;
  write_trace_csv(out, r.trace, d.names());
  EXPECT_EQ(out.str().rfind("step,move,from,to,delta,score,best_score\n1,add,", 0), 0u) << out.str();
}
