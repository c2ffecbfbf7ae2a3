#include "h2pc/structure_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "h2pc/rng.hpp"

namespace h2pc {

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::add: return "add";
    case MoveKind::remove: return "delete";
    case MoveKind::reverse: return "reverse";
  }
  return "?";
}

std::uint64_t TabuList::fingerprint(const Dag& dag) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(dag.num_nodes()));
  for (const Edge& e : dag.edges()) {
    h = splitmix64(h ^ (static_cast<std::uint64_t>(e.from) << 32 | static_cast<std::uint32_t>(e.to)));
  }
  return h;
}

void TabuList::push(const Dag& dag) {
  if (capacity_ == 0) return;
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back({fingerprint(dag), dag.edges()});
}

bool TabuList::contains(const Dag& dag) const {
  const std::uint64_t h = fingerprint(dag);
  std::optional<std::vector<Edge>> edges;
  for (const Entry& e : entries_) {
    if (e.hash != h) continue;
    if (!edges) edges = dag.edges();
    if (e.edges == *edges) return true;
  }
  return false;
}

namespace {

std::vector<Var> with_parent(const std::vector<Var>& parents, Var extra) {
  std::vector<Var> out = parents;
  out.insert(std::lower_bound(out.begin(), out.end(), extra), extra);
  return out;
}

std::vector<Var> without_parent(const std::vector<Var>& parents, Var gone) {
  std::vector<Var> out;
  out.reserve(parents.size());
  for (Var v : parents)
    if (v != gone) out.push_back(v);
  return out;
}

bool legal(const Dag& dag, const Move& move) {
  switch (move.kind) {
    case MoveKind::add: return dag.can_add_edge(move.from, move.to);
    case MoveKind::remove: return dag.has_edge(move.from, move.to);
    case MoveKind::reverse: return dag.can_reverse_edge(move.from, move.to);
  }
  return false;
}

void apply(Dag& dag, const Move& move) {
  switch (move.kind) {
    case MoveKind::add: dag.add_edge(move.from, move.to); break;
    case MoveKind::remove: dag.delete_edge(move.from, move.to); break;
    case MoveKind::reverse: dag.reverse_edge(move.from, move.to); break;
  }
}

void undo(Dag& dag, const Move& move) {
  switch (move.kind) {
    case MoveKind::add: dag.delete_edge(move.from, move.to); break;
    case MoveKind::remove: dag.add_edge(move.from, move.to); break;
    case MoveKind::reverse: dag.reverse_edge(move.to, move.from); break;
  }
}

}  // namespace

double delta_score(const Dag& dag, const Move& move, const FamilyScorer& scorer) {
  if (!legal(dag, move)) throw std::invalid_argument("delta_score: illegal move");
  const Var x = move.from;
  const Var y = move.to;
  switch (move.kind) {
    case MoveKind::add:
      return scorer.family(y, with_parent(dag.parents(y), x)) - scorer.family(y, dag.parents(y));
    case MoveKind::remove:
      return scorer.family(y, without_parent(dag.parents(y), x)) - scorer.family(y, dag.parents(y));
    case MoveKind::reverse:
      return scorer.family(y, without_parent(dag.parents(y), x)) - scorer.family(y, dag.parents(y)) +
             scorer.family(x, with_parent(dag.parents(x), y)) - scorer.family(x, dag.parents(x));
  }
  return 0.0;
}

SearchResult hill_climb(const FamilyScorer& scorer, const NeighborhoodMap& constraint, const SearchOptions& options) {
  const auto p = static_cast<Var>(scorer.data().num_vars());
  if (constraint.num_vars() != static_cast<std::size_t>(p)) {
    throw std::invalid_argument("hill_climb: constraint and dataset disagree on variable count");
  }
  if (!constraint.is_symmetric()) throw std::invalid_argument("hill_climb: constraint must be symmetric");

  const std::uint64_t evaluations_before = scorer.evaluations();
  SearchState state;
  state.current = Dag(p);
  state.current_score = network_score(scorer, state.current);
  state.best = state.current;
  state.best_score = state.current_score;

  TabuList tabu(options.tabu_capacity);
  tabu.push(state.current);
  SearchResult result;

  std::vector<Move> candidates;
  while (state.stale_moves < options.patience && state.moves < options.max_moves) {
    candidates.clear();
    for (Var x = 0; x < p; ++x)
      for (Var y : constraint.pc[x])
        if (state.current.can_add_edge(x, y)) candidates.push_back({MoveKind::add, x, y});
    for (const Edge& e : state.current.edges()) candidates.push_back({MoveKind::remove, e.from, e.to});
    for (const Edge& e : state.current.edges())
      if (state.current.can_reverse_edge(e.from, e.to)) candidates.push_back({MoveKind::reverse, e.from, e.to});

    std::optional<Move> chosen;
    double chosen_delta = 0.0;
    for (const Move& move : candidates) {
      const double delta = delta_score(state.current, move, scorer);
      if (chosen && !(delta > chosen_delta)) continue;
      apply(state.current, move);
      const bool is_tabu = tabu.contains(state.current);
      undo(state.current, move);
      if (is_tabu) continue;
      chosen = move;
      chosen_delta = delta;
    }
    if (!chosen) break;

    apply(state.current, *chosen);
    // Rescored from cached families so no delta drift accumulates.
    state.current_score = network_score(scorer, state.current);
    ++state.moves;
    tabu.push(state.current);
    // Equivalent structures differ only by rounding; that is not progress.
    const double margin = 1e-10 * std::max(1.0, std::abs(state.best_score));
    if (state.current_score > state.best_score + margin) {
      state.best = state.current;
      state.best_score = state.current_score;
      state.stale_moves = 0;
    } else {
      ++state.stale_moves;
    }
    if (options.record_trace) {
      result.trace.push_back({state.moves, *chosen, chosen_delta, state.current_score, state.best_score});
    }
  }

  result.dag = std::move(state.best);
  result.score = network_score(scorer, result.dag);
  result.moves = state.moves;
  result.score_evaluations = scorer.evaluations() - evaluations_before;
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace, const std::vector<std::string>& names) {
  out << "step,move,from,to,delta,score,best_score\n";
  char buffer[96];
  for (const TraceEntry& t : trace) {
    std::snprintf(buffer, sizeof buffer, "%.17g,%.17g,%.17g", t.delta, t.score, t.best_score);
    out << t.step << ',' << to_string(t.move.kind) << ',' << names.at(t.move.from) << ',' << names.at(t.move.to) << ','
        << buffer << '\n';
  }
}

}  // namespace h2pc
