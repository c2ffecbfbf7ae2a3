#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "h2pc/graph.hpp"
#include "h2pc/local_discovery.hpp"
#include "h2pc/score.hpp"

namespace h2pc {

enum class MoveKind { add, remove, reverse };

std::string_view to_string(MoveKind kind);

struct Move {
  MoveKind kind;
  Var from;
  Var to;

  friend bool operator==(const Move&, const Move&) = default;
};

/// Bounded memory of recently visited structures. Membership is exact:
/// a hash hit is confirmed against the stored edge list.
class TabuList {
 public:
  explicit TabuList(std::size_t capacity = 100) : capacity_(capacity) {}

  void push(const Dag& dag);
  bool contains(const Dag& dag) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

  static std::uint64_t fingerprint(const Dag& dag);

 private:
  struct Entry {
    std::uint64_t hash;
    std::vector<Edge> edges;
  };
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

struct SearchOptions {
  std::size_t tabu_capacity = 100;
  int patience = 15;
  std::size_t max_moves = std::numeric_limits<std::size_t>::max();
  bool record_trace = false;
};

struct TraceEntry {
  std::size_t step;
  Move move;
  double delta;
  double score;
  double best_score;
};

struct SearchState {
  Dag current;
  double current_score = 0.0;
  Dag best;
  double best_score = 0.0;
  int stale_moves = 0;
  std::size_t moves = 0;
};

struct SearchResult {
  Dag dag;
  double score = 0.0;
  std::size_t moves = 0;
  std::uint64_t score_evaluations = 0;
  std::vector<TraceEntry> trace;
};

/// Score change of applying `move` to `dag`; only the touched families
/// are rescored. Throws std::invalid_argument for an illegal move.
double delta_score(const Dag& dag, const Move& move, const FamilyScorer& scorer);

/// Greedy hill-climbing from the empty graph with add, delete, and reverse
/// operators. X -> Y may be added only if Y ∈ PC(X) in `constraint`.
/// Each step applies the best move whose result is not tabu, even when it
/// lowers the score. Stops after `patience` consecutive moves that do not
/// raise the best score, or when no admissible move remains, and returns
/// the best structure seen. Ties: add < delete < reverse, then (from, to).
SearchResult hill_climb(const FamilyScorer& scorer, const NeighborhoodMap& constraint,
                        const SearchOptions& options = {});

/// step,move,from,to,delta,score,best_score
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace, const std::vector<std::string>& names);

}  // namespace h2pc
