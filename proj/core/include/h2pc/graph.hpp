#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "h2pc/dataset.hpp"

namespace h2pc {

struct Edge {
  Var from;
  Var to;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unordered pair stored with first < second.
using Link = std::pair<Var, Var>;
using LinkSet = std::set<Link>;

inline Link make_link(Var a, Var b) { return a < b ? Link{a, b} : Link{b, a}; }

class GraphError : public std::runtime_error {
 public:
  enum class Kind { cycle, missing_edge, duplicate_edge, self_loop, bad_node };
  GraphError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Directed acyclic graph over nodes 0..n-1. Every mutation either keeps
/// the graph acyclic or throws and leaves it untouched.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int num_nodes);

  int num_nodes() const { return n_; }
  std::size_t num_edges() const { return edge_count_; }

  bool has_edge(Var from, Var to) const { return matrix_[index(from, to)] != 0; }
  bool adjacent(Var a, Var b) const { return has_edge(a, b) || has_edge(b, a); }
  const std::vector<Var>& parents(Var v) const { return parents_[v]; }
  const std::vector<Var>& children(Var v) const { return children_[v]; }

  void add_edge(Var from, Var to);
  void delete_edge(Var from, Var to);
  void reverse_edge(Var from, Var to);

  bool can_add_edge(Var from, Var to) const;
  bool can_reverse_edge(Var from, Var to) const;

  /// Directed path from `from` to `to` (length >= 1, or from == to).
  bool has_path(Var from, Var to) const;

  /// Sorted by (from, to).
  std::vector<Edge> edges() const;

  friend bool operator==(const Dag& a, const Dag& b) { return a.n_ == b.n_ && a.matrix_ == b.matrix_; }

 private:
  std::size_t index(Var a, Var b) const { return static_cast<std::size_t>(a) * n_ + b; }
  void check_node(Var v) const;
  bool reachable_avoiding(Var from, Var to, Edge skip) const;
  void insert(Var from, Var to);
  void erase(Var from, Var to);

  int n_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::uint8_t> matrix_;
  std::vector<std::vector<Var>> parents_;
  std::vector<std::vector<Var>> children_;
};

/// Partially directed graph: each node pair carries at most one edge,
/// directed or undirected.
class Pdag {
 public:
  enum class State : std::uint8_t { none, forward, backward, undirected };

  Pdag() = default;
  explicit Pdag(int num_nodes);

  int num_nodes() const { return n_; }

  /// Edge state of the pair as seen from a: forward means a -> b.
  State state(Var a, Var b) const;
  void set_directed(Var from, Var to);
  void set_undirected(Var a, Var b);
  void clear(Var a, Var b);

  std::vector<Edge> directed_edges() const;
  std::vector<Link> undirected_edges() const;

  friend bool operator==(const Pdag& a, const Pdag& b) { return a.n_ == b.n_ && a.marks_ == b.marks_; }

 private:
  std::size_t index(Var a, Var b) const { return static_cast<std::size_t>(a) * n_ + b; }
  void check_pair(Var a, Var b) const;

  int n_ = 0;
  // marks_[a*n+b]: 0 none, 1 a->b, 2 a<-b, 3 a--b
  std::vector<std::uint8_t> marks_;
};

Pdag to_pdag(const Dag& dag);

/// Node order in which every edge points forward. Ties resolved by smallest index.
std::vector<Var> topological_order(const Dag& dag);

/// Reachability ("Bayes ball") d-separation test.
bool d_separated(const Dag& dag, Var x, Var y, std::span<const Var> z);

/// Edge count of the shortest trail from x to y that is active given z;
/// empty when x and y are d-separated.
std::optional<int> d_connection_length(const Dag& dag, Var x, Var y, std::span<const Var> z);

/// Completed PDAG of the Markov-equivalence class (Chickering's
/// compelled-edge labelling).
Pdag dag_to_cpdag(const Dag& dag);

LinkSet skeleton_of(const Dag& dag);
LinkSet skeleton_of(const Pdag& pdag);

/// One `X -> Y` or `X -- Y` line per edge, variables by name.
void write_edge_list(std::ostream& out, const Pdag& graph, const std::vector<std::string>& names);
void write_edge_list(std::ostream& out, const Dag& graph, const std::vector<std::string>& names);
Pdag read_edge_list(std::istream& in, const std::vector<std::string>& names);

}  // namespace h2pc
