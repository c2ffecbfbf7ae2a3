#include "h2pc/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace h2pc {

namespace {

void sorted_insert(std::vector<Var>& v, Var x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }

void sorted_erase(std::vector<Var>& v, Var x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

}  // namespace

Dag::Dag(int num_nodes)
    : n_(num_nodes),
      matrix_(static_cast<std::size_t>(num_nodes) * num_nodes, 0),
      parents_(num_nodes),
      children_(num_nodes) {
  if (num_nodes < 0) throw GraphError(GraphError::Kind::bad_node, "negative node count");
}

void Dag::check_node(Var v) const {
  if (v < 0 || v >= n_) throw GraphError(GraphError::Kind::bad_node, "unknown node " + std::to_string(v));
}

void Dag::insert(Var from, Var to) {
  matrix_[index(from, to)] = 1;
  sorted_insert(children_[from], to);
  sorted_insert(parents_[to], from);
  ++edge_count_;
}

void Dag::erase(Var from, Var to) {
  matrix_[index(from, to)] = 0;
  sorted_erase(children_[from], to);
  sorted_erase(parents_[to], from);
  --edge_count_;
}

bool Dag::has_path(Var from, Var to) const { return reachable_avoiding(from, to, Edge{-1, -1}); }

bool Dag::reachable_avoiding(Var from, Var to, Edge skip) const {
  if (from == to) return true;
  std::vector<std::uint8_t> seen(n_, 0);
  std::vector<Var> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const Var v = stack.back();
    stack.pop_back();
    for (Var c : children_[v]) {
      if (v == skip.from && c == skip.to) continue;
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return false;
}

bool Dag::can_add_edge(Var from, Var to) const {
  if (from < 0 || to < 0 || from >= n_ || to >= n_ || from == to) return false;
  if (adjacent(from, to)) return false;
  return !has_path(to, from);
}

bool Dag::can_reverse_edge(Var from, Var to) const {
  if (from < 0 || to < 0 || from >= n_ || to >= n_ || !has_edge(from, to)) return false;
  return !reachable_avoiding(from, to, Edge{from, to});
}

void Dag::add_edge(Var from, Var to) {
  check_node(from);
  check_node(to);
  if (from == to) throw GraphError(GraphError::Kind::self_loop, "self-loop on node " + std::to_string(from));
  if (has_edge(from, to)) throw GraphError(GraphError::Kind::duplicate_edge, "edge already present");
  if (has_edge(to, from) || has_path(to, from)) throw GraphError(GraphError::Kind::cycle, "edge would create a cycle");
  insert(from, to);
}

void Dag::delete_edge(Var from, Var to) {
  check_node(from);
  check_node(to);
  if (!has_edge(from, to)) throw GraphError(GraphError::Kind::missing_edge, "edge not present");
  erase(from, to);
}

void Dag::reverse_edge(Var from, Var to) {
  check_node(from);
  check_node(to);
  if (!has_edge(from, to)) throw GraphError(GraphError::Kind::missing_edge, "edge not present");
  if (reachable_avoiding(from, to, Edge{from, to})) {
    throw GraphError(GraphError::Kind::cycle, "reversal would create a cycle");
  }
  erase(from, to);
  insert(to, from);
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Var v = 0; v < n_; ++v) {
    for (Var c : children_[v]) out.push_back({v, c});
  }
  return out;
}

Pdag::Pdag(int num_nodes) : n_(num_nodes), marks_(static_cast<std::size_t>(num_nodes) * num_nodes, 0) {}

void Pdag::check_pair(Var a, Var b) const {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) throw GraphError(GraphError::Kind::bad_node, "unknown node");
  if (a == b) throw GraphError(GraphError::Kind::self_loop, "self-loop");
}

Pdag::State Pdag::state(Var a, Var b) const {
  check_pair(a, b);
  return static_cast<State>(marks_[index(a, b)]);
}

void Pdag::set_directed(Var from, Var to) {
  check_pair(from, to);
  marks_[index(from, to)] = 1;
  marks_[index(to, from)] = 2;
}

void Pdag::set_undirected(Var a, Var b) {
  check_pair(a, b);
  marks_[index(a, b)] = 3;
  marks_[index(b, a)] = 3;
}

void Pdag::clear(Var a, Var b) {
  check_pair(a, b);
  marks_[index(a, b)] = 0;
  marks_[index(b, a)] = 0;
}

std::vector<Edge> Pdag::directed_edges() const {
  std::vector<Edge> out;
  for (Var a = 0; a < n_; ++a)
    for (Var b = 0; b < n_; ++b)
      if (marks_[index(a, b)] == 1) out.push_back({a, b});
  return out;
}

std::vector<Link> Pdag::undirected_edges() const {
  std::vector<Link> out;
  for (Var a = 0; a < n_; ++a)
    for (Var b = a + 1; b < n_; ++b)
      if (marks_[index(a, b)] == 3) out.emplace_back(a, b);
  return out;
}

Pdag to_pdag(const Dag& dag) {
  Pdag out(dag.num_nodes());
  for (const Edge& e : dag.edges()) out.set_directed(e.from, e.to);
  return out;
}

std::vector<Var> topological_order(const Dag& dag) {
  const int n = dag.num_nodes();
  std::vector<int> indegree(n);
  std::priority_queue<Var, std::vector<Var>, std::greater<>> ready;
  for (Var v = 0; v < n; ++v) {
    indegree[v] = static_cast<int>(dag.parents(v).size());
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<Var> order;
  order.reserve(n);
  while (!ready.empty()) {
    const Var v = ready.top();
    ready.pop();
    order.push_back(v);
    for (Var c : dag.children(v))
      if (--indegree[c] == 0) ready.push(c);
  }
  return order;
}

std::optional<int> d_connection_length(const Dag& dag, Var x, Var y, std::span<const Var> z) {
  const int n = dag.num_nodes();
  auto check = [n](Var v) {
    if (v < 0 || v >= n) throw GraphError(GraphError::Kind::bad_node, "unknown node " + std::to_string(v));
  };
  check(x);
  check(y);
  if (x == y) throw std::invalid_argument("d-separation: x and y must differ");
  std::vector<std::uint8_t> observed(n, 0);
  for (Var v : z) {
    check(v);
    if (v == x || v == y) throw std::invalid_argument("d-separation: conditioning set contains x or y");
    observed[v] = 1;
  }
  // Observed nodes and their ancestors: colliders there pass the ball.
  std::vector<std::uint8_t> ancestor(n, 0);
  std::vector<Var> stack(z.begin(), z.end());
  while (!stack.empty()) {
    const Var v = stack.back();
    stack.pop_back();
    if (ancestor[v]) continue;
    ancestor[v] = 1;
    for (Var p : dag.parents(v)) stack.push_back(p);
  }

  // visited[2v] arriving from a child (moving up), visited[2v+1] from a parent (moving down)
  std::vector<std::uint8_t> visited(2 * static_cast<std::size_t>(n), 0);
  // Breadth-first, so the first arrival at y is along a shortest trail.
  struct State {
    Var v;
    bool up;
    int depth;
  };
  std::deque<State> frontier{{x, true, 0}};
  while (!frontier.empty()) {
    const auto [v, up, depth] = frontier.front();
    frontier.pop_front();
    const std::size_t slot = 2 * static_cast<std::size_t>(v) + (up ? 0 : 1);
    if (visited[slot]) continue;
    visited[slot] = 1;
    if (v == y) return depth;
    if (up) {
      if (observed[v]) continue;
      for (Var p : dag.parents(v)) frontier.push_back({p, true, depth + 1});
      for (Var c : dag.children(v)) frontier.push_back({c, false, depth + 1});
    } else {
      if (!observed[v]) {
        for (Var c : dag.children(v)) frontier.push_back({c, false, depth + 1});
      }
      if (ancestor[v]) {
        for (Var p : dag.parents(v)) frontier.push_back({p, true, depth + 1});
      }
    }
  }
  return std::nullopt;
}

bool d_separated(const Dag& dag, Var x, Var y, std::span<const Var> z) {
  return !d_connection_length(dag, x, y, z).has_value();
}

Pdag dag_to_cpdag(const Dag& dag) {
  const int n = dag.num_nodes();
  const auto topo = topological_order(dag);
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[topo[i]] = i;

  // Edge order: heads ascending in topological order, tails descending.
  std::vector<Edge> ordered;
  ordered.reserve(dag.num_edges());
  for (Var y : topo) {
    std::vector<Var> tails = dag.parents(y);
    std::sort(tails.begin(), tails.end(), [&](Var a, Var b) { return position[a] > position[b]; });
    for (Var x : tails) ordered.push_back({x, y});
  }

  enum Label : std::uint8_t { unknown, compelled, reversible };
  std::vector<std::uint8_t> label(static_cast<std::size_t>(n) * n, unknown);
  auto at = [n, &label](Var a, Var b) -> std::uint8_t& { return label[static_cast<std::size_t>(a) * n + b]; };
  auto label_incoming = [&](Var y, std::uint8_t value, bool only_unknown) {
    for (Var p : dag.parents(y))
      if (!only_unknown || at(p, y) == unknown) at(p, y) = value;
  };

  for (const Edge& e : ordered) {
    const Var x = e.from;
    const Var y = e.to;
    if (at(x, y) != unknown) continue;
    bool done = false;
    for (Var w : dag.parents(x)) {
      if (at(w, x) != compelled) continue;
      if (!dag.has_edge(w, y)) {
        label_incoming(y, compelled, false);
        done = true;
        break;
      }
      at(w, y) = compelled;
    }
    if (done) continue;
    bool other_parent = false;
    for (Var z : dag.parents(y)) {
      if (z != x && !dag.has_edge(z, x)) {
        other_parent = true;
        break;
      }
    }
    label_incoming(y, other_parent ? compelled : reversible, true);
  }

  Pdag out(n);
  for (const Edge& e : ordered) {
    if (at(e.from, e.to) == compelled) {
      out.set_directed(e.from, e.to);
    } else {
      out.set_undirected(e.from, e.to);
    }
  }
  return out;
}

LinkSet skeleton_of(const Dag& dag) {
  LinkSet out;
  for (const Edge& e : dag.edges()) out.insert(make_link(e.from, e.to));
  return out;
}

LinkSet skeleton_of(const Pdag& pdag) {
  LinkSet out;
  for (const Edge& e : pdag.directed_edges()) out.insert(make_link(e.from, e.to));
  for (const Link& l : pdag.undirected_edges()) out.insert(l);
  return out;
}

void write_edge_list(std::ostream& out, const Pdag& graph, const std::vector<std::string>& names) {
  for (const Edge& e : graph.directed_edges()) out << names.at(e.from) << " -> " << names.at(e.to) << '\n';
  for (const Link& l : graph.undirected_edges()) out << names.at(l.first) << " -- " << names.at(l.second) << '\n';
}

void write_edge_list(std::ostream& out, const Dag& graph, const std::vector<std::string>& names) {
  write_edge_list(out, to_pdag(graph), names);
}

Pdag read_edge_list(std::istream& in, const std::vector<std::string>& names) {
  std::unordered_map<std::string, Var> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], static_cast<Var>(i));
  Pdag out(static_cast<int>(names.size()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string a, op, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> op >> b) || (fields >> extra) || (op != "->" && op != "--")) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) + ": expected 'X -> Y' or 'X -- Y'");
    }
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) + ": unknown variable");
    }
    if (out.state(ia->second, ib->second) != Pdag::State::none) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) + ": pair already has an edge");
    }
    if (op == "->") {
      out.set_directed(ia->second, ib->second);
    } else {
      out.set_undirected(ia->second, ib->second);
    }
  }
  return out;
}

}  // namespace h2pc
