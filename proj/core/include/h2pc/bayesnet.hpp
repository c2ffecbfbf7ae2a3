#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "h2pc/dataset.hpp"
#include "h2pc/graph.hpp"

namespace h2pc {

class BifError : public std::runtime_error {
 public:
  BifError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Conditional probability table of one node. Rows are parent
/// configurations in mixed radix with the first parent most significant;
/// each row holds one probability per child level.
struct Cpt {
  std::vector<Var> parents;
  int arity = 0;
  std::vector<double> probs;

  std::size_t num_rows() const { return arity ? probs.size() / arity : 0; }
  std::span<const double> row(std::size_t r) const { return {probs.data() + r * arity, static_cast<std::size_t>(arity)}; }
};

/// Discrete Bayesian network: DAG, level labels, and one CPT per node.
/// Immutable after construction.
class BayesNet {
 public:
  BayesNet(std::string name, std::vector<std::string> names, std::vector<std::vector<std::string>> levels,
           std::vector<Cpt> cpts, double row_tolerance = 1e-9);

  const std::string& name() const { return name_; }
  std::size_t num_vars() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<std::string>>& levels() const { return levels_; }
  int arity(Var v) const { return static_cast<int>(levels_[v].size()); }
  const Dag& dag() const { return dag_; }
  const Cpt& cpt(Var v) const { return cpts_[v]; }

  /// Row index of the parent configuration of `v` given a full assignment.
  std::size_t parent_row(Var v, std::span<const Level> assignment) const;

 private:
  std::string name_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> levels_;
  std::vector<Cpt> cpts_;
  Dag dag_;
};

struct BifOptions {
  /// Maximum |row sum - 1| accepted. Rows are never renormalized.
  double row_tolerance = 1e-6;
};

/// Reads the `.bif` dialect: `network`, `variable ... type discrete`, and
/// `probability` blocks with per-configuration rows or a `table` (for
/// conditional tables: child level fastest, last parent next). `//` and
/// `/* */` comments and `property` entries are ignored.
BayesNet parse_bif(std::string_view text, const BifOptions& options = {});
BayesNet load_bif(const std::filesystem::path& path, const BifOptions& options = {});
std::string write_bif(const BayesNet& net);

/// Forward sampling in topological order. Row r draws from its own
/// counter-based stream keyed by (seed, r), so the result is identical
/// however rows are scheduled. Levels are the network's labels.
Dataset ancestral_sample(const BayesNet& net, std::size_t rows, std::uint64_t seed);

}  // namespace h2pc
