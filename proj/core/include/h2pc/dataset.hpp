#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace h2pc {

/// Positional index of a variable in a dataset, network, or graph.
using Var = int;
/// Index of a level within a variable's level list.
using Level = std::uint16_t;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complete discrete data, stored column-major. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> levels,
          std::vector<std::vector<Level>> columns);

  std::size_t num_rows() const { return rows_; }
  std::size_t num_vars() const { return names_.size(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Var v) const { return names_.at(v); }
  const std::vector<std::string>& levels(Var v) const { return levels_.at(v); }
  int arity(Var v) const { return static_cast<int>(levels_[v].size()); }

  std::span<const Level> column(Var v) const { return columns_[v]; }
  Level at(std::size_t row, Var v) const { return columns_[v][row]; }

  std::optional<Var> find(std::string_view name) const;
  Var index_of(std::string_view name) const;

  /// Hash over names, levels, and cells; distinguishes datasets for score caches.
  std::uint64_t fingerprint() const { return fingerprint_; }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.names_ == b.names_ && a.levels_ == b.levels_ && a.columns_ == b.columns_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> levels_;
  std::vector<std::vector<Level>> columns_;
  std::size_t rows_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Reads comma-separated categorical data. Levels are the sorted distinct
/// labels of each column. Without a header, columns are named V1..Vp.
Dataset read_csv(std::istream& in, bool header = true);
Dataset load_csv(const std::filesystem::path& path, bool header = true);
void write_csv(const Dataset& data, std::ostream& out, bool header = true);
void save_csv(const Dataset& data, const std::filesystem::path& path, bool header = true);

/// Re-expresses `data` over the given variable order and level labels
/// (matched by name). Throws DataError on a missing variable or an
/// unknown label.
Dataset align_levels(const Dataset& data, const std::vector<std::string>& names,
                     const std::vector<std::vector<std::string>>& levels);

/// Row partition by the joint configuration of `vars`. Stratum ids are
/// dense, assigned in order of first appearance; only observed
/// configurations get an id.
struct Strata {
  std::vector<int> id;  // per row
  int count = 0;
};
Strata stratify(const Dataset& data, std::span<const Var> vars);

/// Counts n_ijk of X (rows i) by Y (columns j) within each observed
/// configuration k of the conditioning set.
struct ContingencyTable {
  int rows = 0;    // R, nominal level count of X
  int cols = 0;    // C, nominal level count of Y
  int strata = 0;  // L
  std::vector<int> counts;          // [k][i][j]
  std::vector<int> row_totals;      // n_i+k, [k][i]
  std::vector<int> col_totals;      // n_+jk, [k][j]
  std::vector<int> stratum_totals;  // n_++k
  long long total = 0;              // n

  int count(int i, int j, int k) const { return counts[(static_cast<std::size_t>(k) * rows + i) * cols + j]; }
  int row_total(int i, int k) const { return row_totals[static_cast<std::size_t>(k) * rows + i]; }
  int col_total(int j, int k) const { return col_totals[static_cast<std::size_t>(k) * cols + j]; }

  /// Builds a table from raw [k][i][j] counts and derives the marginals.
  static ContingencyTable from_counts(int rows, int cols, int strata, std::vector<int> counts);
};

/// Precondition: x != y and neither appears in z. Throws std::invalid_argument otherwise.
ContingencyTable contingency_table(const Dataset& data, Var x, Var y, std::span<const Var> z);

}  // namespace h2pc
