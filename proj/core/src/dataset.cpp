#include "h2pc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "h2pc/rng.hpp"

namespace h2pc {

namespace {

std::uint64_t hash_string(std::uint64_t h, std::string_view s) {
  h = splitmix64(h ^ s.size());
  for (unsigned char c : s) h = splitmix64(h ^ c);
  return h;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (field.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty cell");
    }
    if (field.front() == '"') {
      throw DataError("line " + std::to_string(line_no) + ": quoted values are not supported");
    }
    fields.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> levels,
                 std::vector<std::vector<Level>> columns)
    : names_(std::move(names)), levels_(std::move(levels)), columns_(std::move(columns)) {
  if (levels_.size() != names_.size() || columns_.size() != names_.size()) {
    throw DataError("dataset: names, levels, and columns disagree in length");
  }
  std::unordered_set<std::string_view> seen;
  for (std::size_t v = 0; v < names_.size(); ++v) {
    if (!seen.insert(names_[v]).second) throw DataError("dataset: duplicate variable name '" + names_[v] + "'");
    if (levels_[v].size() < 2) {
      throw DataError("dataset: variable '" + names_[v] + "' has fewer than two levels");
    }
    if (levels_[v].size() > std::numeric_limits<Level>::max()) {
      throw DataError("dataset: variable '" + names_[v] + "' has too many levels");
    }
  }
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  std::uint64_t h = splitmix64(names_.size());
  for (std::size_t v = 0; v < names_.size(); ++v) {
    if (columns_[v].size() != rows_) throw DataError("dataset: ragged columns");
    const auto arity = levels_[v].size();
    h = hash_string(h, names_[v]);
    for (const auto& l : levels_[v]) h = hash_string(h, l);
    for (Level cell : columns_[v]) {
      if (cell >= arity) {
        throw DataError("dataset: cell out of range for variable '" + names_[v] + "'");
      }
      h = splitmix64(h ^ cell);
    }
  }
  fingerprint_ = h;
}

std::optional<Var> Dataset::find(std::string_view name) const {
  for (std::size_t v = 0; v < names_.size(); ++v) {
    if (names_[v] == name) return static_cast<Var>(v);
  }
  return std::nullopt;
}

Var Dataset::index_of(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw DataError("unknown variable '" + std::string(name) + "'");
}

Dataset read_csv(std::istream& in, bool header) {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> raw;  // per column labels, row order
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line, line_no);
    if (first) {
      first = false;
      raw.resize(fields.size());
      if (header) {
        names = std::move(fields);
        continue;
      }
      for (std::size_t c = 0; c < fields.size(); ++c) names.push_back("V" + std::to_string(c + 1));
    }
    if (fields.size() != names.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(names.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) raw[c].push_back(std::move(fields[c]));
  }
  if (names.empty() || raw.front().empty()) throw DataError("csv: no data rows");

  std::vector<std::vector<std::string>> levels(names.size());
  std::vector<std::vector<Level>> columns(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<std::string> distinct = raw[c];
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
      throw DataError("csv: column '" + names[c] + "' has a single distinct value");
    }
    if (distinct.size() > std::numeric_limits<Level>::max()) {
      throw DataError("csv: column '" + names[c] + "' has too many distinct values");
    }
    std::unordered_map<std::string_view, Level> index;
    for (std::size_t l = 0; l < distinct.size(); ++l) index.emplace(distinct[l], static_cast<Level>(l));
    columns[c].reserve(raw[c].size());
    for (const auto& label : raw[c]) columns[c].push_back(index.at(label));
    levels[c] = std::move(distinct);
  }
  return Dataset(std::move(names), std::move(levels), std::move(columns));
}

Dataset load_csv(const std::filesystem::path& path, bool header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_csv(in, header);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_csv(const Dataset& data, std::ostream& out, bool header) {
  const auto p = data.num_vars();
  if (header) {
    for (std::size_t v = 0; v < p; ++v) out << (v ? "," : "") << data.name(static_cast<Var>(v));
    out << '\n';
  }
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t v = 0; v < p; ++v) {
      const auto var = static_cast<Var>(v);
      out << (v ? "," : "") << data.levels(var)[data.at(r, var)];
    }
    out << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path, bool header) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(data, out, header);
}

Dataset align_levels(const Dataset& data, const std::vector<std::string>& names,
                     const std::vector<std::vector<std::string>>& levels) {
  std::vector<std::vector<Level>> columns(names.size());
  for (std::size_t v = 0; v < names.size(); ++v) {
    const Var src = data.index_of(names[v]);
    std::unordered_map<std::string_view, Level> index;
    for (std::size_t l = 0; l < levels[v].size(); ++l) index.emplace(levels[v][l], static_cast<Level>(l));
    std::vector<Level> recode(data.arity(src));
    for (int l = 0; l < data.arity(src); ++l) {
      auto it = index.find(data.levels(src)[l]);
      if (it == index.end()) {
        throw DataError("variable '" + names[v] + "': label '" + data.levels(src)[l] + "' is not a known level");
      }
      recode[l] = it->second;
    }
    columns[v].reserve(data.num_rows());
    for (Level cell : data.column(src)) columns[v].push_back(recode[cell]);
  }
  return Dataset(names, levels, std::move(columns));
}

Strata stratify(const Dataset& data, std::span<const Var> vars) {
  const std::size_t n = data.num_rows();
  Strata out;
  out.id.assign(n, 0);
  if (vars.empty()) {
    out.count = n > 0 ? 1 : 0;
    return out;
  }
  // Mixed-radix code when the configuration space fits in 63 bits.
  double space = 1.0;
  for (Var v : vars) space *= data.arity(v);
  if (space < 9.0e18) {
    std::vector<std::uint64_t> code(n, 0);
    for (Var v : vars) {
      const auto arity = static_cast<std::uint64_t>(data.arity(v));
      const auto col = data.column(v);
      for (std::size_t r = 0; r < n; ++r) code[r] = code[r] * arity + col[r];
    }
    if (space <= static_cast<double>(std::max<std::size_t>(4 * n, 1 << 12))) {
      std::vector<int> dense(static_cast<std::size_t>(space), -1);
      for (std::size_t r = 0; r < n; ++r) {
        int& slot = dense[code[r]];
        if (slot < 0) slot = out.count++;
        out.id[r] = slot;
      }
    } else {
      std::unordered_map<std::uint64_t, int> index;
      index.reserve(n);
      for (std::size_t r = 0; r < n; ++r) {
        auto [it, inserted] = index.try_emplace(code[r], out.count);
        if (inserted) ++out.count;
        out.id[r] = it->second;
      }
    }
    return out;
  }
  std::map<std::vector<Level>, int> index;
  std::vector<Level> key(vars.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < vars.size(); ++i) key[i] = data.at(r, vars[i]);
    auto [it, inserted] = index.try_emplace(key, out.count);
    if (inserted) ++out.count;
    out.id[r] = it->second;
  }
  return out;
}

ContingencyTable ContingencyTable::from_counts(int rows, int cols, int strata, std::vector<int> counts) {
  if (rows < 1 || cols < 1 || strata < 0 ||
      counts.size() != static_cast<std::size_t>(rows) * cols * strata) {
    throw std::invalid_argument("contingency table: dimensions do not match counts");
  }
  ContingencyTable t;
  t.rows = rows;
  t.cols = cols;
  t.strata = strata;
  t.counts = std::move(counts);
  t.row_totals.assign(static_cast<std::size_t>(rows) * strata, 0);
  t.col_totals.assign(static_cast<std::size_t>(cols) * strata, 0);
  t.stratum_totals.assign(strata, 0);
  for (int k = 0; k < strata; ++k) {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const int c = t.count(i, j, k);
        if (c < 0) throw std::invalid_argument("contingency table: negative count");
        t.row_totals[static_cast<std::size_t>(k) * rows + i] += c;
        t.col_totals[static_cast<std::size_t>(k) * cols + j] += c;
        t.stratum_totals[k] += c;
      }
    }
    t.total += t.stratum_totals[k];
  }
  return t;
}

ContingencyTable contingency_table(const Dataset& data, Var x, Var y, std::span<const Var> z) {
  const auto p = static_cast<Var>(data.num_vars());
  auto check = [p](Var v) {
    if (v < 0 || v >= p) throw std::invalid_argument("contingency table: unknown variable index " + std::to_string(v));
  };
  check(x);
  check(y);
  if (x == y) throw std::invalid_argument("contingency table: x and y must differ");
  for (Var v : z) {
    check(v);
    if (v == x || v == y) throw std::invalid_argument("contingency table: conditioning set contains x or y");
  }
  const Strata strata = stratify(data, z);
  const int rows = data.arity(x);
  const int cols = data.arity(y);
  std::vector<int> counts(static_cast<std::size_t>(rows) * cols * strata.count, 0);
  const auto cx = data.column(x);
  const auto cy = data.column(y);
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    ++counts[(static_cast<std::size_t>(strata.id[r]) * rows + cx[r]) * cols + cy[r]];
  }
  return ContingencyTable::from_counts(rows, cols, strata.count, std::move(counts));
}

}  // namespace h2pc
