#include "h2pc/bayesnet.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "h2pc/rng.hpp"

namespace h2pc {

BayesNet::BayesNet(std::string name, std::vector<std::string> names, std::vector<std::vector<std::string>> levels,
                   std::vector<Cpt> cpts, double row_tolerance)
    : name_(std::move(name)),
      names_(std::move(names)),
      levels_(std::move(levels)),
      cpts_(std::move(cpts)),
      dag_(static_cast<int>(names_.size())) {
  const auto p = names_.size();
  if (levels_.size() != p || cpts_.size() != p) throw std::invalid_argument("bayes net: inconsistent sizes");
  for (std::size_t v = 0; v < p; ++v) {
    const Cpt& cpt = cpts_[v];
    if (levels_[v].empty() || cpt.arity != static_cast<int>(levels_[v].size())) {
      throw std::invalid_argument("bayes net: CPT arity mismatch for '" + names_[v] + "'");
    }
    std::size_t rows = 1;
    for (Var parent : cpt.parents) {
      if (parent < 0 || static_cast<std::size_t>(parent) >= p || parent == static_cast<Var>(v)) {
        throw std::invalid_argument("bayes net: bad parent of '" + names_[v] + "'");
      }
      rows *= levels_[parent].size();
    }
    if (cpt.probs.size() != rows * cpt.arity) {
      throw std::invalid_argument("bayes net: CPT of '" + names_[v] + "' has the wrong number of rows");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (double q : cpt.row(r)) {
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("bayes net: probability outside [0, 1] in '" + names_[v] + "'");
        sum += q;
      }
      if (std::fabs(sum - 1.0) > row_tolerance) {
        throw std::invalid_argument("bayes net: CPT row of '" + names_[v] + "' sums to " + std::to_string(sum));
      }
    }
  }
  for (std::size_t v = 0; v < p; ++v) {
    for (Var parent : cpts_[v].parents) {
      try {
        dag_.add_edge(parent, static_cast<Var>(v));
      } catch (const GraphError& e) {
        throw std::invalid_argument("bayes net: parent declaration " + names_[parent] + " -> " + names_[v] + ": " + e.what());
      }
    }
  }
}

std::size_t BayesNet::parent_row(Var v, std::span<const Level> assignment) const {
  std::size_t row = 0;
  for (Var parent : cpts_[v].parents) row = row * levels_[parent].size() + assignment[parent];
  return row;
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

bool is_punct(char c) {
  switch (c) {
    case '{': case '}': case '(': case ')': case '[': case ']': case ';': case ',': case '|':
      return true;
    default:
      return false;
  }
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const std::size_t start = line;
      i += 2;
      while (i + 1 < s.size() && !(s[i] == '*' && s[i + 1] == '/')) {
        if (s[i] == '\n') ++line;
        ++i;
      }
      if (i + 1 >= s.size()) throw BifError(start, "unterminated comment");
      i += 2;
    } else if (c == '"') {
      const std::size_t start = line;
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"') {
        if (s[j] == '\n') ++line;
        ++j;
      }
      if (j >= s.size()) throw BifError(start, "unterminated string");
      out.push_back({std::string(s.substr(i, j + 1 - i)), start});
      i = j + 1;
    } else if (is_punct(c)) {
      out.push_back({std::string(1, c), line});
      ++i;
    } else {
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && !is_punct(s[j]) &&
             !(s[j] == '/' && j + 1 < s.size() && (s[j + 1] == '/' || s[j + 1] == '*'))) {
        ++j;
      }
      out.push_back({std::string(s.substr(i, j - i)), line});
      i = j;
    }
  }
  return out;
}

class BifParser {
 public:
  BifParser(std::string_view text, const BifOptions& options) : tokens_(tokenize(text)), options_(options) {}

  BayesNet parse() {
    while (!at_end()) {
      const Token& t = peek();
      if (t.text == "network") {
        parse_network();
      } else if (t.text == "variable") {
        parse_variable();
      } else if (t.text == "probability") {
        parse_probability();
      } else {
        throw BifError(t.line, "unexpected '" + t.text + "'");
      }
    }
    return finish();
  }

 private:
  struct PendingCpt {
    std::vector<Var> parents;
    std::vector<double> probs;
    std::vector<bool> row_seen;
    std::size_t line = 0;
    bool present = false;
  };

  bool at_end() const { return pos_ >= tokens_.size(); }
  std::size_t line() const { return at_end() ? (tokens_.empty() ? 1 : tokens_.back().line) : tokens_[pos_].line; }

  const Token& peek() const {
    if (at_end()) throw BifError(line(), "unexpected end of input");
    return tokens_[pos_];
  }

  const Token& next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }

  void expect(std::string_view text) {
    const Token& t = next();
    if (t.text != text) throw BifError(t.line, "expected '" + std::string(text) + "', found '" + t.text + "'");
  }

  bool accept(std::string_view text) {
    if (!at_end() && tokens_[pos_].text == text) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string word() {
    const Token& t = next();
    if (t.text.size() == 1 && is_punct(t.text[0])) throw BifError(t.line, "expected identifier, found '" + t.text + "'");
    return t.text;
  }

  double number() {
    const Token& t = next();
    double value = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw BifError(t.line, "expected a number, found '" + t.text + "'");
    return value;
  }

  // Skips an entry up to and including ';', or a balanced { } block.
  void skip_entry() {
    int depth = 0;
    while (true) {
      const Token& t = next();
      if (t.text == "{") ++depth;
      if (t.text == "}") {
        if (--depth <= 0) return;
      }
      if (t.text == ";" && depth == 0) return;
    }
  }

  void parse_network() {
    expect("network");
    name_ = word();
    expect("{");
    while (!accept("}")) skip_entry();
  }

  void parse_variable() {
    const std::size_t start = line();
    expect("variable");
    const std::string name = word();
    if (index_.count(name)) throw BifError(start, "variable '" + name + "' declared twice");
    expect("{");
    std::optional<std::vector<std::string>> levels;
    while (!accept("}")) {
      if (peek().text == "type") {
        const std::size_t type_line = line();
        next();
        const std::string kind = word();
        if (kind != "discrete") throw BifError(type_line, "only discrete variables are supported");
        expect("[");
        const double declared = number();
        expect("]");
        expect("{");
        std::vector<std::string> labels;
        do {
          labels.push_back(word());
        } while (accept(","));
        expect("}");
        expect(";");
        if (static_cast<double>(labels.size()) != declared) {
          throw BifError(type_line, "variable '" + name + "' declares " + std::to_string(static_cast<long>(declared)) +
                                        " levels but lists " + std::to_string(labels.size()));
        }
        std::unordered_set<std::string> distinct(labels.begin(), labels.end());
        if (distinct.size() != labels.size()) throw BifError(type_line, "variable '" + name + "' repeats a level");
        levels = std::move(labels);
      } else {
        skip_entry();
      }
    }
    if (!levels) throw BifError(start, "variable '" + name + "' has no type declaration");
    index_.emplace(name, static_cast<Var>(names_.size()));
    names_.push_back(name);
    levels_.push_back(std::move(*levels));
    cpts_.emplace_back();
  }

  Var lookup(const std::string& name, std::size_t at_line) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw BifError(at_line, "reference to undeclared variable '" + name + "'");
    return it->second;
  }

  Level level_of(Var v, const std::string& label, std::size_t at_line) const {
    const auto& labels = levels_[v];
    for (std::size_t l = 0; l < labels.size(); ++l)
      if (labels[l] == label) return static_cast<Level>(l);
    throw BifError(at_line, "'" + label + "' is not a level of '" + names_[v] + "'");
  }

  void read_row(PendingCpt& cpt, std::size_t row, int arity, std::size_t at_line) {
    for (int l = 0; l < arity; ++l) {
      if (l > 0) expect(",");
      cpt.probs[row * arity + l] = number();
    }
    expect(";");
    if (cpt.row_seen[row]) throw BifError(at_line, "duplicate row");
    cpt.row_seen[row] = true;
  }

  void parse_probability() {
    const std::size_t start = line();
    expect("probability");
    expect("(");
    const Var child = lookup(word(), start);
    std::vector<Var> parents;
    if (accept("|")) {
      do {
        parents.push_back(lookup(word(), line()));
      } while (accept(","));
    }
    expect(")");
    PendingCpt& cpt = cpts_[child];
    if (cpt.present) throw BifError(start, "second probability block for '" + names_[child] + "'");
    cpt.present = true;
    cpt.line = start;
    cpt.parents = parents;
    const int arity = static_cast<int>(levels_[child].size());
    std::size_t rows = 1;
    for (Var p : parents) rows *= levels_[p].size();
    cpt.probs.assign(rows * arity, 0.0);
    cpt.row_seen.assign(rows, false);

    std::vector<double> fallback;  // `default` row, applied once the block ends
    expect("{");
    while (!accept("}")) {
      const std::size_t row_line = line();
      if (accept("table")) {
        // Child level fastest, then parents with the last parent fastest.
        std::vector<double> values;
        do {
          values.push_back(number());
        } while (accept(","));
        expect(";");
        if (values.size() != rows * arity) throw BifError(row_line, "table has the wrong number of entries");
        cpt.probs = std::move(values);
        cpt.row_seen.assign(rows, true);
      } else if (accept("default")) {
        std::vector<double> values;
        do {
          values.push_back(number());
        } while (accept(","));
        expect(";");
        if (values.size() != static_cast<std::size_t>(arity)) throw BifError(row_line, "default row has the wrong length");
        if (!fallback.empty()) throw BifError(row_line, "second default row");
        fallback = std::move(values);
      } else if (peek().text == "(") {
        next();
        std::size_t row = 0;
        for (std::size_t i = 0; i < parents.size(); ++i) {
          if (i > 0) expect(",");
          row = row * levels_[parents[i]].size() + level_of(parents[i], word(), row_line);
        }
        expect(")");
        if (parents.empty()) throw BifError(row_line, "configuration row in an unconditional table");
        read_row(cpt, row, arity, row_line);
      } else if (peek().text == "property") {
        skip_entry();
      } else {
        throw BifError(row_line, "unexpected '" + peek().text + "' in probability block");
      }
    }
    for (std::size_t r = 0; r < rows && !fallback.empty(); ++r) {
      if (cpt.row_seen[r]) continue;
      std::copy(fallback.begin(), fallback.end(), cpt.probs.begin() + static_cast<std::ptrdiff_t>(r * arity));
      cpt.row_seen[r] = true;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (!cpt.row_seen[r]) throw BifError(start, "CPT of '" + names_[child] + "' is missing rows");
      double sum = 0.0;
      for (int l = 0; l < arity; ++l) {
        const double q = cpt.probs[r * arity + l];
        if (!(q >= 0.0 && q <= 1.0)) throw BifError(start, "probability outside [0, 1] for '" + names_[child] + "'");
        sum += q;
      }
      if (std::fabs(sum - 1.0) > options_.row_tolerance) {
        throw BifError(start, "CPT row of '" + names_[child] + "' sums to " + std::to_string(sum));
      }
    }
  }

  BayesNet finish() {
    std::vector<Cpt> cpts(names_.size());
    for (std::size_t v = 0; v < names_.size(); ++v) {
      if (!cpts_[v].present) throw BifError(line(), "variable '" + names_[v] + "' has no probability block");
      cpts[v].parents = cpts_[v].parents;
      cpts[v].arity = static_cast<int>(levels_[v].size());
      cpts[v].probs = std::move(cpts_[v].probs);
    }
    // Cycles are reported against the block that closes them.
    Dag check(static_cast<int>(names_.size()));
    for (std::size_t v = 0; v < names_.size(); ++v) {
      for (Var parent : cpts[v].parents) {
        if (!check.can_add_edge(parent, static_cast<Var>(v))) {
          throw BifError(cpts_[v].line, "parent declaration " + names_[parent] + " -> " + names_[v] +
                                            " repeats an edge or creates a cycle");
        }
        check.add_edge(parent, static_cast<Var>(v));
      }
    }
    return BayesNet(name_, names_, levels_, std::move(cpts), options_.row_tolerance);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  BifOptions options_;
  std::string name_ = "unknown";
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> levels_;
  std::vector<PendingCpt> cpts_;
  std::unordered_map<std::string, Var> index_;
};

std::string format_probability(double q) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", q);
  return buffer;
}

}  // namespace

BayesNet parse_bif(std::string_view text, const BifOptions& options) { return BifParser(text, options).parse(); }

BayesNet load_bif(const std::filesystem::path& path, const BifOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_bif(buffer.str(), options);
  } catch (const BifError& e) {
    throw BifError(e.line(), path.string() + ": " + e.what());
  }
}

std::string write_bif(const BayesNet& net) {
  std::ostringstream out;
  out << "network " << net.name() << " {\n}\n";
  const auto p = static_cast<Var>(net.num_vars());
  for (Var v = 0; v < p; ++v) {
    out << "variable " << net.names()[v] << " {\n  type discrete [ " << net.arity(v) << " ] { ";
    for (int l = 0; l < net.arity(v); ++l) out << (l ? ", " : "") << net.levels()[v][l];
    out << " };\n}\n";
  }
  for (Var v = 0; v < p; ++v) {
    const Cpt& cpt = net.cpt(v);
    out << "probability ( " << net.names()[v];
    for (std::size_t i = 0; i < cpt.parents.size(); ++i) out << (i ? ", " : " | ") << net.names()[cpt.parents[i]];
    out << " ) {\n";
    if (cpt.parents.empty()) {
      out << "  table ";
      for (int l = 0; l < cpt.arity; ++l) out << (l ? ", " : "") << format_probability(cpt.probs[l]);
      out << ";\n";
    } else {
      std::vector<std::size_t> config(cpt.parents.size(), 0);
      for (std::size_t r = 0; r < cpt.num_rows(); ++r) {
        out << "  (";
        for (std::size_t i = 0; i < config.size(); ++i) out << (i ? ", " : "") << net.levels()[cpt.parents[i]][config[i]];
        out << ") ";
        const auto row = cpt.row(r);
        for (int l = 0; l < cpt.arity; ++l) out << (l ? ", " : "") << format_probability(row[l]);
        out << ";\n";
        for (std::size_t i = config.size(); i-- > 0;) {
          if (++config[i] < net.levels()[cpt.parents[i]].size()) break;
          config[i] = 0;
        }
      }
    }
    out << "}\n";
  }
  return out.str();
}

Dataset ancestral_sample(const BayesNet& net, std::size_t rows, std::uint64_t seed) {
  if (rows < 1) throw std::invalid_argument("ancestral_sample: need at least one row");
  const auto p = net.num_vars();
  const auto order = topological_order(net.dag());
  std::vector<std::vector<Level>> columns(p, std::vector<Level>(rows));
  std::vector<Level> assignment(p);
  for (std::size_t r = 0; r < rows; ++r) {
    CounterStream stream(derive_seed(seed, r));
    for (Var v : order) {
      const auto probs = net.cpt(v).row(net.parent_row(v, assignment));
      const double u = stream.uniform();
      double cumulative = 0.0;
      int chosen = -1;
      int last_positive = 0;
      for (int l = 0; l < static_cast<int>(probs.size()); ++l) {
        if (probs[l] > 0.0) last_positive = l;
        cumulative += probs[l];
        if (u < cumulative) {
          chosen = l;
          break;
        }
      }
      // Rows summing slightly below one: the residual mass goes to the last possible level.
      assignment[v] = static_cast<Level>(chosen < 0 ? last_positive : chosen);
    }
    for (std::size_t v = 0; v < p; ++v) columns[v][r] = assignment[v];
  }
  return Dataset(net.names(), net.levels(), std::move(columns));
}

}  // namespace h2pc
