#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "h2pc/bayesnet.hpp"
#include "h2pc/dataset.hpp"
#include "oracles.hpp"

using namespace h2pc;

namespace {

Dataset parse(const std::string& text, bool header = true) {
  std::istringstream in(text);
  return read_csv(in, header);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, ThreeBinaryColumns) {
  const Dataset d = parse("A,B,C\na,x,0\nb,y,1\na,y,0\nb,x,1\n");
  EXPECT_EQ(d.num_vars(), 3u);
  EXPECT_EQ(d.num_rows(), 4u);
  for (Var v = 0; v < 3; ++v) EXPECT_EQ(d.arity(v), 2);
  EXPECT_EQ(d.levels(1), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(d.at(2, 1), 1);
  EXPECT_EQ(d.index_of("C"), 2);
  EXPECT_FALSE(d.find("D"));
}

TEST(Csv, LevelsAreSortedLabels) {
  const Dataset d = parse("T\nmid\nhigh\nlow\nhigh\n");
  EXPECT_EQ(d.levels(0), (std::vector<std::string>{"high", "low", "mid"}));
  EXPECT_EQ(d.at(0, 0), 2);
}

TEST(Csv, HeaderlessNames) {
  const Dataset d = parse("0,1\n1,0\n", false);
  EXPECT_EQ(d.names(), (std::vector<std::string>{"V1", "V2"}));
}

TEST(Csv, ConstantColumnIsNamed) {
  const std::string msg = error_of("A,Flat\n0,z\n1,z\n");
  EXPECT_NE(msg.find("Flat"), std::string::npos) << msg;
}

TEST(Csv, MalformedInputs) {
  EXPECT_NE(error_of("A,B\n0,1\n1\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("A,B\n0,\n1,0\n").find("empty cell"), std::string::npos);
  EXPECT_NE(error_of("A,B\n\"0\",1\n1,0\n").find("quoted"), std::string::npos);
  EXPECT_NE(error_of("A,A\n0,1\n1,0\n").find("duplicate"), std::string::npos);
  EXPECT_FALSE(error_of("A,B\n").empty());
}

TEST(Csv, RoundTrip) {
  std::mt19937_64 rng(9);
  const Dataset d = oracle::random_dataset({2, 3, 5, 4}, 300, rng);
  std::stringstream buffer;
  write_csv(d, buffer);
  const Dataset back = read_csv(buffer);
  EXPECT_EQ(back, d);
  EXPECT_EQ(back.fingerprint(), d.fingerprint());
}

TEST(Csv, AlarmSampleHas37Variables) {
  const BayesNet net = load_bif(H2PC_DATA_DIR "/networks/alarm.bif");
  const Dataset d = ancestral_sample(net, 5000, 1);
  std::stringstream buffer;
  write_csv(d, buffer);
  const Dataset back = read_csv(buffer);
  EXPECT_EQ(back.num_vars(), 37u);
  EXPECT_EQ(back.num_rows(), 5000u);
}

TEST(AlignLevels, RecodesToReference) {
  const Dataset d = parse("B,A\nno,x\nyes,y\nno,y\n");
  const Dataset aligned = align_levels(d, {"A", "B"}, {{"y", "x", "z"}, {"yes", "no"}});
  EXPECT_EQ(aligned.names(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(aligned.arity(0), 3);
  EXPECT_EQ(aligned.at(0, 0), 1);
  EXPECT_EQ(aligned.at(0, 1), 1);
  EXPECT_EQ(aligned.at(1, 1), 0);
  EXPECT_THROW(align_levels(d, {"A", "B"}, {{"y", "z"}, {"yes", "no"}}), DataError);
  EXPECT_THROW(align_levels(d, {"A", "C"}, {{"x", "y"}, {"yes", "no"}}), DataError);
}

TEST(Contingency, PerfectCorrelation) {
  std::vector<std::vector<Level>> cols(2, std::vector<Level>(20));
  for (int r = 10; r < 20; ++r) cols[0][r] = cols[1][r] = 1;
  const Dataset d({"X", "Y"}, {{"0", "1"}, {"0", "1"}}, cols);
  const auto t = contingency_table(d, 0, 1, {});
  EXPECT_EQ(t.strata, 1);
  EXPECT_EQ(t.count(0, 0, 0), 10);
  EXPECT_EQ(t.count(0, 1, 0), 0);
  EXPECT_EQ(t.count(1, 0, 0), 0);
  EXPECT_EQ(t.count(1, 1, 0), 10);
  EXPECT_EQ(t.total, 20);
}

TEST(Contingency, AllFourConditioningConfigurations) {
  std::mt19937_64 rng(1);
  const Dataset d = oracle::random_dataset({2, 2, 2, 2}, 200, rng);
  const std::vector<Var> z{2, 3};
  EXPECT_EQ(contingency_table(d, 0, 1, z).strata, 4);
}

TEST(Contingency, MatchesRowTally) {
  std::mt19937_64 rng(2);
  const Dataset d = oracle::random_dataset({3, 2, 4, 2, 3}, 200, rng);
  const std::vector<std::vector<Var>> zs{{}, {2}, {2, 3}, {4, 2, 3}};
  for (const auto& z : zs) {
    const auto t = contingency_table(d, 0, 1, z);
    const auto ref = oracle::tally(d, 0, 1, z);
    // Strata ids follow first appearance; rebuild that mapping from the rows.
    std::map<std::vector<int>, int> stratum;
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
      std::vector<int> zc;
      for (Var v : z) zc.push_back(d.at(r, v));
      stratum.try_emplace(zc, static_cast<int>(stratum.size()));
    }
    ASSERT_EQ(t.strata, static_cast<int>(stratum.size()));
    long long seen = 0;
    for (const auto& [key, count] : ref) {
      const auto& [x, y, zc] = key;
      EXPECT_EQ(t.count(x, y, stratum.at(zc)), count);
      seen += count;
    }
    EXPECT_EQ(seen, t.total);
  }
}

TEST(Contingency, MarginalsAreConsistent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset d = oracle::random_dataset({2, 4, 3, 2, 5}, 150, rng);
    const auto t = contingency_table(d, 1, 4, std::vector<Var>{0, 2});
    long long n = 0;
    for (int k = 0; k < t.strata; ++k) {
      int slice = 0;
      for (int i = 0; i < t.rows; ++i) {
        int row = 0;
        for (int j = 0; j < t.cols; ++j) row += t.count(i, j, k);
        EXPECT_EQ(row, t.row_total(i, k));
        slice += row;
      }
      for (int j = 0; j < t.cols; ++j) {
        int col = 0;
        for (int i = 0; i < t.rows; ++i) col += t.count(i, j, k);
        EXPECT_EQ(col, t.col_total(j, k));
      }
      EXPECT_EQ(slice, t.stratum_totals[k]);
      n += slice;
    }
    EXPECT_EQ(n, t.total);
    EXPECT_EQ(n, static_cast<long long>(d.num_rows()));
  }
}

TEST(Contingency, PermutationInvariantInZ) {
  std::mt19937_64 rng(4);
  const Dataset d = oracle::random_dataset({2, 3, 3, 2, 4}, 250, rng);
  const auto a = contingency_table(d, 0, 1, std::vector<Var>{2, 3, 4});
  const auto b = contingency_table(d, 0, 1, std::vector<Var>{4, 2, 3});
  ASSERT_EQ(a.strata, b.strata);
  // Same slices up to relabelling: compare the multisets of slice contents.
  auto slices = [](const ContingencyTable& t) {
    std::vector<std::vector<int>> out;
    for (int k = 0; k < t.strata; ++k) {
      std::vector<int> s;
      for (int i = 0; i < t.rows; ++i)
        for (int j = 0; j < t.cols; ++j) s.push_back(t.count(i, j, k));
      out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(slices(a), slices(b));
}

TEST(Contingency, RejectsBadArguments) {
  std::mt19937_64 rng(5);
  const Dataset d = oracle::random_dataset({2, 2, 2}, 20, rng);
  EXPECT_THROW(contingency_table(d, 0, 0, {}), std::invalid_argument);
  EXPECT_THROW(contingency_table(d, 0, 1, std::vector<Var>{1}), std::invalid_argument);
  EXPECT_THROW(contingency_table(d, 0, 7, {}), std::invalid_argument);
}

TEST(Stratify, LargeConfigurationSpace) {
  // 40 ternary variables overflow 63 bits, forcing the ordered-map path.
  std::mt19937_64 rng(6);
  const Dataset d = oracle::random_dataset(std::vector<int>(42, 3), 60, rng);
  std::vector<Var> z(40);
  std::iota(z.begin(), z.end(), 2);
  const Strata s = stratify(d, z);
  EXPECT_EQ(s.count, 60);  // rows are distinct with overwhelming probability
  const auto t = contingency_table(d, 0, 1, z);
  EXPECT_EQ(t.strata, 60);
  EXPECT_EQ(t.total, 60);
}
