#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "opident/search.hpp"

namespace {

using opident::SearchConfig;
using opident::SolutionRecord;

std::vector<SolutionRecord> load(const char* name) {
  std::ifstream in(std::string(OPIDENT_DATA_DIR) + "/" + name);
  return opident::read_solutions_csv(in);
}

std::set<std::pair<std::vector<int>, std::size_t>> as_set(const std::vector<SolutionRecord>& rows) {
  std::set<std::pair<std::vector<int>, std::size_t>> out;
  for (const auto& r : rows) out.emplace(r.vector, r.rank());
  return out;
}

std::string to_csv(const opident::SearchResult& r, std::size_t length) {
  std::ostringstream out;
  opident::write_solutions_csv(out, r.solutions, length);
  return out.str();
}

TEST(Candidates, DefaultLoopSizes) {
  const std::vector<int> set{-2, -1, 0, 1, 2};
  EXPECT_EQ(opident::count_candidates(set, 4).leading_positive, 312u);
  EXPECT_EQ(opident::count_candidates(set, 10).leading_positive, 4882812u);
}

TEST(Candidates, LeadingPositiveCountFormula) {
  for (std::size_t len = 1; len <= 6; ++len) {
    for (const auto& set : std::vector<std::vector<int>>{{-1, 0, 1}, {-2, -1, 0, 1, 2}, {-3, -2, -1, 0, 1, 2, 3}}) {
      std::uint64_t total = 1;
      for (std::size_t k = 0; k < len; ++k) total *= set.size();
      EXPECT_EQ(opident::count_candidates(set, len).leading_positive, (total - 1) / 2);
    }
  }
}

TEST(Candidates, GcdOneCountMatchesDirectLoop) {
  std::uint64_t expected = 0;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      for (int c = -2; c <= 2; ++c) {
        for (int d = -2; d <= 2; ++d) {
          const int lead = a ? a : b ? b : c ? c : d;
          if (lead <= 0) continue;
          if (std::gcd(std::gcd(a, b), std::gcd(c, d)) == 1) ++expected;
        }
      }
    }
  }
  EXPECT_EQ(opident::count_candidates({-2, -1, 0, 1, 2}, 4).gcd_one, expected);
  EXPECT_EQ(expected, 272u);
}

TEST(Candidates, SingleEntry) {
  std::vector<std::vector<int>> seen;
  opident::for_each_candidate({0, -1, 1}, 1, true, [&](const auto& v) { seen.push_back(v); });
  EXPECT_EQ(seen, (std::vector<std::vector<int>>{{1}}));
}

TEST(Candidates, LexOrderAndNormalization) {
  std::vector<std::vector<int>> seen;
  opident::for_each_candidate({2, 1, 0, -1, -2, 1}, 3, false, [&](const auto& v) { seen.push_back(v); });
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  EXPECT_EQ(seen.size(), 62u);
  for (const auto& v : seen) EXPECT_TRUE(opident::is_leading_positive(v));
}

TEST(Candidates, RejectsDegenerateSets) {
  EXPECT_THROW(opident::count_candidates({}, 3), opident::ParameterError);
  EXPECT_THROW(opident::count_candidates({0, -1}, 3), opident::ParameterError);
  EXPECT_THROW(opident::count_candidates({1}, 0), opident::ParameterError);
}

class MultiplicityOne : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { tmpl = new opident::SymbolicMatrix(opident::build_template(3, 3, 1)); }
  static void TearDownTestSuite() { delete tmpl; }
  static opident::SymbolicMatrix* tmpl;
};
opident::SymbolicMatrix* MultiplicityOne::tmpl = nullptr;

TEST_F(MultiplicityOne, ReproducesTableOfSolutions) {
  SearchConfig cfg;
  cfg.threads = 1;
  const auto r = opident::run_search(*tmpl, cfg);
  EXPECT_EQ(r.maximal_rank, 36u);
  EXPECT_EQ(r.solutions.size(), 41u);
  EXPECT_EQ(as_set(r.solutions), as_set(load("mult1_solutions.csv")));
  EXPECT_EQ(opident::rank_spectrum(r.solutions), (std::set<std::size_t>{26, 27, 31, 32, 34}));
  EXPECT_EQ(r.screened, 312u);
  EXPECT_TRUE(r.findings.empty());
  for (const auto& s : r.solutions) {
    ASSERT_TRUE(s.rank_mod && s.rank_rational);
    EXPECT_EQ(*s.rank_mod, *s.rank_rational);
    EXPECT_EQ(s.prime, 1009u);
  }
}

TEST_F(MultiplicityOne, ModesAgree) {
  SearchConfig base;
  base.threads = 2;
  const auto expected = as_set(opident::run_search(*tmpl, base).solutions);

  SearchConfig rational = base;
  rational.rational_only = true;
  const auto r = opident::run_search(*tmpl, rational);
  EXPECT_EQ(as_set(r.solutions), expected);
  for (const auto& s : r.solutions) EXPECT_FALSE(s.rank_mod.has_value());

  SearchConfig prefilter = base;
  prefilter.gcd_placement = opident::GcdPlacement::prefilter;
  const auto p = opident::run_search(*tmpl, prefilter);
  EXPECT_EQ(as_set(p.solutions), expected);
  EXPECT_EQ(p.screened, 272u);

  SearchConfig unconfirmed = base;
  unconfirmed.rational_confirmation = false;
  const auto u = opident::run_search(*tmpl, unconfirmed);
  EXPECT_EQ(as_set(u.solutions), expected);
  for (const auto& s : u.solutions) EXPECT_FALSE(s.rank_rational.has_value());
}

TEST_F(MultiplicityOne, GcdFilterOffKeepsMultiples) {
  SearchConfig cfg;
  cfg.gcd_filter = false;
  const auto r = opident::run_search(*tmpl, cfg);
  EXPECT_GT(r.solutions.size(), 41u);
  bool has_multiple = false;
  for (const auto& s : r.solutions) has_multiple |= opident::content_gcd(s.vector) > 1;
  EXPECT_TRUE(has_multiple);
}

TEST_F(MultiplicityOne, SmallerSetGivesSubset) {
  SearchConfig cfg;
  cfg.coefficient_set = {0, 1};
  const auto small = as_set(opident::run_search(*tmpl, cfg).solutions);
  const auto full = as_set(load("mult1_solutions.csv"));
  for (const auto& s : small) EXPECT_TRUE(full.contains(s));
  EXPECT_FALSE(small.empty());
}

TEST_F(MultiplicityOne, NoScalarMultiplesWhenFiltered) {
  SearchConfig cfg;
  const auto r = opident::run_search(*tmpl, cfg);
  for (const auto& s : r.solutions) EXPECT_EQ(opident::content_gcd(s.vector), 1);
}

TEST_F(MultiplicityOne, ProgressIsReported) {
  SearchConfig cfg;
  int calls = 0;
  std::uint64_t last = 0;
  cfg.progress = [&](const opident::SearchProgress& p) {
    ++calls;
    last = p.processed;
    EXPECT_EQ(p.total, 625u);
  };
  opident::run_search(*tmpl, cfg);
  EXPECT_GE(calls, 1);
  EXPECT_EQ(last, 625u);
}

TEST(Determinism, ReducedMultiplicityTwoSearchIgnoresThreadCount) {
  const auto t = opident::build_template(3, 3, 2);
  SearchConfig cfg;
  cfg.coefficient_set = {-1, 0, 1};
  cfg.maximal_rank = 42;
  std::string first;
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    cfg.threads = threads;
    const auto r = opident::run_search(t, cfg);
    EXPECT_EQ(r.threads, threads);
    const auto csv = to_csv(r, 10);
    if (first.empty()) {
      first = csv;
      EXPECT_GT(r.solutions.size(), 0u);
    } else {
      EXPECT_EQ(csv, first) << threads << " threads";
    }
  }
}

TEST(Spectrum, EmptyInput) { EXPECT_TRUE(opident::rank_spectrum({}).empty()); }

TEST(SolutionsCsv, RoundTrip) {
  std::vector<SolutionRecord> rows(2);
  rows[0].vector = {1, 0, -2};
  rows[0].rank_mod = 30;
  rows[0].rank_rational = 30;
  rows[0].prime = 1009;
  rows[1].vector = {0, 1, 1};
  rows[1].rank_rational = 12;
  std::stringstream io;
  opident::write_solutions_csv(io, rows, 3);
  EXPECT_EQ(io.str(), "a1,a2,a3,rank_mod,rank_rational\n1,0,-2,30,30\n0,1,1,,12\n");
  const auto back = opident::read_solutions_csv(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].vector, rows[0].vector);
  EXPECT_EQ(back[0].rank_mod, rows[0].rank_mod);
  EXPECT_EQ(back[1].rank_mod, std::nullopt);
  EXPECT_EQ(back[1].rank(), 12u);
}

TEST(SolutionsCsv, ReadsTables) {
  const auto mult2 = load("mult2_solutions.csv");
  ASSERT_EQ(mult2.size(), 387u);
  EXPECT_EQ(opident::rank_spectrum(mult2), (std::set<std::size_t>{30, 34, 35, 36, 40, 41}));
  EXPECT_EQ(load("mult1_solutions.csv").size(), 41u);
}

TEST(SolutionsCsv, ReportsBadLines) {
  std::stringstream bad("a1,a2,rank_mod,rank_rational\n1,2,3,3\n1,x,3,3\n");
  try {
    opident::read_solutions_csv(bad);
    FAIL() << "expected ParseError";
  } catch (const opident::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::stringstream header("b1,b2\n");
  EXPECT_THROW(opident::read_solutions_csv(header), opident::ParseError);
  std::stringstream empty;
  EXPECT_TRUE(opident::read_solutions_csv(empty).empty());
}

}  // namespace
