#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include "opident/linalg.hpp"
#include "opident/search.hpp"
#include "oracles.hpp"

namespace {

using opident::ExactMatrix;
using opident::Integer;
using opident::Rational;
using opident::oracle::IntMatrix;
using opident::oracle::minor_rank;
using opident::oracle::random_matrix;

TEST(RankRational, SmallExamples) {
  EXPECT_EQ(opident::rank_rational(ExactMatrix::from_integers({{1, 2}, {2, 4}})), 1u);
  EXPECT_EQ(opident::rank_rational(ExactMatrix::from_integers({{0, 0}, {0, 0}})), 0u);
  EXPECT_EQ(opident::rank_rational(ExactMatrix::from_integers({{0, 1, 2}, {1, 0, 3}, {1, 1, 5}})), 2u);
  EXPECT_EQ(opident::rank_rational(ExactMatrix(0, 3)), 0u);
  ExactMatrix halves(2, 2);
  halves(0, 0) = Rational(1, 2);
  halves(0, 1) = Rational(1, 3);
  halves(1, 0) = Rational(3, 2);
  halves(1, 1) = 1;
  EXPECT_EQ(opident::rank_rational(halves), 1u);
}

TEST(RankRational, MatchesMinorOracle) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 250; ++trial) {
    const auto a = random_matrix(rng, dim(rng), dim(rng), 3);
    EXPECT_EQ(opident::rank_rational(ExactMatrix::from_integers(a)), minor_rank(a)) << "trial " << trial;
  }
}

TEST(RankRational, InvariantUnderPermutationAndScaling) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> scale(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_matrix(rng, 5, 6, 4);
    const auto base = opident::rank_rational(ExactMatrix::from_integers(a));
    std::shuffle(a.begin(), a.end(), rng);
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    IntMatrix b = a;
    for (std::size_t r = 0; r < a.size(); ++r) {
      const int s = scale(rng) * (trial % 2 ? -1 : 1);
      for (std::size_t c = 0; c < 6; ++c) b[r][c] = s * a[r][perm[c]];
    }
    EXPECT_EQ(opident::rank_rational(ExactMatrix::from_integers(b)), base);
  }
}

TEST(RankModP, Basics) {
  EXPECT_EQ(opident::rank_mod_p(ExactMatrix::from_integers({{1009}}), 1009), 0u);
  EXPECT_EQ(opident::rank_mod_p(ExactMatrix::from_integers({{2, 4}, {1, 2}}), 7), 1u);
  EXPECT_EQ(opident::rank_mod_p(ExactMatrix::from_integers({{1, 1}, {1, -1}}), 2), 1u);
  EXPECT_EQ(opident::rank_mod_p(ExactMatrix::from_integers({{1, 1}, {1, -1}}), 3), 2u);
  EXPECT_THROW(opident::rank_mod_p(ExactMatrix::from_integers({{1}}), 1000), opident::ParameterError);
  ExactMatrix third(1, 1);
  third(0, 0) = Rational(1, 3);
  EXPECT_EQ(opident::rank_mod_p(third, 5), 1u);
  EXPECT_THROW(opident::rank_mod_p(third, 3), opident::ParameterError);
}

TEST(RankModP, SmallAndLargeKernelsAgree) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_matrix(rng, 7, 9, 20);
    const auto m = ExactMatrix::from_integers(a);
    // 65537 uses the generic kernel, 1009 the fixed-modulus one; both bounded by Q.
    const auto q = opident::rank_rational(m);
    EXPECT_LE(opident::rank_mod_p(m, 1009), q);
    EXPECT_EQ(opident::rank_mod_p(m, 2147483647), q);
  }
}

TEST(ModularBound, OneByOneStrictInequality) {
  const auto cmp = opident::rank_mod_leq_rational(ExactMatrix::from_integers({{1009}}), 1009);
  EXPECT_TRUE(cmp.holds());
  EXPECT_FALSE(cmp.equal());
  EXPECT_EQ(cmp.modular, 0u);
  EXPECT_EQ(cmp.rational, 1u);
}

TEST(ModularBound, ModularRankNeverExceedsRational) {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  const std::vector<std::uint64_t> primes{2, 3, 5, 7, 1009};
  int strict = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const auto a = random_matrix(rng, dim(rng), dim(rng), 6);
    const auto p = primes[static_cast<std::size_t>(trial) % primes.size()];
    const auto cmp = opident::rank_mod_leq_rational(ExactMatrix::from_integers(a), p);
    EXPECT_TRUE(cmp.holds()) << "trial " << trial;
    if (!cmp.equal()) ++strict;
  }
  EXPECT_GT(strict, 0);  // small primes must produce some strict drops
}

TEST(ModularBound, RejectsNonIntegerMatrix) {
  ExactMatrix m(1, 1);
  m(0, 0) = Rational(1, 2);
  EXPECT_THROW(opident::rank_mod_leq_rational(m, 1009), opident::ParameterError);
}

TEST(ModularBound, ReferenceVectorsHaveEqualRanks) {
  std::ifstream in(std::string(OPIDENT_DATA_DIR) + "/mult2_solutions.csv");
  const auto rows = opident::read_solutions_csv(in);
  ASSERT_EQ(rows.size(), 387u);
  const auto t = opident::build_template(3, 3, 2);
  for (std::size_t k = 0; k < rows.size(); k += 43) {
    const auto m = ExactMatrix::from_consequences(opident::instantiate(t, rows[k].vector));
    const auto cmp = opident::rank_mod_leq_rational(m, 1009);
    EXPECT_TRUE(cmp.equal());
    EXPECT_EQ(cmp.rational, rows[k].rank());
  }
}

TEST(SmallPrimeField, RejectsBadModulus) {
  EXPECT_THROW(opident::SmallPrimeField(65537), opident::ParameterError);
  EXPECT_THROW(opident::SmallPrimeField(1001), opident::ParameterError);
}

TEST(Modular, PrimalityAndInverses) {
  EXPECT_TRUE(opident::is_prime(1009));
  EXPECT_TRUE(opident::is_prime(2147483647));
  EXPECT_FALSE(opident::is_prime(1));
  EXPECT_FALSE(opident::is_prime(561));
  EXPECT_FALSE(opident::is_prime(3215031751ULL));
  for (std::uint64_t a = 1; a < 1009; ++a) EXPECT_EQ(opident::mul_mod(a, opident::inv_mod(a, 1009), 1009), 1u);
  EXPECT_THROW(opident::inv_mod(0, 7), opident::DomainError);
  EXPECT_EQ(opident::reduce_signed(-1, 1009), 1008u);
}

}  // namespace
