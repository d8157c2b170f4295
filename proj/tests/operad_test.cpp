#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "opident/monomial.hpp"
#include "opident/operad.hpp"
#include "opident/polynomial.hpp"

namespace {

using opident::Composition;
using opident::OperatorMonomial;
using opident::Rational;
using opident::RationalPolynomial;

OperatorMonomial M(const char* text) { return OperatorMonomial::parse(3, text); }

TEST(ComposeMonomialProduct, AssociativityMakesPositionsCoincide) {
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(opident::compose_monomial_product(M("L^2(***)"), i).key(), "L(L(*****))");
}

TEST(ComposeMonomialProduct, Examples) {
  EXPECT_EQ(opident::compose_monomial_product(M("*"), 1).key(), "***");
  const auto m = opident::compose_monomial_product(M("L(*)**"), 2);
  EXPECT_EQ(m.key(), "L(*)****");
  EXPECT_EQ(m.dyck().str(), "(())()()()()");
  EXPECT_EQ(opident::compose_monomial_product(M("L(*)**"), 1).key(), "L(***)**");
}

TEST(ComposeMonomialProduct, RejectsBadPosition) {
  EXPECT_THROW(opident::compose_monomial_product(M("L(*)**"), 0), opident::PositionError);
  EXPECT_THROW(opident::compose_monomial_product(M("L(*)**"), 4), opident::PositionError);
}

TEST(ComposeProductMonomial, Examples) {
  EXPECT_EQ(opident::compose_product_monomial(2, M("L^2(***)")).key(), "*L(L(***))*");
  EXPECT_EQ(opident::compose_product_monomial(1, M("***")).key(), "*****");
  const auto m = opident::compose_product_monomial(3, M("*L(*)*"));
  EXPECT_EQ(m.key(), "***L(*)*");
  EXPECT_EQ(m.dyck().str(), "()()()(())()");
  EXPECT_THROW(opident::compose_product_monomial(4, M("*")), opident::PositionError);
  EXPECT_THROW(opident::compose_product_monomial(0, M("*")), opident::PositionError);
}

TEST(ComposeMonomialOperator, Examples) {
  EXPECT_EQ(opident::compose_monomial_operator(M("L^2(***)"), 2).key(), "L(L(*L(*)*))");
  EXPECT_EQ(opident::compose_monomial_operator(M("*"), 1).key(), "L(*)");
  EXPECT_EQ(opident::compose_monomial_operator(M("L(*)**"), 3).key(), "L(*)*L(*)");
  EXPECT_EQ(opident::enumerate_monomials(3, 3, 2)[6].key(), "L(*)*L(*)");
  EXPECT_THROW(opident::compose_monomial_operator(M("***"), 4), opident::PositionError);
}

TEST(ComposeOperatorMonomial, Examples) {
  EXPECT_EQ(opident::compose_operator_monomial(M("L^2(***)")).key(), "L(L(L(***)))");
  EXPECT_EQ(opident::compose_operator_monomial(M("*")).key(), "L(*)");
  const auto m = opident::compose_operator_monomial(M("**L(*)"));
  EXPECT_EQ(m.key(), "L(**L(*))");
  EXPECT_EQ(m.dyck().str(), "(()()(()))");
}

TEST(ComposePolynomial, FirstRowOfMultiplicityOneMatrix) {
  const auto basis = opident::enumerate_monomials(3, 3, 1);
  std::vector<RationalPolynomial::Term> terms;
  for (std::size_t k = 0; k < 4; ++k) terms.emplace_back(basis[k], Rational(static_cast<long>(k + 1)));
  const RationalPolynomial r(3, 3, 1, terms);
  const auto s = opident::compose_polynomial(opident::compose_polynomial(r, Composition::with_p_at(1)),
                                             Composition::with_L_at(1));
  const auto target = opident::enumerate_monomials(3, 5, 2);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.coefficient(target[3]), 1);
  EXPECT_EQ(s.coefficient(target[4]), 2);
  EXPECT_EQ(s.coefficient(target[20]), 3);
  EXPECT_EQ(s.coefficient(target[21]), 4);
}

TEST(ComposePolynomial, SingleLeafAndZero) {
  const RationalPolynomial leaf(3, 1, 0, {{M("*"), Rational(1)}});
  const auto l = opident::compose_polynomial(leaf, Composition::L_around());
  EXPECT_EQ(l.render(), "1 L(*)");
  EXPECT_THROW(RationalPolynomial(3, 3, 1, {{M("L(***)"), Rational(1)}, {M("L(***)"), Rational(-1)}}),
               opident::DomainError);
}

TEST(ComposePolynomial, BookkeepingAndPositions) {
  const auto r = opident::polynomial_from_vector(3, 3, 2, std::vector<int>{1, 2, 0, -1, 1, 1, 0, 2, 1, -2});
  const auto a = opident::compose_polynomial(r, Composition::with_p_at(2));
  EXPECT_EQ(a.degree(), 5);
  EXPECT_EQ(a.multiplicity(), 2);
  const auto b = opident::compose_polynomial(r, Composition::with_L_at(3));
  EXPECT_EQ(b.degree(), 3);
  EXPECT_EQ(b.multiplicity(), 3);
  const auto c = opident::compose_polynomial(r, Composition::p_around_at(3));
  EXPECT_EQ(c.degree(), 5);
  EXPECT_EQ(c.multiplicity(), 2);
  EXPECT_THROW(opident::compose_polynomial(r, Composition::with_p_at(4)), opident::PositionError);
  EXPECT_THROW(opident::compose_polynomial(r, Composition::p_around_at(4)), opident::PositionError);
  EXPECT_THROW(opident::compose_polynomial(r, Composition::with_L_at(0)), opident::PositionError);
}

TEST(OperatorPolynomial, AddTermSumsAndDropsZeros) {
  auto p = RationalPolynomial::zero(3, 3, 1);
  p.add_term(M("L(***)"), Rational(2));
  p.add_term(M("L(***)"), Rational(3));
  EXPECT_EQ(p.coefficient(M("L(***)")), 5);
  p.add_term(M("L(***)"), Rational(-5));
  EXPECT_TRUE(p.is_zero());
  EXPECT_THROW(p.add_term(M("L(L(***))"), Rational(1)), opident::ParameterError);
}

// Bilinearity on random polynomials, every composition kind.
TEST(ComposePolynomial, IsBilinear) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + trial % 2;
    const int len = m == 1 ? 4 : 10;
    std::vector<int> u(len);
    std::vector<int> w(len);
    for (auto& x : u) x = coef(rng);
    for (auto& x : w) x = coef(rng);
    u[0] = 1;
    w[1] = 1;
    const auto P = opident::polynomial_from_vector(3, 3, m, u);
    const auto Q = opident::polynomial_from_vector(3, 3, m, w);
    const Rational alpha(coef(rng) + 5);
    const Rational beta(coef(rng) - 5);
    auto sum = alpha * P + beta * Q;
    if (sum.is_zero()) continue;
    for (const auto op : {Composition::with_p_at(1 + trial % 3), Composition::p_around_at(1 + trial % 3),
                          Composition::with_L_at(1 + (trial + 1) % 3), Composition::L_around()}) {
      const auto lhs = opident::compose_polynomial(sum, op);
      const auto rhs = alpha * opident::compose_polynomial(P, op) + beta * opident::compose_polynomial(Q, op);
      EXPECT_EQ(lhs, rhs);
      ++checked;
    }
  }
  EXPECT_GE(checked, 100);
}

}  // namespace
