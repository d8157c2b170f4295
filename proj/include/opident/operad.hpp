#pragma once

// Partial compositions with the generators p (the n-ary product) and L (the
// operator). Results are re-flattened, so associativity is built in.

#include <string>
#include <utility>
#include <vector>

#include "opident/error.hpp"
#include "opident/monomial.hpp"
#include "opident/polynomial.hpp"

namespace opident {

namespace detail {

// Rebuilds `node` with its `target`-th leaf (1-based, left to right) replaced.
inline MonomialNode replace_leaf(const MonomialNode& node, int& seen, int target,
                                 const MonomialNode& replacement) {
  switch (node.kind) {
    case NodeKind::leaf:
      return ++seen == target ? replacement : node;
    case NodeKind::op:
      return MonomialNode::apply(replace_leaf(node.children.front(), seen, target, replacement));
    case NodeKind::product: {
      std::vector<MonomialNode> factors;
      factors.reserve(node.children.size());
      for (const auto& c : node.children) factors.push_back(replace_leaf(c, seen, target, replacement));
      return MonomialNode::product(std::move(factors));
    }
  }
  return node;
}

inline void check_leaf_position(const OperatorMonomial& m, int i) {
  if (i < 1 || i > m.degree()) {
    throw PositionError("position " + std::to_string(i) + " outside 1.." + std::to_string(m.degree()));
  }
}

inline MonomialNode bare_product(int arity) {
  return MonomialNode::product(std::vector<MonomialNode>(static_cast<std::size_t>(arity), MonomialNode::leaf()));
}

}  // namespace detail

/// M o_i p: the i-th leaf becomes a product of n leaves (degree + n - 1).
inline OperatorMonomial compose_monomial_product(const OperatorMonomial& m, int i) {
  detail::check_leaf_position(m, i);
  int seen = 0;
  return {m.arity(), detail::replace_leaf(m.root(), seen, i, detail::bare_product(m.arity()))};
}

/// p o_i M: M in slot i of an n-ary product, leaves elsewhere (degree + n - 1).
inline OperatorMonomial compose_product_monomial(int i, const OperatorMonomial& m) {
  if (i < 1 || i > m.arity()) {
    throw PositionError("slot " + std::to_string(i) + " outside 1.." + std::to_string(m.arity()));
  }
  std::vector<MonomialNode> factors(static_cast<std::size_t>(m.arity()), MonomialNode::leaf());
  factors[static_cast<std::size_t>(i - 1)] = m.root();
  return {m.arity(), MonomialNode::product(std::move(factors))};
}

/// M o_i L: the i-th leaf is wrapped in L (multiplicity + 1).
inline OperatorMonomial compose_monomial_operator(const OperatorMonomial& m, int i) {
  detail::check_leaf_position(m, i);
  int seen = 0;
  return {m.arity(), detail::replace_leaf(m.root(), seen, i, MonomialNode::apply(MonomialNode::leaf()))};
}

/// L o M: the whole monomial is wrapped in L (multiplicity + 1).
inline OperatorMonomial compose_operator_monomial(const OperatorMonomial& m) {
  return {m.arity(), MonomialNode::apply(m.root())};
}

/// One partial composition with a generator, as applied to a whole polynomial.
struct Composition {
  enum class Kind { with_p_at, p_around_at, with_L_at, L_around };

  Kind kind;
  int position = 0;  // unused for L_around

  static Composition with_p_at(int i) { return {Kind::with_p_at, i}; }
  static Composition p_around_at(int i) { return {Kind::p_around_at, i}; }
  static Composition with_L_at(int i) { return {Kind::with_L_at, i}; }
  static Composition L_around() { return {Kind::L_around, 0}; }

  OperatorMonomial apply(const OperatorMonomial& m) const {
    switch (kind) {
      case Kind::with_p_at: return compose_monomial_product(m, position);
      case Kind::p_around_at: return compose_product_monomial(position, m);
      case Kind::with_L_at: return compose_monomial_operator(m, position);
      case Kind::L_around: return compose_operator_monomial(m);
    }
    throw ParameterError("unknown composition kind");
  }

  int degree_step(int arity) const {
    return kind == Kind::with_p_at || kind == Kind::p_around_at ? arity - 1 : 0;
  }
  int multiplicity_step() const {
    return kind == Kind::with_L_at || kind == Kind::L_around ? 1 : 0;
  }
};

/// Bilinear extension: composes every term and sums coefficients of coinciding results.
template <class Coeff>
OperatorPolynomial<Coeff> compose_polynomial(const OperatorPolynomial<Coeff>& p, const Composition& op) {
  const int n = p.arity();
  if ((op.kind == Composition::Kind::with_p_at || op.kind == Composition::Kind::with_L_at) &&
      (op.position < 1 || op.position > p.degree())) {
    throw PositionError("position " + std::to_string(op.position) + " outside 1.." +
                        std::to_string(p.degree()));
  }
  if (op.kind == Composition::Kind::p_around_at && (op.position < 1 || op.position > n)) {
    throw PositionError("slot " + std::to_string(op.position) + " outside 1.." + std::to_string(n));
  }
  auto out = OperatorPolynomial<Coeff>::zero(n, p.degree() + op.degree_step(n),
                                             p.multiplicity() + op.multiplicity_step());
  for (const auto& [m, c] : p.terms()) out.add_term(op.apply(m), c);
  return out;
}

}  // namespace opident
