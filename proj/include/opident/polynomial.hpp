#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "opident/error.hpp"
#include "opident/linear_form.hpp"
#include "opident/monomial.hpp"
#include "opident/rational.hpp"

namespace opident {

inline bool is_zero_coefficient(const Rational& q) { return q == 0; }
inline bool is_zero_coefficient(const LinearForm& f) { return f.is_zero(); }

/// Finite linear combination of operator monomials sharing (arity, degree,
/// multiplicity). Zero coefficients are never stored. `Coeff` is Rational for
/// concrete identities and LinearForm for identities with symbolic coefficients.
template <class Coeff>
class OperatorPolynomial {
 public:
  using Term = std::pair<OperatorMonomial, Coeff>;
  using TermMap = std::map<OperatorMonomial, Coeff, MonomialLexLess>;

  /// Builds an operator identity; rejects the zero combination.
  OperatorPolynomial(int arity, int degree, int multiplicity, std::vector<Term> terms)
      : OperatorPolynomial(arity, degree, multiplicity) {
    for (auto& [m, c] : terms) add_term(m, c);
    if (terms_.empty()) throw DomainError("the zero polynomial is not an operator identity");
  }

  /// Zero polynomial of the given shape; only reachable through arithmetic.
  static OperatorPolynomial zero(int arity, int degree, int multiplicity) {
    return OperatorPolynomial(arity, degree, multiplicity);
  }

  int arity() const noexcept { return arity_; }
  int degree() const noexcept { return degree_; }
  int multiplicity() const noexcept { return multiplicity_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  Coeff coefficient(const OperatorMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff{} : it->second;
  }

  /// Adds c*m, summing with an existing coefficient and dropping zeros.
  void add_term(const OperatorMonomial& m, const Coeff& c) {
    if (m.arity() != arity_ || m.degree() != degree_ || m.multiplicity() != multiplicity_) {
      throw ParameterError("monomial " + m.key() + " does not match polynomial shape");
    }
    if (is_zero_coefficient(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (is_zero_coefficient(it->second)) terms_.erase(it);
    }
  }

  OperatorPolynomial& operator+=(const OperatorPolynomial& other) {
    check_shape(other);
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
  }

  template <class Scalar>
  OperatorPolynomial& operator*=(const Scalar& s) {
    if (is_zero_coefficient(Coeff(s))) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b) { return a += b; }

  template <class Scalar>
  friend OperatorPolynomial operator*(const Scalar& s, OperatorPolynomial p) {
    return p *= s;
  }

  friend bool operator==(const OperatorPolynomial& a, const OperatorPolynomial& b) {
    return a.arity_ == b.arity_ && a.degree_ == b.degree_ &&
           a.multiplicity_ == b.multiplicity_ && a.terms_ == b.terms_;
  }

  /// "a1 L(***) + a2 L(*)**" style rendering, for diagnostics.
  std::string render() const {
    std::string out;
    for (const auto& [m, c] : terms_) {
      if (!out.empty()) out += " + ";
      if constexpr (std::is_same_v<Coeff, Rational>) {
        out += to_string(c);
      } else {
        out += "(" + c.render() + ")";
      }
      out += " " + m.key();
    }
    return out.empty() ? "0" : out;
  }

 private:
  OperatorPolynomial(int arity, int degree, int multiplicity)
      : arity_(arity), degree_(degree), multiplicity_(multiplicity) {
    check_degree(arity, degree);
    if (multiplicity < 0) throw ParameterError("multiplicity must be non-negative");
  }

  void check_shape(const OperatorPolynomial& other) const {
    if (other.arity_ != arity_ || other.degree_ != degree_ || other.multiplicity_ != multiplicity_) {
      throw ParameterError("polynomials of different shape");
    }
  }

  int arity_;
  int degree_;
  int multiplicity_;
  TermMap terms_;
};

using RationalPolynomial = OperatorPolynomial<Rational>;
using SymbolicPolynomial = OperatorPolynomial<LinearForm>;

/// Generic identity: coefficient symbol k (0-based) on the k-th monomial in lex order.
inline SymbolicPolynomial generic_polynomial(int arity, int degree, int multiplicity) {
  const auto basis = enumerate_monomials(arity, degree, multiplicity);
  std::vector<SymbolicPolynomial::Term> terms;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    terms.emplace_back(basis[k], LinearForm::symbol(static_cast<int>(k)));
  }
  return {arity, degree, multiplicity, std::move(terms)};
}

/// Identity with coefficient vector v over the lex-ordered basis. Throws on v = 0.
inline RationalPolynomial polynomial_from_vector(int arity, int degree, int multiplicity,
                                                 std::span<const Rational> v) {
  const auto basis = enumerate_monomials(arity, degree, multiplicity);
  if (v.size() != basis.size()) {
    throw ParameterError("coefficient vector has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(basis.size()));
  }
  std::vector<RationalPolynomial::Term> terms;
  for (std::size_t k = 0; k < basis.size(); ++k) terms.emplace_back(basis[k], v[k]);
  return {arity, degree, multiplicity, std::move(terms)};
}

inline RationalPolynomial polynomial_from_vector(int arity, int degree, int multiplicity,
                                                 std::span<const int> v) {
  std::vector<Rational> q(v.begin(), v.end());
  return polynomial_from_vector(arity, degree, multiplicity, q);
}

}  // namespace opident
