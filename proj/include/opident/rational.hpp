#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "opident/error.hpp"

namespace opident {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long numerator, long denominator = 1) {
  if (denominator == 0) throw ParameterError("zero denominator");
  Rational q(numerator, denominator);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

/// "3", "-1/2"; denominators of 1 are omitted.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(std::string_view text) {
  Rational q;
  if (q.set_str(std::string(text), 10) != 0) {
    throw ParseError("not a rational number: '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

}  // namespace opident
