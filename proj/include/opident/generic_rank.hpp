#pragma once

// Rank over a function field of the coefficients, certified by random
// specialization into F_q (Schwartz-Zippel).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "opident/consequences.hpp"
#include "opident/error.hpp"
#include "opident/linalg.hpp"
#include "opident/linear_form.hpp"
#include "opident/modular.hpp"
#include "opident/rational.hpp"

namespace opident {

inline constexpr std::uint64_t default_specialization_prime = 2147483647;  // 2^31 - 1
inline constexpr std::uint64_t default_seed = 20240101;

/// Coefficient vector of R as affine forms in `parameter_count` free parameters.
struct Specialization {
  std::vector<LinearForm> coefficients;
  int parameter_count = 0;

  /// Every coefficient is its own parameter: the generic identity.
  static Specialization all_free(std::size_t terms) {
    Specialization s;
    for (std::size_t k = 0; k < terms; ++k) s.coefficients.push_back(LinearForm::symbol(static_cast<int>(k)));
    s.parameter_count = static_cast<int>(terms);
    return s;
  }

  /// Coefficients in `free` stay symbolic, those in `fixed` take the given value, the rest are 0.
  static Specialization free_and_fixed(std::size_t terms, const std::set<int>& free,
                                       const std::map<int, std::int64_t>& fixed) {
    Specialization s;
    s.coefficients.resize(terms);
    int next = 0;
    for (std::size_t k = 0; k < terms; ++k) {
      const int idx = static_cast<int>(k);
      const bool is_free = free.contains(idx);
      const auto it = fixed.find(idx);
      if (is_free && it != fixed.end()) throw ParameterError("coefficient " + std::to_string(k + 1) + " is both free and fixed");
      if (is_free) {
        s.coefficients[k] = LinearForm::symbol(next++);
      } else if (it != fixed.end()) {
        s.coefficients[k] = LinearForm(it->second);
      }
    }
    for (int idx : free) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= terms) throw ParameterError("free coefficient out of range");
    }
    for (const auto& [idx, value] : fixed) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= terms) throw ParameterError("fixed coefficient out of range");
    }
    s.parameter_count = next;
    return s;
  }
};

struct GenericRank {
  std::size_t rank = 0;
  int trials = 0;
  std::uint64_t q = 0;
  std::uint64_t seed = 0;
  Rational failure_bound;  // upper bound on P(rank < true rank); 0 when nothing was random

  std::string note() const {
    std::ostringstream out;
    out << "rank " << rank << " over F_q(params), q=" << q << ", " << trials << " trials, seed " << seed
        << "; P(underestimate) <= ";
    if (failure_bound == 0) {
      out << "0";
    } else {
      out.precision(3);
      out << std::scientific << failure_bound.get_d();
    }
    return out.str();
  }
};

/// Max over `trials` uniform specializations of the parameters in F_q of the
/// rank of the instantiated template. Never exceeds the true rank.
inline GenericRank generic_rank(const SymbolicMatrix& t, const Specialization& s, int trials = 5,
                                std::uint64_t seed = default_seed, std::uint64_t q = default_specialization_prime) {
  if (trials < 1) throw ParameterError("trials must be at least 1");
  require_prime(q);
  if (q >= (1ULL << 62)) throw ParameterError("specialization prime must be below 2^62");
  const std::size_t rows = t.row_count();
  const std::size_t cols = t.column_count();
  const std::size_t full = std::min(rows, cols);
  if (q <= 10 * full) throw ParameterError("specialization prime " + std::to_string(q) + " too small for a " +
                                           std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  if (s.coefficients.size() != t.source_terms) {
    throw ParameterError("specialization has " + std::to_string(s.coefficients.size()) + " coefficients, template expects " +
                         std::to_string(t.source_terms));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> uniform(0, q - 1);
  std::vector<std::uint64_t> params(static_cast<std::size_t>(s.parameter_count));
  std::vector<std::uint64_t> coeffs(t.source_terms);
  std::vector<std::uint64_t> dense(rows * cols);

  GenericRank out;
  out.trials = trials;
  out.q = q;
  out.seed = seed;
  const int effective = s.parameter_count == 0 ? 1 : trials;
  for (int trial = 0; trial < effective; ++trial) {
    for (auto& x : params) x = uniform(rng);
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = s.coefficients[k].evaluate_mod(params, q);
    std::fill(dense.begin(), dense.end(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (const auto& [c, form] : t.rows[r]) dense[r * cols + c] = form.evaluate_mod(coeffs, q);
    }
    out.rank = std::max(out.rank, rank_mod_dense(dense, rows, cols, q));
  }

  if (s.parameter_count > 0) {
    Rational per_trial(static_cast<long>(full), 1);
    per_trial /= Rational(Integer(std::to_string(q)));
    Rational bound = 1;
    for (int k = 0; k < trials; ++k) bound *= per_trial;
    out.failure_bound = bound;
  }
  return out;
}

}  // namespace opident
