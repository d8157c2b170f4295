#pragma once

// Parametric solution families and coverage of search results by them.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "opident/consequences.hpp"
#include "opident/error.hpp"
#include "opident/generic_rank.hpp"
#include "opident/linear_form.hpp"
#include "opident/rational.hpp"
#include "opident/search.hpp"

namespace opident {

/// Coefficient vector whose entries are integer affine forms in a few parameters.
/// Parameters keep the symbol of the coefficient they are named after (a7 is symbol 6).
struct FamilyTemplate {
  std::string label;
  std::vector<LinearForm> entries;
  std::size_t generic_rank = 0;

  /// Distinct parameter symbols, ascending.
  std::vector<int> parameters() const {
    std::set<int> used;
    for (const auto& e : entries) {
      for (const auto& [s, c] : e.terms()) used.insert(s);
    }
    return {used.begin(), used.end()};
  }
  std::size_t parameter_count() const { return parameters().size(); }

  /// Entries at the given parameter values (ordered as parameters()).
  std::vector<Rational> instantiate(std::span<const Rational> values) const {
    const auto params = parameters();
    if (values.size() != params.size()) throw ParameterError("family " + label + " needs " + std::to_string(params.size()) + " parameter values");
    std::vector<Rational> by_symbol;
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (by_symbol.size() <= static_cast<std::size_t>(params[k])) by_symbol.resize(static_cast<std::size_t>(params[k]) + 1);
      by_symbol[static_cast<std::size_t>(params[k])] = values[k];
    }
    std::vector<Rational> out;
    for (const auto& e : entries) out.push_back(e.evaluate(by_symbol));
    return out;
  }

  /// Entries as affine forms in parameters renumbered 0..P-1.
  Specialization specialization() const {
    const auto params = parameters();
    Specialization s;
    s.parameter_count = static_cast<int>(params.size());
    for (const auto& e : entries) {
      LinearForm f(e.constant());
      for (const auto& [sym, c] : e.terms()) {
        const auto pos = std::lower_bound(params.begin(), params.end(), sym) - params.begin();
        f += LinearForm::symbol(static_cast<int>(pos), c);
      }
      s.coefficients.push_back(std::move(f));
    }
    return s;
  }
};

/// One template per line: {"label": ..., "entries": ["0", "-a5-1", ...], "generic_rank": N}.
inline std::vector<FamilyTemplate> read_family_templates(std::istream& in) {
  std::vector<FamilyTemplate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      FamilyTemplate t;
      t.label = j.at("label").get<std::string>();
      for (const auto& e : j.at("entries")) t.entries.push_back(LinearForm::parse(e.get<std::string>()));
      const auto rank = j.at("generic_rank").get<long>();
      if (rank < 0) throw ParseError("negative generic_rank", line_no);
      t.generic_rank = static_cast<std::size_t>(rank);
      if (t.entries.empty()) throw ParseError("template has no entries", line_no);
      if (t.parameter_count() > 2) throw ParseError("templates use at most two parameters", line_no);
      out.push_back(std::move(t));
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

/// Closed interval for family parameters. `integral` restricts to integers.
struct ParameterRange {
  Rational lo = -2;
  Rational hi = 2;
  bool integral = false;

  bool contains(const Rational& x) const { return lo <= x && x <= hi && (!integral || x.get_den() == 1); }
};

struct FamilyMatch {
  std::vector<Rational> parameters;  // ordered as FamilyTemplate::parameters()
  Rational scalar;                   // v = scalar * template(parameters)
};

namespace detail {

// Solves A x = b over Q (A given by columns). Returns a particular solution
// and whether it is unique; nullopt when inconsistent.
struct LinearSolution {
  std::vector<Rational> x;
  bool unique = false;
};

inline std::optional<LinearSolution> solve_columns(const std::vector<std::vector<Rational>>& columns,
                                                   const std::vector<Rational>& b) {
  const std::size_t rows = b.size();
  const std::size_t cols = columns.size();
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) a[r][c] = columns[c][r];
    a[r][cols] = b[r];
  }
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    const Rational inv = 1 / a[rank][c];
    for (auto& x : a[rank]) x *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t k = c; k <= cols; ++k) a[r][k] -= f * a[rank][k];
    }
    pivots.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < rows; ++r) {
    if (a[r][cols] != 0) return std::nullopt;
  }
  LinearSolution out;
  out.x.assign(cols, 0);
  for (std::size_t k = 0; k < pivots.size(); ++k) out.x[pivots[k]] = a[k][cols];
  out.unique = rank == cols;
  return out;
}

inline bool proportional_match(const FamilyTemplate& t, std::span<const Rational> v, std::span<const Rational> params,
                               Rational& scalar) {
  const auto entries = t.instantiate(params);
  std::optional<Rational> lambda;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (entries[k] == 0) {
      if (v[k] != 0) return false;
      continue;
    }
    const Rational ratio = v[k] / entries[k];
    if (ratio == 0 || (lambda && *lambda != ratio)) return false;
    lambda = ratio;
  }
  if (!lambda) return false;
  scalar = *lambda;
  return true;
}

}  // namespace detail

/// Finds parameters in `range` and a nonzero scalar with v = scalar * t(parameters).
/// v = l*c0 + sum m_k*c_k is linear in (l, m); parameters are m_k / l.
inline std::optional<FamilyMatch> matches(const FamilyTemplate& t, std::span<const int> v,
                                          const ParameterRange& range = {}) {
  if (v.size() != t.entries.size()) {
    throw ParameterError("vector length " + std::to_string(v.size()) + " does not match family " + t.label);
  }
  const std::vector<Rational> target(v.begin(), v.end());
  if (std::all_of(target.begin(), target.end(), [](const Rational& x) { return x == 0; })) return std::nullopt;
  const auto params = t.parameters();

  std::vector<std::vector<Rational>> columns(params.size() + 1);
  for (const auto& e : t.entries) {
    columns[0].emplace_back(static_cast<long>(e.constant()));
    for (std::size_t k = 0; k < params.size(); ++k) columns[k + 1].emplace_back(static_cast<long>(e.coefficient(params[k])));
  }
  const auto solution = detail::solve_columns(columns, target);
  if (!solution) return std::nullopt;

  if (solution->unique) {
    const Rational& lambda = solution->x[0];
    if (lambda == 0) return std::nullopt;
    FamilyMatch m;
    m.scalar = lambda;
    for (std::size_t k = 0; k < params.size(); ++k) {
      m.parameters.push_back(solution->x[k + 1] / lambda);
      if (!range.contains(m.parameters.back())) return std::nullopt;
    }
    return m;
  }

  // Dependent columns: search integer parameter values in the range.
  Integer lo_z;
  Integer hi_z;
  mpz_cdiv_q(lo_z.get_mpz_t(), range.lo.get_num_mpz_t(), range.lo.get_den_mpz_t());
  mpz_fdiv_q(hi_z.get_mpz_t(), range.hi.get_num_mpz_t(), range.hi.get_den_mpz_t());
  const long lo = lo_z.get_si();
  const long hi = hi_z.get_si();
  std::vector<Rational> values(params.size());
  std::optional<FamilyMatch> found;
  auto recurse = [&](auto& self, std::size_t k) -> void {
    if (found) return;
    if (k == params.size()) {
      Rational scalar;
      if (detail::proportional_match(t, target, values, scalar)) found = FamilyMatch{values, scalar};
      return;
    }
    for (long x = lo; x <= hi && !found; ++x) {
      values[k] = x;
      self(self, k + 1);
    }
  };
  recurse(recurse, 0);
  return found;
}

struct CoverageReport {
  std::vector<std::vector<std::size_t>> matches;  // per solution: indices of matching templates
  std::vector<std::size_t> unmatched;             // solution indices
  std::vector<std::size_t> member_counts;         // per template
  std::vector<std::size_t> empty_templates;       // template indices with no member

  bool complete() const noexcept { return unmatched.empty(); }
};

inline CoverageReport classify_solutions(const std::vector<SolutionRecord>& solutions,
                                         const std::vector<FamilyTemplate>& templates,
                                         const ParameterRange& range = {}) {
  CoverageReport report;
  report.member_counts.assign(templates.size(), 0);
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    std::vector<std::size_t> hits;
    for (std::size_t t = 0; t < templates.size(); ++t) {
      if (templates[t].entries.size() != solutions[s].vector.size()) continue;
      if (matches(templates[t], solutions[s].vector, range)) {
        hits.push_back(t);
        ++report.member_counts[t];
      }
    }
    if (hits.empty()) report.unmatched.push_back(s);
    report.matches.push_back(std::move(hits));
  }
  if (!solutions.empty()) {
    for (std::size_t t = 0; t < templates.size(); ++t) {
      if (report.member_counts[t] == 0) report.empty_templates.push_back(t);
    }
  }
  return report;
}

/// Rank of the family's matrix of consequences over the field of rational
/// functions in its parameters (constants fixed).
inline GenericRank verify_family_generic_rank(const FamilyTemplate& t, const SymbolicMatrix& consequences, int trials = 5,
                                              std::uint64_t seed = default_seed,
                                              std::uint64_t q = default_specialization_prime) {
  if (t.entries.size() != consequences.source_terms) {
    throw ParameterError("family " + t.label + " has " + std::to_string(t.entries.size()) + " entries, template expects " +
                         std::to_string(consequences.source_terms));
  }
  return generic_rank(consequences, t.specialization(), trials, seed, q);
}

}  // namespace opident
