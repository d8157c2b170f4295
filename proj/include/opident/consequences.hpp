#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opident/error.hpp"
#include "opident/linear_form.hpp"
#include "opident/monomial.hpp"
#include "opident/operad.hpp"
#include "opident/polynomial.hpp"
#include "opident/rational.hpp"

namespace opident {

/// The eight ways of composing an identity R with one p and one L.
enum class ConsequenceFamily : std::uint8_t {
  r_p_then_l,   // (R o_i p) o_j L
  l_of_r_p,     // L o (R o_i p)
  p_r_then_l,   // (p o_i R) o_j L
  l_of_p_r,     // L o (p o_i R)
  r_l_then_p,   // (R o_i L) o_j p
  p_of_r_l,     // p o_j (R o_i L)
  l_r_then_p,   // (L o R) o_i p
  p_of_l_r,     // p o_i (L o R)
};

/// Which composition produced a row. `j` is 0 for families with one subscript.
struct RowDescriptor {
  ConsequenceFamily family;
  int i = 0;
  int j = 0;

  std::string expression() const {
    const auto si = std::to_string(i);
    const auto sj = std::to_string(j);
    switch (family) {
      case ConsequenceFamily::r_p_then_l: return "(R o_" + si + " p) o_" + sj + " L";
      case ConsequenceFamily::l_of_r_p: return "L o (R o_" + si + " p)";
      case ConsequenceFamily::p_r_then_l: return "(p o_" + si + " R) o_" + sj + " L";
      case ConsequenceFamily::l_of_p_r: return "L o (p o_" + si + " R)";
      case ConsequenceFamily::r_l_then_p: return "(R o_" + si + " L) o_" + sj + " p";
      case ConsequenceFamily::p_of_r_l: return "p o_" + sj + " (R o_" + si + " L)";
      case ConsequenceFamily::l_r_then_p: return "(L o R) o_" + si + " p";
      case ConsequenceFamily::p_of_l_r: return "p o_" + si + " (L o R)";
    }
    return {};
  }

  friend bool operator==(const RowDescriptor&, const RowDescriptor&) = default;
};

template <class Coeff>
struct Consequence {
  RowDescriptor origin;
  OperatorPolynomial<Coeff> polynomial;
};

/// A raw composition that coincided with an earlier distinct consequence.
struct CollapsedConsequence {
  RowDescriptor raw;
  std::size_t kept_index;  // index into ConsequenceSet::distinct
};

template <class Coeff>
struct ConsequenceSet {
  std::vector<Consequence<Coeff>> distinct;
  std::vector<CollapsedConsequence> collapsed;  // dedup certificate
  std::size_t raw_count = 0;
};

/// Consequences of R in fixed order: the eight families in declaration order,
/// subscripts ascending (i outer, j inner), first occurrence kept on exact equality.
template <class Coeff>
ConsequenceSet<Coeff> generate_consequences(const OperatorPolynomial<Coeff>& r) {
  if (r.is_zero()) throw DomainError("consequences of the zero polynomial are undefined");
  const int n = r.arity();
  const int d = r.degree();
  const int d_up = d + n - 1;

  using C = Composition;
  ConsequenceSet<Coeff> out;
  auto push = [&](RowDescriptor origin, OperatorPolynomial<Coeff> poly) {
    ++out.raw_count;
    for (std::size_t k = 0; k < out.distinct.size(); ++k) {
      if (out.distinct[k].polynomial == poly) {
        out.collapsed.push_back({origin, k});
        return;
      }
    }
    out.distinct.push_back({origin, std::move(poly)});
  };

  using F = ConsequenceFamily;
  for (int i = 1; i <= d; ++i) {
    const auto rp = compose_polynomial(r, C::with_p_at(i));
    for (int j = 1; j <= d_up; ++j) push({F::r_p_then_l, i, j}, compose_polynomial(rp, C::with_L_at(j)));
  }
  for (int i = 1; i <= d; ++i) {
    push({F::l_of_r_p, i, 0}, compose_polynomial(compose_polynomial(r, C::with_p_at(i)), C::L_around()));
  }
  for (int i = 1; i <= n; ++i) {
    const auto pr = compose_polynomial(r, C::p_around_at(i));
    for (int j = 1; j <= d_up; ++j) push({F::p_r_then_l, i, j}, compose_polynomial(pr, C::with_L_at(j)));
  }
  for (int i = 1; i <= n; ++i) {
    push({F::l_of_p_r, i, 0}, compose_polynomial(compose_polynomial(r, C::p_around_at(i)), C::L_around()));
  }
  for (int i = 1; i <= d; ++i) {
    const auto rl = compose_polynomial(r, C::with_L_at(i));
    for (int j = 1; j <= d; ++j) push({F::r_l_then_p, i, j}, compose_polynomial(rl, C::with_p_at(j)));
  }
  for (int i = 1; i <= d; ++i) {
    const auto rl = compose_polynomial(r, C::with_L_at(i));
    for (int j = 1; j <= n; ++j) push({F::p_of_r_l, i, j}, compose_polynomial(rl, C::p_around_at(j)));
  }
  const auto lr = compose_polynomial(r, C::L_around());
  for (int i = 1; i <= d; ++i) push({F::l_r_then_p, i, 0}, compose_polynomial(lr, C::with_p_at(i)));
  for (int i = 1; i <= n; ++i) push({F::p_of_l_r, i, 0}, compose_polynomial(lr, C::p_around_at(i)));
  return out;
}

/// Matrix of consequences: row i holds the coefficients of consequence S_i over
/// the lex-ordered monomial basis of degree d + n - 1 and multiplicity m + 1.
/// Rows are stored sparse, sorted by column.
template <class Entry>
struct ConsequenceMatrix {
  using SparseRow = std::vector<std::pair<std::size_t, Entry>>;

  int arity = 0;
  int source_degree = 0;
  int source_multiplicity = 0;
  std::size_t source_terms = 0;  // length of the coefficient vector of R
  std::vector<OperatorMonomial> columns;
  std::vector<RowDescriptor> row_origins;
  std::vector<SparseRow> rows;
  std::vector<CollapsedConsequence> collapsed;
  std::size_t raw_count = 0;

  std::size_t row_count() const noexcept { return rows.size(); }
  std::size_t column_count() const noexcept { return columns.size(); }

  Entry at(std::size_t r, std::size_t c) const {
    for (const auto& [col, v] : rows.at(r)) {
      if (col == c) return v;
    }
    return Entry{};
  }
};

using SymbolicMatrix = ConsequenceMatrix<LinearForm>;
using NumericMatrix = ConsequenceMatrix<Rational>;

template <class Coeff>
ConsequenceMatrix<Coeff> build_matrix(const OperatorPolynomial<Coeff>& r) {
  auto set = generate_consequences(r);
  ConsequenceMatrix<Coeff> m;
  m.arity = r.arity();
  m.source_degree = r.degree();
  m.source_multiplicity = r.multiplicity();
  m.source_terms = enumerate_monomials(r.arity(), r.degree(), r.multiplicity()).size();
  m.columns = enumerate_monomials(r.arity(), r.degree() + r.arity() - 1, r.multiplicity() + 1);
  m.collapsed = std::move(set.collapsed);
  m.raw_count = set.raw_count;

  std::vector<std::pair<std::string, std::size_t>> index;
  index.reserve(m.columns.size());
  for (std::size_t c = 0; c < m.columns.size(); ++c) index.emplace_back(m.columns[c].key(), c);
  std::sort(index.begin(), index.end());
  auto column_of = [&](const OperatorMonomial& mono) {
    auto it = std::lower_bound(index.begin(), index.end(), std::pair<std::string, std::size_t>{mono.key(), 0});
    if (it == index.end() || it->first != mono.key()) {
      throw DomainError("consequence monomial " + mono.key() + " missing from the target basis");
    }
    return it->second;
  };

  for (auto& s : set.distinct) {
    typename ConsequenceMatrix<Coeff>::SparseRow row;
    for (const auto& [mono, c] : s.polynomial.terms()) row.emplace_back(column_of(mono), c);
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    m.row_origins.push_back(s.origin);
    m.rows.push_back(std::move(row));
  }
  return m;
}

/// Template for the generic identity of the given shape (symbolic coefficients a1..al).
inline SymbolicMatrix build_template(int arity, int degree, int multiplicity) {
  return build_matrix(generic_polynomial(arity, degree, multiplicity));
}

/// Evaluates every linear-form entry at v. Keeps the template's rows, so the
/// result may contain rows that a direct build would have merged.
inline NumericMatrix instantiate(const SymbolicMatrix& t, std::span<const Rational> v) {
  if (v.size() != t.source_terms) {
    throw ParameterError("coefficient vector has length " + std::to_string(v.size()) + ", template expects " +
                         std::to_string(t.source_terms));
  }
  NumericMatrix m;
  m.arity = t.arity;
  m.source_degree = t.source_degree;
  m.source_multiplicity = t.source_multiplicity;
  m.source_terms = t.source_terms;
  m.columns = t.columns;
  m.row_origins = t.row_origins;
  m.collapsed = t.collapsed;
  m.raw_count = t.raw_count;
  m.rows.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    NumericMatrix::SparseRow out;
    for (const auto& [c, form] : row) {
      auto value = form.evaluate(v);
      if (value != 0) out.emplace_back(c, std::move(value));
    }
    m.rows.push_back(std::move(out));
  }
  return m;
}

inline NumericMatrix instantiate(const SymbolicMatrix& t, std::span<const int> v) {
  std::vector<Rational> q(v.begin(), v.end());
  return instantiate(t, q);
}

/// True when both matrices have the same columns and the same set of distinct rows.
/// This is the right notion of agreement between a template instantiation and a
/// direct build: specializing coefficients can make distinct consequences coincide.
inline bool same_row_set(const NumericMatrix& a, const NumericMatrix& b) {
  if (a.columns.size() != b.columns.size()) return false;
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    if (!(a.columns[c] == b.columns[c])) return false;
  }
  auto contains = [](const NumericMatrix& m, const NumericMatrix::SparseRow& row) {
    for (const auto& r : m.rows) {
      if (r == row) return true;
    }
    return false;
  };
  for (const auto& r : a.rows) {
    if (!contains(b, r)) return false;
  }
  for (const auto& r : b.rows) {
    if (!contains(a, r)) return false;
  }
  return true;
}

/// Template flattened for repeated instantiation into dense integer buffers.
/// Shared read-only between search workers.
class CompiledTemplate {
 public:
  explicit CompiledTemplate(const SymbolicMatrix& t)
      : rows_(t.row_count()), cols_(t.column_count()), terms_(t.source_terms) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      for (const auto& [c, form] : t.rows[r]) {
        if (form.constant() != 0) throw ParameterError("template entries must be linear");
        for (const auto& [sym, coef] : form.terms()) {
          ops_.push_back({static_cast<std::uint32_t>(r * cols_ + c), static_cast<std::uint32_t>(sym),
                          static_cast<std::int32_t>(coef)});
        }
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t source_terms() const noexcept { return terms_; }

  /// Writes the instantiated matrix, row-major with row stride `cols()`, reduced into [0, p).
  template <class Out>
  void fill_mod(std::span<const int> v, std::uint32_t p, std::span<Out> dense, std::span<std::int64_t> scratch) const {
    std::fill(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(rows_ * cols_), 0);
    for (const auto& op : ops_) scratch[op.offset] += static_cast<std::int64_t>(op.coefficient) * v[op.symbol];
    const auto sp = static_cast<std::int64_t>(p);
    for (std::size_t k = 0; k < rows_ * cols_; ++k) {
      auto x = scratch[k] % sp;
      dense[k] = static_cast<Out>(x < 0 ? x + sp : x);
    }
  }

 private:
  struct Op {
    std::uint32_t offset;
    std::uint32_t symbol;
    std::int32_t coefficient;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::size_t terms_;
  std::vector<Op> ops_;
};

}  // namespace opident
