#pragma once

// Exact rank over prime fields and over the rationals.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opident/consequences.hpp"
#include "opident/error.hpp"
#include "opident/modular.hpp"
#include "opident/rational.hpp"

namespace opident {

/// Dense matrix of exact rationals.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExactMatrix from_integers(const std::vector<std::vector<long>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    ExactMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw ParameterError("ragged matrix rows");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  static ExactMatrix from_consequences(const NumericMatrix& m) {
    ExactMatrix out(m.row_count(), m.column_count());
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      for (const auto& [c, v] : m.rows[r]) out(r, c) = v;
    }
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool is_integral() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q.get_den() == 1; });
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

namespace detail {

template <std::uint32_t P>
struct FixedModulus {
  static constexpr std::uint32_t value() { return P; }
  static std::uint32_t reduce(std::uint32_t x) { return x % P; }
};

struct RuntimeModulus {
  std::uint32_t p;
  std::uint32_t value() const { return p; }
  std::uint32_t reduce(std::uint32_t x) const { return x % p; }
};

// Incremental row echelon form over F_p for p < 2^16: every product of two
// residues plus a residue fits in 32 bits, so each update needs one reduction.
// Rows are processed in order; basis rows are kept normalized (pivot 1).
template <class Mod>
std::size_t echelon_rank(std::span<std::uint32_t> data, std::size_t rows, std::size_t cols, Mod mod,
                         std::span<const std::uint32_t> inverses, std::vector<std::pair<std::uint32_t, std::uint32_t>>& basis) {
  const std::uint32_t p = mod.value();
  const std::size_t full = std::min(rows, cols);
  basis.clear();  // (pivot column, row index), sorted by pivot column
  for (std::size_t r = 0; r < rows && basis.size() < full; ++r) {
    std::uint32_t* row = data.data() + r * cols;
    for (const auto& [pivot, b] : basis) {
      const std::uint32_t f = row[pivot];
      if (f == 0) continue;
      const std::uint32_t g = p - f;
      const std::uint32_t* brow = data.data() + static_cast<std::size_t>(b) * cols;
      for (std::size_t k = pivot; k < cols; ++k) row[k] = mod.reduce(row[k] + g * brow[k]);
    }
    std::size_t lead = 0;
    while (lead < cols && row[lead] == 0) ++lead;
    if (lead == cols) continue;
    const std::uint32_t inv = inverses[row[lead]];
    if (inv != 1) {
      for (std::size_t k = lead; k < cols; ++k) row[k] = mod.reduce(row[k] * inv);
    }
    const auto entry = std::make_pair(static_cast<std::uint32_t>(lead), static_cast<std::uint32_t>(r));
    basis.insert(std::upper_bound(basis.begin(), basis.end(), entry), entry);
  }
  return basis.size();
}

}  // namespace detail

/// Rank engine for one small prime (p < 2^16). Holds the inverse table; the
/// hot search loop reuses one instance per worker.
class SmallPrimeField {
 public:
  explicit SmallPrimeField(std::uint32_t p) : p_(p) {
    if (p >= 65536) throw ParameterError("SmallPrimeField needs p < 65536");
    require_prime(p);
    inverses_.assign(p, 0);
    for (std::uint32_t a = 1; a < p; ++a) inverses_[a] = static_cast<std::uint32_t>(inv_mod(a, p));
  }

  std::uint32_t prime() const noexcept { return p_; }

  /// Rank of a row-major matrix of residues in [0, p); the buffer is overwritten.
  std::size_t rank(std::span<std::uint32_t> data, std::size_t rows, std::size_t cols) const {
    thread_local std::vector<std::pair<std::uint32_t, std::uint32_t>> basis;
    if (p_ == 1009) return detail::echelon_rank(data, rows, cols, detail::FixedModulus<1009>{}, inverses_, basis);
    return detail::echelon_rank(data, rows, cols, detail::RuntimeModulus{p_}, inverses_, basis);
  }

 private:
  std::uint32_t p_;
  std::vector<std::uint32_t> inverses_;
};

/// Rank over F_p of a row-major residue matrix for any prime p < 2^63; overwrites the buffer.
inline std::size_t rank_mod_dense(std::span<std::uint64_t> data, std::size_t rows, std::size_t cols, std::uint64_t p) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && data[pivot * cols + c] == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank) {
      std::swap_ranges(data.begin() + static_cast<std::ptrdiff_t>(pivot * cols),
                       data.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * cols),
                       data.begin() + static_cast<std::ptrdiff_t>(rank * cols));
    }
    std::uint64_t* prow = data.data() + rank * cols;
    const auto inv = inv_mod(prow[c], p);
    for (std::size_t k = c; k < cols; ++k) prow[k] = mul_mod(prow[k], inv, p);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      std::uint64_t* row = data.data() + r * cols;
      const auto f = row[c];
      if (f == 0) continue;
      const auto g = p - f;
      for (std::size_t k = c; k < cols; ++k) {
        row[k] = static_cast<std::uint64_t>((row[k] + static_cast<unsigned __int128>(g) * prow[k]) % p);
      }
    }
    ++rank;
  }
  return rank;
}

/// Rank over F_p. Entries with denominators divisible by p are rejected.
inline std::size_t rank_mod_p(const ExactMatrix& m, std::uint64_t p) {
  require_prime(p);
  if (p >= (1ULL << 63)) throw ParameterError("modulus must be below 2^63");
  std::vector<std::uint64_t> data(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto& q = m(r, c);
      const std::uint64_t num = mpz_fdiv_ui(q.get_num_mpz_t(), p);
      const std::uint64_t den = mpz_fdiv_ui(q.get_den_mpz_t(), p);
      if (den == 0) throw ParameterError("entry " + q.get_str() + " is not reducible mod " + std::to_string(p));
      data[r * m.cols() + c] = mul_mod(num, inv_mod(den, p), p);
    }
  }
  if (p < 65536) {
    std::vector<std::uint32_t> small(data.begin(), data.end());
    return SmallPrimeField(static_cast<std::uint32_t>(p)).rank(small, m.rows(), m.cols());
  }
  return rank_mod_dense(data, m.rows(), m.cols(), p);
}

/// Rank over Q by fraction-free (Bareiss) elimination on the row-scaled integer matrix.
inline std::size_t rank_rational(const ExactMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<Integer> a(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    Integer scale = 1;
    for (std::size_t c = 0; c < cols; ++c) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), m(r, c).get_den_mpz_t());
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& q = m(r, c);
      a[r * cols + c] = q.get_num() * (scale / q.get_den());
    }
  }
  std::size_t rank = 0;
  Integer prev = 1;
  Integer t;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank) {
      for (std::size_t k = 0; k < cols; ++k) std::swap(a[pivot * cols + k], a[rank * cols + k]);
    }
    const Integer& piv = a[rank * cols + c];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      Integer& lead = a[r * cols + c];
      for (std::size_t k = c + 1; k < cols; ++k) {
        Integer& x = a[r * cols + k];
        t = piv * x - lead * a[rank * cols + k];
        mpz_divexact(x.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      lead = 0;
    }
    prev = piv;
    ++rank;
  }
  return rank;
}

struct RankComparison {
  std::size_t modular = 0;
  std::size_t rational = 0;
  bool holds() const noexcept { return modular <= rational; }
  bool equal() const noexcept { return modular == rational; }
};

/// Both ranks of an integer matrix; the modular rank never exceeds the
/// rational one since a minor vanishing over Q vanishes mod p.
inline RankComparison rank_mod_leq_rational(const ExactMatrix& m, std::uint64_t p) {
  if (!m.is_integral()) throw ParameterError("rank_mod_leq_rational needs an integer matrix");
  return {rank_mod_p(m, p), rank_rational(m)};
}

}  // namespace opident
