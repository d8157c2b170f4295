#pragma once

// Independent oracles shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "opident/rational.hpp"

namespace opident::oracle {

using IntMatrix = std::vector<std::vector<long>>;

// Laplace expansion along the first row.
inline opident::Integer determinant(const IntMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  opident::Integer det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (a[0][c] == 0) continue;
    IntMatrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(a[r][k]);
      }
      minor.push_back(row);
    }
    const opident::Integer term = opident::Integer(a[0][c]) * determinant(minor);
    det += c % 2 ? -term : term;
  }
  return det;
}

inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Rank as the largest size of a nonzero minor.
inline std::size_t minor_rank(const IntMatrix& a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  for (std::size_t k = std::min(rows, cols); k > 0; --k) {
    for (const auto& rs : subsets(rows, k)) {
      for (const auto& cs : subsets(cols, k)) {
        IntMatrix sub;
        for (auto r : rs) {
          std::vector<long> row;
          for (auto c : cs) row.push_back(a[r][c]);
          sub.push_back(row);
        }
        if (determinant(sub) != 0) return k;
      }
    }
  }
  return 0;
}

inline IntMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, int spread) {
  std::uniform_int_distribution<int> entry(-spread, spread);
  std::uniform_int_distribution<std::size_t> rank_dist(0, std::min(rows, cols));
  const auto target = rank_dist(rng);
  // Product of rows x target and target x cols factors; often rank-deficient.
  IntMatrix left(rows, std::vector<long>(target));
  IntMatrix right(target, std::vector<long>(cols));
  for (auto& r : left) {
    for (auto& x : r) x = entry(rng);
  }
  for (auto& r : right) {
    for (auto& x : r) x = entry(rng);
  }
  IntMatrix out(rows, std::vector<long>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t k = 0; k < target; ++k) out[i][j] += left[i][k] * right[k][j];
    }
  }
  return out;
}

}  // namespace opident::oracle
