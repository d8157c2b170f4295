#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opident/error.hpp"
#include "opident/rational.hpp"

namespace opident {

/// Integer affine form c0 + sum_k c_k * x_k over symbols numbered from 0.
/// Symbolic matrix entries use it with c0 = 0; family templates use the constant.
class LinearForm {
 public:
  using Term = std::pair<int, std::int64_t>;  // (symbol, coefficient)

  LinearForm() = default;
  explicit LinearForm(std::int64_t constant) : constant_(constant) {}

  static LinearForm symbol(int index, std::int64_t coefficient = 1) {
    LinearForm f;
    if (coefficient != 0) f.terms_.emplace_back(index, coefficient);
    return f;
  }

  std::int64_t constant() const noexcept { return constant_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  std::int64_t coefficient(int symbol) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), Term{symbol, 0},
                               [](const Term& a, const Term& b) { return a.first < b.first; });
    return it != terms_.end() && it->first == symbol ? it->second : 0;
  }

  bool is_zero() const noexcept { return constant_ == 0 && terms_.empty(); }
  bool is_constant() const noexcept { return terms_.empty(); }

  LinearForm& operator+=(const LinearForm& other) {
    constant_ += other.constant_;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + other.terms_.size());
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
      if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        merged.push_back(*a++);
      } else if (a == terms_.end() || b->first < a->first) {
        merged.push_back(*b++);
      } else {
        if (auto c = a->second + b->second; c != 0) merged.emplace_back(a->first, c);
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  LinearForm& operator*=(std::int64_t scalar) {
    if (scalar == 0) {
      constant_ = 0;
      terms_.clear();
      return *this;
    }
    constant_ *= scalar;
    for (auto& t : terms_) t.second *= scalar;
    return *this;
  }

  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, LinearForm b) { return a += (b *= -1); }
  friend LinearForm operator*(std::int64_t s, LinearForm f) { return f *= s; }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;

  Rational evaluate(std::span<const Rational> values) const {
    Rational sum(static_cast<long>(constant_));
    for (const auto& [s, c] : terms_) {
      if (static_cast<std::size_t>(s) >= values.size()) throw ParameterError("symbol out of range");
      sum += Rational(static_cast<long>(c)) * values[static_cast<std::size_t>(s)];
    }
    return sum;
  }

  /// Value modulo p with symbol values already reduced to [0, p).
  std::uint64_t evaluate_mod(std::span<const std::uint64_t> values, std::uint64_t p) const {
    auto reduce = [p](std::int64_t c) {
      auto r = c % static_cast<std::int64_t>(p);
      return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
    };
    std::uint64_t sum = reduce(constant_);
    for (const auto& [s, c] : terms_) {
      const auto prod = static_cast<unsigned __int128>(reduce(c)) * values[static_cast<std::size_t>(s)];
      sum = static_cast<std::uint64_t>((sum + prod) % p);
    }
    return sum;
  }

  /// Renders with symbols named `prefix` + (index + 1): "a4+a7", "-a5-1", "2a3", "0".
  std::string render(std::string_view prefix = "a") const {
    std::string out;
    for (const auto& [s, c] : terms_) {
      if (c < 0) {
        out += '-';
      } else if (!out.empty()) {
        out += '+';
      }
      const auto mag = c < 0 ? -c : c;
      if (mag != 1) out += std::to_string(mag);
      out += prefix;
      out += std::to_string(s + 1);
    }
    if (constant_ != 0 || out.empty()) {
      if (constant_ >= 0 && !out.empty()) out += '+';
      out += std::to_string(constant_);
    }
    return out;
  }

  /// Inverse of render(): integer-coefficient affine forms in symbols named
  /// `prefix`1 .. `prefix`N, e.g. "0", "-a4", "-a5-1", "2a3+a7-2".
  static LinearForm parse(std::string_view text, std::string_view prefix = "a") {
    LinearForm out;
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void {
      throw ParseError(msg + " in linear form '" + std::string(text) + "'");
    };
    auto skip = [&] {
      while (pos < text.size() && text[pos] == ' ') ++pos;
    };
    skip();
    if (pos == text.size()) fail("empty expression");
    bool first = true;
    while (pos < text.size()) {
      std::int64_t sign = 1;
      if (text[pos] == '+' || text[pos] == '-') {
        if (text[pos] == '-') sign = -1;
        ++pos;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      std::int64_t magnitude = 0;
      bool has_digits = false;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        magnitude = magnitude * 10 + (text[pos++] - '0');
        has_digits = true;
      }
      skip();
      if (pos < text.size() && text.substr(pos, prefix.size()) == prefix) {
        pos += prefix.size();
        int index = 0;
        bool has_index = false;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
          index = index * 10 + (text[pos++] - '0');
          has_index = true;
        }
        if (!has_index || index < 1) fail("bad symbol index");
        if (pos < text.size() && text[pos] == '*') fail("products of symbols are not linear");
        out += symbol(index - 1, sign * (has_digits ? magnitude : 1));
      } else {
        if (!has_digits) fail("expected a number or a symbol");
        out.constant_ += sign * magnitude;
      }
      skip();
    }
    return out;
  }

 private:
  std::int64_t constant_ = 0;
  std::vector<Term> terms_;  // sorted by symbol, no zero coefficients
};

}  // namespace opident
