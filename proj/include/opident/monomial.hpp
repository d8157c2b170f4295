#pragma once

// Operator monomials over one n-ary associative product p and one unary
// operator L, stored in flattened normal form.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "opident/error.hpp"
#include "opident/rational.hpp"

namespace opident {

enum class NodeKind : std::uint8_t { leaf, product, op };

/// Tree node of an operator monomial. Product nodes never have a product
/// child; the factory functions below maintain that.
struct MonomialNode {
  NodeKind kind = NodeKind::leaf;
  std::vector<MonomialNode> children;

  static MonomialNode leaf() { return {}; }

  /// Product of the given factors, splicing factors that are themselves products.
  static MonomialNode product(std::vector<MonomialNode> factors) {
    MonomialNode node;
    node.kind = NodeKind::product;
    for (auto& f : factors) {
      if (f.kind == NodeKind::product) {
        for (auto& g : f.children) node.children.push_back(std::move(g));
      } else {
        node.children.push_back(std::move(f));
      }
    }
    return node;
  }

  /// A single item stays as is; two or more become a flattened product.
  static MonomialNode from_items(std::vector<MonomialNode> items) {
    if (items.size() == 1) return std::move(items.front());
    return product(std::move(items));
  }

  static MonomialNode apply(MonomialNode inner) {
    MonomialNode node;
    node.kind = NodeKind::op;
    node.children.push_back(std::move(inner));
    return node;
  }

  /// Top-level factors: the children of a product root, otherwise the node itself.
  std::vector<MonomialNode> items() const {
    if (kind == NodeKind::product) return children;
    return {*this};
  }

  friend bool operator==(const MonomialNode&, const MonomialNode&) = default;
};

/// Balanced word over '(' and ')'.
class DyckWord {
 public:
  DyckWord() = default;

  explicit DyckWord(std::string symbols) : symbols_(std::move(symbols)) {
    long depth = 0;
    for (char c : symbols_) {
      if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (--depth < 0) throw ParameterError("unbalanced Dyck word: " + symbols_);
      } else {
        throw ParameterError("Dyck word contains a symbol other than parentheses");
      }
    }
    if (depth != 0) throw ParameterError("unbalanced Dyck word: " + symbols_);
  }

  const std::string& str() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }

  // '(' sorts before ')' in ASCII, which is exactly the lex order on words of equal length.
  friend std::strong_ordering operator<=>(const DyckWord& a, const DyckWord& b) {
    return a.symbols_ <=> b.symbols_;
  }
  friend bool operator==(const DyckWord&, const DyckWord&) = default;

 private:
  std::string symbols_;
};

namespace detail {

inline void render_node(const MonomialNode& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::leaf:
      out += '*';
      break;
    case NodeKind::product:
      for (const auto& c : node.children) render_node(c, out);
      break;
    case NodeKind::op:
      out += "L(";
      render_node(node.children.front(), out);
      out += ')';
      break;
  }
}

inline void render_power_node(const MonomialNode& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::leaf:
      out += '*';
      break;
    case NodeKind::product:
      for (const auto& c : node.children) render_power_node(c, out);
      break;
    case NodeKind::op: {
      int power = 0;
      const MonomialNode* inner = &node;
      while (inner->kind == NodeKind::op) {
        ++power;
        inner = &inner->children.front();
      }
      out += power == 1 ? "L(" : "L^" + std::to_string(power) + "(";
      render_power_node(*inner, out);
      out += ')';
      break;
    }
  }
}

inline void dyck_node(const MonomialNode& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::leaf:
      out += "()";
      break;
    case NodeKind::product:
      for (const auto& c : node.children) dyck_node(c, out);
      break;
    case NodeKind::op:
      out += '(';
      dyck_node(node.children.front(), out);
      out += ')';
      break;
  }
}

inline void check_node(const MonomialNode& node, int arity, bool parent_is_product,
                       int& leaves, int& ops) {
  switch (node.kind) {
    case NodeKind::leaf:
      if (!node.children.empty()) throw ParameterError("leaf node with children");
      ++leaves;
      break;
    case NodeKind::product: {
      const auto count = static_cast<int>(node.children.size());
      if (parent_is_product) throw ParameterError("product directly under a product (not flattened)");
      if (count < arity || (count - 1) % (arity - 1) != 0) {
        throw ParameterError("product with " + std::to_string(count) +
                             " factors is not valid for arity " + std::to_string(arity));
      }
      for (const auto& c : node.children) check_node(c, arity, true, leaves, ops);
      break;
    }
    case NodeKind::op:
      if (node.children.size() != 1) throw ParameterError("operator node must have one child");
      ++ops;
      check_node(node.children.front(), arity, false, leaves, ops);
      break;
  }
}

}  // namespace detail

/// An n-ary operator monomial in flattened normal form. Leaves are positional;
/// immutable once built.
class OperatorMonomial {
 public:
  OperatorMonomial(int arity, MonomialNode root) : arity_(arity), root_(std::move(root)) {
    if (arity_ < 2) throw ParameterError("arity must be at least 2");
    detail::check_node(root_, arity_, false, degree_, multiplicity_);
    detail::render_node(root_, key_);
    std::string word;
    word.reserve(2 * static_cast<std::size_t>(degree_ + multiplicity_));
    detail::dyck_node(root_, word);
    dyck_ = DyckWord(std::move(word));
  }

  static OperatorMonomial leaf(int arity) { return {arity, MonomialNode::leaf()}; }

  /// Parses the flat rendering: `*` (also `{*}`, `x`) for a leaf,
  /// juxtaposition for the product, `L(...)` or `L^k(...)` for the operator.
  static OperatorMonomial parse(int arity, std::string_view text);

  int arity() const noexcept { return arity_; }
  int degree() const noexcept { return degree_; }
  int multiplicity() const noexcept { return multiplicity_; }
  /// Total number of operations: operator applications plus n-ary products.
  int weight() const noexcept { return multiplicity_ + (degree_ - 1) / (arity_ - 1); }

  const MonomialNode& root() const noexcept { return root_; }
  const DyckWord& dyck() const noexcept { return dyck_; }

  /// Canonical key; equal to the unpowered rendering, e.g. `L(L(*)**)`.
  const std::string& key() const noexcept { return key_; }
  const std::string& render() const noexcept { return key_; }

  /// Rendering with iterated operators collapsed, e.g. `L^2(*)**`.
  std::string render_power() const {
    std::string out;
    detail::render_power_node(root_, out);
    return out;
  }

  friend bool operator==(const OperatorMonomial& a, const OperatorMonomial& b) {
    return a.arity_ == b.arity_ && a.key_ == b.key_;
  }

 private:
  int arity_;
  MonomialNode root_;
  int degree_ = 0;
  int multiplicity_ = 0;
  std::string key_;
  DyckWord dyck_;
};

struct OperatorMonomialHash {
  std::size_t operator()(const OperatorMonomial& m) const noexcept {
    return std::hash<std::string>{}(m.key()) ^ static_cast<std::size_t>(m.arity());
  }
};

/// Strict weak order used for containers: lex order on Dyck words, then key.
/// The key tie-break only matters across different (degree, multiplicity).
struct MonomialLexLess {
  bool operator()(const OperatorMonomial& a, const OperatorMonomial& b) const {
    if (a.arity() != b.arity()) return a.arity() < b.arity();
    if (auto c = a.dyck() <=> b.dyck(); c != 0) return c < 0;
    return a.key() < b.key();
  }
};

inline DyckWord to_dyck(const OperatorMonomial& m) { return m.dyck(); }

/// Lex order via Dyck words. Both monomials must share arity, degree and multiplicity.
inline std::strong_ordering lex_compare(const OperatorMonomial& a, const OperatorMonomial& b) {
  if (a.arity() != b.arity() || a.degree() != b.degree() ||
      a.multiplicity() != b.multiplicity()) {
    throw ComparisonDomainError("lex_compare needs equal arity, degree and multiplicity (" +
                                a.key() + " vs " + b.key() + ")");
  }
  return a.dyck() <=> b.dyck();
}

inline void check_degree(int arity, int degree) {
  if (arity < 2) throw ParameterError("arity must be at least 2");
  if (degree < 1 || (degree - 1) % (arity - 1) != 0) {
    throw ParameterError("degree " + std::to_string(degree) + " is not 1 mod " +
                         std::to_string(arity - 1));
  }
}

inline int weight_of(int arity, int degree, int multiplicity) {
  check_degree(arity, degree);
  return multiplicity + (degree - 1) / (arity - 1);
}

/// All monomials of the given arity, degree and multiplicity, in lex order.
/// Layered construction: each multiplicity-q monomial wraps a contiguous run of
/// top-level factors of a multiplicity-(q-1) monomial in L, where the run length
/// is 1 mod (n-1). Duplicates are removed by canonical key.
inline std::vector<OperatorMonomial> enumerate_monomials(int arity, int degree, int multiplicity) {
  check_degree(arity, degree);
  if (multiplicity < 0) throw ParameterError("multiplicity must be non-negative");

  std::vector<MonomialNode> layer;
  layer.push_back(MonomialNode::from_items(
      std::vector<MonomialNode>(static_cast<std::size_t>(degree), MonomialNode::leaf())));

  for (int q = 1; q <= multiplicity; ++q) {
    std::vector<MonomialNode> next;
    std::unordered_set<std::string> seen;
    for (const auto& m : layer) {
      const auto items = m.items();
      const auto k = items.size();
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
          if ((j - i) % static_cast<std::size_t>(arity - 1) != 0) continue;
          std::vector<MonomialNode> wrapped(items.begin() + static_cast<std::ptrdiff_t>(i),
                                            items.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          std::vector<MonomialNode> out(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(i));
          out.push_back(MonomialNode::apply(MonomialNode::from_items(std::move(wrapped))));
          out.insert(out.end(), items.begin() + static_cast<std::ptrdiff_t>(j) + 1, items.end());
          auto node = MonomialNode::from_items(std::move(out));
          std::string key;
          detail::render_node(node, key);
          if (seen.insert(std::move(key)).second) next.push_back(std::move(node));
        }
      }
    }
    layer = std::move(next);
  }

  std::vector<OperatorMonomial> result;
  result.reserve(layer.size());
  for (auto& node : layer) result.emplace_back(arity, std::move(node));
  std::sort(result.begin(), result.end(),
            [](const auto& a, const auto& b) { return a.dyck() < b.dyck(); });
  return result;
}

struct MonomialCount {
  Integer value;
  /// Set when multiplicity exceeds weight; value is then 0 by convention.
  bool degenerate = false;
};

/// Generalized Narayana number N_n(w, m): the number of n-ary operator
/// monomials of weight w and multiplicity m,
///   N_n(w,m) = C(w+1, m+1) * C(w + (w-m)(n-2) + 1, m) / (w+1).
inline MonomialCount count_monomials(int arity, int weight, int multiplicity) {
  if (arity < 2) throw ParameterError("arity must be at least 2");
  if (weight < 0 || multiplicity < 0) throw ParameterError("weight and multiplicity must be non-negative");
  if (multiplicity > weight) return {Integer(0), true};

  const auto w = static_cast<unsigned long>(weight);
  const auto m = static_cast<unsigned long>(multiplicity);
  const auto n = static_cast<unsigned long>(arity);
  Integer a, b;
  mpz_bin_uiui(a.get_mpz_t(), w + 1, m + 1);
  mpz_bin_uiui(b.get_mpz_t(), w + (w - m) * (n - 2) + 1, m);
  Integer product = a * b;
  Integer quotient;
  mpz_divexact_ui(quotient.get_mpz_t(), product.get_mpz_t(), w + 1);
  return {quotient, false};
}

namespace detail {

class MonomialParser {
 public:
  explicit MonomialParser(std::string_view text) : text_(text) {}

  MonomialNode parse_all() {
    auto items = parse_items();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    if (items.empty()) fail("empty monomial");
    return MonomialNode::from_items(std::move(items));
  }

 private:
  std::vector<MonomialNode> parse_items() {
    std::vector<MonomialNode> items;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] == ')') return items;
      items.push_back(parse_item());
    }
  }

  MonomialNode parse_item() {
    const char c = text_[pos_];
    if (c == '*' || c == 'x') {
      ++pos_;
      return MonomialNode::leaf();
    }
    if (c == '{') {
      if (text_.substr(pos_, 3) != "{*}") fail("expected {*}");
      pos_ += 3;
      return MonomialNode::leaf();
    }
    if (c == 'L') {
      ++pos_;
      int power = 1;
      if (pos_ < text_.size() && text_[pos_] == '^') {
        ++pos_;
        power = 0;
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
          power = power * 10 + (text_[pos_++] - '0');
        }
        if (pos_ == start || power < 1) fail("bad operator power");
      }
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '(' after L");
      ++pos_;
      auto inner = parse_items();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("missing ')'");
      ++pos_;
      if (inner.empty()) fail("empty operator argument");
      auto node = MonomialNode::from_items(std::move(inner));
      for (int k = 0; k < power; ++k) node = MonomialNode::apply(std::move(node));
      return node;
    }
    fail("unexpected character");
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline OperatorMonomial OperatorMonomial::parse(int arity, std::string_view text) {
  return {arity, detail::MonomialParser(text).parse_all()};
}

}  // namespace opident
