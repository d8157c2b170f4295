#pragma once

// Plain-text exports of matrices of consequences.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "opident/consequences.hpp"
#include "opident/linear_form.hpp"
#include "opident/rational.hpp"

namespace opident {

namespace detail {

inline std::string entry_text(const Rational& q) { return to_string(q); }
inline std::string entry_text(const LinearForm& f) { return f.render(); }

}  // namespace detail

/// Dense CSV, one matrix row per line, zeros written as 0.
template <class Entry>
void write_matrix_csv(std::ostream& out, const ConsequenceMatrix<Entry>& m) {
  for (const auto& row : m.rows) {
    std::vector<std::string> line(m.column_count(), "0");
    for (const auto& [c, v] : row) line[c] = detail::entry_text(v);
    for (std::size_t c = 0; c < line.size(); ++c) out << (c ? "," : "") << line[c];
    out << '\n';
  }
}

/// Space-separated text with "." for zeros.
template <class Entry>
void write_matrix_text(std::ostream& out, const ConsequenceMatrix<Entry>& m) {
  for (const auto& row : m.rows) {
    std::vector<std::string> line(m.column_count(), ".");
    for (const auto& [c, v] : row) line[c] = detail::entry_text(v);
    for (std::size_t c = 0; c < line.size(); ++c) out << (c ? " " : "") << line[c];
    out << '\n';
  }
}

}  // namespace opident
