#pragma once

// Exhaustive search for coefficient vectors whose matrix of consequences has
// submaximal rank.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <istream>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "opident/consequences.hpp"
#include "opident/error.hpp"
#include "opident/generic_rank.hpp"
#include "opident/linalg.hpp"

namespace opident {

using CoefficientVector = std::vector<int>;

/// First nonzero entry positive; false for the zero vector.
inline bool is_leading_positive(std::span<const int> v) {
  for (int x : v) {
    if (x != 0) return x > 0;
  }
  return false;
}

inline int content_gcd(std::span<const int> v) {
  int g = 0;
  for (int x : v) g = std::gcd(g, x);
  return g;
}

struct SolutionRecord {
  CoefficientVector vector;
  std::optional<std::size_t> rank_mod;       // absent in rational-only mode
  std::optional<std::size_t> rank_rational;  // absent without rational confirmation
  std::uint32_t prime = 0;

  /// Confirmed rank: rational when computed, modular otherwise.
  std::size_t rank() const { return rank_rational ? *rank_rational : rank_mod.value(); }

  friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

enum class GcdPlacement {
  on_emit,    // screen every leading-positive vector, drop gcd > 1 from the output
  prefilter,  // skip gcd > 1 vectors before screening
};

struct SearchProgress {
  std::uint64_t processed = 0;
  std::uint64_t total = 0;
  double seconds = 0;

  double rate() const { return seconds > 0 ? static_cast<double>(processed) / seconds : 0; }
  double eta() const {
    const double r = rate();
    return r > 0 ? static_cast<double>(total - processed) / r : 0;
  }
};

struct SearchConfig {
  std::vector<int> coefficient_set{-2, -1, 0, 1, 2};
  bool gcd_filter = true;
  GcdPlacement gcd_placement = GcdPlacement::on_emit;
  std::uint32_t screening_prime = 1009;
  bool rational_confirmation = true;
  bool rational_only = false;  // exact rank for every candidate, no modular screen
  unsigned threads = 0;        // 0: OPIDENT_THREADS, else hardware concurrency
  std::optional<std::size_t> maximal_rank;  // default: generic rank of the template
  std::function<void(const SearchProgress&)> progress;
  std::chrono::milliseconds progress_interval{1000};
};

namespace detail {

inline std::vector<int> normalized_set(const std::vector<int>& set) {
  std::vector<int> s(set);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.empty() || s.back() <= 0) throw ParameterError("coefficient set needs at least one positive value");
  return s;
}

inline std::uint64_t space_size(std::size_t base, std::size_t length) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < length; ++k) {
    if (total > (std::uint64_t{1} << 62) / base) throw ParameterError("search space too large");
    total *= base;
  }
  return total;
}

// Walks the full product space over the sorted set in numeric lex order,
// indices [begin, end), calling fn on leading-positive tuples.
template <class Fn>
void walk_space(const std::vector<int>& set, std::size_t length, std::uint64_t begin, std::uint64_t end, Fn&& fn) {
  const std::size_t base = set.size();
  std::vector<std::size_t> digits(length);
  auto rest = begin;
  for (std::size_t k = length; k-- > 0;) {
    digits[k] = static_cast<std::size_t>(rest % base);
    rest /= base;
  }
  CoefficientVector v(length);
  for (std::size_t k = 0; k < length; ++k) v[k] = set[digits[k]];
  for (auto index = begin; index < end; ++index) {
    if (is_leading_positive(v)) fn(static_cast<const CoefficientVector&>(v));
    for (std::size_t k = length; k-- > 0;) {
      if (++digits[k] < base) {
        v[k] = set[digits[k]];
        break;
      }
      digits[k] = 0;
      v[k] = set[0];
    }
  }
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  if (const char* env = std::getenv("OPIDENT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::size_t exact_rank_at(const SymbolicMatrix& t, std::span<const int> v) {
  return rank_rational(ExactMatrix::from_consequences(instantiate(t, v)));
}

}  // namespace detail

struct CandidateCount {
  std::uint64_t leading_positive = 0;
  std::uint64_t gcd_one = 0;  // leading positive and relatively prime
};

inline CandidateCount count_candidates(const std::vector<int>& coefficient_set, std::size_t length) {
  if (length == 0) throw ParameterError("vector length must be positive");
  const auto set = detail::normalized_set(coefficient_set);
  CandidateCount out;
  detail::walk_space(set, length, 0, detail::space_size(set.size(), length), [&](const CoefficientVector& v) {
    ++out.leading_positive;
    if (content_gcd(v) == 1) ++out.gcd_one;
  });
  return out;
}

/// Calls fn on every leading-positive vector (gcd 1 only when `gcd_one_only`) in lex order.
template <class Fn>
void for_each_candidate(const std::vector<int>& coefficient_set, std::size_t length, bool gcd_one_only, Fn&& fn) {
  if (length == 0) throw ParameterError("vector length must be positive");
  const auto set = detail::normalized_set(coefficient_set);
  detail::walk_space(set, length, 0, detail::space_size(set.size(), length), [&](const CoefficientVector& v) {
    if (!gcd_one_only || content_gcd(v) == 1) fn(v);
  });
}

struct SearchResult {
  std::vector<SolutionRecord> solutions;  // sorted by vector
  std::size_t maximal_rank = 0;
  std::uint64_t screened = 0;             // candidates whose rank was computed
  std::vector<std::string> findings;      // modular/rational disagreements
  unsigned threads = 0;
  double seconds = 0;
};

/// Screens every candidate and returns those of rank below the maximal rank.
/// Output does not depend on the thread count.
inline SearchResult run_search(const SymbolicMatrix& t, const SearchConfig& cfg) {
  const auto set = detail::normalized_set(cfg.coefficient_set);
  const std::size_t length = t.source_terms;
  const auto space = detail::space_size(set.size(), length);
  const auto start = std::chrono::steady_clock::now();

  SearchResult result;
  result.maximal_rank = cfg.maximal_rank ? *cfg.maximal_rank
                                         : generic_rank(t, Specialization::all_free(length)).rank;
  result.threads = detail::resolve_threads(cfg.threads);

  const bool prefilter = cfg.gcd_filter && cfg.gcd_placement == GcdPlacement::prefilter;
  const bool emit_filter = cfg.gcd_filter && cfg.gcd_placement == GcdPlacement::on_emit;
  std::optional<SmallPrimeField> shared_field;
  if (!cfg.rational_only) shared_field.emplace(cfg.screening_prime);
  const CompiledTemplate compiled(t);

  const std::uint64_t chunk = 1 << 15;
  const std::uint64_t chunk_count = (space + chunk - 1) / chunk;
  std::vector<std::vector<SolutionRecord>> per_chunk(chunk_count);
  std::vector<std::vector<std::string>> findings_per_chunk(chunk_count);
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> processed{0};
  std::atomic<std::uint64_t> screened{0};
  std::atomic<unsigned> running{result.threads};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      std::vector<std::uint32_t> dense(compiled.rows() * compiled.cols());
      std::vector<std::int64_t> scratch(dense.size());
      std::uint64_t local_screened = 0;
      for (auto c = next_chunk++; c < chunk_count; c = next_chunk++) {
        const auto begin = c * chunk;
        const auto end = std::min(space, begin + chunk);
        auto& out = per_chunk[c];
        detail::walk_space(set, length, begin, end, [&](const CoefficientVector& v) {
          if (prefilter && content_gcd(v) != 1) return;
          ++local_screened;
          SolutionRecord rec;
          if (cfg.rational_only) {
            const auto exact = detail::exact_rank_at(t, v);
            if (exact >= result.maximal_rank) return;
            rec.rank_rational = exact;
          } else {
            compiled.fill_mod<std::uint32_t>(v, cfg.screening_prime, dense, scratch);
            const auto modular = shared_field->rank(dense, compiled.rows(), compiled.cols());
            if (modular >= result.maximal_rank) return;
            rec.rank_mod = modular;
            rec.prime = cfg.screening_prime;
          }
          if (emit_filter && content_gcd(v) != 1) return;
          if (!cfg.rational_only && cfg.rational_confirmation) {
            const auto exact = detail::exact_rank_at(t, v);
            rec.rank_rational = exact;
            if (exact != *rec.rank_mod) {
              std::ostringstream msg;
              msg << "rank mod " << cfg.screening_prime << " is " << *rec.rank_mod << " but rational rank is "
                  << exact << " at (";
              for (std::size_t k = 0; k < v.size(); ++k) msg << (k ? "," : "") << v[k];
              msg << ")";
              findings_per_chunk[c].push_back(msg.str());
            }
            if (exact >= result.maximal_rank) return;
          }
          rec.vector = v;
          out.push_back(std::move(rec));
        });
        processed += end - begin;
      }
      screened += local_screened;
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_chunk = chunk_count;
    }
    --running;
  };

  std::vector<std::thread> pool;
  pool.reserve(result.threads);
  for (unsigned k = 0; k < result.threads; ++k) pool.emplace_back(worker);
  if (cfg.progress) {
    auto last = start;
    while (running > 0) {
      std::this_thread::sleep_for(std::min(cfg.progress_interval, std::chrono::milliseconds(50)));
      const auto now = std::chrono::steady_clock::now();
      if (now - last >= cfg.progress_interval) {
        last = now;
        cfg.progress({processed.load(), space, std::chrono::duration<double>(now - start).count()});
      }
    }
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (std::uint64_t c = 0; c < chunk_count; ++c) {
    for (auto& rec : per_chunk[c]) result.solutions.push_back(std::move(rec));
    for (auto& f : findings_per_chunk[c]) result.findings.push_back(std::move(f));
  }
  result.screened = screened;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.progress) cfg.progress({processed.load(), space, result.seconds});
  return result;
}

inline std::set<std::size_t> rank_spectrum(const std::vector<SolutionRecord>& solutions) {
  std::set<std::size_t> out;
  for (const auto& s : solutions) out.insert(s.rank());
  return out;
}

/// CSV with header a1,...,aN,rank_mod,rank_rational; absent ranks are empty fields.
inline void write_solutions_csv(std::ostream& out, const std::vector<SolutionRecord>& solutions, std::size_t length) {
  for (std::size_t k = 0; k < length; ++k) out << 'a' << k + 1 << ',';
  out << "rank_mod,rank_rational\n";
  for (const auto& s : solutions) {
    for (int x : s.vector) out << x << ',';
    if (s.rank_mod) out << *s.rank_mod;
    out << ',';
    if (s.rank_rational) out << *s.rank_rational;
    out << '\n';
  }
}

/// Reads write_solutions_csv output, or tables with header row,a1,...,aN,rank
/// (the rank column is read as a rational rank). Empty input gives no records.
inline std::vector<SolutionRecord> read_solutions_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!s.empty() && s.back() == ',') fields.emplace_back();
    return fields;
  };
  const auto header = split(line);
  const bool table = !header.empty() && header.front() == "row";
  std::size_t first = table ? 1 : 0;
  std::size_t length = 0;
  while (first + length < header.size() && header[first + length] == "a" + std::to_string(length + 1)) ++length;
  const std::size_t expected = first + length + (table ? 1 : 2);
  if (length == 0 || header.size() != expected) throw ParseError("unrecognized CSV header '" + line + "'", 1);

  auto number = [](const std::string& f, std::size_t line_no) {
    std::size_t used = 0;
    long x = 0;
    try {
      x = std::stol(f, &used);
    } catch (const std::exception&) {
      throw ParseError("bad integer '" + f + "'", line_no);
    }
    if (used != f.size()) throw ParseError("bad integer '" + f + "'", line_no);
    return x;
  };

  std::vector<SolutionRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != expected) throw ParseError("expected " + std::to_string(expected) + " fields", line_no);
    SolutionRecord rec;
    for (std::size_t k = 0; k < length; ++k) rec.vector.push_back(static_cast<int>(number(fields[first + k], line_no)));
    if (table) {
      rec.rank_rational = static_cast<std::size_t>(number(fields.back(), line_no));
    } else {
      const auto& m = fields[first + length];
      const auto& r = fields[first + length + 1];
      if (!m.empty()) rec.rank_mod = static_cast<std::size_t>(number(m, line_no));
      if (!r.empty()) rec.rank_rational = static_cast<std::size_t>(number(r, line_no));
      if (!rec.rank_mod && !rec.rank_rational) throw ParseError("row has no rank", line_no);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace opident
