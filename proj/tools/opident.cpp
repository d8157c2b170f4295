// Command-line front end: monomial listings, Narayana tables, matrices of
// consequences, submaximal-rank searches and family classification.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opident/opident.hpp"

namespace {

using nlohmann::json;
using namespace opident;

constexpr const char* tool_version = "0.1.0";

enum ExitCode { ok = 0, usage = 1, verification = 2, internal = 3 };

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream out;
  for (unsigned int k = 0; k < len; ++k) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return out.str();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ParameterError("bad integer '" + item + "' in list '" + text + "'");
    }
    if (used != item.size()) throw ParameterError("bad integer '" + item + "' in list '" + text + "'");
    out.push_back(x);
  }
  if (out.empty()) throw ParameterError("empty list");
  return out;
}

std::string join(const std::vector<int>& v, const char* sep = ",") {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? sep : "") + std::to_string(v[k]);
  return out;
}

/// Where primary output goes: a file (written atomically) or stdout.
struct Sink {
  std::string path;
  std::ostringstream buffer;

  void commit() const {
    const auto data = buffer.str();
    if (path.empty()) {
      std::cout << data << std::flush;
      return;
    }
    const auto tmp = path + ".partial";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw ParameterError("cannot write " + path);
      f << data;
      if (!f.flush()) {
        std::filesystem::remove(tmp);
        throw ParameterError("cannot write " + path);
      }
    }
    std::filesystem::rename(tmp, path);
  }
};

struct Shape {
  int arity = 3;
  int degree = 3;
  int multiplicity = 1;
};

void add_shape(CLI::App* cmd, Shape& s) {
  cmd->add_option("--arity,-n", s.arity, "Arity n of the product")->capture_default_str();
  cmd->add_option("--degree,-d", s.degree, "Degree (number of arguments)")->capture_default_str();
  cmd->add_option("--multiplicity,-m", s.multiplicity, "Number of operator occurrences")->capture_default_str();
}

struct Common {
  std::string format = "text";
  std::string output;
  std::string manifest;
};

// The first listed format is the default; an unset --format leaves "text", which search writes as csv.
void add_output(CLI::App* cmd, Common& c, std::vector<std::string> formats) {
  const auto fallback = formats.front();
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats))->default_str(fallback);
  cmd->add_option("--output,-o", c.output, "Write primary output to this file instead of stdout");
  cmd->add_option("--manifest", c.manifest, "Run manifest path (default: <output>.manifest.json)");
}

void write_manifest(const Common& c, const std::vector<std::string>& args, const json& config, double seconds,
                    const std::string& output) {
  if (c.output.empty() && c.manifest.empty()) return;
  json m;
  m["tool"] = "opident";
  m["version"] = tool_version;
  m["argv"] = args;
  m["command"] = args.empty() ? "" : args.front();
  m["config"] = config;
  m["seconds"] = seconds;
  m["output"] = {{"path", c.output}, {"bytes", output.size()}, {"sha256", sha256_hex(output)}};
  const auto path = c.manifest.empty() ? c.output + ".manifest.json" : c.manifest;
  std::ofstream f(path);
  if (!f) throw ParameterError("cannot write " + path);
  f << m.dump(2) << '\n';
}

int run(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------

void cmd_monomials(const Shape& s, Sink& out, const std::string& format) {
  const auto list = enumerate_monomials(s.arity, s.degree, s.multiplicity);
  if (format == "json") {
    json j = json::array();
    for (std::size_t k = 0; k < list.size(); ++k) {
      j.push_back({{"index", k + 1}, {"monomial", list[k].key()}, {"dyck", list[k].dyck().str()}});
    }
    out.buffer << j.dump(2) << '\n';
  } else if (format == "csv") {
    out.buffer << "index,monomial,dyck\n";
    for (std::size_t k = 0; k < list.size(); ++k) {
      out.buffer << k + 1 << ',' << list[k].key() << ',' << list[k].dyck().str() << '\n';
    }
  } else {
    for (std::size_t k = 0; k < list.size(); ++k) {
      out.buffer << std::setw(4) << k + 1 << "  " << std::left << std::setw(24) << list[k].key() << std::right << ' '
                 << list[k].dyck().str() << '\n';
    }
  }
}

void cmd_narayana(int arity, int max_weight, Sink& out, const std::string& format) {
  if (max_weight < 0) throw ParameterError("max weight must be non-negative");
  std::vector<std::vector<std::string>> table;
  for (int w = 0; w <= max_weight; ++w) {
    std::vector<std::string> row;
    for (int m = 0; m <= w; ++m) row.push_back(to_string(count_monomials(arity, w, m).value));
    table.push_back(std::move(row));
  }
  if (format == "json") {
    json j = json::array();
    for (int w = 0; w <= max_weight; ++w) {
      for (int m = 0; m <= w; ++m) j.push_back({{"weight", w}, {"multiplicity", m}, {"count", table[w][m]}});
    }
    out.buffer << j.dump(2) << '\n';
  } else if (format == "csv") {
    out.buffer << "weight,multiplicity,count\n";
    for (int w = 0; w <= max_weight; ++w) {
      for (int m = 0; m <= w; ++m) out.buffer << w << ',' << m << ',' << table[w][m] << '\n';
    }
  } else {
    out.buffer << "w\\m";
    for (int m = 0; m <= max_weight; ++m) out.buffer << std::setw(10) << m;
    out.buffer << '\n';
    for (int w = 0; w <= max_weight; ++w) {
      out.buffer << std::setw(3) << w;
      for (const auto& x : table[w]) out.buffer << std::setw(10) << x;
      out.buffer << '\n';
    }
  }
}

template <class Entry>
void dump_matrix(const ConsequenceMatrix<Entry>& m, Sink& out, const std::string& format) {
  if (format == "csv") {
    write_matrix_csv(out.buffer, m);
  } else if (format == "json") {
    json triples = json::array();
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      for (const auto& [c, v] : m.rows[r]) triples.push_back({r + 1, c + 1, detail::entry_text(v)});
    }
    json rows = json::array();
    for (const auto& o : m.row_origins) rows.push_back(o.expression());
    json cols = json::array();
    for (const auto& c : m.columns) cols.push_back(c.key());
    json collapsed = json::array();
    for (const auto& c : m.collapsed) collapsed.push_back({{"raw", c.raw.expression()}, {"kept_row", c.kept_index + 1}});
    out.buffer << json{{"rows", m.row_count()},
                       {"columns", m.column_count()},
                       {"raw_consequences", m.raw_count},
                       {"row_origins", rows},
                       {"column_monomials", cols},
                       {"collapsed", collapsed},
                       {"entries", triples}}
                      .dump(1)
               << '\n';
  } else {
    write_matrix_text(out.buffer, m);
  }
}

void cmd_matrix(const Shape& s, const std::string& vector_text, Sink& out, const std::string& format) {
  if (vector_text.empty()) {
    dump_matrix(build_template(s.arity, s.degree, s.multiplicity), out, format);
    return;
  }
  const auto v = parse_int_list(vector_text);
  dump_matrix(build_matrix(polynomial_from_vector(s.arity, s.degree, s.multiplicity, v)), out, format);
}

struct SearchOptions {
  std::string coeff_set = "-2,-1,0,1,2";
  std::string gcd_filter = "on";
  std::string gcd_placement = "emit";
  std::uint32_t prime = 1009;
  std::uint64_t spec_prime = default_specialization_prime;
  int trials = 5;
  std::uint64_t seed = default_seed;
  unsigned threads = 0;
  bool rational_only = false;
  bool no_confirm = false;
  bool progress = false;
};

json search_config_json(const Shape& s, const SearchOptions& o, unsigned threads) {
  return {{"arity", s.arity},         {"degree", s.degree},
          {"multiplicity", s.multiplicity}, {"coeff_set", parse_int_list(o.coeff_set)},
          {"gcd_filter", o.gcd_filter}, {"gcd_placement", o.gcd_placement},
          {"prime", o.prime},          {"spec_prime", o.spec_prime},
          {"trials", o.trials},        {"seed", o.seed},
          {"threads", threads},        {"rational_only", o.rational_only},
          {"rational_confirmation", !o.no_confirm}};
}

json cmd_search(const Shape& s, const SearchOptions& o, Sink& out, const std::string& format) {
  const auto t = build_template(s.arity, s.degree, s.multiplicity);
  const auto generic = generic_rank(t, Specialization::all_free(t.source_terms), o.trials, o.seed, o.spec_prime);
  std::cerr << "template " << t.row_count() << "x" << t.column_count() << ", generic " << generic.note() << '\n';

  SearchConfig cfg;
  cfg.coefficient_set = parse_int_list(o.coeff_set);
  cfg.gcd_filter = o.gcd_filter == "on";
  cfg.gcd_placement = o.gcd_placement == "prefilter" ? GcdPlacement::prefilter : GcdPlacement::on_emit;
  cfg.screening_prime = o.prime;
  cfg.rational_confirmation = !o.no_confirm;
  cfg.rational_only = o.rational_only;
  cfg.threads = o.threads;
  cfg.maximal_rank = generic.rank;
  if (o.progress) {
    cfg.progress = [](const SearchProgress& p) {
      std::cerr << "\r" << p.processed << "/" << p.total << "  " << std::fixed << std::setprecision(0) << p.rate()
                << "/s  eta " << p.eta() << "s   " << std::flush;
    };
  }
  const auto counts = count_candidates(cfg.coefficient_set, t.source_terms);
  auto result = run_search(t, cfg);
  if (o.progress) std::cerr << '\n';
  std::cerr << "candidates " << counts.leading_positive << " (gcd 1: " << counts.gcd_one << "), screened "
            << result.screened << ", solutions " << result.solutions.size() << ", threads " << result.threads
            << ", " << std::fixed << std::setprecision(1) << result.seconds << "s\n";
  for (const auto& f : result.findings) std::cerr << "finding: " << f << '\n';

  if (format == "json") {
    json j = json::array();
    for (const auto& r : result.solutions) {
      json rec{{"vector", r.vector}, {"prime", r.prime}};
      rec["rank_mod"] = r.rank_mod ? json(*r.rank_mod) : json(nullptr);
      rec["rank_rational"] = r.rank_rational ? json(*r.rank_rational) : json(nullptr);
      j.push_back(rec);
    }
    out.buffer << j.dump(1) << '\n';
  } else {
    write_solutions_csv(out.buffer, result.solutions, t.source_terms);
  }
  std::string spectrum;
  for (auto r : rank_spectrum(result.solutions)) spectrum += (spectrum.empty() ? "" : ",") + std::to_string(r);
  std::cerr << "rank spectrum {" << spectrum << "}\n";

  auto config = search_config_json(s, o, result.threads);
  config["generic_rank"] = generic.rank;
  config["results"] = {{"candidates", counts.leading_positive},
                       {"candidates_gcd_one", counts.gcd_one},
                       {"screened", result.screened},
                       {"solutions", result.solutions.size()},
                       {"findings", result.findings}};
  return config;
}

std::vector<FamilyTemplate> load_templates(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot read " + path);
  return read_family_templates(f);
}

ParameterRange parse_range(const std::string& text, bool integral) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParameterError("parameter range must be lo,hi");
  ParameterRange r;
  r.lo = parse_rational(text.substr(0, comma));
  r.hi = parse_rational(text.substr(comma + 1));
  r.integral = integral;
  if (r.hi < r.lo) throw ParameterError("empty parameter range");
  return r;
}

void cmd_classify(const std::string& solutions_path, const std::string& templates_path, const ParameterRange& range,
                  Sink& out, const std::string& format) {
  std::ifstream sf(solutions_path);
  if (!sf) throw ParameterError("cannot read " + solutions_path);
  const auto solutions = read_solutions_csv(sf);
  const auto templates = load_templates(templates_path);
  const auto report = classify_solutions(solutions, templates, range);

  if (format == "json") {
    json per_solution = json::array();
    for (std::size_t k = 0; k < solutions.size(); ++k) {
      json labels = json::array();
      for (auto t : report.matches[k]) labels.push_back(templates[t].label);
      per_solution.push_back({{"vector", solutions[k].vector}, {"rank", solutions[k].rank()}, {"families", labels}});
    }
    json members = json::object();
    for (std::size_t t = 0; t < templates.size(); ++t) members[templates[t].label] = report.member_counts[t];
    json unmatched = json::array();
    for (auto k : report.unmatched) unmatched.push_back(solutions[k].vector);
    json empty = json::array();
    for (auto t : report.empty_templates) empty.push_back(templates[t].label);
    out.buffer << json{{"solutions", per_solution},
                       {"members", members},
                       {"unmatched", unmatched},
                       {"templates_without_members", empty}}
                      .dump(1)
               << '\n';
  } else {
    for (std::size_t k = 0; k < solutions.size(); ++k) {
      out.buffer << std::setw(4) << k + 1 << "  (" << join(solutions[k].vector) << ")  rank " << solutions[k].rank()
                 << "  ->";
      for (auto t : report.matches[k]) out.buffer << ' ' << templates[t].label;
      if (report.matches[k].empty()) out.buffer << " UNMATCHED";
      out.buffer << '\n';
    }
    out.buffer << "members:";
    for (std::size_t t = 0; t < templates.size(); ++t) out.buffer << ' ' << templates[t].label << '=' << report.member_counts[t];
    out.buffer << "\nunmatched: " << report.unmatched.size() << " of " << solutions.size() << '\n';
  }
  if (!report.complete()) {
    throw VerificationFailure(std::to_string(report.unmatched.size()) + " solution(s) match no family");
  }
}

void cmd_family_ranks(const Shape& s, const std::string& templates_path, int trials, std::uint64_t seed,
                      std::uint64_t q, Sink& out, const std::string& format) {
  const auto templates = load_templates(templates_path);
  const auto t = build_template(s.arity, s.degree, s.multiplicity);
  std::size_t mismatches = 0;
  json j = json::array();
  for (const auto& f : templates) {
    const auto g = verify_family_generic_rank(f, t, trials, seed, q);
    const bool agree = g.rank == f.generic_rank;
    if (!agree) ++mismatches;
    if (format == "json") {
      j.push_back({{"label", f.label}, {"stated", f.generic_rank}, {"computed", g.rank}, {"note", g.note()}});
    } else {
      out.buffer << std::left << std::setw(6) << f.label << std::right << " stated " << std::setw(3) << f.generic_rank
                 << "  computed " << std::setw(3) << g.rank << (agree ? "" : "  MISMATCH") << '\n';
    }
  }
  if (format == "json") out.buffer << j.dump(1) << '\n';
  if (mismatches != 0) throw VerificationFailure(std::to_string(mismatches) + " family rank(s) differ from the stated value");
}

int cmd_replay(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw ParameterError("cannot read " + manifest_path);
  const auto m = json::parse(f);
  auto args = m.at("argv").get<std::vector<std::string>>();
  const auto expected = m.at("output").at("sha256").get<std::string>();
  const auto original = m.at("output").at("path").get<std::string>();
  if (original.empty()) throw ParameterError("manifest has no output path to compare");
  const auto replay_path = original + ".replay";
  const auto replay_manifest = replay_path + ".manifest.json";
  for (std::size_t k = 0; k + 1 < args.size(); ++k) {
    if (args[k] == "--output" || args[k] == "-o") args[k + 1] = replay_path;
    if (args[k] == "--manifest") args[k + 1] = replay_manifest;
  }
  const int code = run(args);
  if (code != ok) return code;
  std::ifstream r(replay_path, std::ios::binary);
  std::stringstream data;
  data << r.rdbuf();
  const auto actual = sha256_hex(data.str());
  std::filesystem::remove(replay_path);
  std::filesystem::remove(replay_manifest);
  if (actual != expected) {
    std::cerr << "replay output differs: " << actual << " != " << expected << '\n';
    return verification;
  }
  std::cerr << "replay reproduced " << expected << '\n';
  return ok;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Operator identities on n-ary associative algebras", "opident"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  Shape shape;
  Common common;

  auto* monomials = app.add_subcommand("monomials", "List operator monomials in lex order");
  add_shape(monomials, shape);
  add_output(monomials, common, {"text", "csv", "json"});

  int max_weight = 5;
  auto* narayana = app.add_subcommand("narayana", "Table of monomial counts N_n(w,m)");
  narayana->add_option("--arity,-n", shape.arity, "Arity")->capture_default_str();
  narayana->add_option("--max-weight,-w", max_weight, "Largest weight")->capture_default_str();
  add_output(narayana, common, {"text", "csv", "json"});

  std::string vector_text;
  auto* matrix = app.add_subcommand("matrix", "Matrix of consequences, symbolic or at a coefficient vector");
  add_shape(matrix, shape);
  matrix->add_option("--vector,-v", vector_text, "Comma-separated coefficients; symbolic when omitted");
  add_output(matrix, common, {"text", "csv", "json"});

  SearchOptions so;
  auto* search = app.add_subcommand("search", "Exhaustive search for submaximal rank");
  add_shape(search, shape);
  search->add_option("--coeff-set", so.coeff_set, "Comma-separated coefficient values")->capture_default_str();
  search->add_option("--gcd-filter", so.gcd_filter, "Report only relatively prime vectors")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  search->add_option("--gcd-placement", so.gcd_placement, "Apply the gcd filter on emit or before screening")
      ->check(CLI::IsMember({"emit", "prefilter"}))
      ->capture_default_str();
  search->add_option("--prime", so.prime, "Screening prime (< 65536)")->capture_default_str();
  search->add_option("--spec-prime", so.spec_prime, "Specialization prime for the generic rank")->capture_default_str();
  search->add_option("--trials", so.trials, "Random specializations for the generic rank")->capture_default_str();
  search->add_option("--seed", so.seed, "Seed for the generic rank")->capture_default_str();
  search->add_option("--threads", so.threads, "Worker threads (0: OPIDENT_THREADS or all cores)")->capture_default_str();
  search->add_flag("--rational-only", so.rational_only, "Exact rank for every candidate, no modular screen");
  search->add_flag("--no-rational-confirm", so.no_confirm, "Skip exact confirmation of modular hits");
  search->add_flag("--progress", so.progress, "Report rate and ETA on stderr");
  add_output(search, common, {"csv", "json"});

  std::string solutions_path;
  std::string templates_path;
  std::string range_text = "-2,2";
  bool integral = false;
  auto* classify = app.add_subcommand("classify", "Match solutions against family templates");
  classify->add_option("--solutions", solutions_path, "Solutions CSV")->required()->check(CLI::ExistingFile);
  classify->add_option("--templates", templates_path, "Family templates (JSON lines)")->required()->check(CLI::ExistingFile);
  classify->add_option("--param-range", range_text, "Closed parameter interval lo,hi (rationals)")->capture_default_str();
  classify->add_flag("--integral-params", integral, "Only integer parameter values");
  add_output(classify, common, {"text", "json"});

  int trials = 5;
  std::uint64_t seed = default_seed;
  std::uint64_t spec_prime = default_specialization_prime;
  auto* family_ranks = app.add_subcommand("family-ranks", "Generic rank of each family template");
  add_shape(family_ranks, shape);
  family_ranks->add_option("--templates", templates_path, "Family templates (JSON lines)")->required()->check(CLI::ExistingFile);
  family_ranks->add_option("--trials", trials, "Random specializations")->capture_default_str();
  family_ranks->add_option("--seed", seed, "Seed")->capture_default_str();
  family_ranks->add_option("--spec-prime", spec_prime, "Specialization prime")->capture_default_str();
  add_output(family_ranks, common, {"text", "json"});

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Rerun a command from its manifest and compare output checksums");
  replay->add_option("manifest", manifest_path, "Manifest file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  Sink sink;
  sink.path = common.output;
  const auto start = std::chrono::steady_clock::now();
  json config{{"arity", shape.arity}, {"degree", shape.degree}, {"multiplicity", shape.multiplicity}};
  try {
    if (replay->parsed()) return cmd_replay(manifest_path);
    if (monomials->parsed()) cmd_monomials(shape, sink, common.format);
    if (narayana->parsed()) {
      config = {{"arity", shape.arity}, {"max_weight", max_weight}};
      cmd_narayana(shape.arity, max_weight, sink, common.format);
    }
    if (matrix->parsed()) {
      config["vector"] = vector_text;
      cmd_matrix(shape, vector_text, sink, common.format);
    }
    if (search->parsed()) config = cmd_search(shape, so, sink, common.format);
    if (classify->parsed()) {
      config = {{"solutions", solutions_path}, {"templates", templates_path}, {"param_range", range_text},
                {"integral_params", integral}};
      try {
        cmd_classify(solutions_path, templates_path, parse_range(range_text, integral), sink, common.format);
      } catch (const VerificationFailure&) {
        sink.commit();
        throw;
      }
    }
    if (family_ranks->parsed()) {
      config["templates"] = templates_path;
      config["trials"] = trials;
      config["seed"] = seed;
      config["spec_prime"] = spec_prime;
      try {
        cmd_family_ranks(shape, templates_path, trials, seed, spec_prime, sink, common.format);
      } catch (const VerificationFailure&) {
        sink.commit();
        throw;
      }
    }
    sink.commit();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(common, args, config, seconds, sink.buffer.str());
    return ok;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return verification;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const PositionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    if (!common.output.empty()) std::filesystem::remove(common.output + ".partial");
    return internal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}
