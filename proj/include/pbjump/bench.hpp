#pragma once

// Instance generators, the benchmark harness and stats emission.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pbjump/constraint.hpp"
#include "pbjump/extended.hpp"
#include "pbjump/opb.hpp"
#include "pbjump/solver.hpp"

namespace pbjump {

// ---------------------------------------------------------------------------
// Generators

/// Variable for "pigeon i sits in hole j", 1-based, holes 1..n-1.
inline Var pigeon_var(std::size_t n, std::size_t i, std::size_t j) {
  return static_cast<Var>((i - 1) * (n - 1) + j);
}

/// n pigeons, n-1 holes. Hole constraints H_1..H_{n-1} first
/// (sum_i ~p_ij >= n-1), then pigeon constraints P_1..P_n (sum_j p_ij >= 1).
inline OpbInstance gen_pigeonhole(std::size_t n) {
  if (n < 2) throw std::invalid_argument("pigeonhole needs n >= 2");
  std::vector<Constraint> cs;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<Literal> lits;
    for (std::size_t i = 1; i <= n; ++i) lits.push_back(Literal::neg(pigeon_var(n, i, j)));
    cs.push_back(Constraint::cardinality(lits, static_cast<long>(n - 1)));
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<Literal> lits;
    for (std::size_t j = 1; j < n; ++j) lits.push_back(Literal::pos(pigeon_var(n, i, j)));
    cs.push_back(Constraint::cardinality(lits, 1));
  }
  return make_instance(n * (n - 1), cs);
}

/// Constraints plus the decisions that drive the solver into a chosen conflict.
struct Scenario {
  OpbInstance instance;
  std::vector<Literal> decisions;
};

/// sum_{i=1..n} 2~x_i >= n, and clauses x_1 + x_j >= 1 for j = 2..n.
/// Deciding ~x_1 propagates every x_j and falsifies the first constraint.
inline Scenario gen_irrelevant_pattern(std::size_t n) {
  if (n < 3) throw std::invalid_argument("irrelevant pattern needs n >= 3");
  std::vector<Constraint> cs;
  std::vector<Term> big;
  for (std::size_t i = 1; i <= n; ++i) big.push_back({2, Literal::neg(static_cast<Var>(i))});
  cs.emplace_back(big, static_cast<long>(n));
  for (std::size_t j = 2; j <= n; ++j)
    cs.push_back(Constraint::cardinality({Literal::pos(1), Literal::pos(static_cast<Var>(j))}, 1));
  return {make_instance(n, cs), {Literal::neg(1)}};
}

struct RandomParams {
  std::uint64_t seed = 0;
  std::size_t vars = 8;
  std::size_t constraints = 10;
  long max_coef = 8;
};

/// Random linear PB instance with signed coefficients and occasional
/// equalities, so normalization is exercised too.
inline OpbInstance gen_random(const RandomParams& p) {
  if (p.vars == 0 || p.max_coef < 1) throw std::invalid_argument("random family needs vars >= 1 and max_coef >= 1");
  std::mt19937_64 rng(p.seed);
  auto uniform = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };

  OpbInstance inst;
  inst.variable_count = p.vars;
  std::vector<Var> pool(p.vars);
  for (std::size_t v = 0; v < p.vars; ++v) pool[v] = static_cast<Var>(v + 1);

  for (std::size_t k = 0; k < p.constraints; ++k) {
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto v = static_cast<long>(p.vars);
    const std::size_t width = static_cast<std::size_t>(uniform(std::min(v, 3L), v));
    RawConstraint rc;
    long lo = 0, hi = 0;
    for (std::size_t t = 0; t < width; ++t) {
      long c = uniform(1, p.max_coef) * (uniform(0, 3) == 0 ? -1 : 1);
      Literal lit(pool[t], uniform(0, 1) == 1);
      rc.terms.push_back({c, lit});
      (c < 0 ? lo : hi) += c;
    }
    const bool eq = uniform(0, 9) == 0;
    rc.relation = eq ? Relation::Eq : Relation::GreaterEq;
    // Middle third of the achievable range: roughly half the instances come
    // out satisfiable, and few are settled by root propagation alone.
    rc.bound = uniform(lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3);
    inst.constraints.push_back(std::move(rc));
  }
  inst.constraint_count = inst.constraints.size();
  for (const RawConstraint& rc : inst.constraints)
    for (const RawTerm& t : rc.terms) inst.names.emplace(t.lit.var(), default_var_name(t.lit.var()));
  return inst;
}

// ---------------------------------------------------------------------------
// Families

enum class FamilyKind { Pigeonhole, IrrelevantPattern, RandomPB };

inline std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Pigeonhole: return "pigeonhole";
    case FamilyKind::IrrelevantPattern: return "irrelevant";
    case FamilyKind::RandomPB: return "random";
  }
  return "?";
}

/// Pigeonhole and IrrelevantPattern cover sizes first..first+count-1.
/// RandomPB uses seeds seed..seed+count-1.
struct FamilySpec {
  FamilyKind kind = FamilyKind::Pigeonhole;
  std::size_t first = 4;
  std::size_t count = 1;
  RandomParams random{};
};

/// `pigeonhole:N[-M]`, `irrelevant:N[-M]`, `random:SEED:COUNT[:VARS:CONS:MAXCOEF]`.
inline FamilySpec parse_family(std::string_view s) {
  auto bad = [&](const std::string& why) { return std::invalid_argument("family '" + std::string(s) + "': " + why); };
  std::vector<std::string_view> parts;
  for (std::size_t p = 0;;) {
    auto q = s.find(':', p);
    parts.push_back(s.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
    if (q == std::string_view::npos) break;
    p = q + 1;
  }
  auto num = [&](std::string_view t) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw bad("bad number '" + std::string(t) + "'");
    return v;
  };

  FamilySpec f;
  if (parts[0] == "pigeonhole" || parts[0] == "irrelevant") {
    f.kind = parts[0] == "pigeonhole" ? FamilyKind::Pigeonhole : FamilyKind::IrrelevantPattern;
    if (parts.size() != 2) throw bad("expected " + std::string(parts[0]) + ":N or :N-M");
    auto dash = parts[1].find('-');
    std::size_t lo = num(parts[1].substr(0, dash));
    std::size_t hi = dash == std::string_view::npos ? lo : num(parts[1].substr(dash + 1));
    const std::size_t min_n = f.kind == FamilyKind::Pigeonhole ? 2 : 3;
    if (lo < min_n || hi < lo) throw bad("need " + std::to_string(min_n) + " <= N <= M");
    f.first = lo;
    f.count = hi - lo + 1;
  } else if (parts[0] == "random") {
    f.kind = FamilyKind::RandomPB;
    if (parts.size() != 3 && parts.size() != 6) throw bad("expected random:SEED:COUNT[:VARS:CONS:MAXCOEF]");
    f.random.seed = num(parts[1]);
    f.count = num(parts[2]);
    if (parts.size() == 6) {
      f.random.vars = num(parts[3]);
      f.random.constraints = num(parts[4]);
      f.random.max_coef = static_cast<long>(num(parts[5]));
    }
    if (f.count == 0 || f.random.vars == 0 || f.random.max_coef < 1) throw bad("counts must be positive");
  } else {
    throw bad("unknown family");
  }
  return f;
}

struct BenchInstance {
  std::string id;
  std::string family;
  std::size_t num_vars = 0;
  std::vector<Constraint> constraints;
  std::vector<Literal> decisions;  // scripted prefix, fixed order afterwards
};

inline std::vector<BenchInstance> expand(const FamilySpec& f) {
  std::vector<BenchInstance> out;
  for (std::size_t k = 0; k < f.count; ++k) {
    BenchInstance b;
    b.family = to_string(f.kind);
    switch (f.kind) {
      case FamilyKind::Pigeonhole: {
        std::size_t n = f.first + k;
        OpbInstance inst = gen_pigeonhole(n);
        b.id = "php-" + std::to_string(n);
        b.num_vars = inst.variable_count;
        b.constraints = inst.normalized();
        break;
      }
      case FamilyKind::IrrelevantPattern: {
        std::size_t n = f.first + k;
        Scenario sc = gen_irrelevant_pattern(n);
        b.id = "irrelevant-" + std::to_string(n);
        b.num_vars = sc.instance.variable_count;
        b.constraints = sc.instance.normalized();
        b.decisions = sc.decisions;
        break;
      }
      case FamilyKind::RandomPB: {
        RandomParams p = f.random;
        p.seed = f.random.seed + k;
        OpbInstance inst = gen_random(p);
        b.id = "random-s" + std::to_string(p.seed) + "-v" + std::to_string(p.vars) + "-c" +
               std::to_string(p.constraints) + "-m" + std::to_string(p.max_coef);
        b.num_vars = inst.variable_count;
        b.constraints = inst.normalized();
        break;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stats rows

struct StatsRow {
  std::string instance;
  std::string family;
  std::string mode;       // regular | extended
  std::string weakening;  // "-" for regular
  std::string stop;       // "-" for regular; until-highlevel carries "@p/q"
  std::string verdict;    // SAT | UNSAT | TIMEOUT
  std::uint64_t conflicts = 0;
  std::uint64_t cancellations = 0;
  std::uint64_t improved_backjumps = 0;
  std::uint64_t total_backjumps = 0;
  double improved_percent = 0.0;
  std::uint64_t wall_time_us = 0;

  friend bool operator==(const StatsRow&, const StatsRow&) = default;
};

inline double improved_percent(std::uint64_t improved, std::uint64_t total) {
  return 100.0 * static_cast<double>(improved) / static_cast<double>(std::max<std::uint64_t>(1, total));
}

inline std::string stop_column(const StopCriterion& s) {
  std::string out = to_string(s.kind);
  if (s.kind == StopKind::UntilHighLevel)
    out += "@" + std::to_string(s.fraction.num) + "/" + std::to_string(s.fraction.den);
  return out;
}

inline StatsRow make_row(const BenchInstance& inst, const AnalysisConfig& config, const SolveResult& r) {
  StatsRow row;
  row.instance = inst.id;
  row.family = inst.family;
  row.mode = to_string(config.mode);
  row.weakening = config.mode == AnalysisMode::Regular ? "-" : to_string(config.weakening);
  row.stop = config.mode == AnalysisMode::Regular ? "-" : stop_column(config.stop);
  row.verdict = r.verdict == Verdict::Unknown ? "TIMEOUT" : to_string(r.verdict);
  row.conflicts = r.stats.conflicts;
  row.cancellations = r.stats.cancellations;
  row.improved_backjumps = r.stats.improved_backjumps;
  row.total_backjumps = r.stats.total_backjumps;
  row.improved_percent = improved_percent(row.improved_backjumps, row.total_backjumps);
  row.wall_time_us = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(r.stats.wall_time).count());
  return row;
}

inline bool solved(const StatsRow& r) { return r.verdict == "SAT" || r.verdict == "UNSAT"; }

inline std::string config_key(const StatsRow& r) { return r.mode + "/" + r.weakening + "/" + r.stop; }

inline std::string config_key(const AnalysisConfig& c) {
  StatsRow r;
  r.mode = to_string(c.mode);
  r.weakening = c.mode == AnalysisMode::Regular ? "-" : to_string(c.weakening);
  r.stop = c.mode == AnalysisMode::Regular ? "-" : stop_column(c.stop);
  return config_key(r);
}

/// `all`, `regular`, or `extended:<weaken>:<stop>[:<fraction>]`, comma separated.
inline std::vector<AnalysisConfig> parse_configs(std::string_view s) {
  std::vector<AnalysisConfig> out;
  std::size_t p = 0;
  while (p <= s.size()) {
    auto q = s.find(',', p);
    std::string_view item = s.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p);
    if (item == "all") {
      for (const auto& c : all_configs()) out.push_back(c);
    } else if (item == "regular") {
      out.push_back(AnalysisConfig::regular());
    } else {
      std::vector<std::string_view> parts;
      for (std::size_t a = 0;;) {
        auto b = item.find(':', a);
        parts.push_back(item.substr(a, b == std::string_view::npos ? std::string_view::npos : b - a));
        if (b == std::string_view::npos) break;
        a = b + 1;
      }
      if (parts[0] != "extended" || parts.size() < 3 || parts.size() > 4)
        throw std::invalid_argument("bad config '" + std::string(item) + "'");
      StopCriterion stop{parse_stop(parts[2]), {1, 10}};
      if (parts.size() == 4) stop.fraction = parse_fraction(parts[3]);
      out.push_back(AnalysisConfig::extended(parse_weakening(parts[1]), stop));
    }
    if (q == std::string_view::npos) break;
    p = q + 1;
  }
  return out;
}

inline Limits default_limits() { return {1'000'000, std::chrono::milliseconds(60'000)}; }

/// Runs every (instance, config) pair, `jobs` at a time. Rows come back in
/// (family spec, instance, config) order regardless of scheduling.
inline std::vector<StatsRow> run_benchmark(const std::vector<FamilySpec>& specs, const std::vector<AnalysisConfig>& configs,
                                           Limits limits = default_limits(), unsigned jobs = 1) {
  std::vector<BenchInstance> instances;
  for (const FamilySpec& f : specs)
    for (BenchInstance& b : expand(f)) instances.push_back(std::move(b));

  const std::size_t total = instances.size() * configs.size();
  std::vector<StatsRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < total;) {
      const BenchInstance& inst = instances[k / configs.size()];
      const AnalysisConfig& cfg = configs[k % configs.size()];
      Heuristic h = inst.decisions.empty() ? Heuristic::fixed_order() : Heuristic::scripted(inst.decisions, true);
      rows[k] = make_row(inst, cfg, solve(inst.num_vars, inst.constraints, cfg, std::move(h), limits));
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1 || total <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, total); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

struct PairRow {
  std::string instance;
  std::string family;
  StatsRow a;
  StatsRow b;
};

/// Instances solved under both configs, in row order. Timeouts never appear.
inline std::vector<PairRow> compare(const std::vector<StatsRow>& rows, const AnalysisConfig& a, const AnalysisConfig& b) {
  const std::string ka = config_key(a), kb = config_key(b);
  std::vector<PairRow> out;
  for (const StatsRow& ra : rows) {
    if (config_key(ra) != ka || !solved(ra)) continue;
    for (const StatsRow& rb : rows) {
      if (rb.instance == ra.instance && rb.family == ra.family && config_key(rb) == kb && solved(rb)) {
        out.push_back({ra.instance, ra.family, ra, rb});
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

enum class StatsFormat { Csv, Json };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kCsvHeader =
    "instance,family,mode,weakening,stop,verdict,conflicts,cancellations,improved_backjumps,total_backjumps,"
    "improved_percent,wall_time_us";

namespace detail {

inline std::string format_double(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, p);
}

inline void check_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") != std::string::npos) throw IoError("field '" + s + "' cannot be written as CSV");
}

}  // namespace detail

inline void emit_stats(const std::vector<StatsRow>& rows, StatsFormat format, std::ostream& os) {
  if (format == StatsFormat::Csv) {
    os << kCsvHeader << '\n';
    for (const StatsRow& r : rows) {
      for (const std::string* f : {&r.instance, &r.family, &r.mode, &r.weakening, &r.stop, &r.verdict})
        detail::check_field(*f);
      os << r.instance << ',' << r.family << ',' << r.mode << ',' << r.weakening << ',' << r.stop << ',' << r.verdict
         << ',' << r.conflicts << ',' << r.cancellations << ',' << r.improved_backjumps << ',' << r.total_backjumps
         << ',' << detail::format_double(r.improved_percent) << ',' << r.wall_time_us << '\n';
    }
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const StatsRow& r : rows) {
      arr.push_back({{"instance", r.instance},
                     {"family", r.family},
                     {"mode", r.mode},
                     {"weakening", r.weakening},
                     {"stop", r.stop},
                     {"verdict", r.verdict},
                     {"conflicts", r.conflicts},
                     {"cancellations", r.cancellations},
                     {"improved_backjumps", r.improved_backjumps},
                     {"total_backjumps", r.total_backjumps},
                     {"improved_percent", r.improved_percent},
                     {"wall_time_us", r.wall_time_us}});
    }
    os << arr.dump(2) << '\n';
  }
  if (!os) throw IoError("failed to write stats");
}

inline std::string emit_stats(const std::vector<StatsRow>& rows, StatsFormat format) {
  std::ostringstream os;
  emit_stats(rows, format, os);
  return os.str();
}

inline std::vector<StatsRow> parse_stats_csv(std::string_view text) {
  std::vector<StatsRow> rows;
  std::size_t p = 0;
  bool header = true;
  std::size_t line_no = 0;
  while (p < text.size()) {
    auto q = text.find('\n', p);
    std::string_view line = text.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p);
    p = q == std::string_view::npos ? text.size() : q + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCsvHeader) throw IoError("unexpected CSV header");
      header = false;
      continue;
    }
    std::vector<std::string> f;
    for (std::size_t a = 0;;) {
      auto b = line.find(',', a);
      f.emplace_back(line.substr(a, b == std::string_view::npos ? std::string_view::npos : b - a));
      if (b == std::string_view::npos) break;
      a = b + 1;
    }
    if (f.size() != 12) throw IoError("line " + std::to_string(line_no) + ": expected 12 fields");
    auto u64 = [&](const std::string& s) {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("line " + std::to_string(line_no) + ": bad integer");
      return v;
    };
    StatsRow r{f[0], f[1], f[2], f[3], f[4], f[5], u64(f[6]), u64(f[7]), u64(f[8]), u64(f[9]), 0.0, u64(f[11])};
    auto [ptr, ec] = std::from_chars(f[10].data(), f[10].data() + f[10].size(), r.improved_percent);
    if (ec != std::errc() || ptr != f[10].data() + f[10].size()) throw IoError("line " + std::to_string(line_no) + ": bad number");
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<StatsRow> parse_stats_json(std::string_view text) {
  std::vector<StatsRow> rows;
  try {
    auto arr = nlohmann::json::parse(text);
    for (const auto& o : arr) {
      rows.push_back({o.at("instance").get<std::string>(), o.at("family").get<std::string>(), o.at("mode").get<std::string>(),
                      o.at("weakening").get<std::string>(), o.at("stop").get<std::string>(),
                      o.at("verdict").get<std::string>(), o.at("conflicts").get<std::uint64_t>(),
                      o.at("cancellations").get<std::uint64_t>(), o.at("improved_backjumps").get<std::uint64_t>(),
                      o.at("total_backjumps").get<std::uint64_t>(), o.at("improved_percent").get<double>(),
                      o.at("wall_time_us").get<std::uint64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad stats JSON: ") + e.what());
  }
  return rows;
}

}  // namespace pbjump
