#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "pbjump/analysis.hpp"
#include "pbjump/constraint.hpp"
#include "pbjump/extended.hpp"
#include "pbjump/propagation.hpp"
#include "pbjump/trail.hpp"

namespace pbjump {

struct ScriptExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Branching heuristic. Fixed order picks the lowest unassigned variable,
/// negative polarity. Scripted replays an explicit decision list (entries that
/// are already assigned are skipped).
class Heuristic {
 public:
  static Heuristic fixed_order() { return Heuristic{}; }

  /// With `fallback` set, fixed order takes over once the script runs out;
  /// otherwise running out with variables left throws ScriptExhausted.
  static Heuristic scripted(std::vector<Literal> script, bool fallback = false) {
    Heuristic h;
    h.script_ = std::move(script);
    h.scripted_ = true;
    h.fallback_ = fallback;
    return h;
  }

  std::optional<Literal> next(const Trail& trail) {
    if (scripted_) {
      while (pos_ < script_.size()) {
        Literal l = script_[pos_++];
        if (!trail.assigned(l.var())) return l;
      }
    }
    for (Var v = 1; v <= trail.num_vars(); ++v) {
      if (trail.assigned(v)) continue;
      if (scripted_ && !fallback_) throw ScriptExhausted("decision script exhausted with unassigned variables");
      return Literal::neg(v);
    }
    return std::nullopt;
  }

 private:
  std::vector<Literal> script_;
  std::size_t pos_ = 0;
  bool scripted_ = false;
  bool fallback_ = false;
};

/// nullopt when every variable is assigned.
inline std::optional<Literal> decide(const Trail& trail, Heuristic& heuristic) { return heuristic.next(trail); }

struct RunStats {
  std::uint64_t conflicts = 0;
  std::uint64_t cancellations = 0;
  std::uint64_t improved_backjumps = 0;  // final level < first assertive level
  std::uint64_t total_backjumps = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::chrono::nanoseconds wall_time{0};
};

enum class Verdict { Satisfiable, Unsatisfiable, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfiable: return "SAT";
    case Verdict::Unsatisfiable: return "UNSAT";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  std::vector<bool> model;  // indexed by variable, entry 0 unused
  RunStats stats;
  std::optional<Constraint> refutation;  // final contradiction on UNSAT
};

struct Limits {
  std::optional<std::uint64_t> max_conflicts;
  std::optional<std::chrono::milliseconds> time_limit;
};

/// Per-conflict record of the assertion levels analysis went through.
struct ConflictRecord {
  std::optional<Level> first_level;   // regular analysis result; none if refuted straight away
  std::vector<Level> committed;       // extended mode: every committed assertion level
  std::optional<Level> final_level;   // none when the conflict proved UNSAT
};

/// CDCL driver: propagate, analyze, learn, backjump. No restarts and no
/// learned-constraint deletion.
class Solver {
 public:
  Solver(std::size_t num_vars, const std::vector<Constraint>& constraints, AnalysisConfig config,
         Heuristic heuristic = Heuristic::fixed_order())
      : prop_(num_vars), config_(config), heuristic_(std::move(heuristic)) {
    for (const Constraint& c : constraints) prop_.add_constraint(c);
    num_inputs_ = prop_.size();
  }

  void set_limits(Limits limits) { limits_ = limits; }
  void set_derivation_log(DerivationLog* log) { log_ = log; }
  void set_record_conflicts(bool on) { record_ = on; }

  void learn(const Constraint& c) { prop_.add_constraint(c); }

  std::span<const Constraint> input_constraints() const { return prop_.constraints().subspan(0, num_inputs_); }
  std::span<const Constraint> learned_constraints() const { return prop_.constraints().subspan(num_inputs_); }
  const std::vector<ConflictRecord>& conflict_records() const { return records_; }
  const Propagator& propagator() const { return prop_; }

  SolveResult solve() {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    auto finish = [&](Verdict v) -> SolveResult {
      res.verdict = v;
      res.stats.propagations = prop_.propagations();
      res.stats.wall_time = std::chrono::steady_clock::now() - start;
      if (v == Verdict::Satisfiable) {
        res.model.assign(prop_.num_vars() + 1, false);
        for (Var x = 1; x <= prop_.num_vars(); ++x) res.model[x] = prop_.trail().is_true(Literal::pos(x));
      }
      return std::move(res);
    };

    for (;;) {
      if (auto conflict = prop_.propagate()) {
        ++res.stats.conflicts;
        const Constraint confl = prop_.constraint(*conflict);
        ConflictRecord rec;
        AnalysisContext ctx{prop_.constraints(), 0, log_, record_ ? &rec.committed : nullptr};
        Trail working = prop_.trail();

        auto refute = [&](const Constraint& c) {
          Trail root = prop_.trail();
          res.refutation = refute_at_root(c, root, ctx);
          res.stats.cancellations += ctx.cancellations;
          if (record_) records_.push_back(std::move(rec));
          return finish(Verdict::Unsatisfiable);
        };

        if (working.current_level() == 0) return refute(confl);

        AnalysisOutcome out = analyze_conflict(confl, working, ctx);
        if (auto* l = std::get_if<Learned>(&out)) {
          rec.first_level = l->assertion.level;
          if (config_.mode == AnalysisMode::Extended) out = continue_analysis(std::move(*l), working, ctx, config_);
        }
        if (auto* r = std::get_if<Refuted>(&out)) return refute(r->constraint);

        auto& learned = std::get<Learned>(out);
        const Level b = learned.assertion.level;
        rec.final_level = b;
        ++res.stats.total_backjumps;
        if (b < *rec.first_level) ++res.stats.improved_backjumps;
        res.stats.cancellations += ctx.cancellations;
        if (record_) records_.push_back(std::move(rec));

        prop_.backjump_to(b);
        learn(learned.constraint);

        if (limits_.max_conflicts && res.stats.conflicts >= *limits_.max_conflicts) return finish(Verdict::Unknown);
        if (limits_.time_limit && std::chrono::steady_clock::now() - start > *limits_.time_limit)
          return finish(Verdict::Unknown);
        continue;
      }

      auto lit = decide(prop_.trail(), heuristic_);
      if (!lit) return finish(Verdict::Satisfiable);
      ++res.stats.decisions;
      prop_.decide(*lit);
    }
  }

 private:
  Propagator prop_;
  AnalysisConfig config_;
  Heuristic heuristic_;
  Limits limits_;
  DerivationLog* log_ = nullptr;
  bool record_ = false;
  std::size_t num_inputs_ = 0;
  std::vector<ConflictRecord> records_;
};

/// Convenience wrapper: builds a solver and runs it once.
inline SolveResult solve(std::size_t num_vars, const std::vector<Constraint>& constraints, const AnalysisConfig& config,
                         Heuristic heuristic = Heuristic::fixed_order(), Limits limits = {}) {
  Solver s(num_vars, constraints, config, std::move(heuristic));
  s.set_limits(limits);
  return s.solve();
}

}  // namespace pbjump
