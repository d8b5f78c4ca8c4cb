#pragma once

// Continuing conflict analysis past the first assertive constraint.
//
// Once the working constraint is assertive at level b, each further
// cancellation is committed only if its result is still assertive at some
// level <= b, or conflicting at b. Anything else is either repaired by
// weakening the reason or skipped, so the backjump level never gets worse.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "pbjump/analysis.hpp"
#include "pbjump/constraint.hpp"
#include "pbjump/trail.hpp"

namespace pbjump {

enum class WeakeningStrategy { NeverWeaken, WeakenAny, WeakenOrdered };

enum class StopKind { UntilBjLevel, UntilTopLevel, UntilHighLevel };

/// Exact rational in (0, 1].
struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 10;

  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Accepts `p/q` or a decimal such as `0.1`, converted exactly.
inline Fraction parse_fraction(std::string_view s) {
  auto bad = [&] { return std::invalid_argument("invalid fraction '" + std::string(s) + "'"); };
  auto to_int = [&](std::string_view part) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || part.empty()) throw bad();
    return v;
  };
  Fraction f;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    f = {to_int(s.substr(0, slash)), to_int(s.substr(slash + 1))};
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view frac = s.substr(dot + 1);
    if (frac.size() > 15) throw bad();
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t whole = dot == 0 ? 0 : to_int(s.substr(0, dot));
    f = {whole * den + (frac.empty() ? 0 : to_int(frac)), den};
  } else {
    f = {to_int(s), 1};
  }
  if (f.den <= 0 || f.num <= 0 || f.num > f.den) throw std::invalid_argument("fraction must lie in (0,1]: " + std::string(s));
  return f;
}

struct StopCriterion {
  StopKind kind = StopKind::UntilBjLevel;
  Fraction fraction{1, 10};  // UntilHighLevel only

  friend bool operator==(const StopCriterion&, const StopCriterion&) = default;
};

enum class AnalysisMode { Regular, Extended };

struct AnalysisConfig {
  AnalysisMode mode = AnalysisMode::Regular;
  WeakeningStrategy weakening = WeakeningStrategy::WeakenAny;
  StopCriterion stop{};

  static AnalysisConfig regular() { return {}; }
  static AnalysisConfig extended(WeakeningStrategy w, StopCriterion s = {}) { return {AnalysisMode::Extended, w, s}; }

  friend bool operator==(const AnalysisConfig& a, const AnalysisConfig& b) {
    if (a.mode != b.mode) return false;
    return a.mode == AnalysisMode::Regular || (a.weakening == b.weakening && a.stop == b.stop);
  }
};

inline std::string to_string(WeakeningStrategy w) {
  switch (w) {
    case WeakeningStrategy::NeverWeaken: return "never-weaken";
    case WeakeningStrategy::WeakenAny: return "weaken-any";
    case WeakeningStrategy::WeakenOrdered: return "weaken-ordered";
  }
  return "?";
}

inline std::string to_string(StopKind k) {
  switch (k) {
    case StopKind::UntilBjLevel: return "until-bjlevel";
    case StopKind::UntilTopLevel: return "until-toplevel";
    case StopKind::UntilHighLevel: return "until-highlevel";
  }
  return "?";
}

inline std::string to_string(AnalysisMode m) { return m == AnalysisMode::Regular ? "regular" : "extended"; }

/// Accepts the full names (`weaken-any`) and the short CLI forms (`any`).
inline WeakeningStrategy parse_weakening(std::string_view s) {
  if (s == "never" || s == "never-weaken") return WeakeningStrategy::NeverWeaken;
  if (s == "any" || s == "weaken-any") return WeakeningStrategy::WeakenAny;
  if (s == "ordered" || s == "weaken-ordered") return WeakeningStrategy::WeakenOrdered;
  throw std::invalid_argument("unknown weakening strategy '" + std::string(s) + "'");
}

inline StopKind parse_stop(std::string_view s) {
  if (s == "bjlevel" || s == "until-bjlevel") return StopKind::UntilBjLevel;
  if (s == "toplevel" || s == "until-toplevel") return StopKind::UntilTopLevel;
  if (s == "highlevel" || s == "until-highlevel") return StopKind::UntilHighLevel;
  throw std::invalid_argument("unknown stop criterion '" + std::string(s) + "'");
}

inline AnalysisMode parse_mode(std::string_view s) {
  if (s == "regular") return AnalysisMode::Regular;
  if (s == "extended") return AnalysisMode::Extended;
  throw std::invalid_argument("unknown analysis mode '" + std::string(s) + "'");
}

/// `regular`, or `extended/<weakening>/<stop>[/<p>/<q>]`.
inline std::string label(const AnalysisConfig& c) {
  if (c.mode == AnalysisMode::Regular) return "regular";
  std::string s = "extended/" + to_string(c.weakening) + "/" + to_string(c.stop.kind);
  if (c.stop.kind == StopKind::UntilHighLevel && !(c.stop.fraction == Fraction{1, 10}))
    s += "/" + std::to_string(c.stop.fraction.num) + "/" + std::to_string(c.stop.fraction.den);
  return s;
}

/// All ten combinations: regular plus every (weakening, stop) pair.
inline std::vector<AnalysisConfig> all_configs() {
  std::vector<AnalysisConfig> out{AnalysisConfig::regular()};
  for (auto w : {WeakeningStrategy::NeverWeaken, WeakeningStrategy::WeakenAny, WeakeningStrategy::WeakenOrdered})
    for (auto k : {StopKind::UntilBjLevel, StopKind::UntilTopLevel, StopKind::UntilHighLevel})
      out.push_back(AnalysisConfig::extended(w, {k, {1, 10}}));
  return out;
}

// ---------------------------------------------------------------------------

/// The constraint a cancellation would produce; nothing is committed.
inline Constraint candidate_result(const Constraint& current, const Constraint& reason, Literal pivot) {
  return cancel(current, reason, pivot);
}

struct Conflicting {
  Level level = 0;
  friend bool operator==(Conflicting, Conflicting) = default;
};

struct Violated {
  friend bool operator==(Violated, Violated) = default;
};

using InvariantStatus = std::variant<AssertionInfo, Conflicting, Violated>;

/// Accepts a candidate that is assertive at some level <= b (reporting the
/// first such level) or conflicting at a level <= b.
inline InvariantStatus invariant_holds(const Constraint& candidate, const Trail& trail, Level b) {
  if (candidate.is_tautology()) return Violated{};
  AssertionStatus st = first_assertive_level(candidate, trail, b);
  if (auto* info = std::get_if<AssertionInfo>(&st)) return std::move(*info);
  if (auto* c = std::get_if<ConflictingAt>(&st)) return Conflicting{c->level};
  return Violated{};
}

inline bool is_violated(const InvariantStatus& s) { return std::holds_alternative<Violated>(s); }

struct Restored {
  Constraint reason;     // the weakened reason
  Constraint candidate;  // cancel(current, reason, pivot)
  InvariantStatus status;
};

/// Weakens literals not falsified at level <= b out of the reason until the
/// cancellation satisfies the invariant again. nullopt means "skip this
/// cancellation".
inline std::optional<Restored> restore_invariant(const Constraint& current, const Constraint& reason, Literal pivot,
                                                 const Trail& trail, Level b, WeakeningStrategy strategy) {
  if (strategy == WeakeningStrategy::NeverWeaken) return std::nullopt;

  // Weakening order key: (assigned-at-b, level, var) for weaken-ordered,
  // plain var order for weaken-any.
  auto pick_next = [&](const Constraint& r) -> std::optional<Literal> {
    std::optional<Literal> best;
    std::tuple<bool, Level, Var> best_key{};
    for (const Term& t : r.terms()) {
      if (t.lit.var() == pivot.var() || trail.is_false_at(t.lit, b)) continue;
      if (strategy == WeakeningStrategy::WeakenAny) return t.lit;
      const bool assigned = trail.assigned_at(t.lit.var(), b);
      std::tuple<bool, Level, Var> key{assigned, assigned ? trail.level_of(t.lit.var()) : 0, t.lit.var()};
      if (!best || key < best_key) {
        best = t.lit;
        best_key = key;
      }
    }
    return best;
  };

  Constraint r = reason;
  for (;;) {
    auto lit = pick_next(r);
    if (!lit) return std::nullopt;
    r = canonicalize(weaken(r, *lit));
    if (r.is_tautology() || !r.contains(~pivot)) return std::nullopt;
    Constraint cand = cancel(current, r, pivot);
    InvariantStatus st = invariant_holds(cand, trail, b);
    if (!is_violated(st)) return Restored{std::move(r), std::move(cand), std::move(st)};
  }
}

/// True once continuing can no longer improve on level b.
inline bool should_stop(const Trail& trail, Level b, const StopCriterion& criterion) {
  const Level top = trail.current_level();
  if (top <= b) return true;
  switch (criterion.kind) {
    case StopKind::UntilBjLevel:
      return false;
    case StopKind::UntilTopLevel:
      return b == 0;
    case StopKind::UntilHighLevel: {
      // b <= ceil(fraction * top)
      const std::int64_t ceil = (criterion.fraction.num * top + criterion.fraction.den - 1) / criterion.fraction.den;
      return b <= ceil;
    }
  }
  return true;
}

/// Keeps cancelling after `first` (assertive at first.assertion.level) while
/// maintaining the non-worsening invariant. `trail` is the working trail left
/// behind by analyze_conflict and keeps being popped.
inline AnalysisOutcome continue_analysis(Learned first, Trail& trail, AnalysisContext& ctx,
                                         const AnalysisConfig& config) {
  Constraint current = std::move(first.constraint);
  AssertionInfo info = std::move(first.assertion);
  if (ctx.level_trace != nullptr) ctx.level_trace->push_back(info.level);

  while (!should_stop(trail, info.level, config.stop) && !trail.empty()) {
    const TrailEntry e = trail.back();
    const Literal pivot = ~e.lit;
    if (e.reason.is_decision() || !current.contains(pivot)) {
      trail.pop();
      continue;
    }
    const Constraint& reason = ctx.reason(e.reason.id());
    Constraint cand = candidate_result(current, reason, pivot);
    InvariantStatus st = invariant_holds(cand, trail, info.level);
    if (is_violated(st)) {
      auto restored = restore_invariant(current, reason, pivot, trail, info.level, config.weakening);
      if (!restored) {
        trail.pop();
        continue;
      }
      cand = std::move(restored->candidate);
      st = std::move(restored->status);
    }

    current = std::move(cand);
    ctx.committed(pivot, e.reason.id(), current);
    trail.pop();

    if (auto* a = std::get_if<AssertionInfo>(&st)) {
      info = std::move(*a);
      if (ctx.level_trace != nullptr) ctx.level_trace->push_back(info.level);
      continue;
    }

    // Conflicting again: restart a regular analysis from here, ignoring the
    // assignments above the conflicting level, then resume.
    const Level at = std::get<Conflicting>(st).level;
    if (at == 0) return Refuted{std::move(current)};
    trail.backjump_to(at);
    AnalysisOutcome again = analyze_conflict(current, trail, ctx);
    if (auto* r = std::get_if<Refuted>(&again)) return std::move(*r);
    auto& learned = std::get<Learned>(again);
    current = std::move(learned.constraint);
    info = std::move(learned.assertion);
    if (ctx.level_trace != nullptr) ctx.level_trace->push_back(info.level);
  }
  return Learned{std::move(current), std::move(info)};
}

}  // namespace pbjump
