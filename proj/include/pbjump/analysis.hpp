#pragma once

// Regular PB conflict analysis: walk the trail backwards, cancelling the
// current constraint against the reason of each falsified literal, until the
// derived constraint is assertive at some decision level.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pbjump/constraint.hpp"
#include "pbjump/propagation.hpp"
#include "pbjump/trail.hpp"

namespace pbjump {

struct MalformedState : std::logic_error {
  using std::logic_error::logic_error;
};

/// First level at which a constraint propagates, and what it propagates there.
struct AssertionInfo {
  Level level = 0;
  std::vector<Literal> propagated;

  friend bool operator==(const AssertionInfo&, const AssertionInfo&) = default;
};

struct NotAssertive {
  friend bool operator==(NotAssertive, NotAssertive) = default;
};

struct ConflictingAt {
  Level level = 0;
  friend bool operator==(ConflictingAt, ConflictingAt) = default;
};

using AssertionStatus = std::variant<AssertionInfo, NotAssertive, ConflictingAt>;

/// Scans levels 0..max_level (default: the trail's current level) and reports
/// the first one at which `c` is either conflicting or propagating.
inline AssertionStatus first_assertive_level(const Constraint& c, const Trail& trail,
                                             std::optional<Level> max_level = std::nullopt) {
  const Level top = max_level.value_or(trail.current_level());
  // Slack and the unassigned set only change at levels where some literal of c
  // is assigned, so those (plus 0) are the only candidates.
  std::vector<Level> levels{0};
  for (const Term& t : c.terms())
    if (trail.assigned(t.lit.var()) && trail.level_of(t.lit.var()) <= top)
      levels.push_back(trail.level_of(t.lit.var()));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  for (Level b : levels) {
    BigInt slack = slack_at_level(c, trail, b);
    if (slack < 0) return ConflictingAt{b};
    AssertionInfo info{b, {}};
    for (const Term& t : c.terms())
      if (!trail.assigned_at(t.lit.var(), b) && t.coef > slack) info.propagated.push_back(t.lit);
    if (!info.propagated.empty()) return info;
  }
  return NotAssertive{};
}

/// One cancellation performed during analysis.
struct DerivationStep {
  Literal pivot;
  ConstraintId reason;
  Constraint result;
};

/// Records cancellations; renders `CANCEL <pivot> <reason-id> -> <constraint>`.
class DerivationLog {
 public:
  void record(Literal pivot, ConstraintId reason, const Constraint& result) { steps_.push_back({pivot, reason, result}); }
  const std::vector<DerivationStep>& steps() const { return steps_; }
  void clear() { steps_.clear(); }

  std::vector<std::string> lines(const VarNamer& namer = default_var_name) const {
    std::vector<std::string> out;
    out.reserve(steps_.size());
    for (const DerivationStep& s : steps_)
      out.push_back("CANCEL " + to_string(s.pivot, namer) + " " + std::to_string(s.reason) + " -> " +
                    to_string(s.result, namer));
    return out;
  }

 private:
  std::vector<DerivationStep> steps_;
};

/// Shared state threaded through one conflict analysis.
struct AnalysisContext {
  std::span<const Constraint> reasons;
  std::uint64_t cancellations = 0;
  DerivationLog* log = nullptr;
  /// Assertion levels committed by extended analysis, in commit order.
  std::vector<Level>* level_trace = nullptr;

  const Constraint& reason(ConstraintId id) const {
    if (id >= reasons.size()) throw MalformedState("reason id " + std::to_string(id) + " out of range");
    return reasons[id];
  }

  void committed(Literal pivot, ConstraintId reason, const Constraint& result) {
    ++cancellations;
    if (log != nullptr) log->record(pivot, reason, result);
  }
};

/// Weakens non-falsified literals (other than the one the reason propagated)
/// out of `reason` until cancelling it with `conflict` on `pivot` is
/// guaranteed to stay conflicting by slack subadditivity. Smallest
/// coefficients go first, ties by variable. Returns nullopt when the reason
/// degenerates into a tautology.
inline std::optional<Constraint> reduce_reason(const Constraint& reason, const Constraint& conflict,
                                               const Trail& trail, Literal pivot) {
  auto alpha = conflict.coef_of(pivot);
  if (!alpha) throw PivotAbsent("reduce_reason: pivot " + to_string(pivot) + " not in conflict");
  const BigInt conflict_slack = slack_current(conflict, trail);
  Constraint r = reason;
  for (;;) {
    auto beta = r.coef_of(~pivot);
    if (!beta) throw PivotAbsent("reduce_reason: reason does not contain " + to_string(~pivot));
    auto [mu, nu] = cancel_multipliers(*alpha, *beta);
    if (mu * conflict_slack + nu * slack_current(r, trail) < 0) return r;

    const Term* pick = nullptr;
    for (const Term& t : r.terms()) {
      if (t.lit.var() == pivot.var() || trail.is_false(t.lit)) continue;
      if (pick == nullptr || t.coef < pick->coef) pick = &t;
    }
    if (pick == nullptr) return r;
    r = canonicalize(weaken(r, pick->lit));
    if (r.is_tautology()) return std::nullopt;
  }
}

struct Learned {
  Constraint constraint;
  AssertionInfo assertion;
};

/// The derived constraint is conflicting at level 0: the input is unsatisfiable.
struct Refuted {
  Constraint constraint;
};

using AnalysisOutcome = std::variant<Learned, Refuted>;

/// Analyzes `conflict` against `trail`, popping entries from the (working
/// copy of the) trail as they are processed. Stops at the first assertive
/// constraint.
inline AnalysisOutcome analyze_conflict(const Constraint& conflict, Trail& trail, AnalysisContext& ctx) {
  Constraint current = conflict;
  for (;;) {
    AssertionStatus st = first_assertive_level(current, trail);
    if (auto* info = std::get_if<AssertionInfo>(&st)) return Learned{std::move(current), std::move(*info)};
    if (std::holds_alternative<NotAssertive>(st)) throw MalformedState("analysis lost the conflict");
    if (std::get<ConflictingAt>(st).level == 0) return Refuted{std::move(current)};
    if (trail.empty()) throw MalformedState("trail exhausted above level 0");

    const TrailEntry e = trail.back();
    const Literal pivot = ~e.lit;
    if (!e.reason.is_decision() && current.contains(pivot)) {
      auto reduced = reduce_reason(ctx.reason(e.reason.id()), current, trail, pivot);
      if (!reduced) throw MalformedState("reason of " + to_string(e.lit) + " reduced to a tautology");
      current = cancel(current, *reduced, pivot);
      ctx.committed(pivot, e.reason.id(), current);
    }
    trail.pop();
  }
}

/// Completes a refutation from a constraint conflicting at level 0 by
/// cancelling every level-0 propagation it depends on. The result is a
/// contradiction (`0 >= 1` in the common case).
inline Constraint refute_at_root(const Constraint& conflicting, Trail& trail, AnalysisContext& ctx) {
  trail.backjump_to(0);
  Constraint current = conflicting;
  while (!trail.empty() && !current.empty()) {
    const TrailEntry e = trail.back();
    const Literal pivot = ~e.lit;
    if (!e.reason.is_decision() && current.contains(pivot)) {
      auto reduced = reduce_reason(ctx.reason(e.reason.id()), current, trail, pivot);
      if (!reduced) throw MalformedState("root reason reduced to a tautology");
      current = cancel(current, *reduced, pivot);
      ctx.committed(pivot, e.reason.id(), current);
    }
    trail.pop();
  }
  return current;
}

}  // namespace pbjump
