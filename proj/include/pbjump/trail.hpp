#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbjump/literal.hpp"

namespace pbjump {

using ConstraintId = std::uint32_t;
using Level = int;

struct AlreadyAssigned : std::logic_error {
  using std::logic_error::logic_error;
};

/// Why a literal is on the trail: a decision, or the constraint that propagated it.
class Reason {
 public:
  static constexpr Reason decision() { return Reason(kDecision); }
  static constexpr Reason constraint(ConstraintId id) { return Reason(id); }

  constexpr bool is_decision() const { return id_ == kDecision; }
  constexpr ConstraintId id() const { return id_; }

  friend constexpr bool operator==(Reason, Reason) = default;

 private:
  static constexpr ConstraintId kDecision = std::numeric_limits<ConstraintId>::max();
  constexpr explicit Reason(ConstraintId id) : id_(id) {}
  ConstraintId id_;
};

struct TrailEntry {
  Literal lit;  // the literal made true
  Level level;
  Reason reason;
};

struct Assignment {
  bool value;  // value of the variable (not of a literal)
  Level level;
  Reason reason;
};

/// Assignment stack ordered by decision level, with O(1) per-variable lookup.
class Trail {
 public:
  Trail() = default;
  explicit Trail(std::size_t num_vars) { ensure_vars(num_vars); }

  void ensure_vars(std::size_t num_vars) {
    if (state_.size() < num_vars + 1) state_.resize(num_vars + 1);
  }
  std::size_t num_vars() const { return state_.empty() ? 0 : state_.size() - 1; }

  /// Decisions open a new level; propagations stay on the current one.
  void assign(Literal l, Reason reason) {
    ensure_vars(l.var());
    Slot& s = state_[l.var()];
    if (s.assigned) throw AlreadyAssigned("variable " + default_var_name(l.var()) + " already assigned");
    if (reason.is_decision()) ++level_;
    s = Slot{true, l.positive(), level_, reason};
    entries_.push_back({l, level_, reason});
  }

  /// Removes the most recent entry.
  void pop() {
    const TrailEntry& e = entries_.back();
    state_[e.lit.var()].assigned = false;
    entries_.pop_back();
    level_ = entries_.empty() ? 0 : entries_.back().level;
  }

  /// Undoes every assignment above `level`.
  void backjump_to(Level level) {
    while (!entries_.empty() && entries_.back().level > level) pop();
    if (level < level_) level_ = level;
  }

  std::optional<Assignment> query(Var v) const {
    if (v >= state_.size() || !state_[v].assigned) return std::nullopt;
    const Slot& s = state_[v];
    return Assignment{s.value, s.level, s.reason};
  }

  bool assigned(Var v) const { return v < state_.size() && state_[v].assigned; }
  bool is_true(Literal l) const { return assigned(l.var()) && state_[l.var()].value == l.positive(); }
  bool is_false(Literal l) const { return assigned(l.var()) && state_[l.var()].value != l.positive(); }

  /// Level of an assigned variable; undefined for unassigned ones.
  Level level_of(Var v) const { return state_[v].level; }

  bool is_false_at(Literal l, Level b) const { return is_false(l) && state_[l.var()].level <= b; }
  bool is_true_at(Literal l, Level b) const { return is_true(l) && state_[l.var()].level <= b; }
  bool assigned_at(Var v, Level b) const { return assigned(v) && state_[v].level <= b; }

  Level current_level() const { return level_; }
  const std::vector<TrailEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TrailEntry& back() const { return entries_.back(); }

  /// Debug dump, one entry per line: `<lit> @<level> <reason-id|DEC>`.
  std::string dump(const VarNamer& namer = default_var_name) const {
    std::ostringstream os;
    for (const TrailEntry& e : entries_) {
      os << to_string(e.lit, namer) << " @" << e.level << ' ';
      if (e.reason.is_decision())
        os << "DEC";
      else
        os << e.reason.id();
      os << '\n';
    }
    return os.str();
  }

 private:
  struct Slot {
    bool assigned = false;
    bool value = false;
    Level level = 0;
    Reason reason = Reason::decision();
  };

  std::vector<TrailEntry> entries_;
  std::vector<Slot> state_;
  Level level_ = 0;
};

}  // namespace pbjump
