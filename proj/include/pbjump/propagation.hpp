#pragma once

// Slack bookkeeping and unit propagation.
//
// The slack of  sum(a_i * l_i) >= d  is  sum{a_i : l_i not falsified} - d.
// A negative slack means the constraint is conflicting; any unassigned literal
// whose coefficient exceeds the slack is implied.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pbjump/constraint.hpp"
#include "pbjump/trail.hpp"

namespace pbjump {

inline BigInt slack_current(const Constraint& c, const Trail& trail) {
  BigInt s = -c.degree();
  for (const Term& t : c.terms())
    if (!trail.is_false(t.lit)) s += t.coef;
  return s;
}

/// Slack with every assignment above level `b` ignored.
inline BigInt slack_at_level(const Constraint& c, const Trail& trail, Level b) {
  BigInt s = -c.degree();
  for (const Term& t : c.terms())
    if (!trail.is_false_at(t.lit, b)) s += t.coef;
  return s;
}

/// Owns the constraint database, the trail, and one incrementally maintained
/// slack per constraint. Every trail mutation goes through this class so the
/// slacks never drift from the trail.
class Propagator {
 public:
  explicit Propagator(std::size_t num_vars = 0) : trail_(num_vars) { occurs_.resize(2 * (num_vars + 1)); }

  /// Stores `c` saturated; it is examined on the next propagate() call.
  ConstraintId add_constraint(const Constraint& c) {
    auto id = static_cast<ConstraintId>(constraints_.size());
    constraints_.push_back(saturate(c));
    const Constraint& stored = constraints_.back();
    for (const Term& t : stored.terms()) {
      ensure_var(t.lit.var());
      occurs_[t.lit.code()].push_back({id, t.coef});
    }
    slack_.push_back(slack_current(stored, trail_));
    pending_.push_back(id);
    return id;
  }

  std::size_t size() const { return constraints_.size(); }
  const Constraint& constraint(ConstraintId id) const { return constraints_[id]; }
  std::span<const Constraint> constraints() const { return constraints_; }
  const Trail& trail() const { return trail_; }
  const BigInt& slack(ConstraintId id) const { return slack_[id]; }
  std::size_t num_vars() const { return trail_.num_vars(); }

  void assign(Literal l, Reason reason) {
    ensure_var(l.var());
    trail_.assign(l, reason);
    for (const Occurrence& o : occurs_[(~l).code()]) slack_[o.id] -= o.coef;
  }

  void decide(Literal l) { assign(l, Reason::decision()); }

  void backjump_to(Level level) {
    while (!trail_.empty() && trail_.back().level > level) {
      Literal l = trail_.back().lit;
      for (const Occurrence& o : occurs_[(~l).code()]) slack_[o.id] += o.coef;
      trail_.pop();
    }
    trail_.backjump_to(level);
    if (queue_head_ > trail_.size()) queue_head_ = trail_.size();
  }

  /// Runs unit propagation to fixpoint. Returns the first conflicting
  /// constraint found, sweeping pending constraints and then each trail
  /// literal's falsified occurrences in constraint-id order.
  std::optional<ConstraintId> propagate() {
    while (!pending_.empty()) {
      std::vector<ConstraintId> batch;
      batch.swap(pending_);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!examine(batch[i])) {
          pending_.insert(pending_.begin(), batch.begin() + static_cast<std::ptrdiff_t>(i) + 1, batch.end());
          return batch[i];
        }
      }
    }
    while (queue_head_ < trail_.size()) {
      Literal falsified = ~trail_.entries()[queue_head_].lit;
      // Index loop: assignments inside examine() never touch occurs_.
      const auto& occ = occurs_[falsified.code()];
      for (std::size_t i = 0; i < occ.size(); ++i) {
        if (!examine(occ[i].id)) return occ[i].id;
      }
      ++queue_head_;
    }
    return std::nullopt;
  }

  /// Number of literals assigned by propagation since construction.
  std::uint64_t propagations() const { return propagations_; }

 private:
  struct Occurrence {
    ConstraintId id;
    BigInt coef;
  };

  void ensure_var(Var v) {
    trail_.ensure_vars(v);
    if (occurs_.size() < 2 * (static_cast<std::size_t>(v) + 1)) occurs_.resize(2 * (static_cast<std::size_t>(v) + 1));
  }

  // false on conflict
  bool examine(ConstraintId id) {
    if (slack_[id] < 0) return false;
    const Constraint& c = constraints_[id];
    for (const Term& t : c.terms()) {
      if (t.coef > slack_[id] && !trail_.assigned(t.lit.var())) {
        assign(t.lit, Reason::constraint(id));
        ++propagations_;
      }
    }
    return true;
  }

  std::vector<Constraint> constraints_;
  std::vector<BigInt> slack_;
  std::vector<std::vector<Occurrence>> occurs_;  // by literal code
  std::vector<ConstraintId> pending_;
  Trail trail_;
  std::size_t queue_head_ = 0;
  std::uint64_t propagations_ = 0;
};

}  // namespace pbjump
