#pragma once

// Normalized pseudo-Boolean constraints  sum(coef_i * lit_i) >= degree  and the
// cutting-planes rules used by conflict analysis: cancellation, weakening and
// saturation. Values are immutable once built.

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pbjump/literal.hpp"

namespace pbjump {

using BigInt = boost::multiprecision::cpp_int;

struct LiteralAbsent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PivotAbsent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Term {
  BigInt coef;
  Literal lit;

  friend bool operator==(const Term&, const Term&) = default;
};

class Constraint {
 public:
  /// The canonical tautology `0 >= 0`.
  Constraint() = default;

  /// Builds a normalized constraint. Terms are sorted by variable; every
  /// coefficient must be positive and no variable may repeat. A degree <= 0
  /// yields the canonical tautology.
  Constraint(std::vector<Term> terms, BigInt degree) : terms_(std::move(terms)), degree_(std::move(degree)) {
    if (degree_ <= 0) {
      terms_.clear();
      degree_ = 0;
      return;
    }
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.lit.var() < b.lit.var(); });
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i].coef <= 0) throw std::invalid_argument("constraint coefficients must be positive");
      if (terms_[i].lit.var() == 0) throw std::invalid_argument("variable index 0 is reserved");
      if (i > 0 && terms_[i - 1].lit.var() == terms_[i].lit.var())
        throw std::invalid_argument("variable occurs twice in constraint");
    }
  }

  static Constraint tautology() { return {}; }

  /// `sum(lits) >= degree` with unit coefficients.
  static Constraint cardinality(const std::vector<Literal>& lits, BigInt degree) {
    std::vector<Term> ts;
    ts.reserve(lits.size());
    for (Literal l : lits) ts.push_back({1, l});
    return {std::move(ts), std::move(degree)};
  }

  const std::vector<Term>& terms() const { return terms_; }
  const BigInt& degree() const { return degree_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Term on variable `v`, whatever its polarity.
  const Term* find(Var v) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
                               [](const Term& t, Var x) { return t.lit.var() < x; });
    return (it != terms_.end() && it->lit.var() == v) ? &*it : nullptr;
  }

  /// Coefficient of `l` with exactly this polarity.
  std::optional<BigInt> coef_of(Literal l) const {
    const Term* t = find(l.var());
    if (t == nullptr || t->lit != l) return std::nullopt;
    return t->coef;
  }

  bool contains(Literal l) const {
    const Term* t = find(l.var());
    return t != nullptr && t->lit == l;
  }

  BigInt coef_sum() const {
    BigInt s = 0;
    for (const Term& t : terms_) s += t.coef;
    return s;
  }

  /// Satisfied by every assignment. Normalization makes degree 0 the only shape.
  bool is_tautology() const { return degree_ == 0; }

  /// Falsified by every assignment (`0 >= 1` and anything whose coefficients
  /// cannot reach the degree).
  bool is_contradiction() const { return coef_sum() < degree_; }

  bool is_saturated() const {
    return std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.coef <= degree_; });
  }

  bool is_clause() const {
    return degree_ == 1 && std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coef == 1; });
  }

  /// Evaluates under a total assignment indexed by variable (index 0 unused).
  bool satisfied_by(const std::vector<bool>& assignment) const {
    BigInt lhs = 0;
    for (const Term& t : terms_)
      if (assignment.at(t.lit.var()) == t.lit.positive()) lhs += t.coef;
    return lhs >= degree_;
  }

  friend bool operator==(const Constraint&, const Constraint&) = default;

 private:
  std::vector<Term> terms_;
  BigInt degree_ = 0;
};

/// OPB-style rendering: `+2 x1 +1 ~x3 >= 2`; the empty left side prints as `0`.
inline std::string to_string(const Constraint& c, const VarNamer& namer = default_var_name) {
  std::ostringstream os;
  if (c.empty()) os << "0 ";
  for (const Term& t : c.terms()) os << '+' << t.coef << ' ' << to_string(t.lit, namer) << ' ';
  os << ">= " << c.degree();
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Constraint& c) { return os << to_string(c); }

// ---------------------------------------------------------------------------
// Raw (pre-normalization) constraints

enum class Relation { Less, LessEq, Eq, GreaterEq, Greater };

struct RawTerm {
  BigInt coef;
  Literal lit;

  friend bool operator==(const RawTerm&, const RawTerm&) = default;
};

struct RawConstraint {
  std::vector<RawTerm> terms;
  Relation relation = Relation::GreaterEq;
  BigInt bound = 0;

  friend bool operator==(const RawConstraint&, const RawConstraint&) = default;
};

namespace detail {

// sum(terms) >= bound over arbitrary signed coefficients and literals.
inline Constraint normalize_geq(const std::vector<RawTerm>& terms, BigInt bound, bool negate) {
  std::map<Var, BigInt> net;  // coefficient on the positive literal
  if (negate) bound = -bound;
  for (const RawTerm& t : terms) {
    BigInt c = negate ? BigInt(-t.coef) : t.coef;
    if (t.lit.positive()) {
      net[t.lit.var()] += c;
    } else {
      // c * ~x = c - c * x
      net[t.lit.var()] -= c;
      bound -= c;
    }
  }
  std::vector<Term> out;
  for (auto& [v, c] : net) {
    if (c > 0) {
      out.push_back({c, Literal::pos(v)});
    } else if (c < 0) {
      // c * x = |c| * ~x - |c|
      bound -= c;
      out.push_back({BigInt(-c), Literal::neg(v)});
    }
  }
  return {std::move(out), std::move(bound)};
}

}  // namespace detail

/// Rewrites any linear (in)equality into one normalized `>=` constraint, or two
/// for an equality (the `>=` side first).
inline std::vector<Constraint> normalize_raw(const RawConstraint& raw) {
  switch (raw.relation) {
    case Relation::GreaterEq:
      return {detail::normalize_geq(raw.terms, raw.bound, false)};
    case Relation::Greater:
      return {detail::normalize_geq(raw.terms, raw.bound + 1, false)};
    case Relation::LessEq:
      return {detail::normalize_geq(raw.terms, raw.bound, true)};
    case Relation::Less:
      return {detail::normalize_geq(raw.terms, raw.bound - 1, true)};
    case Relation::Eq:
      return {detail::normalize_geq(raw.terms, raw.bound, false), detail::normalize_geq(raw.terms, raw.bound, true)};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Inference rules

/// Clamps every coefficient to the degree.
inline Constraint saturate(const Constraint& c) {
  std::vector<Term> ts = c.terms();
  for (Term& t : ts)
    if (t.coef > c.degree()) t.coef = c.degree();
  return {std::move(ts), c.degree()};
}

/// Saturation, plus rewriting `d*l1 + ... + d*lk >= d` to the clause it is.
/// Every derived constraint goes through here.
inline Constraint canonicalize(const Constraint& c) {
  Constraint s = saturate(c);
  if (!s.empty() && s.degree() > 1 &&
      std::all_of(s.terms().begin(), s.terms().end(), [&](const Term& t) { return t.coef == s.degree(); })) {
    std::vector<Literal> lits;
    for (const Term& t : s.terms()) lits.push_back(t.lit);
    return Constraint::cardinality(lits, 1);
  }
  return s;
}

/// Drops the term on `l` and lowers the degree by its coefficient.
inline Constraint weaken(const Constraint& c, Literal l) {
  const Term* hit = c.find(l.var());
  if (hit == nullptr || hit->lit != l) throw LiteralAbsent("weaken: literal " + to_string(l) + " not in constraint");
  std::vector<Term> ts;
  ts.reserve(c.size() - 1);
  for (const Term& t : c.terms())
    if (t.lit.var() != l.var()) ts.push_back(t);
  return {std::move(ts), c.degree() - hit->coef};
}

/// Multiplier pair (mu, nu) with mu*alpha = nu*beta = lcm(alpha, beta).
inline std::pair<BigInt, BigInt> cancel_multipliers(const BigInt& alpha, const BigInt& beta) {
  BigInt l = boost::multiprecision::lcm(alpha, beta);
  return {l / alpha, l / beta};
}

/// Generalized resolution on `pivot`, which must occur in `c1` while its
/// negation occurs in `c2`. Opposite literals on any variable are merged
/// (a*l + b*~l = (a-b)*l + b). The result is canonicalized.
inline Constraint cancel(const Constraint& c1, const Constraint& c2, Literal pivot) {
  auto alpha = c1.coef_of(pivot);
  auto beta = c2.coef_of(~pivot);
  if (!alpha || !beta) throw PivotAbsent("cancel: pivot " + to_string(pivot) + " not resolvable");
  auto [mu, nu] = cancel_multipliers(*alpha, *beta);

  BigInt degree = mu * c1.degree() + nu * c2.degree();
  std::vector<Term> out;
  out.reserve(c1.size() + c2.size());
  auto a = c1.terms().begin(), ae = c1.terms().end();
  auto b = c2.terms().begin(), be = c2.terms().end();
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->lit.var() < b->lit.var())) {
      out.push_back({mu * a->coef, a->lit});
      ++a;
    } else if (a == ae || b->lit.var() < a->lit.var()) {
      out.push_back({nu * b->coef, b->lit});
      ++b;
    } else {
      BigInt ca = mu * a->coef, cb = nu * b->coef;
      if (a->lit == b->lit) {
        out.push_back({ca + cb, a->lit});
      } else if (ca > cb) {
        degree -= cb;
        out.push_back({ca - cb, a->lit});
      } else if (cb > ca) {
        degree -= ca;
        out.push_back({cb - ca, b->lit});
      } else {
        degree -= ca;
      }
      ++a;
      ++b;
    }
  }
  if (degree <= 0) return Constraint::tautology();
  return canonicalize(Constraint(std::move(out), std::move(degree)));
}

}  // namespace pbjump
