#pragma once

// Shared test helpers: brute-force oracles, seeded generators and the
// hand-built trails of the worked examples.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pbjump/pbjump.hpp"

namespace pbtest {

using namespace pbjump;

// ---------------------------------------------------------------------------
// Enumeration oracles (n <= ~16)

/// Calls f on every total assignment of n variables (index 0 unused).
inline void for_each_assignment(std::size_t n, const std::function<void(const std::vector<bool>&)>& f) {
  std::vector<bool> a(n + 1, false);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    for (std::size_t v = 1; v <= n; ++v) a[v] = ((m >> (v - 1)) & 1) != 0;
    f(a);
  }
}

inline bool satisfies_all(const std::vector<Constraint>& cs, const std::vector<bool>& a) {
  for (const Constraint& c : cs)
    if (!c.satisfied_by(a)) return false;
  return true;
}

inline bool brute_force_sat(std::size_t n, const std::vector<Constraint>& cs) {
  bool sat = false;
  for_each_assignment(n, [&](const std::vector<bool>& a) { sat = sat || satisfies_all(cs, a); });
  return sat;
}

/// Every model of `premises` satisfies `c`.
inline bool entails(std::size_t n, const std::vector<Constraint>& premises, const Constraint& c) {
  bool ok = true;
  for_each_assignment(n, [&](const std::vector<bool>& a) {
    if (ok && satisfies_all(premises, a) && !c.satisfied_by(a)) ok = false;
  });
  return ok;
}

/// Raw constraint evaluated directly from its signed definition.
inline bool raw_holds(const RawConstraint& r, const std::vector<bool>& a) {
  BigInt lhs = 0;
  for (const RawTerm& t : r.terms) {
    bool val = a[t.lit.var()] == t.lit.positive();
    if (val) lhs += t.coef;
  }
  switch (r.relation) {
    case Relation::Less: return lhs < r.bound;
    case Relation::LessEq: return lhs <= r.bound;
    case Relation::Eq: return lhs == r.bound;
    case Relation::GreaterEq: return lhs >= r.bound;
    case Relation::Greater: return lhs > r.bound;
  }
  return false;
}

/// Literal value under a partial trail: true / false / unassigned.
inline std::optional<bool> lit_value(const Trail& t, Literal l) {
  if (!t.assigned(l.var())) return std::nullopt;
  return t.is_true(l);
}

// ---------------------------------------------------------------------------
// Seeded generators

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long between(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return between(0, 1) == 1; }
  std::mt19937_64& rng() { return rng_; }

  Literal literal(std::size_t n) { return {static_cast<Var>(between(1, static_cast<long>(n))), coin()}; }

  /// Normalized constraint over distinct variables of 1..n.
  Constraint constraint(std::size_t n, long max_coef, std::size_t max_width = 6, bool loose = false) {
    std::vector<Var> vs(n);
    for (std::size_t i = 0; i < n; ++i) vs[i] = static_cast<Var>(i + 1);
    std::shuffle(vs.begin(), vs.end(), rng_);
    std::size_t w = static_cast<std::size_t>(between(1, static_cast<long>(std::min(n, max_width))));
    std::vector<Term> ts;
    long sum = 0;
    for (std::size_t i = 0; i < w; ++i) {
      long c = between(1, max_coef);
      sum += c;
      ts.push_back({c, Literal(vs[i], coin())});
    }
    // loose: degree at most half the sum, so sets of these rarely clash at the root
    return {std::move(ts), between(1, loose ? std::max(1L, sum / 2) : sum)};
  }

  RawConstraint raw(std::size_t n, long max_coef, std::size_t max_width = 5) {
    RawConstraint r;
    std::size_t w = static_cast<std::size_t>(between(1, static_cast<long>(max_width)));
    long lo = 0, hi = 0;
    for (std::size_t i = 0; i < w; ++i) {
      long c = between(-max_coef, max_coef);
      (c < 0 ? lo : hi) += c;
      r.terms.push_back({c, literal(n)});  // repeated variables on purpose
    }
    r.relation = static_cast<Relation>(between(0, 4));
    r.bound = between(lo - 1, hi + 1);
    return r;
  }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Pigeonhole with 4 pigeons

/// p_{i,j} rendered as "p<i><j>".
inline VarNamer php_namer(std::size_t n) {
  return [n](Var v) {
    std::size_t i = (v - 1) / (n - 1) + 1, j = (v - 1) % (n - 1) + 1;
    return "p" + std::to_string(i) + std::to_string(j);
  };
}

inline Literal p(std::size_t i, std::size_t j, bool positive = true) { return {pigeon_var(4, i, j), positive}; }

/// Rendering with value@level annotations, coefficient 1 elided:
/// `~p11 (1@1) + ~p21 (1@3) + p43 (0@2) >= 3`. An empty left side prints `0`.
inline std::string render_annotated(const Constraint& c, const Trail& t, const VarNamer& namer) {
  std::string s;
  for (const Term& term : c.terms()) {
    if (!s.empty()) s += " + ";
    if (term.coef != 1) s += term.coef.str();
    s += (term.lit.positive() ? "" : "~") + namer(term.lit.var());
    if (t.assigned(term.lit.var()))
      s += std::string(" (") + (t.is_true(term.lit) ? "1" : "0") + "@" + std::to_string(t.level_of(term.lit.var())) + ")";
  }
  if (s.empty()) s = "0";
  return s + " >= " + c.degree().str();
}

struct PhpConflict {
  Propagator prop;
  ConstraintId conflict = 0;
};

/// Decides ~p11, ~p12, ~p21 on PHP(4), propagating after each, and returns the
/// state at the resulting conflict.
inline PhpConflict php4_conflict() {
  OpbInstance inst = gen_pigeonhole(4);
  PhpConflict s{Propagator(inst.variable_count), 0};
  for (const Constraint& c : inst.normalized()) s.prop.add_constraint(c);
  if (s.prop.propagate()) throw std::logic_error("PHP(4) conflicting at root");
  for (Literal d : {p(1, 1, false), p(1, 2, false), p(2, 1, false)}) {
    s.prop.decide(d);
    if (auto c = s.prop.propagate()) {
      s.conflict = *c;
      return s;
    }
  }
  throw std::logic_error("no conflict after the three decisions");
}

// ---------------------------------------------------------------------------
// Letter-named examples (a = 1 ... z = 26)

inline Var L(char ch) { return static_cast<Var>(ch - 'a' + 1); }
inline Literal pos(char ch) { return Literal::pos(L(ch)); }
inline Literal neg(char ch) { return Literal::neg(L(ch)); }
inline std::string letter_name(Var v) { return std::string(1, static_cast<char>('a' + v - 1)); }

struct Assigned {
  char var;
  bool value;
  Level level;
  bool decision = false;
  ConstraintId reason = 0;
};

/// Trail with one decision per level 1..top. Levels without a listed decision
/// get a fresh filler variable (numbered from 100). Listed entries appear in
/// the given order within their level, after the decision.
inline Trail build_trail(const std::vector<Assigned>& entries, Level top) {
  Trail t(200);
  Var filler = 100;
  for (Level lvl = 1; lvl <= top; ++lvl) {
    bool has_decision = false;
    for (const Assigned& e : entries)
      if (e.level == lvl && e.decision) {
        t.assign(Literal(L(e.var), e.value), Reason::decision());
        has_decision = true;
      }
    if (!has_decision) t.assign(Literal::pos(filler++), Reason::decision());
    for (const Assigned& e : entries)
      if (e.level == lvl && !e.decision) t.assign(Literal(L(e.var), e.value), Reason::constraint(e.reason));
  }
  return t;
}

inline Constraint make(std::vector<std::pair<long, Literal>> terms, long degree) {
  std::vector<Term> ts;
  for (auto& [c, l] : terms) ts.push_back({c, l});
  return {std::move(ts), degree};
}

/// Example with chi, rho1, rho2, rho3; reasons ids: rho1 = 1, rho2 = 2, rho3 = 3.
struct BranchExample {
  Constraint chi, rho1, rho2, rho3;
  Trail trail;
};

inline BranchExample branch_example() {
  BranchExample ex;
  ex.chi = make({{4, pos('a')}, {4, pos('b')}, {3, pos('c')}, {3, pos('d')}, {2, pos('e')}, {1, pos('f')}, {1, pos('g')},
                 {1, pos('z')}},
                8);
  ex.rho1 = make({{3, pos('i')}, {3, pos('j')}, {2, neg('f')}, {2, neg('g')}, {1, pos('h')}}, 5);
  ex.rho2 = make({{6, neg('c')}, {6, neg('d')}, {3, neg('j')}, {3, pos('k')}, {3, pos('l')}}, 15);
  ex.rho3 = make({{10, pos('w')}, {10, pos('x')}, {1, pos('y')}, {1, neg('z')}}, 11);
  ex.trail = build_trail(
      {
          {'a', false, 10},
          {'c', false, 20},
          {'i', false, 20},
          {'w', true, 25},
          {'x', false, 25},
          {'b', true, 30},
          {'d', false, 30},
          {'e', true, 30},
          {'l', false, 30},
          {'h', true, 40},
          {'k', false, 40},
          {'y', false, 40},
          {'j', false, 40, false, 2},
          {'z', false, 40, false, 3},
          {'f', false, 40, false, 1},
          {'g', false, 40, false, 1},
      },
      40);
  return ex;
}

/// Weakening example: the derived constraint, the reason for a, and the trail
/// ~e@1, ~f@2, b@3, d@3, c@4, ~g@4, ~h@5, a@5 (a propagated by reason id 1).
struct WeakeningExample {
  Constraint derived, reason;
  Trail trail;
};

inline WeakeningExample weakening_example() {
  WeakeningExample ex;
  ex.derived = make({{4, neg('a')}, {4, neg('b')}, {4, neg('c')}, {4, neg('d')}, {1, pos('e')}, {1, pos('f')},
                     {1, neg('g')}, {1, neg('h')}},
                    4);
  ex.reason = make({{2, pos('a')}, {2, pos('b')}, {2, pos('c')}, {2, pos('g')}, {2, pos('h')}}, 5);
  ex.trail = build_trail(
      {
          {'e', false, 1, true},
          {'f', false, 2, true},
          {'b', true, 3, true},
          {'d', true, 3},
          {'c', true, 4, true},
          {'g', false, 4},
          {'h', false, 5, true},
          {'a', true, 5, false, 1},
      },
      5);
  return ex;
}

// ---------------------------------------------------------------------------
// Solver helpers

struct OracleRun {
  SolveResult result;
  std::vector<Constraint> learned;
  std::vector<ConflictRecord> records;
};

inline OracleRun run_solver(std::size_t n, const std::vector<Constraint>& cs, const AnalysisConfig& cfg,
                            Heuristic h = Heuristic::fixed_order(), DerivationLog* log = nullptr) {
  Solver s(n, cs, cfg, std::move(h));
  s.set_record_conflicts(true);
  s.set_derivation_log(log);
  OracleRun r;
  r.result = s.solve();
  r.learned.assign(s.learned_constraints().begin(), s.learned_constraints().end());
  r.records = s.conflict_records();
  return r;
}

/// Levels committed during one conflict never increase and end at or below
/// the first assertive level.
inline bool non_worsening(const ConflictRecord& r) {
  for (std::size_t i = 1; i < r.committed.size(); ++i)
    if (r.committed[i] > r.committed[i - 1]) return false;
  if (r.final_level && r.first_level && *r.final_level > *r.first_level) return false;
  if (r.final_level && !r.committed.empty() && r.committed.back() != *r.final_level) return false;
  return true;
}

}  // namespace pbtest
