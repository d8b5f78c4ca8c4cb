#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace pbtest;

namespace {

// Backtracking enumeration with slack pruning. Exact, and fast enough for
// the 30 variables of PHP(6) where plain enumeration is not.
bool pruned_sat(std::size_t n, const std::vector<Constraint>& cs) {
  std::vector<int> val(n + 1, -1);
  auto viable = [&] {
    for (const Constraint& c : cs) {
      BigInt reach = 0;
      for (const Term& t : c.terms()) {
        int v = val[t.lit.var()];
        if (v < 0 || (v == 1) == t.lit.positive()) reach += t.coef;
      }
      if (reach < c.degree()) return false;
    }
    return true;
  };
  std::function<bool(std::size_t)> go = [&](std::size_t v) {
    if (!viable()) return false;
    if (v > n) return true;
    for (int b : {0, 1}) {
      val[v] = b;
      if (go(v + 1)) return true;
    }
    val[v] = -1;
    return false;
  };
  return go(1);
}

StatsRow sample_row() {
  StatsRow r;
  r.instance = "php-4";
  r.family = "pigeonhole";
  r.mode = "extended";
  r.weakening = "weaken-any";
  r.stop = "until-highlevel@1/10";
  r.verdict = "UNSAT";
  r.conflicts = 7;
  r.cancellations = 19;
  r.improved_backjumps = 1;
  r.total_backjumps = 5;
  r.improved_percent = improved_percent(1, 5);
  r.wall_time_us = 1234;
  return r;
}

std::vector<StatsRow> without_time(std::vector<StatsRow> rows) {
  for (StatsRow& r : rows) r.wall_time_us = 0;
  return rows;
}

}  // namespace

TEST(GenPigeonhole, FourPigeonsMatchesHandList) {
  OpbInstance inst = gen_pigeonhole(4);
  EXPECT_EQ(inst.variable_count, 12u);
  auto cs = inst.normalized();
  ASSERT_EQ(cs.size(), 7u);
  auto hole = [](std::size_t j) {
    std::vector<Literal> l;
    for (std::size_t i = 1; i <= 4; ++i) l.push_back(p(i, j, false));
    return Constraint::cardinality(l, 3);
  };
  auto pigeon = [](std::size_t i) { return Constraint::cardinality({p(i, 1), p(i, 2), p(i, 3)}, 1); };
  std::vector<Constraint> expect{hole(1), hole(2), hole(3), pigeon(1), pigeon(2), pigeon(3), pigeon(4)};
  EXPECT_EQ(cs, expect);
  EXPECT_EQ(pigeon_var(4, 2, 1), 4u);
}

TEST(GenPigeonhole, TwoPigeons) {
  OpbInstance inst = gen_pigeonhole(2);
  EXPECT_EQ(inst.variable_count, 2u);
  EXPECT_EQ(inst.constraints.size(), 3u);
  EXPECT_FALSE(brute_force_sat(2, inst.normalized()));
  EXPECT_THROW(gen_pigeonhole(1), std::invalid_argument);
}

TEST(GenPigeonhole, UnsatUpToSixByPrunedEnumeration) {
  for (std::size_t n = 2; n <= 6; ++n) {
    OpbInstance inst = gen_pigeonhole(n);
    EXPECT_FALSE(pruned_sat(inst.variable_count, inst.normalized())) << n;
    // Dropping one pigeon makes it satisfiable, so the oracle is not vacuous.
    auto cs = inst.normalized();
    cs.pop_back();
    EXPECT_TRUE(pruned_sat(inst.variable_count, cs)) << n;
  }
}

TEST(GenIrrelevant, ExtendedLearnsUnitClause) {
  for (std::size_t n : {3u, 10u}) {
    Scenario sc = gen_irrelevant_pattern(n);
    auto cs = sc.instance.normalized();
    ASSERT_EQ(cs.size(), n);
    Solver ext(n, cs, AnalysisConfig::extended(WeakeningStrategy::WeakenAny), Heuristic::scripted(sc.decisions, true));
    ext.set_record_conflicts(true);
    SolveResult r = ext.solve();
    EXPECT_EQ(r.verdict, Verdict::Satisfiable);
    ASSERT_FALSE(ext.learned_constraints().empty());
    EXPECT_EQ(ext.learned_constraints().front(), Constraint::cardinality({Literal::pos(1)}, 1)) << n;

  }
}

TEST(GenIrrelevant, RegularKeepsIrrelevantLiterals) {
  Scenario sc = gen_irrelevant_pattern(10);
  Solver reg(10, sc.instance.normalized(), AnalysisConfig::regular(), Heuristic::scripted(sc.decisions, true));
  reg.solve();
  ASSERT_FALSE(reg.learned_constraints().empty());
  EXPECT_EQ(reg.learned_constraints().front(),
            make({{8, Literal::pos(1)}, {2, Literal::neg(2)}, {2, Literal::neg(3)}, {2, Literal::neg(4)}}, 8));
}

TEST(GenIrrelevant, RegularOnThreeVariablesLearnsOtherUnit) {
  // 2~x1 + 2~x2 + 2~x3 >= 3 resolved with 2*(x1 + x3 >= 1) leaves 2~x2 >= 1,
  // saturated to ~x2 >= 1: already a unit, so no size gap at n = 3.
  Scenario sc = gen_irrelevant_pattern(3);
  Solver reg(3, sc.instance.normalized(), AnalysisConfig::regular(), Heuristic::scripted(sc.decisions, true));
  reg.solve();
  ASSERT_FALSE(reg.learned_constraints().empty());
  EXPECT_EQ(reg.learned_constraints().front(), Constraint::cardinality({Literal::neg(2)}, 1));
}

TEST(GenRandom, SeededAndValid) {
  RandomParams rp{42, 9, 12, 6};
  OpbInstance a = gen_random(rp), b = gen_random(rp);
  EXPECT_EQ(write_opb(a), write_opb(b));
  rp.seed = 43;
  EXPECT_NE(write_opb(a), write_opb(gen_random(rp)));
  EXPECT_EQ(a.constraints.size(), 12u);
  for (const RawConstraint& rc : a.constraints)
    for (const RawTerm& t : rc.terms) {
      EXPECT_GE(t.lit.var(), 1u);
      EXPECT_LE(t.lit.var(), 9u);
      EXPECT_LE(abs(t.coef), 6);
    }
}

TEST(ParseFamily, Forms) {
  FamilySpec f = parse_family("pigeonhole:4-8");
  EXPECT_EQ(f.kind, FamilyKind::Pigeonhole);
  EXPECT_EQ(f.first, 4u);
  EXPECT_EQ(f.count, 5u);
  f = parse_family("irrelevant:10");
  EXPECT_EQ(f.kind, FamilyKind::IrrelevantPattern);
  EXPECT_EQ(f.count, 1u);
  f = parse_family("random:7:3:10:20:5");
  EXPECT_EQ(f.random.seed, 7u);
  EXPECT_EQ(f.count, 3u);
  EXPECT_EQ(f.random.vars, 10u);
  EXPECT_EQ(f.random.constraints, 20u);
  EXPECT_EQ(f.random.max_coef, 5);
  auto ids = expand(f);
  ASSERT_EQ(ids.size(), 3u);
  EXPECT_EQ(ids[2].id, "random-s9-v10-c20-m5");
  for (const char* bad : {"pigeonhole:1", "pigeonhole:5-4", "irrelevant:2", "random:1", "random:1:0", "cnf:3", "pigeonhole:x"})
    EXPECT_THROW(parse_family(bad), std::invalid_argument) << bad;
}

TEST(ParseConfigs, Forms) {
  EXPECT_EQ(parse_configs("all").size(), 10u);
  auto cs = parse_configs("regular,extended:weaken-any:until-highlevel:1/4");
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].mode, AnalysisMode::Regular);
  EXPECT_EQ(cs[1].weakening, WeakeningStrategy::WeakenAny);
  EXPECT_EQ(cs[1].stop.kind, StopKind::UntilHighLevel);
  EXPECT_EQ(cs[1].stop.fraction.num, 1);
  EXPECT_EQ(cs[1].stop.fraction.den, 4);
  EXPECT_EQ(config_key(cs[1]), "extended/weaken-any/until-highlevel@1/4");
  EXPECT_THROW(parse_configs("extended:weaken-any"), std::invalid_argument);
  EXPECT_THROW(parse_configs("bogus"), std::invalid_argument);
}

TEST(RunBenchmark, PigeonholeAllUnsatAndOrdered) {
  auto configs = std::vector<AnalysisConfig>{AnalysisConfig::regular(), AnalysisConfig::extended(WeakeningStrategy::WeakenAny)};
  auto rows = run_benchmark({parse_family("pigeonhole:4-6")}, configs);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].instance, "php-4");
  EXPECT_EQ(rows[0].mode, "regular");
  EXPECT_EQ(rows[1].mode, "extended");
  EXPECT_EQ(rows[5].instance, "php-6");
  for (const StatsRow& r : rows) {
    EXPECT_EQ(r.verdict, "UNSAT");
    EXPECT_LE(r.improved_backjumps, r.total_backjumps);
    if (r.mode == "regular") {
      EXPECT_EQ(r.improved_backjumps, 0u);
    }
  }
}

TEST(RunBenchmark, EmptyInputs) {
  EXPECT_TRUE(run_benchmark({}, all_configs()).empty());
  EXPECT_TRUE(run_benchmark({parse_family("pigeonhole:4")}, {}).empty());
}

TEST(RunBenchmark, TimeoutsAreRowsAndCompareDropsThem) {
  Limits lim;
  lim.max_conflicts = 3;
  auto configs = std::vector<AnalysisConfig>{AnalysisConfig::regular(), AnalysisConfig::extended(WeakeningStrategy::WeakenAny)};
  auto rows = run_benchmark({parse_family("pigeonhole:2-8")}, configs, lim);
  ASSERT_EQ(rows.size(), 14u);
  std::size_t timeouts = 0;
  for (const StatsRow& r : rows) timeouts += r.verdict == "TIMEOUT";
  EXPECT_GT(timeouts, 0u);
  auto pairs = compare(rows, configs[0], configs[1]);
  std::set<std::string> solved_both;
  for (std::size_t k = 0; k < rows.size(); k += 2)
    if (solved(rows[k]) && solved(rows[k + 1])) solved_both.insert(rows[k].instance);
  EXPECT_EQ(pairs.size(), solved_both.size());
  for (const PairRow& pr : pairs) {
    EXPECT_TRUE(solved_both.count(pr.instance));
    EXPECT_EQ(pr.a.mode, "regular");
    EXPECT_EQ(pr.b.mode, "extended");
  }
}

TEST(RunBenchmark, ParallelMatchesSequential) {
  std::vector<FamilySpec> specs{parse_family("pigeonhole:4-6"), parse_family("random:3:6")};
  auto seq = run_benchmark(specs, all_configs(), default_limits(), 1);
  auto par = run_benchmark(specs, all_configs(), default_limits(), 4);
  EXPECT_EQ(without_time(seq), without_time(par));
}

TEST(Stats, ImprovedPercent) {
  EXPECT_DOUBLE_EQ(improved_percent(1, 5), 20.0);
  EXPECT_DOUBLE_EQ(improved_percent(0, 0), 0.0);
}

TEST(Stats, CsvOneRow) {
  std::string csv = emit_stats({sample_row()}, StatsFormat::Csv);
  EXPECT_EQ(csv, std::string(kCsvHeader) +
                     "\nphp-4,pigeonhole,extended,weaken-any,until-highlevel@1/10,UNSAT,7,19,1,5,20,1234\n");
}

TEST(Stats, CsvAndJsonRoundTrip) {
  std::vector<StatsRow> rows{sample_row(), sample_row()};
  rows[1].instance = "php-5";
  rows[1].improved_percent = improved_percent(1, 3);
  rows[1].mode = "regular";
  rows[1].weakening = "-";
  rows[1].stop = "-";
  EXPECT_EQ(parse_stats_csv(emit_stats(rows, StatsFormat::Csv)), rows);
  EXPECT_EQ(parse_stats_json(emit_stats(rows, StatsFormat::Json)), rows);
  EXPECT_TRUE(parse_stats_csv(emit_stats({}, StatsFormat::Csv)).empty());
  EXPECT_TRUE(parse_stats_json(emit_stats({}, StatsFormat::Json)).empty());
}

TEST(Stats, RejectsBadInput) {
  StatsRow r = sample_row();
  r.instance = "a,b";
  EXPECT_THROW(emit_stats({r}, StatsFormat::Csv), IoError);
  EXPECT_THROW(parse_stats_csv("nope\n"), IoError);
  EXPECT_THROW(parse_stats_csv(std::string(kCsvHeader) + "\na,b\n"), IoError);
  EXPECT_THROW(parse_stats_json("{"), IoError);
}

TEST(Stats, BenchmarkRowsRoundTrip) {
  auto rows = run_benchmark({parse_family("pigeonhole:4-5"), parse_family("irrelevant:5")}, all_configs());
  EXPECT_EQ(parse_stats_csv(emit_stats(rows, StatsFormat::Csv)), rows);
  EXPECT_EQ(parse_stats_json(emit_stats(rows, StatsFormat::Json)), rows);
}
