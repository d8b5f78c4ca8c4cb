// pbjump command-line front end: solve, gen, bench.

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbjump/pbjump.hpp"

namespace {

using namespace pbjump;

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitError = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write '" + path + "'");
}

// Whitespace-separated literal tokens: x3 or ~x3 (also -x3).
std::vector<Literal> parse_decisions(const std::string& text) {
  std::vector<Literal> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '*' || tok[0] == '#') {
      std::getline(in, tok);
      continue;
    }
    std::string t = tok[0] == '-' ? "~" + tok.substr(1) : tok;
    Literal l = detail::parse_literal_token(t);
    if (l.var() == 0 || l.var() > kMaxVar) throw std::invalid_argument("bad decision literal '" + tok + "'");
    out.push_back(l);
  }
  return out;
}

struct SolveOptions {
  std::string file;
  std::string mode = "regular";
  std::string weaken = "any";
  std::string stop = "bjlevel";
  std::string fraction = "1/10";
  std::string decisions;
  std::string stats;
  std::uint64_t max_conflicts = 1'000'000;
  std::uint64_t timeout_ms = 60'000;
  bool trace = false;
};

int run_solve(const SolveOptions& o) {
  OpbInstance inst = parse_opb(read_file(o.file));
  for (const std::string& w : inst.warnings) std::cout << "c warning: " << w << '\n';

  AnalysisConfig config;
  config.mode = parse_mode(o.mode);
  config.weakening = parse_weakening(o.weaken);
  config.stop = {parse_stop(o.stop), parse_fraction(o.fraction)};

  Heuristic h = Heuristic::fixed_order();
  if (!o.decisions.empty()) {
    std::vector<Literal> script = parse_decisions(read_file(o.decisions));
    for (Literal l : script)
      if (l.var() > inst.variable_count)
        throw std::invalid_argument("decision " + to_string(l) + " is outside the instance's " +
                                    std::to_string(inst.variable_count) + " variables");
    h = Heuristic::scripted(std::move(script), true);
  }
  Solver solver(inst.variable_count, inst.normalized(), config, std::move(h));
  solver.set_limits({o.max_conflicts, std::chrono::milliseconds(o.timeout_ms)});
  DerivationLog log;
  if (o.trace) solver.set_derivation_log(&log);

  SolveResult r = solver.solve();

  for (const std::string& line : log.lines()) std::cout << "c " << line << '\n';
  std::cout << "c config " << label(config) << '\n';
  std::cout << "c conflicts " << r.stats.conflicts << '\n';
  std::cout << "c cancellations " << r.stats.cancellations << '\n';
  std::cout << "c backjumps " << r.stats.total_backjumps << " improved " << r.stats.improved_backjumps << '\n';
  std::cout << "c time_us "
            << std::chrono::duration_cast<std::chrono::microseconds>(r.stats.wall_time).count() << '\n';

  if (!o.stats.empty()) {
    BenchInstance b;
    b.id = o.file;
    b.family = "file";
    std::string stats = emit_stats({make_row(b, config, r)}, StatsFormat::Json);
    write_text(o.stats, stats);
  }

  switch (r.verdict) {
    case Verdict::Satisfiable: {
      std::cout << "s SATISFIABLE\nv";
      for (Var v = 1; v < r.model.size(); ++v) std::cout << ' ' << (r.model[v] ? "" : "-") << inst.name_of(v);
      std::cout << '\n';
      return kExitSat;
    }
    case Verdict::Unsatisfiable:
      std::cout << "s UNSATISFIABLE\n";
      return kExitUnsat;
    case Verdict::Unknown:
      std::cout << "s UNKNOWN\n";
      return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-Boolean CDCL solver with extended conflict analysis"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an OPB instance");
  solve_cmd->add_option("file", so.file, "OPB file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--mode", so.mode, "regular | extended")->check(CLI::IsMember({"regular", "extended"}));
  solve_cmd->add_option("--weaken", so.weaken, "never | any | ordered (extended mode)")
      ->check(CLI::IsMember({"never", "any", "ordered"}));
  solve_cmd->add_option("--stop", so.stop, "bjlevel | toplevel | highlevel (extended mode)")
      ->check(CLI::IsMember({"bjlevel", "toplevel", "highlevel"}));
  solve_cmd->add_option("--high-fraction", so.fraction, "threshold for highlevel, e.g. 1/10 or 0.1");
  solve_cmd->add_option("--decisions", so.decisions, "file of decision literals replayed before fixed order")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--stats", so.stats, "write run statistics as JSON");
  solve_cmd->add_option("--max-conflicts", so.max_conflicts, "conflict limit");
  solve_cmd->add_option("--timeout-ms", so.timeout_ms, "wall-clock limit in milliseconds");
  solve_cmd->add_flag("--trace", so.trace, "print every cancellation as a comment line");

  auto* gen_cmd = app.add_subcommand("gen", "Generate instances");
  gen_cmd->require_subcommand(1);
  std::size_t gen_n = 4;
  std::string gen_out, gen_decisions_out;
  RandomParams rp;
  auto* gen_php = gen_cmd->add_subcommand("pigeonhole", "n pigeons, n-1 holes");
  gen_php->add_option("n", gen_n, "pigeons")->required()->check(CLI::Range(2, 1000));
  gen_php->add_option("-o,--output", gen_out, "output file (default stdout)");
  auto* gen_irr = gen_cmd->add_subcommand("irrelevant", "irrelevant-literal conflict scenario");
  gen_irr->add_option("n", gen_n, "variables")->required()->check(CLI::Range(3, 100000));
  gen_irr->add_option("-o,--output", gen_out, "output file (default stdout)");
  gen_irr->add_option("--decisions-out", gen_decisions_out, "write the decision script here");
  auto* gen_rnd = gen_cmd->add_subcommand("random", "random PB instance");
  gen_rnd->add_option("--seed", rp.seed, "RNG seed");
  gen_rnd->add_option("--vars", rp.vars, "variables")->check(CLI::PositiveNumber);
  gen_rnd->add_option("--constraints", rp.constraints, "constraints");
  gen_rnd->add_option("--max-coef", rp.max_coef, "largest coefficient magnitude")->check(CLI::PositiveNumber);
  gen_rnd->add_option("-o,--output", gen_out, "output file (default stdout)");

  auto* bench_cmd = app.add_subcommand("bench", "Run families x configurations and emit stats");
  std::vector<std::string> families;
  std::string configs = "regular,extended:any:bjlevel";
  std::string bench_out = "-";
  std::string format = "auto";
  unsigned jobs = 1;
  std::uint64_t bench_conflicts = 1'000'000, bench_timeout = 60'000;
  bool summary = false;
  bench_cmd->add_option("--families", families, "pigeonhole:N[-M] irrelevant:N[-M] random:SEED:COUNT[:V:C:K]")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--configs", configs, "all | regular | extended:<weaken>:<stop>[:fraction], comma separated");
  bench_cmd->add_option("--out", bench_out, "output file (default stdout)");
  bench_cmd->add_option("--format", format, "csv | json | auto (by extension)")
      ->check(CLI::IsMember({"csv", "json", "auto"}));
  bench_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-conflicts", bench_conflicts, "conflict limit per run");
  bench_cmd->add_option("--timeout-ms", bench_timeout, "wall-clock limit per run");
  bench_cmd->add_flag("--summary", summary, "print a solved-by-both comparison of the first two configs to stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(so);

    if (*gen_cmd) {
      if (*gen_php) write_text(gen_out, write_opb(gen_pigeonhole(gen_n)));
      if (*gen_irr) {
        Scenario sc = gen_irrelevant_pattern(gen_n);
        write_text(gen_out, write_opb(sc.instance));
        if (!gen_decisions_out.empty()) {
          std::string d;
          for (Literal l : sc.decisions) d += to_string(l) + "\n";
          write_text(gen_decisions_out, d);
        }
      }
      if (*gen_rnd) write_text(gen_out, write_opb(gen_random(rp)));
      return 0;
    }

    if (*bench_cmd) {
      std::vector<FamilySpec> specs;
      for (const std::string& f : families) specs.push_back(parse_family(f));
      std::vector<AnalysisConfig> cfgs = parse_configs(configs);
      std::vector<StatsRow> rows =
          run_benchmark(specs, cfgs, {bench_conflicts, std::chrono::milliseconds(bench_timeout)}, jobs);
      bool json = format == "json" ||
                  (format == "auto" && bench_out.size() >= 5 && bench_out.compare(bench_out.size() - 5, 5, ".json") == 0);
      write_text(bench_out, emit_stats(rows, json ? StatsFormat::Json : StatsFormat::Csv));
      if (summary && cfgs.size() >= 2) {
        auto pairs = compare(rows, cfgs[0], cfgs[1]);
        std::cerr << "instance," << label(cfgs[0]) << " conflicts," << label(cfgs[1]) << " conflicts,"
                  << label(cfgs[0]) << " cancellations," << label(cfgs[1]) << " cancellations\n";
        for (const PairRow& p : pairs)
          std::cerr << p.instance << ',' << p.a.conflicts << ',' << p.b.conflicts << ',' << p.a.cancellations << ','
                    << p.b.cancellations << '\n';
      }
      return 0;
    }
  } catch (const OpbError& e) {
    std::cerr << "error: " << so.file << ":" << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
