// kgeval: knowledge-graph accuracy estimation from crowd evaluations.
//
// Subcommands: ground, run, sweep, budget-sim, gen-synthetic, inject-noise.
// Every command is deterministic for a fixed --seed; re-running overwrites
// outputs byte-identically (timestamps live only in the interactive audit
// log).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kgeval/ecg.hpp"
#include "kgeval/estimator.hpp"
#include "kgeval/synthetic.hpp"

namespace fs = std::filesystem;
using namespace kgeval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;
constexpr int kExitNonConverged = 3;

struct Dataset {
  KnowledgeGraph kg;
  RuleSet ruleset;
  Ecg ecg;
};

Dataset load_dataset(const std::string& triplesPath, const std::string& rulesPath,
                     double defaultCost, bool autoTypeRules,
                     const std::set<int>& ablateBodyLengths = {}) {
  Dataset d;
  {
    std::ifstream in(triplesPath);
    if (!in) throw Error("cannot open triples file: " + triplesPath);
    d.kg = KnowledgeGraph::parse_triples(in, defaultCost);
  }
  {
    std::ifstream in(rulesPath);
    if (!in) throw Error("cannot open rules file: " + rulesPath);
    d.ruleset = parse_rules(in, d.kg);
    d.kg.apply_declarations(d.ruleset.declarations);
  }
  if (autoTypeRules) {
    auto extra = auto_type_rules(d.kg, 1.0, static_cast<int>(d.ruleset.rules.size()));
    d.ruleset.rules.insert(d.ruleset.rules.end(), extra.begin(), extra.end());
  }
  std::vector<Rule> rules = d.ruleset.rules;
  if (!ablateBodyLengths.empty()) rules = ablate_rules(rules, ablateBodyLengths);
  d.ecg = Ecg::ground(d.kg, rules);
  return d;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::set<int> parse_ablation(const std::string& spec) {
  std::set<int> lens;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    lens.insert(std::stoi(tok));
  }
  return lens;
}

struct RunOptions {
  std::string triples, rules, out = "out";
  std::string strategy = "greedy";
  std::string source = "oracle";
  std::uint64_t seed = 0;
  double tau = 0.8;
  int seedSize = 50;
  double budget = -1;  // negative = unlimited
  double alpha = 0.002;
  int windowK = 9;
  int pool = 5;
  int maxQueries = 0;
  bool runToCoverage = false;
  bool autoTypeRules = false;
  double defaultCost = KnowledgeGraph::kDefaultCost;
  double workerAccuracy = 1.0;
  double gamma = 0.5;
  bool useBudgetPlan = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool requireFiles = true) {
  auto* t = cmd->add_option("--triples", o.triples, "triples file");
  auto* r = cmd->add_option("--rules", o.rules, "rules file");
  if (requireFiles) {
    t->required()->check(CLI::ExistingFile);
    r->required()->check(CLI::ExistingFile);
  }
  cmd->add_option("--strategy", o.strategy,
                  "greedy|random|max-degree|independent-cascade|random+inference|max-degree+inference");
  cmd->add_option("--source", o.source, "oracle|simulated|interactive");
  cmd->add_option("--seed", o.seed, "rng seed");
  cmd->add_option("--tau", o.tau, "label confidence threshold");
  cmd->add_option("--seed-size", o.seedSize, "random seed-set size");
  cmd->add_option("--budget", o.budget, "total budget (omit for unlimited)");
  cmd->add_option("--alpha", o.alpha, "convergence variance threshold");
  cmd->add_option("--window", o.windowK, "convergence window k");
  cmd->add_option("--pool", o.pool, "greedy candidate pool size");
  cmd->add_option("--max-queries", o.maxQueries, "stop after this many crowd queries");
  cmd->add_flag("--run-to-coverage", o.runToCoverage, "ignore convergence, evaluate to full coverage");
  cmd->add_flag("--auto-type-rules", o.autoTypeRules,
                "derive type rules from declared predicate signatures");
  cmd->add_option("--default-cost", o.defaultCost, "per-task cost when the file omits it");
  cmd->add_option("--worker-accuracy", o.workerAccuracy, "simulated per-vote accuracy");
  cmd->add_option("--gamma", o.gamma, "budget-plan decay factor");
  cmd->add_flag("--budget-plan", o.useBudgetPlan,
                "size simulated worker pools from the budget plan");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig to_config(const RunOptions& o) {
  RunConfig cfg;
  cfg.seedSize = o.seedSize;
  cfg.tau = o.tau;
  cfg.windowK = o.windowK;
  cfg.alpha = o.alpha;
  if (o.budget >= 0) cfg.budget = o.budget;
  cfg.strategy.kind = strategy_from_name(o.strategy);
  cfg.strategy.rngSeed = o.seed;
  cfg.strategy.candidatePoolSize = o.pool;
  cfg.rngSeed = o.seed;
  cfg.runToCoverage = o.runToCoverage;
  cfg.maxQueries = o.maxQueries;
  return cfg;
}

int execute_run(const RunOptions& o, const Dataset& d, RunReport& report) {
  RunConfig cfg = to_config(o);
  std::unique_ptr<AnswerSource> source;
  BudgetPlan plan;
  switch (source_from_name(o.source)) {
    case SourceKind::Oracle:
      source = std::make_unique<OracleSource>();
      break;
    case SourceKind::Simulated: {
      WorkerModel model{o.workerAccuracy, o.seed};
      if (o.useBudgetPlan) {
        if (o.budget < 0) throw Error("--budget-plan needs --budget");
        plan = BudgetPlan::make(o.budget, o.defaultCost, o.gamma, d.kg.size());
        source = std::make_unique<SimulatedSource>(model, &plan);
      } else {
        source = std::make_unique<SimulatedSource>(model);
      }
      break;
    }
    case SourceKind::Interactive:
      source = std::make_unique<InteractiveSource>(d.kg, std::cin, std::cout,
                                                   (fs::path(o.out) / "audit.jsonl").string());
      break;
  }

  report = run(d.kg, d.ecg, cfg, *source);

  write_file(fs::path(o.out) / "report.json", report.to_json() + "\n");
  write_file(fs::path(o.out) / "coverage.csv", report.coverage_csv());
  write_file(fs::path(o.out) / "per_predicate.csv", report.per_predicate_csv());
  write_file(fs::path(o.out) / "trace.csv", report.trace.to_csv());
  if (strategy_uses_inference(cfg.strategy.kind)) {
    InferenceResult final = map_solve(d.ecg, report.evidence, cfg.inference());
    write_file(fs::path(o.out) / "inference.json", final.to_json() + "\n");
  }

  if (report.termination == Termination::BudgetExhausted) return kExitBudget;
  if (report.solverEverNonConverged) return kExitNonConverged;
  return kExitOk;
}

int cmd_ground(const std::string& triples, const std::string& rules, double defaultCost,
               bool autoTypeRules, const std::string& ecgJson) {
  Dataset d = load_dataset(triples, rules, defaultCost, autoTypeRules);
  std::cout << d.kg.size() << " BETs, " << d.ecg.constraints().size() << " constraints\n";
  std::vector<int> hist = d.ecg.degree_histogram();
  for (std::size_t deg = 0; deg < hist.size(); ++deg)
    if (hist[deg] > 0) std::cout << "degree " << deg << ": " << hist[deg] << "\n";
  if (!ecgJson.empty()) write_file(ecgJson, d.ecg.to_json(d.kg) + "\n");
  return kExitOk;
}

int cmd_sweep(const RunOptions& base, const std::vector<std::string>& strategies,
              const std::vector<std::uint64_t>& seeds, const std::vector<double>& flips,
              const std::vector<std::string>& ablations) {
  if (strategies.empty()) throw CLI::ValidationError("--strategies must not be empty");
  if (seeds.empty()) throw CLI::ValidationError("--seeds must not be empty");
  std::vector<double> flipList = flips.empty() ? std::vector<double>{0.0} : flips;
  std::vector<std::string> ablList = ablations.empty() ? std::vector<std::string>{""} : ablations;

  std::ostringstream table;
  table << "strategy,seed,flip_fraction,ablation,delta_predicate,delta_overall,"
           "queries,seed_queries,final_estimate,termination,error\n";

  Dataset pristine = load_dataset(base.triples, base.rules, base.defaultCost, base.autoTypeRules);

  for (const std::string& abl : ablList) {
    for (double flip : flipList) {
      Dataset d;
      try {
        d.kg = flip > 0 ? inject_noise(pristine.kg, flip, base.seed) : pristine.kg;
        std::vector<Rule> rules = pristine.ruleset.rules;
        if (!abl.empty()) rules = ablate_rules(rules, parse_ablation(abl));
        d.ecg = Ecg::ground(d.kg, rules);
      } catch (const std::exception& e) {
        for (const std::string& strat : strategies)
          for (std::uint64_t seed : seeds)
            table << strat << ',' << seed << ',' << format_double(flip) << ',' << abl
                  << ",,,,,,," << e.what() << '\n';
        continue;
      }
      for (const std::string& strat : strategies) {
        for (std::uint64_t seed : seeds) {
          RunOptions cell = base;
          cell.strategy = strat;
          cell.seed = seed;
          std::ostringstream name;
          name << "coverage_" << strat << "_s" << seed;
          if (flip > 0) name << "_f" << format_double(flip);
          if (!abl.empty()) name << "_a" << abl;
          cell.out = (fs::path(base.out) / "cells" / name.str()).string();
          try {
            RunReport report;
            execute_run(cell, d, report);
            table << strat << ',' << seed << ',' << format_double(flip) << ',' << abl << ','
                  << (report.deltaPredicate ? format_double(*report.deltaPredicate) : "") << ','
                  << (report.deltaOverall ? format_double(*report.deltaOverall) : "") << ','
                  << report.queriesUsed << ',' << report.seedQueries << ','
                  << format_double(report.finalEstimate) << ','
                  << termination_name(report.termination) << ",\n";
          } catch (const std::exception& e) {
            table << strat << ',' << seed << ',' << format_double(flip) << ',' << abl
                  << ",,,,,,," << e.what() << '\n';
          }
        }
      }
    }
  }
  write_file(fs::path(base.out) / "comparison.csv", table.str());
  std::cout << "wrote " << (fs::path(base.out) / "comparison.csv").string() << "\n";
  return kExitOk;
}

int cmd_budget_sim(double accuracy, double budget, double unitCost, double gamma, int iMax,
                   int tasks, int trials, std::uint64_t seed, const std::string& outPath) {
  if (accuracy <= 0.5 || accuracy > 1.0)
    throw CLI::ValidationError("--accuracy must lie in (0.5, 1]");
  if (trials < 1) throw CLI::ValidationError("--trials must be positive");

  const double epsilon = accuracy - 0.5;
  std::ostringstream csv;
  csv << "i_t,w,empirical_err,bound\n";
  BudgetPlan plan = BudgetPlan::make(budget, unitCost, gamma, iMax);
  Rng rng(seed);
  double it = iMax;
  for (int t = 0; t < tasks; ++t) {
    const int i_t = std::max(1, static_cast<int>(std::llround(it)));
    int w = 0;
    try {
      w = allocate_workers(plan, i_t);
    } catch (const Error&) {
      break;  // budget exhausted
    }
    int wrong = 0;
    for (int trial = 0; trial < trials; ++trial) {
      int sum = 0;
      for (int k = 0; k < w; ++k) sum += rng.bernoulli(accuracy) ? 1 : 0;
      if ((2 * sum >= w ? 1 : 0) != 1) ++wrong;
    }
    const double empirical = static_cast<double>(wrong) / static_cast<double>(trials);
    csv << i_t << ',' << w << ',' << format_double(empirical) << ','
        << format_double(majority_error_bound(w, epsilon)) << '\n';
    it *= gamma;
    if (it < 1) it = 1;
  }
  if (outPath.empty())
    std::cout << csv.str();
  else
    write_file(outPath, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph accuracy estimation via coupled crowd evaluations"};
  app.set_config("--config", "", "key=value config file; command-line flags win");
  app.require_subcommand(1);

  // ground
  auto* ground = app.add_subcommand("ground", "parse inputs and build the coupling graph");
  std::string gTriples, gRules, gEcgJson;
  double gCost = KnowledgeGraph::kDefaultCost;
  bool gAuto = false;
  ground->add_option("--triples", gTriples)->required()->check(CLI::ExistingFile);
  ground->add_option("--rules", gRules)->required()->check(CLI::ExistingFile);
  ground->add_option("--default-cost", gCost);
  ground->add_flag("--auto-type-rules", gAuto);
  ground->add_option("--ecg-json", gEcgJson, "write the coupling graph as JSON");

  // run
  auto* runCmd = app.add_subcommand("run", "one full estimation run");
  RunOptions runOpts;
  add_run_options(runCmd, runOpts);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "strategy/seed/noise/ablation cross-product");
  RunOptions sweepOpts;
  add_run_options(sweep, sweepOpts);
  std::vector<std::string> sweepStrategies;
  std::vector<std::uint64_t> sweepSeeds;
  std::vector<double> sweepFlips;
  std::vector<std::string> sweepAblations;
  sweep->add_option("--strategies", sweepStrategies, "comma list of strategies")
      ->delimiter(',')
      ->required();
  sweep->add_option("--seeds", sweepSeeds, "comma list of seeds")->delimiter(',')->required();
  sweep->add_option("--flip", sweepFlips, "noise flip fractions")->delimiter(',');
  sweep->add_option("--ablate", sweepAblations,
                    "ablation rungs, e.g. --ablate '' --ablate 3 --ablate 3,2")
      ->take_all();

  // budget-sim
  auto* budgetSim = app.add_subcommand("budget-sim", "worker allocation vs error bound");
  double bAccuracy = 0.75, bBudget = 1000, bUnitCost = 1.0, bGamma = 0.5;
  int bIMax = 100, bTasks = 50, bTrials = 1000;
  std::uint64_t bSeed = 0;
  std::string bOut;
  budgetSim->add_option("--accuracy", bAccuracy, "per-vote worker accuracy")->required();
  budgetSim->add_option("--budget", bBudget)->required();
  budgetSim->add_option("--unit-cost", bUnitCost);
  budgetSim->add_option("--gamma", bGamma);
  budgetSim->add_option("--imax", bIMax, "largest inferable-set size");
  budgetSim->add_option("--tasks", bTasks);
  budgetSim->add_option("--trials", bTrials);
  budgetSim->add_option("--seed", bSeed);
  budgetSim->add_option("--out", bOut, "CSV path (stdout when omitted)");

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "emit a synthetic benchmark dataset");
  SyntheticSpec genSpec;
  std::string genTriples = "synthetic.tsv", genRules = "synthetic.rules";
  gen->add_option("--bets", genSpec.betCount);
  gen->add_option("--gold-acc", genSpec.targetGoldAcc);
  gen->add_option("--seed", genSpec.rngSeed);
  gen->add_option("--profile", genSpec.rulesProfile, "mixed|types-only");
  gen->add_option("--default-cost", genSpec.defaultCost);
  gen->add_option("--out-triples", genTriples);
  gen->add_option("--out-rules", genRules);

  // inject-noise
  auto* noise = app.add_subcommand("inject-noise", "flip a fraction of gold-true beliefs");
  std::string nTriples, nRules, nOut = "noisy.tsv";
  double nFlip = 0.1, nCost = KnowledgeGraph::kDefaultCost;
  std::uint64_t nSeed = 0;
  noise->add_option("--triples", nTriples)->required()->check(CLI::ExistingFile);
  noise->add_option("--rules", nRules, "rules file carrying functional declarations")
      ->required()
      ->check(CLI::ExistingFile);
  noise->add_option("--flip", nFlip)->required();
  noise->add_option("--seed", nSeed);
  noise->add_option("--default-cost", nCost);
  noise->add_option("--out-triples", nOut);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ground->parsed()) return cmd_ground(gTriples, gRules, gCost, gAuto, gEcgJson);
    if (runCmd->parsed()) {
      Dataset d = load_dataset(runOpts.triples, runOpts.rules, runOpts.defaultCost,
                               runOpts.autoTypeRules);
      RunReport report;
      int code = execute_run(runOpts, d, report);
      std::cout << "estimate " << format_double(report.finalEstimate) << " after "
                << report.queriesUsed << " queries (" << termination_name(report.termination)
                << ")\n";
      return code;
    }
    if (sweep->parsed()) return cmd_sweep(sweepOpts, sweepStrategies, sweepSeeds, sweepFlips,
                                          sweepAblations);
    if (budgetSim->parsed())
      return cmd_budget_sim(bAccuracy, bBudget, bUnitCost, bGamma, bIMax, bTasks, bTrials,
                            bSeed, bOut);
    if (gen->parsed()) {
      SyntheticData data = generate_synthetic(genSpec);
      write_file(genTriples, data.triplesText);
      write_file(genRules, data.rulesText);
      std::cout << data.kg.size() << " BETs, gold accuracy "
                << format_double(data.kg.overall_gold_accuracy()) << "\n";
      return kExitOk;
    }
    if (noise->parsed()) {
      Dataset d = load_dataset(nTriples, nRules, nCost, false);
      KnowledgeGraph noisy = inject_noise(d.kg, nFlip, nSeed);
      std::ostringstream out;
      noisy.serialize(out);
      write_file(nOut, out.str());
      std::cout << "gold accuracy " << format_double(noisy.overall_gold_accuracy()) << "\n";
      return kExitOk;
    }
  } catch (const BudgetExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
