#include "kgeval/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kgeval {

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::FullCoverage: return "full-coverage";
    case Termination::BudgetExhausted: return "budget-exhausted";
    case Termination::QueryCap: return "query-cap";
  }
  return "?";
}

bool converged(const std::vector<double>& accHistory, int windowK, double alpha) {
  const std::size_t window = static_cast<std::size_t>(windowK) + 1;
  if (accHistory.size() < window) return false;
  return population_variance(accHistory, accHistory.size() - window, window) < alpha;
}

namespace {

double label_value(std::int8_t memory) { return memory < 0 ? 0.5 : memory; }

double estimate_over_all(const KnowledgeGraph& kg, const std::vector<Label>& labels) {
  double sum = 0;
  for (int i = 0; i < kg.size(); ++i)
    sum += labels[i] == Label::Undecided ? 0.5 : static_cast<double>(labels[i] == Label::True);
  return sum / static_cast<double>(kg.size());
}

}  // namespace

double delta_overall(const KnowledgeGraph& kg, const std::vector<Label>& labels) {
  return std::abs(kg.overall_gold_accuracy() - estimate_over_all(kg, labels));
}

double delta_predicate(const KnowledgeGraph& kg, const std::vector<Label>& labels) {
  if (kg.predicates().empty()) throw Error("empty predicate partition");
  double total = 0;
  for (const Predicate& p : kg.predicates()) {
    const std::vector<int>& bets = kg.bets_with_predicate(p.id);
    if (bets.empty()) throw Error("empty predicate partition for '" + p.name + "'");
    double gold = 0, est = 0;
    for (int b : bets) {
      const Bet& bet = kg.bet(b);
      if (!bet.gold) throw Error("gold incomplete for predicate '" + p.name + "'");
      gold += *bet.gold;
      est += labels[b] == Label::Undecided ? 0.5
                                           : static_cast<double>(labels[b] == Label::True);
    }
    total += std::abs(gold - est) / static_cast<double>(bets.size());
  }
  return total / static_cast<double>(kg.predicates().size());
}

namespace {

struct RunDriver {
  const KnowledgeGraph& kg;
  const Ecg& ecg;
  const RunConfig& cfg;
  AnswerSource& source;

  EvaluationState state;
  RunReport report;
  InferenceConfig icfg;
  bool usesInference;
  Rng rng;

  RunDriver(const KnowledgeGraph& kg_, const Ecg& ecg_, const RunConfig& cfg_,
            AnswerSource& source_)
      : kg(kg_), ecg(ecg_), cfg(cfg_), source(source_), icfg(cfg_.inference()),
        usesInference(strategy_uses_inference(cfg_.strategy.kind)),
        rng(cfg_.rngSeed) {}

  int n() const { return kg.size(); }

  int covered_count() const {
    int c = 0;
    for (char v : state.covered) c += v;
    return c;
  }

  void absorb_inference(const InferenceResult& res) {
    if (!res.converged) report.solverEverNonConverged = true;
    state.currentScores = res.assignment.scores;
    std::fill(state.inferableNow.begin(), state.inferableNow.end(), 0);
    for (int b : res.inferable) {
      state.inferableNow[b] = 1;
      state.covered[b] = 1;
      state.labelMemory[b] = res.labels[b] == Label::True ? 1 : 0;
    }
  }

  void label_directly(int bet, int label) {
    state.labelMemory[bet] = static_cast<std::int8_t>(label);
    state.covered[bet] = 1;
    state.inferableNow[bet] = 1;
  }

  void push_estimate() {
    const int covered = covered_count();
    if (covered == 0) return;
    double sum = 0;
    for (int i = 0; i < n(); ++i)
      if (state.covered[i]) sum += label_value(state.labelMemory[i]);
    state.accHistory.push_back(sum / static_cast<double>(covered));
    report.coverageCurve.emplace_back(static_cast<int>(state.evidence.size()),
                                      static_cast<double>(covered) /
                                          static_cast<double>(n()));
  }

  std::pair<int, double> evaluate(int bet) {
    const Bet& b = kg.bet(bet);
    auto [label, cost] = source.answer(b);
    if (state.spend + cost > cfg.budget + 1e-12) throw BudgetExhausted("budget exhausted");
    state.evidence.emplace_back(bet, label);
    state.spend += cost;
    return {label, cost};
  }

  void seed_phase() {
    const int want = std::min(cfg.seedSize, n());
    std::vector<int> seeds = rng.sample(n(), want);
    double plannedCost = 0;
    for (int h : seeds) plannedCost += kg.bet(h).cost;
    if (plannedCost > cfg.budget + 1e-12)
      throw BudgetExhausted("budget cannot cover the seed set");
    if (auto* sim = dynamic_cast<SimulatedSource*>(&source)) sim->set_next_inferable_size(1);
    for (int h : seeds) {
      auto [label, cost] = evaluate(h);
      if (!usesInference) {
        label_directly(h, label);
        if (cfg.strategy.kind == StrategyKind::IndependentCascade)
          for (int f : fire_one_hop(ecg, state.labelMemory, h)) label_directly(f, 1);
      }
    }
    report.seedQueries = static_cast<int>(seeds.size());

    if (usesInference) {
      InferenceResult res = map_solve(ecg, state.evidence, icfg);
      if (!state.evidence.empty()) {
        double positives = 0;
        for (const auto& [bet, label] : state.evidence) positives += label;
        const double q1 = positives / static_cast<double>(state.evidence.size());
        // one-time rescaling so the label mass matches the seed sample
        res.assignment = class_mass_normalize(res.assignment, q1);
        relabel(res, ecg, cfg.tau);
      }
      absorb_inference(res);
    }
    push_estimate();
  }

  int select() {
    SelectionView view{ecg, state.evidence, state.covered, state.inferableNow};
    if (cfg.strategy.kind == StrategyKind::Greedy) {
      auto lookahead = [&](int bet) {
        return source.lookahead(kg.bet(bet),
                                state.currentScores.empty() ? 0.5 : state.currentScores[bet]);
      };
      auto [bet, hypo] = greedy_select(view, icfg, cfg.strategy.candidatePoolSize, lookahead);
      if (auto* sim = dynamic_cast<SimulatedSource*>(&source))
        sim->set_next_inferable_size(hypo);
      lastPoolSize_ = std::min<int>(cfg.strategy.candidatePoolSize, n() - covered_count());
      return bet;
    }
    lastPoolSize_ = n() - covered_count();
    if (auto* sim = dynamic_cast<SimulatedSource*>(&source))
      sim->set_next_inferable_size(std::max(1, covered_count()));
    return baseline_select(cfg.strategy.kind, view, rng);
  }

  void loop() {
    while (true) {
      if (covered_count() == n()) {
        report.termination = Termination::FullCoverage;
        return;
      }
      if (!cfg.runToCoverage && converged(state.accHistory, cfg.windowK, cfg.alpha)) {
        report.termination = Termination::Converged;
        return;
      }
      if (cfg.maxQueries > 0 &&
          static_cast<int>(state.evidence.size()) >= cfg.maxQueries) {
        report.termination = Termination::QueryCap;
        return;
      }

      int bet;
      int label;
      try {
        bet = select();
        auto [lbl, cost] = evaluate(bet);
        label = lbl;
      } catch (const BudgetExhausted&) {
        report.termination = Termination::BudgetExhausted;
        return;
      }
      ++state.step;

      if (usesInference) {
        absorb_inference(map_solve(ecg, state.evidence, icfg));
      } else {
        label_directly(bet, label);
        if (cfg.strategy.kind == StrategyKind::IndependentCascade)
          for (int f : fire_one_hop(ecg, state.labelMemory, bet)) label_directly(f, 1);
      }
      push_estimate();
      report.trace.rows.push_back(
          {state.step, bet, lastPoolSize_, covered_count(), label});
    }
  }

  RunReport finish() {
    if (state.accHistory.empty())
      throw BudgetExhausted("budget exhausted before any estimate");
    report.finalEstimate = state.accHistory.back();
    report.queriesUsed = static_cast<int>(state.evidence.size());
    report.spend = state.spend;
    report.accHistory = state.accHistory;
    report.evidence = state.evidence;

    report.finalLabels.assign(n(), Label::Undecided);
    for (int i = 0; i < n(); ++i) {
      if (state.covered[i] && state.labelMemory[i] >= 0)
        report.finalLabels[i] = state.labelMemory[i] == 1 ? Label::True : Label::False;
    }
    report.undecidedCount = 0;
    for (const Label& l : report.finalLabels)
      if (l == Label::Undecided) ++report.undecidedCount;

    if (kg.gold_complete()) {
      report.deltaOverall = delta_overall(kg, report.finalLabels);
      report.deltaPredicate = delta_predicate(kg, report.finalLabels);
      for (const Predicate& p : kg.predicates()) {
        const std::vector<int>& bets = kg.bets_with_predicate(p.id);
        PredicateReport pr;
        for (int b : bets) {
          pr.gold += *kg.bet(b).gold;
          pr.estimated += report.finalLabels[b] == Label::Undecided
                              ? 0.5
                              : static_cast<double>(report.finalLabels[b] == Label::True);
        }
        pr.gold /= static_cast<double>(bets.size());
        pr.estimated /= static_cast<double>(bets.size());
        pr.gap = std::abs(pr.gold - pr.estimated);
        report.perPredicate.emplace(p.name, pr);
      }
    }
    return report;
  }

 private:
  int lastPoolSize_ = 0;
};

}  // namespace

RunReport run(const KnowledgeGraph& kg, const Ecg& ecg, const RunConfig& cfg,
              AnswerSource& source) {
  if (kg.size() == 0) throw Error("empty graph");
  if (ecg.bet_count() != kg.size()) throw Error("graph and coupling graph disagree on size");
  if (!(cfg.tau > 0.5 && cfg.tau <= 1.0)) throw Error("tau must lie in (0.5, 1]");
  if (cfg.alpha <= 0) throw Error("alpha must be positive");
  if (cfg.windowK < 1) throw Error("window must be at least 1");
  if (cfg.seedSize < 0) throw Error("seed size must be non-negative");

  RunDriver driver(kg, ecg, cfg, source);
  driver.state.covered.assign(kg.size(), 0);
  driver.state.labelMemory.assign(kg.size(), -1);
  driver.state.inferableNow.assign(kg.size(), 0);
  if (auto* interactive = dynamic_cast<InteractiveSource*>(&source))
    interactive->set_progress(0, kg.size());

  driver.seed_phase();
  driver.loop();
  return driver.finish();
}

KnowledgeGraph inject_noise(const KnowledgeGraph& kg, double flipFraction,
                            std::uint64_t rngSeed) {
  if (flipFraction < 0 || flipFraction > 1) throw Error("flip fraction must lie in [0,1]");
  const int n = kg.size();
  const int flips = static_cast<int>(std::llround(flipFraction * n));

  std::vector<int> eligible;
  for (const Bet& b : kg.bets()) {
    if (!b.gold) throw Error("noise injection needs gold labels");
    if (*b.gold == 1 && kg.predicates()[b.predicate].functional) eligible.push_back(b.id);
  }
  if (static_cast<int>(eligible.size()) < flips)
    throw Error("not enough eligible beliefs: need " + std::to_string(flips) + ", have " +
                std::to_string(eligible.size()));

  Rng rng(rngSeed);
  rng.shuffle(eligible);
  eligible.resize(flips);
  std::sort(eligible.begin(), eligible.end());

  // observed range of each predicate, in id order
  std::map<int, std::vector<int>> rangePool;
  for (const Bet& b : kg.bets()) {
    auto& pool = rangePool[b.predicate];
    if (std::find(pool.begin(), pool.end(), b.object) == pool.end())
      pool.push_back(b.object);
  }

  std::vector<std::pair<int, int>> replacement;  // bet id -> new object entity (old graph ids)
  {
    std::set<std::string> taken;  // occupied (s,p,o) triples by surface
    auto key = [&](int s, int p, int o) {
      return kg.entity_surface(s) + '\t' + kg.predicate_name(p) + '\t' + kg.entity_surface(o);
    };
    for (const Bet& b : kg.bets()) taken.insert(key(b.subject, b.predicate, b.object));
    for (int id : eligible) {
      const Bet& b = kg.bet(id);
      std::vector<int> pool = rangePool[b.predicate];
      rng.shuffle(pool);
      int chosen = -1;
      for (int cand : pool) {
        if (cand == b.object) continue;
        if (taken.count(key(b.subject, b.predicate, cand))) continue;
        chosen = cand;
        break;
      }
      if (chosen < 0)
        throw Error("no type-compatible replacement object for belief " + std::to_string(id));
      taken.erase(key(b.subject, b.predicate, b.object));
      taken.insert(key(b.subject, b.predicate, chosen));
      replacement.emplace_back(id, chosen);
    }
  }

  KnowledgeGraph out;
  std::map<int, int> swap(replacement.begin(), replacement.end());
  for (const Bet& b : kg.bets()) {
    auto it = swap.find(b.id);
    const int object = it == swap.end() ? b.object : it->second;
    const std::optional<int> gold = it == swap.end() ? b.gold : std::optional<int>(0);
    int s = out.intern_entity(kg.entity_surface(b.subject));
    int p = out.intern_predicate(kg.predicate_name(b.predicate));
    int o = out.intern_entity(kg.entity_surface(object));
    out.add_bet(s, p, o, b.cost, gold);
  }
  std::vector<PredicateDecl> decls;
  for (const Predicate& p : kg.predicates())
    decls.push_back({p.name, p.domainCategory, p.rangeCategory, p.functional});
  out.apply_declarations(decls);
  return out;
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["final_estimate"] = finalEstimate;
  if (deltaOverall) j["delta_overall"] = *deltaOverall;
  if (deltaPredicate) j["delta_predicate"] = *deltaPredicate;
  j["queries_used"] = queriesUsed;
  j["seed_queries"] = seedQueries;
  j["loop_queries"] = queriesUsed - seedQueries;
  j["spend"] = spend;
  j["termination"] = termination_name(termination);
  j["undecided_count"] = undecidedCount;
  j["solver_nonconverged"] = solverEverNonConverged;
  j["acc_history"] = accHistory;
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const auto& [q, frac] : coverageCurve) curve.push_back({q, frac});
  j["coverage_curve"] = std::move(curve);
  nlohmann::ordered_json preds;
  for (const auto& [name, pr] : perPredicate) {
    preds[name] = {{"gold", pr.gold}, {"estimated", pr.estimated}, {"gap", pr.gap}};
  }
  j["per_predicate"] = std::move(preds);
  return j.dump(2);
}

std::string RunReport::coverage_csv() const {
  std::ostringstream out;
  out << "queries,fraction_inferred\n";
  for (const auto& [q, frac] : coverageCurve) out << q << ',' << format_double(frac) << '\n';
  return out.str();
}

std::string RunReport::per_predicate_csv() const {
  std::ostringstream out;
  out << "predicate,gold,estimated,gap\n";
  for (const auto& [name, pr] : perPredicate)
    out << name << ',' << format_double(pr.gold) << ',' << format_double(pr.estimated) << ','
        << format_double(pr.gap) << '\n';
  return out.str();
}

}  // namespace kgeval
