#include "kgeval/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace kgeval {

BudgetPlan BudgetPlan::make(double budget, double unitCost, double gamma, int iMax) {
  if (budget < 0) throw Error("negative budget");
  if (unitCost <= 0) throw Error("unit cost must be positive");
  if (gamma < 0 || gamma >= 1) throw Error("gamma must lie in [0,1)");
  if (iMax < 1) throw Error("i_max must be at least 1");
  BudgetPlan p;
  p.totalBudget = budget;
  p.residual = budget;
  p.unitCost = unitCost;
  p.gamma = gamma;
  p.iMax = iMax;
  return p;
}

int majority_vote(const std::vector<int>& votes) {
  if (votes.empty()) throw Error("majority vote over empty votes");
  long sum = 0;
  for (int v : votes) {
    if (v != 0 && v != 1) throw Error("votes must be 0 or 1");
    sum += v;
  }
  // floor(mean - 1/2) + 1, evaluated exactly: 1 iff 2*sum >= w
  return 2 * sum >= static_cast<long>(votes.size()) ? 1 : 0;
}

int allocate_workers(BudgetPlan& plan, int i_t, int bet) {
  if (i_t < 1 || i_t > plan.iMax) throw Error("i_t must lie in [1, i_max]");
  const double raw =
      plan.totalBudget * static_cast<double>(i_t) * (1.0 - plan.gamma) /
      (plan.unitCost * static_cast<double>(plan.iMax));
  int w = static_cast<int>(std::floor(raw));
  if (w < 1) w = 1;
  const int affordable = static_cast<int>(std::floor(plan.residual / plan.unitCost + 1e-9));
  if (affordable < 1) throw Error("budget exhausted");
  w = std::min(w, affordable);
  plan.residual -= static_cast<double>(w) * plan.unitCost;
  if (bet >= 0) plan.perTaskWorkers[bet] = w;
  return w;
}

double estimate_gamma(const std::vector<int>& inferableSizes) {
  if (inferableSizes.empty()) throw Error("empty inferable-size history");
  double avg = 0;
  int iMax = 1;
  for (int i : inferableSizes) {
    avg += i;
    iMax = std::max(iMax, i);
  }
  avg /= static_cast<double>(inferableSizes.size());
  const double guess = 1.0 - static_cast<double>(iMax) / avg;
  return std::clamp(guess, 0.0, 1.0 - 1e-9);
}

CrowdResponse simulate_responses(const WorkerModel& model, const Bet& bet, int w) {
  if (!bet.gold) throw Error("simulated workers need a gold label");
  if (w < 1) throw Error("need at least one worker");
  Rng rng = Rng(model.rngSeed).fork(static_cast<std::uint64_t>(bet.id));
  CrowdResponse resp;
  resp.bet = bet.id;
  resp.votes.reserve(w);
  for (int k = 0; k < w; ++k) {
    const bool truthful = rng.bernoulli(model.accuracy);
    resp.votes.push_back(truthful ? *bet.gold : 1 - *bet.gold);
  }
  resp.aggregate = majority_vote(resp.votes);
  return resp;
}

double majority_error_bound(int w, double epsilon) {
  return 2.0 * std::exp(-2.0 * static_cast<double>(w) * epsilon * epsilon);
}

namespace {

std::string camel_to_words(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isupper(static_cast<unsigned char>(c)) && !out.empty()) {
      out.push_back(' ');
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_sentence(const KnowledgeGraph& kg, const Bet& bet) {
  const Predicate& pred = kg.predicates()[bet.predicate];
  std::string s;
  if (pred.domainCategory) s += camel_to_words(*pred.domainCategory) + " ";
  s += kg.entity_surface(bet.subject);
  s += " " + camel_to_words(pred.name) + " ";
  if (pred.rangeCategory) s += camel_to_words(*pred.rangeCategory) + " ";
  s += kg.entity_surface(bet.object);
  return s;
}

SourceKind source_from_name(const std::string& name) {
  if (name == "oracle") return SourceKind::Oracle;
  if (name == "simulated") return SourceKind::Simulated;
  if (name == "interactive") return SourceKind::Interactive;
  throw Error("unknown source '" + name + "'");
}

std::pair<int, double> OracleSource::answer(const Bet& bet) {
  if (!bet.gold) throw Error("oracle source needs a gold label");
  return {*bet.gold, bet.cost};
}

int OracleSource::lookahead(const Bet& bet, double) const {
  if (!bet.gold) throw Error("oracle source needs a gold label");
  return *bet.gold;
}

std::pair<int, double> SimulatedSource::answer(const Bet& bet) {
  int w = 1;
  double spend = bet.cost;
  if (plan_) {
    w = allocate_workers(*plan_, std::max(1, std::min(nextInferable_, plan_->iMax)), bet.id);
    spend = static_cast<double>(w) * plan_->unitCost;
  }
  CrowdResponse resp = simulate_responses(model_, bet, w);
  resp.spend = spend;
  return {resp.aggregate, spend};
}

int SimulatedSource::lookahead(const Bet& bet, double) const {
  if (!bet.gold) throw Error("simulated source needs a gold label");
  return *bet.gold;
}

InteractiveSource::InteractiveSource(const KnowledgeGraph& kg, std::istream& in,
                                     std::ostream& out, std::string auditPath)
    : kg_(kg), in_(in), out_(out), auditPath_(std::move(auditPath)) {}

std::pair<int, double> InteractiveSource::answer(const Bet& bet) {
  const std::string sentence = render_sentence(kg_, bet);
  while (true) {
    out_ << "[" << (asked_ + 1) << "/" << total_ << "] " << sentence
         << " — true(1)/false(0)/ambiguous(a)? " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) throw Error("end of input on interactive source");
    std::string t;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t == "1" || t == "0") {
      ++asked_;
      const int label = t == "1" ? 1 : 0;
      if (!auditPath_.empty()) {
        nlohmann::ordered_json j;
        j["bet"] = bet.id;
        j["answer"] = label;
        j["timestamp"] = static_cast<long long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        std::ofstream audit(auditPath_, std::ios::app);
        audit << j.dump() << '\n';
      }
      return {label, bet.cost};
    }
    if (t == "a" || t == "A") {
      out_ << "please decide; re-asking\n";
      continue;
    }
    out_ << "unrecognized answer '" << line << "'\n";
  }
}

int InteractiveSource::lookahead(const Bet&, double currentScore) const {
  return currentScore >= 0.5 ? 1 : 0;
}

}  // namespace kgeval
