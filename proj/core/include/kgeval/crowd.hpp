#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgeval/kg.hpp"

namespace kgeval {

/// Per-vote accuracy of a simulated worker; must exceed one half
/// (workers may be noisy but not adversarial).
struct WorkerModel {
  double accuracy = 1.0;  // probability of reporting the true label
  std::uint64_t rngSeed = 0;
};

/// Budget book-keeping for redundant posting.
/// Worker counts follow w = floor(B * i_t * (1-gamma) / (c * i_max)).
struct BudgetPlan {
  double totalBudget = 0.0;
  double residual = 0.0;
  double unitCost = 0.0;   // c
  double gamma = 0.0;      // in [0,1)
  int iMax = 1;
  std::map<int, int> perTaskWorkers;  // bet id -> w

  static BudgetPlan make(double budget, double unitCost, double gamma, int iMax);
};

struct CrowdResponse {
  int bet = -1;
  std::vector<int> votes;
  int aggregate = 0;
  double spend = 0.0;
};

/// 1 iff the vote mean is at least one half (floor-formula aggregation;
/// exact ties resolve to 1).
int majority_vote(const std::vector<int>& votes);

/// Worker count for a task whose inferable set has size i_t, floored to a
/// minimum of one and capped by the affordable residual; deducts the spend.
/// Throws BudgetExhausted when not even one worker is affordable.
int allocate_workers(BudgetPlan& plan, int i_t, int bet = -1);

/// The decay-factor guess 1 - i_max / avg(i_t), clamped into [0,1).
double estimate_gamma(const std::vector<int>& inferableSizes);

/// w independent votes, each matching gold with probability
/// model.accuracy; aggregation by majority vote. Deterministic per
/// (seed, bet id).
CrowdResponse simulate_responses(const WorkerModel& model, const Bet& bet, int w);

/// Hoeffding-style aggregate error bound 2 exp(-2 w eps^2).
double majority_error_bound(int w, double epsilon);

/// Human-readable sentence for a belief, categories prefixed when declared.
std::string render_sentence(const KnowledgeGraph& kg, const Bet& bet);

enum class SourceKind { Oracle, Simulated, Interactive };
SourceKind source_from_name(const std::string& name);

/// Where crowd answers come from during a run.
class AnswerSource {
 public:
  virtual ~AnswerSource() = default;

  /// Definitive answer plus money spent.
  virtual std::pair<int, double> answer(const Bet& bet) = 0;

  /// Label assumed during greedy lookahead; `currentScore` is the bet's
  /// present soft score.
  virtual int lookahead(const Bet& bet, double currentScore) const = 0;

  virtual SourceKind kind() const = 0;
};

/// Gold labels at cost c(h).
class OracleSource final : public AnswerSource {
 public:
  std::pair<int, double> answer(const Bet& bet) override;
  int lookahead(const Bet& bet, double) const override;
  SourceKind kind() const override { return SourceKind::Oracle; }
};

/// Noisy workers with optional redundant posting under a budget plan.
class SimulatedSource final : public AnswerSource {
 public:
  SimulatedSource(WorkerModel model, BudgetPlan* plan = nullptr)
      : model_(model), plan_(plan) {}

  std::pair<int, double> answer(const Bet& bet) override;
  int lookahead(const Bet& bet, double) const override;
  SourceKind kind() const override { return SourceKind::Simulated; }

  /// Inferable-set size for the next task, set by the run loop before each
  /// evaluation so the plan can size the worker pool.
  void set_next_inferable_size(int i_t) { nextInferable_ = i_t; }

 private:
  WorkerModel model_;
  BudgetPlan* plan_;
  int nextInferable_ = 1;
};

/// Console Q&A; renders each belief as a sentence and accepts 1/0/a
/// (ambiguous re-asks). Answers are appended to a JSONL audit file when a
/// path is given.
class InteractiveSource final : public AnswerSource {
 public:
  InteractiveSource(const KnowledgeGraph& kg, std::istream& in, std::ostream& out,
                    std::string auditPath = "");

  std::pair<int, double> answer(const Bet& bet) override;
  int lookahead(const Bet& bet, double currentScore) const override;
  SourceKind kind() const override { return SourceKind::Interactive; }

  void set_progress(int asked, int total) {
    asked_ = asked;
    total_ = total;
  }

 private:
  const KnowledgeGraph& kg_;
  std::istream& in_;
  std::ostream& out_;
  std::string auditPath_;
  int asked_ = 0;
  int total_ = 0;
};

}  // namespace kgeval
