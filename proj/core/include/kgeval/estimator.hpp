#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgeval/control.hpp"
#include "kgeval/crowd.hpp"
#include "kgeval/inference.hpp"

namespace kgeval {

struct RunConfig {
  int seedSize = 50;
  double tau = 0.8;
  int windowK = 9;        // convergence window is the last windowK+1 estimates
  double alpha = 0.002;   // variance threshold
  double budget = std::numeric_limits<double>::infinity();
  Strategy strategy;
  std::uint64_t rngSeed = 0;
  double solverTol = 1e-6;
  int maxSolverIters = 10000;
  bool runToCoverage = false;  // ignore the convergence rule, stop at Q == H
  int maxQueries = 0;          // cap on total crowd queries, 0 = none

  InferenceConfig inference() const { return {tau, solverTol, maxSolverIters}; }
};

enum class Termination { Converged, FullCoverage, BudgetExhausted, QueryCap };
std::string termination_name(Termination t);

struct PredicateReport {
  double gold = 0.0;
  double estimated = 0.0;
  double gap = 0.0;
};

struct RunReport {
  double finalEstimate = 0.0;
  std::optional<double> deltaOverall;
  std::optional<double> deltaPredicate;
  int queriesUsed = 0;  // crowd queries including the seed set
  int seedQueries = 0;
  double spend = 0.0;
  Termination termination = Termination::Converged;
  int undecidedCount = 0;
  bool solverEverNonConverged = false;
  std::vector<std::pair<int, double>> coverageCurve;  // (queries, fraction covered)
  std::map<std::string, PredicateReport> perPredicate;
  std::vector<double> accHistory;
  SelectionTrace trace;
  std::vector<Label> finalLabels;
  std::vector<std::pair<int, int>> evidence;  // crowd-evaluated bets with labels

  std::string to_json() const;
  std::string coverage_csv() const;
  std::string per_predicate_csv() const;
};

/// Live state of one estimation run.
struct EvaluationState {
  std::vector<std::pair<int, int>> evidence;  // crowd-evaluated, in order
  std::vector<char> covered;                  // cumulative Q mask
  std::vector<std::int8_t> labelMemory;       // last decided label, -1 unknown
  std::vector<char> inferableNow;             // current I(G,Q) mask
  std::vector<double> currentScores;
  std::vector<double> accHistory;
  double spend = 0.0;
  int step = 0;
};

/// Full estimation loop: seed evaluations, one-time class-mass
/// normalization, then select/evaluate/infer until convergence, coverage,
/// or budget exhaustion.
RunReport run(const KnowledgeGraph& kg, const Ecg& ecg, const RunConfig& cfg,
              AnswerSource& source);

/// True when at least windowK+1 estimates exist and the population variance
/// of the last windowK+1 is below alpha.
bool converged(const std::vector<double>& accHistory, int windowK, double alpha);

/// |gold accuracy - estimated accuracy| over the whole graph; undecided
/// labels contribute one half.
double delta_overall(const KnowledgeGraph& kg, const std::vector<Label>& labels);

/// Mean per-predicate absolute accuracy gap.
double delta_predicate(const KnowledgeGraph& kg, const std::vector<Label>& labels);

/// Corrupts round(flipFraction * n) gold-true beliefs of functional
/// predicates by swapping the object for a type-compatible wrong entity and
/// marking them false. Returns the corrupted graph.
KnowledgeGraph inject_noise(const KnowledgeGraph& kg, double flipFraction,
                            std::uint64_t rngSeed);

}  // namespace kgeval
