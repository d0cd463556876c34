#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kgeval/inference.hpp"

namespace kgeval {

enum class StrategyKind {
  Greedy,
  Random,
  MaxDegree,
  IndependentCascade,
  RandomPlusInference,
  MaxDegreePlusInference,
};

StrategyKind strategy_from_name(const std::string& name);
std::string strategy_name(StrategyKind kind);

/// True when the strategy runs full MAP inference after each evaluation.
bool strategy_uses_inference(StrategyKind kind);

struct Strategy {
  StrategyKind kind = StrategyKind::Greedy;
  std::uint64_t rngSeed = 0;
  int candidatePoolSize = 5;
};

struct SelectionTrace {
  struct Row {
    int step;
    int chosen;
    int poolSize;
    int inferableSize;
    int crowdLabel;
  };
  std::vector<Row> rows;
  std::string to_csv() const;
};

/// Immutable view of the run state the selection operators need.
struct SelectionView {
  const Ecg& ecg;
  const std::vector<std::pair<int, int>>& evidence;  // crowd labels so far
  const std::vector<char>& covered;                  // cumulative Q mask
  const std::vector<char>& inferableNow;             // current I(G,Q) mask
};

/// The poolSize uncovered bets adjacent to the most unfulfilled constraints
/// (a constraint is unfulfilled while any member is outside I(G,Q));
/// ties resolve to the lowest id. Never empty while uncovered bets remain.
std::vector<int> approx_candidates(const SelectionView& view, int poolSize);

/// Scores each pool candidate by the inferable-set size of a hypothetical
/// clamp to `lookaheadLabel(bet)`, one map_solve per candidate, and returns
/// the argmax (ties to the lowest id) with its hypothetical |I|.
/// Honors KGEVAL_THREADS for parallel candidate scoring.
std::pair<int, int> greedy_select(const SelectionView& view, const InferenceConfig& cfg,
                                  int poolSize,
                                  const std::function<int(int)>& lookaheadLabel);

/// Random: seeded uniform pick without replacement. MaxDegree: highest
/// degree first, ties by id. IndependentCascade picks like Random (its
/// propagation happens at labeling time, see fire_one_hop).
int baseline_select(StrategyKind kind, const SelectionView& view, Rng& rng);

/// Contagion step: having labeled `bet`, every constraint whose body
/// contains it with all body members labeled true fires its head true,
/// once, no iteration. Returns newly labeled head ids.
std::vector<int> fire_one_hop(const Ecg& ecg, const std::vector<std::int8_t>& labels, int bet);

/// Exhaustive search over all size-k evidence subsets under gold-label
/// clamping; returns a maximizer of |I| and the maximum. Only for graphs
/// with at most 15 bets.
std::pair<std::vector<int>, int> brute_force_best_set(const Ecg& ecg,
                                                      const std::vector<int>& gold, int k,
                                                      const InferenceConfig& cfg);

struct ProbeWitness {
  std::vector<int> smallSet;   // A
  std::vector<int> largeSet;   // B, superset of A
  int element;                 // h outside B
  int gainSmall;
  int gainLarge;
};

struct ProbeReport {
  int trials = 0;
  int violations = 0;
  std::vector<ProbeWitness> witnesses;
  int regularityChecked = 0;
  int regularityViolations = 0;
  std::string summary() const;
};

/// Samples nested evidence sets A subset-of B and an element outside B,
/// compares marginal inferable-set gains, and corner-checks the pairwise
/// regularity inequality for every single-body constraint. Diagnostic:
/// always returns a report.
ProbeReport submodularity_probe(const Ecg& ecg, const std::vector<int>& gold, int trials,
                                std::uint64_t rngSeed, const InferenceConfig& cfg);

}  // namespace kgeval
