#pragma once

#include <string>
#include <vector>

#include "kgeval/kg.hpp"
#include "kgeval/rules.hpp"

namespace kgeval {

/// A rule instantiated over concrete bets. Directional: body bets jointly
/// support the head bet.
struct GroundedConstraint {
  int id = -1;
  int rule = -1;
  std::vector<int> body;  // bet ids, sorted
  int head = -1;
  double weight = 0.0;
};

/// Bipartite evaluation coupling graph: bet nodes on one side, grounded
/// constraint nodes on the other, an edge wherever a bet participates in a
/// constraint. Immutable after construction.
class Ecg {
 public:
  Ecg() = default;
  Ecg(int betCount, std::vector<GroundedConstraint> constraints);

  /// Instantiates every rule against the graph. A substitution yields a
  /// constraint only when all body atoms and the head atom match existing
  /// bets; duplicates from the same rule are merged. Output order is
  /// canonical (rule id, then body ids, then head id), independent of join
  /// scheduling.
  static Ecg ground(const KnowledgeGraph& kg, const std::vector<Rule>& rules);

  int bet_count() const { return betCount_; }
  const std::vector<GroundedConstraint>& constraints() const { return constraints_; }
  const GroundedConstraint& constraint(int id) const { return constraints_.at(id); }

  /// Constraint ids incident on a bet (as body or head).
  const std::vector<int>& incident(int bet) const { return incidence_.at(bet); }
  int degree(int bet) const;

  /// Per-bet degree histogram, index = degree.
  std::vector<int> degree_histogram() const;

  bool touches_constraints(int bet) const { return !incidence_.at(bet).empty(); }

  std::string to_json(const KnowledgeGraph& kg) const;

 private:
  int betCount_ = 0;
  std::vector<GroundedConstraint> constraints_;
  std::vector<std::vector<int>> incidence_;

  void build_incidence();
};

}  // namespace kgeval
