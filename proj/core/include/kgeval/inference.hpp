#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgeval/ecg.hpp"

namespace kgeval {

/// Soft truth values over all bets, with hard evidence clamps.
struct Assignment {
  std::vector<double> scores;       // each in [0,1]
  std::vector<std::int8_t> clamp;   // -1 free, 0/1 clamped to evidence

  static Assignment neutral(int n, double value = 0.5) {
    Assignment a;
    a.scores.assign(n, value);
    a.clamp.assign(n, -1);
    return a;
  }
  bool clamped(int bet) const { return clamp[bet] >= 0; }
};

enum class Label : std::int8_t { False = 0, True = 1, Undecided = 2 };

struct InferenceConfig {
  double tau = 0.8;        // label confidence threshold, must be > 0.5
  double solverTol = 1e-6; // infinity norm of the projected gradient
  int maxIters = 10000;
};

struct InferenceResult {
  Assignment assignment;
  std::vector<Label> labels;
  std::vector<int> inferable;  // bet ids with a decided label, ascending
  double energy = 0.0;
  int solverIters = 0;
  double gradResidual = 0.0;
  bool converged = true;

  bool decided(int bet) const { return labels[bet] != Label::Undecided; }
  std::string to_json() const;
};

/// Conjunction of body values under the Lukasiewicz t-norm,
/// max{0, sum - (m-1)}; equals the left fold of max{0, a+b-1}.
double lukasiewicz_body(std::span<const double> values);

/// Squared hinge of one grounded constraint: (max{0, body - head})^2.
/// Zero exactly when the relaxed implication holds.
double potential(const GroundedConstraint& gc, const Assignment& a);

/// Weighted sum of potentials over the whole graph.
double energy(const Ecg& ecg, const Assignment& a);

/// Analytic gradient of `energy` with respect to the scores.
/// `grad` is resized and overwritten.
void energy_gradient(const Ecg& ecg, const std::vector<double>& scores,
                     std::vector<double>& grad);

/// Minimizes the energy over [0,1]^n with the evidence coordinates fixed,
/// by projected gradient descent with backtracking line search from the
/// neutral start. Energy is non-increasing across iterations. Labels are
/// thresholded at cfg.tau; unclamped bets touching no constraint stay
/// neutral and are never in the inferable set.
InferenceResult map_solve(const Ecg& ecg, const std::vector<std::pair<int, int>>& evidence,
                          const InferenceConfig& cfg);

/// Applies the tau rule: label 1 iff score >= tau, 0 iff score <= 1-tau,
/// clamped bets keep their evidence label. tau must exceed 0.5.
std::vector<Label> threshold_labels(const Assignment& a, double tau);

/// Rescales unclamped scores so the class mass agrees with the seed-set
/// positive fraction q1. Scores exactly at the neutral value carry no class
/// evidence; the current class mass is estimated from clamped plus
/// informative coordinates, falling back to all unclamped scores when
/// nothing is informative. q1 outside (0,1) leaves the assignment unchanged.
Assignment class_mass_normalize(const Assignment& a, double q1);

/// Recomputes labels/inferable/energy for an (possibly rescaled) assignment
/// against the graph, preserving the no-constraint exclusion rule.
void relabel(InferenceResult& r, const Ecg& ecg, double tau);

}  // namespace kgeval
