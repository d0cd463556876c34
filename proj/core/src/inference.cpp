#include "kgeval/inference.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace kgeval {

double lukasiewicz_body(std::span<const double> values) {
  double sum = 0;
  for (double v : values) {
    if (v < 0.0 || v > 1.0) throw Error("truth value outside [0,1]");
    sum += v;
  }
  const double m = static_cast<double>(values.size());
  return std::max(0.0, sum - (m - 1.0));
}

double potential(const GroundedConstraint& gc, const Assignment& a) {
  double sum = 0;
  for (int b : gc.body) sum += a.scores[b];
  const double slack = sum - (static_cast<double>(gc.body.size()) - 1.0) - a.scores[gc.head];
  const double h = std::max(0.0, slack);
  return h * h;
}

double energy(const Ecg& ecg, const Assignment& a) {
  double e = 0;
  for (const GroundedConstraint& gc : ecg.constraints()) e += gc.weight * potential(gc, a);
  return e;
}

void energy_gradient(const Ecg& ecg, const std::vector<double>& scores,
                     std::vector<double>& grad) {
  grad.assign(scores.size(), 0.0);
  for (const GroundedConstraint& gc : ecg.constraints()) {
    double sum = 0;
    for (int b : gc.body) sum += scores[b];
    const double slack = sum - (static_cast<double>(gc.body.size()) - 1.0) - scores[gc.head];
    if (slack <= 0.0) continue;
    const double coeff = 2.0 * gc.weight * slack;
    for (int b : gc.body) grad[b] += coeff;
    grad[gc.head] -= coeff;
  }
}

std::vector<Label> threshold_labels(const Assignment& a, double tau) {
  if (!(tau > 0.5)) throw Error("tau must exceed 0.5");
  std::vector<Label> labels(a.scores.size(), Label::Undecided);
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    if (a.clamp[i] >= 0) {
      labels[i] = a.clamp[i] == 1 ? Label::True : Label::False;
    } else if (a.scores[i] >= tau) {
      labels[i] = Label::True;
    } else if (a.scores[i] <= 1.0 - tau) {
      labels[i] = Label::False;
    }
  }
  return labels;
}

namespace {

constexpr double kNeutral = 0.5;
constexpr double kNeutralEps = 1e-12;

void fill_result_labels(InferenceResult& r, const Ecg& ecg, double tau) {
  r.labels = threshold_labels(r.assignment, tau);
  // an unclamped bet with no incident constraint has nothing supporting a
  // label, whatever its score says
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    if (!r.assignment.clamped(static_cast<int>(i)) &&
        !ecg.touches_constraints(static_cast<int>(i)))
      r.labels[i] = Label::Undecided;
  }
  r.inferable.clear();
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    if (r.labels[i] != Label::Undecided) r.inferable.push_back(static_cast<int>(i));
}

}  // namespace

void relabel(InferenceResult& r, const Ecg& ecg, double tau) {
  fill_result_labels(r, ecg, tau);
  r.energy = energy(ecg, r.assignment);
}

InferenceResult map_solve(const Ecg& ecg, const std::vector<std::pair<int, int>>& evidence,
                          const InferenceConfig& cfg) {
  const int n = ecg.bet_count();
  Assignment a = Assignment::neutral(n);
  for (const auto& [bet, value] : evidence) {
    if (bet < 0 || bet >= n) throw Error("evidence bet id out of range");
    if (value != 0 && value != 1) throw Error("evidence value must be 0 or 1");
    a.clamp[bet] = static_cast<std::int8_t>(value);
    a.scores[bet] = static_cast<double>(value);
  }

  InferenceResult result;
  std::vector<double>& x = a.scores;
  std::vector<double> grad, trial(x);

  auto energy_of = [&ecg](const std::vector<double>& s) {
    double e = 0;
    for (const GroundedConstraint& gc : ecg.constraints()) {
      double sum = 0;
      for (int b : gc.body) sum += s[b];
      const double slack = sum - (static_cast<double>(gc.body.size()) - 1.0) - s[gc.head];
      if (slack > 0) e += gc.weight * slack * slack;
    }
    return e;
  };

  double e = energy_of(x);
  energy_gradient(ecg, x, grad);

  auto projected_residual = [&]() {
    double r = 0;
    for (int i = 0; i < n; ++i) {
      if (a.clamp[i] >= 0) continue;
      const double stepTo = std::clamp(x[i] - grad[i], 0.0, 1.0);
      r = std::max(r, std::abs(x[i] - stepTo));
    }
    return r;
  };

  double step = 1.0;
  int iter = 0;
  double residual = projected_residual();
  while (iter < cfg.maxIters && residual > cfg.solverTol) {
    ++iter;
    bool accepted = false;
    while (step >= 1e-18) {
      double decrease = 0;
      for (int i = 0; i < n; ++i) {
        if (a.clamp[i] >= 0) continue;
        const double xi = std::clamp(x[i] - step * grad[i], 0.0, 1.0);
        decrease += grad[i] * (x[i] - xi);
        trial[i] = xi;
      }
      const double eTrial = energy_of(trial);
      if (eTrial <= e - 1e-4 * decrease) {
        x.swap(trial);  // clamped coords never move, so trial stays valid
        e = eTrial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled at numerical precision
    step = std::min(step * 2.0, 1e8);
    energy_gradient(ecg, x, grad);
    residual = projected_residual();
  }

  result.assignment = std::move(a);
  result.energy = e;
  result.solverIters = iter;
  result.gradResidual = residual;
  result.converged = residual <= cfg.solverTol;
  fill_result_labels(result, ecg, cfg.tau);
  return result;
}

Assignment class_mass_normalize(const Assignment& a, double q1) {
  if (!(q1 > 0.0 && q1 < 1.0)) return a;

  double mass = 0;
  int count = 0;
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    const bool informative =
        a.clamp[i] >= 0 || std::abs(a.scores[i] - kNeutral) > kNeutralEps;
    if (informative) {
      mass += a.scores[i];
      ++count;
    }
  }
  if (count == 0) {
    // nothing informative yet; fall back to the raw unclamped mean
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
      if (a.clamp[i] < 0) {
        mass += a.scores[i];
        ++count;
      }
    }
  }
  if (count == 0) return a;

  const double p1 = mass / static_cast<double>(count);
  const double p0 = 1.0 - p1;
  const double q0 = 1.0 - q1;
  if (p1 <= 0.0 && q1 > 0.0) throw Error("degenerate class mass: no positive mass");
  if (p0 <= 0.0 && q0 > 0.0) throw Error("degenerate class mass: no negative mass");

  Assignment out = a;
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    if (out.clamp[i] >= 0) continue;
    const double s = out.scores[i];
    const double pos = (q1 / p1) * s;
    const double neg = (q0 / p0) * (1.0 - s);
    out.scores[i] = pos / (pos + neg);
  }
  return out;
}

std::string InferenceResult::to_json() const {
  nlohmann::ordered_json j;
  j["energy"] = energy;
  j["solver_iters"] = solverIters;
  j["grad_residual"] = gradResidual;
  j["converged"] = converged;
  j["bets"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < assignment.scores.size(); ++i) {
    nlohmann::ordered_json jb;
    jb["id"] = static_cast<int>(i);
    jb["score"] = assignment.scores[i];
    jb["label"] = labels[i] == Label::Undecided ? "undecided"
                 : labels[i] == Label::True     ? "1"
                                                : "0";
    jb["inferable"] = labels[i] != Label::Undecided;
    j["bets"].push_back(std::move(jb));
  }
  return j.dump(2);
}

}  // namespace kgeval
