#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "kgeval/ecg.hpp"
#include "kgeval/estimator.hpp"
#include "kgeval/inference.hpp"
#include "kgeval/synthetic.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(KGEVAL_FIXTURES_DIR) + "/" + name;
}

struct Fixture {
  kgeval::KnowledgeGraph kg;
  kgeval::RuleSet ruleset;
  kgeval::Ecg ecg;
};

inline Fixture load_fig1() {
  Fixture f;
  std::ifstream triples(fixture_path("fig1.tsv"));
  f.kg = kgeval::KnowledgeGraph::parse_triples(triples);
  std::ifstream rules(fixture_path("fig1.rules"));
  f.ruleset = kgeval::parse_rules(rules, f.kg);
  f.kg.apply_declarations(f.ruleset.declarations);
  f.ecg = kgeval::Ecg::ground(f.kg, f.ruleset.rules);
  return f;
}

struct RandomEcg {
  kgeval::Ecg ecg;
  std::vector<int> gold;
};

/// Random small coupling graph with gold labels; body sizes 1-3, weights in
/// [0.3, 1.5]. Used by the oracle-style suites.
inline RandomEcg random_ecg(std::uint64_t seed, int bets, int constraints,
                            int maxBody = 3) {
  kgeval::Rng rng(seed);
  std::vector<kgeval::GroundedConstraint> gcs;
  for (int c = 0; c < constraints; ++c) {
    kgeval::GroundedConstraint gc;
    gc.rule = c;
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxBody)));
    std::vector<int> members = rng.sample(bets, std::min(bets, m + 1));
    if (static_cast<int>(members.size()) < 2) continue;
    gc.head = members.back();
    members.pop_back();
    gc.body = members;
    gc.weight = rng.range(0.3, 1.5);
    gcs.push_back(std::move(gc));
  }
  RandomEcg out{kgeval::Ecg(bets, std::move(gcs)), {}};
  out.gold.resize(bets);
  for (int i = 0; i < bets; ++i) out.gold[i] = rng.bernoulli(0.7) ? 1 : 0;
  return out;
}

/// Exhaustive grid search of the energy over the free coordinates with the
/// given spacing; clamped coordinates stay at their evidence values.
inline double grid_min_energy(const kgeval::Ecg& ecg,
                              const std::vector<std::pair<int, int>>& evidence,
                              double spacing) {
  const int n = ecg.bet_count();
  kgeval::Assignment a = kgeval::Assignment::neutral(n);
  std::vector<int> free;
  for (const auto& [bet, value] : evidence) {
    a.clamp[bet] = static_cast<std::int8_t>(value);
    a.scores[bet] = value;
  }
  for (int i = 0; i < n; ++i)
    if (a.clamp[i] < 0) free.push_back(i);

  const int steps = static_cast<int>(1.0 / spacing + 0.5) + 1;
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> walk = [&](std::size_t idx) {
    if (idx == free.size()) {
      best = std::min(best, kgeval::energy(ecg, a));
      return;
    }
    for (int s = 0; s < steps; ++s) {
      a.scores[free[idx]] = std::min(1.0, s * spacing);
      walk(idx + 1);
    }
  };
  walk(0);
  return best;
}

inline double central_difference(const kgeval::Ecg& ecg, kgeval::Assignment& a, int coord,
                                 double step) {
  const double saved = a.scores[coord];
  a.scores[coord] = saved + step;
  const double up = kgeval::energy(ecg, a);
  a.scores[coord] = saved - step;
  const double down = kgeval::energy(ecg, a);
  a.scores[coord] = saved;
  return (up - down) / (2 * step);
}

}  // namespace testutil
