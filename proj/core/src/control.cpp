#include "kgeval/control.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace kgeval {

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "greedy") return StrategyKind::Greedy;
  if (name == "random") return StrategyKind::Random;
  if (name == "max-degree" || name == "maxdegree") return StrategyKind::MaxDegree;
  if (name == "independent-cascade" || name == "cascade")
    return StrategyKind::IndependentCascade;
  if (name == "random+inference") return StrategyKind::RandomPlusInference;
  if (name == "max-degree+inference") return StrategyKind::MaxDegreePlusInference;
  throw Error("unknown strategy '" + name + "'");
}

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Greedy: return "greedy";
    case StrategyKind::Random: return "random";
    case StrategyKind::MaxDegree: return "max-degree";
    case StrategyKind::IndependentCascade: return "independent-cascade";
    case StrategyKind::RandomPlusInference: return "random+inference";
    case StrategyKind::MaxDegreePlusInference: return "max-degree+inference";
  }
  return "?";
}

bool strategy_uses_inference(StrategyKind kind) {
  return kind == StrategyKind::Greedy || kind == StrategyKind::RandomPlusInference ||
         kind == StrategyKind::MaxDegreePlusInference;
}

std::string SelectionTrace::to_csv() const {
  std::ostringstream out;
  out << "step,chosen_bet,pool_size,inferable_size,crowd_label\n";
  for (const Row& r : rows)
    out << r.step << ',' << r.chosen << ',' << r.poolSize << ',' << r.inferableSize << ','
        << r.crowdLabel << '\n';
  return out.str();
}

std::vector<int> approx_candidates(const SelectionView& view, int poolSize) {
  if (poolSize < 1) throw Error("pool size must be at least 1");
  const Ecg& ecg = view.ecg;
  const int n = ecg.bet_count();

  std::vector<char> unfulfilled(ecg.constraints().size(), 0);
  for (const GroundedConstraint& gc : ecg.constraints()) {
    bool all = view.inferableNow[gc.head] != 0;
    for (int b : gc.body)
      if (!view.inferableNow[b]) all = false;
    unfulfilled[gc.id] = all ? 0 : 1;
  }

  std::vector<std::pair<int, int>> scored;  // (count, bet)
  for (int h = 0; h < n; ++h) {
    if (view.covered[h]) continue;
    int count = 0;
    for (int c : ecg.incident(h)) count += unfulfilled[c];
    scored.emplace_back(count, h);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(scored.size()) > poolSize) scored.resize(poolSize);
  std::vector<int> out;
  out.reserve(scored.size());
  for (const auto& [count, bet] : scored) out.push_back(bet);
  return out;
}

namespace {

int scoring_threads() {
  if (const char* env = std::getenv("KGEVAL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int hypothetical_inferable(const Ecg& ecg, const std::vector<std::pair<int, int>>& evidence,
                           int bet, int label, const InferenceConfig& cfg) {
  std::vector<std::pair<int, int>> hypo = evidence;
  hypo.emplace_back(bet, label);
  return static_cast<int>(map_solve(ecg, hypo, cfg).inferable.size());
}

}  // namespace

std::pair<int, int> greedy_select(const SelectionView& view, const InferenceConfig& cfg,
                                  int poolSize,
                                  const std::function<int(int)>& lookaheadLabel) {
  std::vector<int> pool = approx_candidates(view, poolSize);
  if (pool.empty()) throw Error("exhausted: no unevaluated bets remain");

  std::vector<int> sizes(pool.size(), 0);
  const int threads = std::min<int>(scoring_threads(), static_cast<int>(pool.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < pool.size(); ++i)
      sizes[i] =
          hypothetical_inferable(view.ecg, view.evidence, pool[i], lookaheadLabel(pool[i]), cfg);
  } else {
    // one independent solve per candidate over the shared immutable graph;
    // the merge below is order-deterministic
    std::vector<int> labels(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) labels[i] = lookaheadLabel(pool[i]);
    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&, t]() {
        for (std::size_t i = static_cast<std::size_t>(t); i < pool.size();
             i += static_cast<std::size_t>(threads))
          sizes[i] = hypothetical_inferable(view.ecg, view.evidence, pool[i], labels[i], cfg);
      });
    }
    for (auto& w : workers) w.join();
  }

  int bestIdx = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (sizes[i] > sizes[bestIdx] ||
        (sizes[i] == sizes[bestIdx] && pool[i] < pool[bestIdx]))
      bestIdx = static_cast<int>(i);
  }
  return {pool[bestIdx], sizes[bestIdx]};
}

int baseline_select(StrategyKind kind, const SelectionView& view, Rng& rng) {
  const int n = view.ecg.bet_count();
  std::vector<int> open;
  for (int h = 0; h < n; ++h)
    if (!view.covered[h]) open.push_back(h);
  if (open.empty()) throw Error("exhausted: no unevaluated bets remain");

  switch (kind) {
    case StrategyKind::Random:
    case StrategyKind::IndependentCascade:
    case StrategyKind::RandomPlusInference:
      return open[rng.below(open.size())];
    case StrategyKind::MaxDegree:
    case StrategyKind::MaxDegreePlusInference: {
      int best = open[0];
      for (int h : open) {
        if (view.ecg.degree(h) > view.ecg.degree(best)) best = h;
      }
      return best;  // open is ascending, so ties already favor the lowest id
    }
    case StrategyKind::Greedy:
      throw Error("greedy is not a baseline");
  }
  throw Error("unreachable");
}

std::vector<int> fire_one_hop(const Ecg& ecg, const std::vector<std::int8_t>& labels, int bet) {
  std::vector<int> fired;
  if (labels[bet] != 1) return fired;
  for (int cid : ecg.incident(bet)) {
    const GroundedConstraint& gc = ecg.constraint(cid);
    if (labels[gc.head] != -1) continue;
    bool inBody = false;
    bool bodyTrue = true;
    for (int b : gc.body) {
      if (b == bet) inBody = true;
      if (labels[b] != 1) bodyTrue = false;
    }
    if (inBody && bodyTrue) fired.push_back(gc.head);
  }
  std::sort(fired.begin(), fired.end());
  fired.erase(std::unique(fired.begin(), fired.end()), fired.end());
  return fired;
}

std::pair<std::vector<int>, int> brute_force_best_set(const Ecg& ecg,
                                                      const std::vector<int>& gold, int k,
                                                      const InferenceConfig& cfg) {
  const int n = ecg.bet_count();
  if (n > 15) throw Error("oracle limit: brute force capped at 15 bets");
  if (k < 0 || k > n) throw Error("subset size out of range");

  std::vector<int> best;
  int bestSize = -1;
  std::vector<int> subset(k);
  // lexicographic enumeration of all C(n,k) subsets
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == k) {
      std::vector<std::pair<int, int>> evidence;
      for (int b : subset) evidence.emplace_back(b, gold[b]);
      const int size = static_cast<int>(map_solve(ecg, evidence, cfg).inferable.size());
      if (size > bestSize) {
        bestSize = size;
        best = subset;
      }
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      subset[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return {best, bestSize};
}

std::string ProbeReport::summary() const {
  std::ostringstream out;
  out << "trials=" << trials << " violations=" << violations
      << " regularity_checked=" << regularityChecked
      << " regularity_violations=" << regularityViolations;
  for (const ProbeWitness& w : witnesses) {
    out << "\n  witness h=" << w.element << " gainA=" << w.gainSmall
        << " gainB=" << w.gainLarge << " A={";
    for (std::size_t i = 0; i < w.smallSet.size(); ++i)
      out << (i ? "," : "") << w.smallSet[i];
    out << "} B={";
    for (std::size_t i = 0; i < w.largeSet.size(); ++i)
      out << (i ? "," : "") << w.largeSet[i];
    out << "}";
  }
  return out.str();
}

ProbeReport submodularity_probe(const Ecg& ecg, const std::vector<int>& gold, int trials,
                                std::uint64_t rngSeed, const InferenceConfig& cfg) {
  ProbeReport report;
  const int n = ecg.bet_count();
  Rng rng(rngSeed);

  auto inferable_with = [&](const std::vector<int>& bets) {
    std::vector<std::pair<int, int>> evidence;
    for (int b : bets) evidence.emplace_back(b, gold[b]);
    return static_cast<int>(map_solve(ecg, evidence, cfg).inferable.size());
  };

  for (int t = 0; t < trials && n >= 2; ++t) {
    // B of size 1..n-1, A a strict-or-equal subset, h outside B
    const int bSize = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    std::vector<int> perm = rng.sample(n, n);
    std::vector<int> large(perm.begin(), perm.begin() + bSize);
    const int aSize = static_cast<int>(rng.below(static_cast<std::uint64_t>(bSize + 1)));
    std::vector<int> small(large.begin(), large.begin() + aSize);
    const int element = perm[bSize];

    std::vector<int> smallPlus = small, largePlus = large;
    smallPlus.push_back(element);
    largePlus.push_back(element);
    const int gainSmall = inferable_with(smallPlus) - inferable_with(small);
    const int gainLarge = inferable_with(largePlus) - inferable_with(large);
    ++report.trials;
    if (gainSmall < gainLarge) {
      ++report.violations;
      if (report.witnesses.size() < 16)
        report.witnesses.push_back({small, large, element, gainSmall, gainLarge});
    }
  }

  // pairwise regularity at the four corners of each single-body constraint
  for (const GroundedConstraint& gc : ecg.constraints()) {
    if (gc.body.size() != 1) continue;
    ++report.regularityChecked;
    auto psi = [&](double body, double head) {
      const double h = std::max(0.0, body - head);
      return h * h;
    };
    const double lhs = psi(0, 1) + psi(1, 0);
    const double rhs = psi(0, 0) + psi(1, 1);
    if (lhs < rhs) ++report.regularityViolations;
  }
  return report;
}

}  // namespace kgeval
