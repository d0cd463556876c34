#pragma once

#include <cstdint>
#include <string>

#include "kgeval/ecg.hpp"
#include "kgeval/kg.hpp"
#include "kgeval/rules.hpp"

namespace kgeval {

/// Parameters for the sports-world benchmark generator: a typed entity
/// universe, root relations drawn from a consistent hidden world, derived
/// relations materialized by the rules, and exact-count corruption of root
/// beliefs down to the target gold accuracy.
struct SyntheticSpec {
  int betCount = 1860;
  double targetGoldAcc = 0.9134;
  std::uint64_t rngSeed = 0;
  std::string rulesProfile = "mixed";  // "mixed" (types + 2-body + 3-body) or "types-only"
  double defaultCost = KnowledgeGraph::kDefaultCost;
};

struct SyntheticData {
  KnowledgeGraph kg;
  RuleSet ruleset;
  std::string triplesText;  // byte-stable; reparsing reproduces kg
  std::string rulesText;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace kgeval
