#include "kgeval/ecg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kgeval {

Ecg::Ecg(int betCount, std::vector<GroundedConstraint> constraints)
    : betCount_(betCount), constraints_(std::move(constraints)) {
  for (auto& gc : constraints_) {
    if (gc.body.empty()) throw Error("grounded constraint with empty body");
    std::sort(gc.body.begin(), gc.body.end());
    for (int b : gc.body) {
      if (b < 0 || b >= betCount_) throw Error("grounded constraint references unknown bet");
      if (b == gc.head) throw Error("head bet inside constraint body");
    }
    if (gc.head < 0 || gc.head >= betCount_) throw Error("grounded constraint head unknown");
  }
  std::stable_sort(constraints_.begin(), constraints_.end(),
                   [](const GroundedConstraint& a, const GroundedConstraint& b) {
                     if (a.rule != b.rule) return a.rule < b.rule;
                     if (a.body != b.body) return a.body < b.body;
                     return a.head < b.head;
                   });
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    constraints_[i].id = static_cast<int>(i);
  build_incidence();
}

void Ecg::build_incidence() {
  incidence_.assign(betCount_, {});
  for (const auto& gc : constraints_) {
    std::set<int> members(gc.body.begin(), gc.body.end());
    members.insert(gc.head);
    for (int m : members) incidence_[m].push_back(gc.id);
  }
}

namespace {

// Matches atom args against a bet's subject/object under the current
// variable binding; extends the binding on success.
bool match_atom(const Atom& atom, const Bet& bet, const KnowledgeGraph& kg,
                std::map<std::string, int>& binding, std::vector<std::string>& boundHere) {
  const int positions[2] = {bet.subject, bet.object};
  for (int i = 0; i < 2; ++i) {
    const AtomArg& arg = atom.args[i];
    if (!arg.isVariable) {
      int eid = kg.entity_id(arg.constant);
      if (eid != positions[i]) return false;
    } else {
      auto it = binding.find(arg.variable);
      if (it != binding.end()) {
        if (it->second != positions[i]) return false;
      } else {
        binding.emplace(arg.variable, positions[i]);
        boundHere.push_back(arg.variable);
      }
    }
  }
  return true;
}

int resolve_head(const Atom& head, const KnowledgeGraph& kg,
                 const std::map<std::string, int>& binding) {
  int ids[2];
  for (int i = 0; i < 2; ++i) {
    const AtomArg& arg = head.args[i];
    if (arg.isVariable) {
      auto it = binding.find(arg.variable);
      if (it == binding.end()) return -1;
      ids[i] = it->second;
    } else {
      ids[i] = kg.entity_id(arg.constant);
      if (ids[i] < 0) return -1;
    }
  }
  return kg.find_bet(ids[0], head.predicate, ids[1]);
}

void ground_rule(const Rule& rule, const KnowledgeGraph& kg,
                 std::set<std::pair<std::vector<int>, int>>& seen,
                 std::vector<GroundedConstraint>& out) {
  // left-to-right nested-loop join over the per-predicate bet index
  struct Frame {
    std::size_t atom;
    std::size_t cursor;
    std::vector<std::string> boundHere;
    int bet = -1;
  };
  std::map<std::string, int> binding;
  std::vector<Frame> stack;
  stack.push_back({0, 0, {}, -1});

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.atom == rule.body.size()) {
      int head = resolve_head(rule.head, kg, binding);
      if (head >= 0) {
        std::vector<int> body;
        for (const Frame& fr : stack)
          if (fr.bet >= 0) body.push_back(fr.bet);
        bool headInBody = std::find(body.begin(), body.end(), head) != body.end();
        if (!headInBody) {
          std::vector<int> sorted = body;
          std::sort(sorted.begin(), sorted.end());
          if (seen.emplace(sorted, head).second) {
            GroundedConstraint gc;
            gc.rule = rule.id;
            gc.body = std::move(sorted);
            gc.head = head;
            gc.weight = rule.weight;
            out.push_back(std::move(gc));
          }
        }
      }
      stack.pop_back();
      if (!stack.empty()) {
        Frame& parent = stack.back();
        for (const auto& v : parent.boundHere) binding.erase(v);
        parent.boundHere.clear();
        parent.bet = -1;
        ++parent.cursor;
      }
      continue;
    }

    const Atom& atom = rule.body[f.atom];
    const std::vector<int>& candidates = kg.bets_with_predicate(atom.predicate);
    bool advanced = false;
    while (f.cursor < candidates.size()) {
      const Bet& bet = kg.bet(candidates[f.cursor]);
      std::vector<std::string> boundHere;
      if (match_atom(atom, bet, kg, binding, boundHere)) {
        f.boundHere = std::move(boundHere);
        f.bet = bet.id;
        stack.push_back({f.atom + 1, 0, {}, -1});
        advanced = true;
        break;
      }
      for (const auto& v : boundHere) binding.erase(v);
      ++f.cursor;
    }
    if (!advanced && f.cursor >= candidates.size()) {
      stack.pop_back();
      if (!stack.empty()) {
        Frame& parent = stack.back();
        for (const auto& v : parent.boundHere) binding.erase(v);
        parent.boundHere.clear();
        parent.bet = -1;
        ++parent.cursor;
      }
    }
  }
}

}  // namespace

Ecg Ecg::ground(const KnowledgeGraph& kg, const std::vector<Rule>& rules) {
  std::vector<GroundedConstraint> all;
  for (const Rule& rule : rules) {
    std::set<std::pair<std::vector<int>, int>> seen;  // per-rule dedup
    ground_rule(rule, kg, seen, all);
  }
  return Ecg(kg.size(), std::move(all));
}

int Ecg::degree(int bet) const {
  if (bet < 0 || bet >= betCount_) throw Error("bet id out of range: " + std::to_string(bet));
  return static_cast<int>(incidence_[bet].size());
}

std::vector<int> Ecg::degree_histogram() const {
  int maxDeg = 0;
  for (const auto& inc : incidence_) maxDeg = std::max(maxDeg, static_cast<int>(inc.size()));
  std::vector<int> hist(maxDeg + 1, 0);
  for (const auto& inc : incidence_) ++hist[inc.size()];
  return hist;
}

std::string Ecg::to_json(const KnowledgeGraph& kg) const {
  nlohmann::ordered_json j;
  j["bets"] = nlohmann::ordered_json::array();
  for (const Bet& b : kg.bets()) {
    nlohmann::ordered_json jb;
    jb["id"] = b.id;
    jb["subject"] = kg.entity_surface(b.subject);
    jb["predicate"] = kg.predicate_name(b.predicate);
    jb["object"] = kg.entity_surface(b.object);
    jb["degree"] = degree(b.id);
    j["bets"].push_back(std::move(jb));
  }
  j["constraints"] = nlohmann::ordered_json::array();
  for (const GroundedConstraint& gc : constraints_) {
    nlohmann::ordered_json jc;
    jc["id"] = gc.id;
    jc["rule"] = gc.rule;
    jc["body"] = gc.body;
    jc["head"] = gc.head;
    jc["weight"] = gc.weight;
    j["constraints"].push_back(std::move(jc));
  }
  return j.dump(2);
}

}  // namespace kgeval
