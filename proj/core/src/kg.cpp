#include "kgeval/kg.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace kgeval {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::string KnowledgeGraph::triple_key(int s, int p, int o) {
  return std::to_string(s) + ' ' + std::to_string(p) + ' ' + std::to_string(o);
}

int KnowledgeGraph::intern_entity(const std::string& surface) {
  if (surface.empty()) throw Error("empty entity surface");
  auto it = entityIndex_.find(surface);
  if (it != entityIndex_.end()) return it->second;
  int id = static_cast<int>(entities_.size());
  entities_.push_back({id, surface});
  entityIndex_.emplace(surface, id);
  return id;
}

int KnowledgeGraph::intern_predicate(const std::string& name) {
  if (name.empty()) throw Error("empty predicate name");
  auto it = predicateIndex_.find(name);
  if (it != predicateIndex_.end()) return it->second;
  int id = static_cast<int>(predicates_.size());
  Predicate p;
  p.id = id;
  p.name = name;
  predicates_.push_back(std::move(p));
  predicateIndex_.emplace(name, id);
  return id;
}

void KnowledgeGraph::add_category(const std::string& name) {
  for (const auto& c : categories_)
    if (c == name) return;
  categories_.push_back(name);
}

int KnowledgeGraph::add_bet(int subject, int predicate, int object, double cost,
                            std::optional<int> gold) {
  if (cost < 0) throw Error("negative cost");
  if (gold && *gold != 0 && *gold != 1) throw Error("gold label must be 0 or 1");
  const std::string key = triple_key(subject, predicate, object);
  if (tripleIndex_.count(key)) throw Error("duplicate triple");
  int id = static_cast<int>(bets_.size());
  bets_.push_back({id, subject, predicate, object, cost, gold});
  tripleIndex_.emplace(key, id);
  byPredicate_[predicate].push_back(id);
  return id;
}

KnowledgeGraph KnowledgeGraph::parse_triples(std::istream& in, double defaultCost) {
  KnowledgeGraph kg;
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() < 3 || cols.size() > 5)
      throw ParseError("expected 3-5 tab-separated columns, got " + std::to_string(cols.size()),
                       lineNo);
    for (int i = 0; i < 3; ++i)
      if (cols[i].empty()) throw ParseError("empty field", lineNo);

    std::optional<int> gold;
    if (cols.size() >= 4) {
      if (cols[3] == "0")
        gold = 0;
      else if (cols[3] == "1")
        gold = 1;
      else
        throw ParseError("gold label must be 0 or 1, got '" + cols[3] + "'", lineNo);
    }
    double cost = defaultCost;
    if (cols.size() == 5) {
      try {
        std::size_t pos = 0;
        cost = std::stod(cols[4], &pos);
        if (pos != cols[4].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("bad cost '" + cols[4] + "'", lineNo);
      }
      if (cost < 0) throw ParseError("negative cost", lineNo);
    }

    int s = kg.intern_entity(cols[0]);
    int p = kg.intern_predicate(cols[1]);
    int o = kg.intern_entity(cols[2]);
    try {
      kg.add_bet(s, p, o, cost, gold);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineNo);
    }
  }
  return kg;
}

int KnowledgeGraph::entity_id(const std::string& surface) const {
  auto it = entityIndex_.find(surface);
  return it == entityIndex_.end() ? -1 : it->second;
}

int KnowledgeGraph::predicate_id(const std::string& name) const {
  auto it = predicateIndex_.find(name);
  return it == predicateIndex_.end() ? -1 : it->second;
}

int KnowledgeGraph::find_bet(int subject, int predicate, int object) const {
  auto it = tripleIndex_.find(triple_key(subject, predicate, object));
  return it == tripleIndex_.end() ? -1 : it->second;
}

const std::vector<int>& KnowledgeGraph::bets_with_predicate(int predicate) const {
  static const std::vector<int> empty;
  auto it = byPredicate_.find(predicate);
  return it == byPredicate_.end() ? empty : it->second;
}

bool KnowledgeGraph::gold_complete() const {
  for (const auto& b : bets_)
    if (!b.gold) return false;
  return true;
}

double KnowledgeGraph::overall_gold_accuracy() const {
  if (bets_.empty()) throw Error("gold incomplete: empty graph");
  double sum = 0;
  for (const auto& b : bets_) {
    if (!b.gold) throw Error("gold incomplete: bet " + std::to_string(b.id) + " has no label");
    sum += *b.gold;
  }
  return sum / static_cast<double>(bets_.size());
}

void KnowledgeGraph::apply_declarations(const std::vector<PredicateDecl>& decls) {
  for (const auto& d : decls) {
    int pid = predicate_id(d.name);
    if (pid < 0) throw Error("declaration for unknown predicate '" + d.name + "'");
    Predicate& p = predicates_[pid];
    p.domainCategory = d.domainCategory;
    p.rangeCategory = d.rangeCategory;
    p.functional = d.functional;
    if (d.domainCategory) add_category(*d.domainCategory);
    if (d.rangeCategory) add_category(*d.rangeCategory);
  }
}

void KnowledgeGraph::serialize(std::ostream& out) const {
  for (const auto& b : bets_) {
    out << entities_[b.subject].surface << '\t' << predicates_[b.predicate].name << '\t'
        << entities_[b.object].surface;
    // the format has no cost column without a gold column; ungolded bets keep
    // their cost only when reparsed with the same default
    if (b.gold) out << '\t' << *b.gold << '\t' << format_double(b.cost);
    out << '\n';
  }
}

}  // namespace kgeval
