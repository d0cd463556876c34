#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgeval/util.hpp"

namespace kgeval {

struct Entity {
  int id = -1;
  std::string surface;
};

struct Predicate {
  int id = -1;
  std::string name;
  std::optional<std::string> domainCategory;
  std::optional<std::string> rangeCategory;
  bool functional = false;
};

/// One belief evaluation task: a (subject, predicate, object) triple of the
/// graph together with its crowd cost and, when known, its gold label.
struct Bet {
  int id = -1;
  int subject = -1;
  int predicate = -1;
  int object = -1;
  double cost = 0.0;
  std::optional<int> gold;  // 0 or 1
};

/// Declared predicate signature, read from `@predicate` directives.
struct PredicateDecl {
  std::string name;
  std::optional<std::string> domainCategory;
  std::optional<std::string> rangeCategory;
  bool functional = false;
};

/// Immutable once loading (parse + optional signature declarations) is done.
/// Bet ids are dense, assigned in file order, so every downstream tie-break
/// is reproducible.
class KnowledgeGraph {
 public:
  static constexpr double kDefaultCost = 0.01;

  /// Parses tab-separated lines `subject predicate object [gold] [cost]`.
  /// `#` starts a comment; blank lines are skipped.
  static KnowledgeGraph parse_triples(std::istream& in, double defaultCost = kDefaultCost);

  const std::vector<Bet>& bets() const { return bets_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Predicate>& predicates() const { return predicates_; }
  const std::vector<std::string>& categories() const { return categories_; }

  const Bet& bet(int id) const { return bets_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(bets_.size()); }

  int entity_id(const std::string& surface) const;      // -1 if absent
  int predicate_id(const std::string& name) const;      // -1 if absent
  int find_bet(int subject, int predicate, int object) const;  // -1 if absent

  const std::string& entity_surface(int id) const { return entities_.at(id).surface; }
  const std::string& predicate_name(int id) const { return predicates_.at(id).name; }

  /// Bets sharing a predicate, in id order.
  const std::vector<int>& bets_with_predicate(int predicate) const;

  /// Mean gold label; every bet must carry gold.
  double overall_gold_accuracy() const;
  bool gold_complete() const;

  /// Attach declared signatures / functional flags. Part of the loading
  /// phase; the graph must not be shared across threads until done.
  void apply_declarations(const std::vector<PredicateDecl>& decls);

  /// Writes the graph back in the triples format; reparsing yields an
  /// identical graph.
  void serialize(std::ostream& out) const;

  /// Loading-phase mutators (used by the parser and the synthetic generator).
  int intern_entity(const std::string& surface);
  int intern_predicate(const std::string& name);
  int add_bet(int subject, int predicate, int object, double cost, std::optional<int> gold);
  void add_category(const std::string& name);

 private:
  std::vector<Bet> bets_;
  std::vector<Entity> entities_;
  std::vector<Predicate> predicates_;
  std::vector<std::string> categories_;
  std::unordered_map<std::string, int> entityIndex_;
  std::unordered_map<std::string, int> predicateIndex_;
  std::unordered_map<std::string, int> tripleIndex_;  // "s p o" key -> bet id
  std::unordered_map<int, std::vector<int>> byPredicate_;

  static std::string triple_key(int s, int p, int o);
};

}  // namespace kgeval
