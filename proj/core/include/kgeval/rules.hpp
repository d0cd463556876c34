#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "kgeval/kg.hpp"

namespace kgeval {

/// One argument position of an atom: either a variable or an entity constant.
struct AtomArg {
  bool isVariable = true;
  std::string variable;  // lowercase identifier
  std::string constant;  // entity surface, from a quoted token
};

/// predicate(arg0, arg1)
struct Atom {
  int predicate = -1;
  AtomArg args[2];
};

enum class RuleKind { TypeConstraint, HornClause };

/// Weighted directional Horn clause: body atoms imply the head atom.
struct Rule {
  int id = -1;
  std::vector<Atom> body;
  Atom head;
  double weight = 0.0;
  RuleKind kind = RuleKind::HornClause;
};

struct RuleSet {
  std::vector<Rule> rules;
  std::vector<PredicateDecl> declarations;
};

/// Parses lines of the form
///   weight: p1(x,y) & p2(y,z) -> p3(x,z)
/// with quoted entity constants, plus optional directive lines
///   @predicate name domain=Cat range=Cat [functional]
/// `#` starts a comment. Predicates must exist in the graph; every head
/// variable must appear in the body; weights must be non-negative.
RuleSet parse_rules(std::istream& in, const KnowledgeGraph& kg);

/// Drops rules whose body length is in `dropBodyLengths`.
std::vector<Rule> ablate_rules(const std::vector<Rule>& rules,
                               const std::set<int>& dropBodyLengths);

/// Type rules derived from declared predicate signatures:
/// p(x,y) -> isA(x, domain) and p(x,y) -> isA(y, range).
/// Ids continue after `nextId`; used by the opt-in CLI flag.
std::vector<Rule> auto_type_rules(const KnowledgeGraph& kg, double weight, int nextId);

/// Human-readable one-line form, mirroring the input syntax.
std::string rule_to_string(const Rule& rule, const KnowledgeGraph& kg);

}  // namespace kgeval
