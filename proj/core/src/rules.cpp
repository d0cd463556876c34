#include "kgeval/rules.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>

namespace kgeval {

namespace {

constexpr const char* kMembershipPredicate = "isA";

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool eat(const std::string& tok) {
    skip_ws();
    if (s.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line); }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
      ++pos;
    }
    if (pos == start) fail("expected identifier");
    return s.substr(start, pos - start);
  }

  std::string quoted() {
    // opening quote already consumed
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != '"') ++pos;
    if (pos == s.size()) fail("unterminated quoted constant");
    std::string v = s.substr(start, pos - start);
    ++pos;
    return v;
  }
};

AtomArg parse_arg(Cursor& c) {
  c.skip_ws();
  AtomArg arg;
  if (c.eat('"')) {
    arg.isVariable = false;
    arg.constant = c.quoted();
    if (arg.constant.empty()) c.fail("empty constant");
    return arg;
  }
  std::string name = c.identifier();
  if (!std::islower(static_cast<unsigned char>(name[0])))
    c.fail("variables must start lowercase: '" + name + "'");
  arg.variable = name;
  return arg;
}

Atom parse_atom(Cursor& c, const KnowledgeGraph& kg) {
  std::string pname = c.identifier();
  int pid = kg.predicate_id(pname);
  if (pid < 0) c.fail("unknown predicate '" + pname + "'");
  Atom a;
  a.predicate = pid;
  if (!c.eat('(')) c.fail("expected '(' after predicate");
  a.args[0] = parse_arg(c);
  if (!c.eat(',')) c.fail("expected ',' between atom arguments");
  a.args[1] = parse_arg(c);
  if (!c.eat(')')) c.fail("expected ')' closing atom");
  return a;
}

PredicateDecl parse_declaration(const std::string& line, int lineNo) {
  std::istringstream in(line);
  std::string directive, name, tok;
  in >> directive >> name;
  if (name.empty()) throw ParseError("@predicate needs a name", lineNo);
  PredicateDecl d;
  d.name = name;
  while (in >> tok) {
    if (tok.rfind("domain=", 0) == 0)
      d.domainCategory = tok.substr(7);
    else if (tok.rfind("range=", 0) == 0)
      d.rangeCategory = tok.substr(6);
    else if (tok == "functional")
      d.functional = true;
    else
      throw ParseError("unknown @predicate attribute '" + tok + "'", lineNo);
  }
  return d;
}

RuleKind classify(const Rule& r, const KnowledgeGraph& kg) {
  if (r.body.size() == 1 && kg.predicate_name(r.head.predicate) == kMembershipPredicate)
    return RuleKind::TypeConstraint;
  return RuleKind::HornClause;
}

}  // namespace

RuleSet parse_rules(std::istream& in, const KnowledgeGraph& kg) {
  RuleSet out;
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = raw;
    std::size_t firstNonWs = line.find_first_not_of(" \t");
    if (firstNonWs == std::string::npos) continue;
    if (line[firstNonWs] == '#') continue;
    if (line[firstNonWs] == '@') {
      out.declarations.push_back(parse_declaration(line.substr(firstNonWs), lineNo));
      continue;
    }

    Cursor c{line, 0, lineNo};
    c.skip_ws();
    std::size_t colon = line.find(':', c.pos);
    if (colon == std::string::npos) c.fail("expected 'weight:' prefix");
    double weight = 0;
    try {
      std::size_t used = 0;
      std::string wtext = line.substr(c.pos, colon - c.pos);
      weight = std::stod(wtext, &used);
      while (used < wtext.size() && std::isspace(static_cast<unsigned char>(wtext[used]))) ++used;
      if (used != wtext.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      c.fail("bad rule weight");
    }
    if (weight < 0) c.fail("negative rule weight");
    c.pos = colon + 1;

    Rule rule;
    rule.weight = weight;
    rule.body.push_back(parse_atom(c, kg));
    while (c.eat('&')) rule.body.push_back(parse_atom(c, kg));
    if (!c.eat("->")) c.fail("expected '->'");
    rule.head = parse_atom(c, kg);
    c.skip_ws();
    if (c.pos != line.size()) c.fail("trailing junk after rule");

    // every head variable must be bound by the body
    for (const AtomArg& arg : rule.head.args) {
      if (!arg.isVariable) continue;
      bool bound = false;
      for (const Atom& b : rule.body)
        for (const AtomArg& ba : b.args)
          if (ba.isVariable && ba.variable == arg.variable) bound = true;
      if (!bound) c.fail("head variable '" + arg.variable + "' not bound in body");
    }

    rule.id = static_cast<int>(out.rules.size());
    rule.kind = classify(rule, kg);
    out.rules.push_back(std::move(rule));
  }
  return out;
}

std::vector<Rule> ablate_rules(const std::vector<Rule>& rules,
                               const std::set<int>& dropBodyLengths) {
  std::vector<Rule> kept;
  for (const Rule& r : rules)
    if (!dropBodyLengths.count(static_cast<int>(r.body.size()))) kept.push_back(r);
  return kept;
}

std::vector<Rule> auto_type_rules(const KnowledgeGraph& kg, double weight, int nextId) {
  std::vector<Rule> out;
  int isa = kg.predicate_id(kMembershipPredicate);
  if (isa < 0) return out;
  auto make = [&](int pred, bool domainSide, const std::string& category) {
    Rule r;
    r.weight = weight;
    r.kind = RuleKind::TypeConstraint;
    Atom body;
    body.predicate = pred;
    body.args[0] = AtomArg{true, "x", ""};
    body.args[1] = AtomArg{true, "y", ""};
    r.body.push_back(body);
    Atom head;
    head.predicate = isa;
    head.args[0] = AtomArg{true, domainSide ? "x" : "y", ""};
    head.args[1] = AtomArg{false, "", category};
    r.head = head;
    r.id = nextId++;
    out.push_back(std::move(r));
  };
  for (const Predicate& p : kg.predicates()) {
    if (p.name == kMembershipPredicate) continue;
    if (p.domainCategory) make(p.id, true, *p.domainCategory);
    if (p.rangeCategory) make(p.id, false, *p.rangeCategory);
  }
  return out;
}

std::string rule_to_string(const Rule& rule, const KnowledgeGraph& kg) {
  auto atom = [&](const Atom& a) {
    std::string s = kg.predicate_name(a.predicate) + "(";
    for (int i = 0; i < 2; ++i) {
      if (i) s += ",";
      s += a.args[i].isVariable ? a.args[i].variable : "\"" + a.args[i].constant + "\"";
    }
    return s + ")";
  };
  std::string s = format_double(rule.weight) + ": ";
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i) s += " & ";
    s += atom(rule.body[i]);
  }
  s += " -> " + atom(rule.head);
  return s;
}

}  // namespace kgeval
