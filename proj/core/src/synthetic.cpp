#include "kgeval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace kgeval {

namespace {

std::string tag(const std::string& prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", i);
  return prefix + buf;
}

struct Sizes {
  int states, cities, teams, leagues, athletes, landmarks;
};

// relation triples + one membership triple per entity
int bet_count_for(const Sizes& s) {
  const int relations = s.cities                 // cityInState
                        + 4 * s.teams            // homeCity, homeStadiumOf, playsIn, locatedInCity
                        + s.teams                // locatedInState
                        + 3 * s.athletes;        // playsFor, playsInCity, playsInState
  const int memberships =
      s.states + s.cities + 2 * s.teams + s.leagues + s.athletes + s.landmarks;
  return relations + memberships;
}

Sizes pick_sizes(int target) {
  Sizes best{2, 4, 4, 2, 4, 0};
  for (int teams = 4; teams <= 4000; ++teams) {
    Sizes s;
    s.teams = teams;
    s.cities = std::max(4, (5 * teams) / 12);
    s.states = std::max(2, s.cities / 5);
    s.leagues = std::max(2, teams / 20);
    s.athletes = (5 * teams) / 3;
    s.landmarks = 0;
    if (bet_count_for(s) > target) break;
    best = s;
  }
  best.landmarks = target - bet_count_for(best);  // isolated padding
  return best;
}

struct TripleRow {
  std::string s, p, o;
  int gold;
};

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.targetGoldAcc > 0.0 && spec.targetGoldAcc <= 1.0))
    throw Error("target gold accuracy must lie in (0,1]");
  if (spec.betCount < 40) throw Error("bet count too small for the generator");
  if (spec.rulesProfile != "mixed" && spec.rulesProfile != "types-only")
    throw Error("unknown rules profile '" + spec.rulesProfile + "'");

  Rng rng(spec.rngSeed);
  const Sizes sz = pick_sizes(spec.betCount);

  std::vector<std::string> states, cities, teams, stadiums, leagues, athletes, landmarks;
  for (int i = 0; i < sz.states; ++i) states.push_back(tag("state", i));
  for (int i = 0; i < sz.cities; ++i) cities.push_back(tag("city", i));
  for (int i = 0; i < sz.teams; ++i) teams.push_back(tag("team", i));
  for (int i = 0; i < sz.teams; ++i) stadiums.push_back(tag("stadium", i));
  for (int i = 0; i < sz.leagues; ++i) leagues.push_back(tag("league", i));
  for (int i = 0; i < sz.athletes; ++i) athletes.push_back(tag("athlete", i));
  for (int i = 0; i < sz.landmarks; ++i) landmarks.push_back(tag("landmark", i));

  // hidden consistent world
  std::vector<int> cityState(sz.cities), teamCity(sz.teams), teamLeague(sz.teams),
      athleteTeam(sz.athletes);
  for (int i = 0; i < sz.cities; ++i)
    cityState[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(sz.states)));
  for (int i = 0; i < sz.teams; ++i) {
    teamCity[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(sz.cities)));
    teamLeague[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(sz.leagues)));
  }
  for (int i = 0; i < sz.athletes; ++i)
    athleteTeam[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(sz.teams)));

  std::vector<TripleRow> rows;
  auto rel = [&](const std::string& s, const std::string& p, const std::string& o) {
    rows.push_back({s, p, o, 1});
  };

  // roots
  for (int i = 0; i < sz.cities; ++i) rel(cities[i], "cityInState", states[cityState[i]]);
  for (int i = 0; i < sz.teams; ++i) rel(teams[i], "homeCity", cities[teamCity[i]]);
  for (int i = 0; i < sz.teams; ++i) rel(stadiums[i], "homeStadiumOf", teams[i]);
  for (int i = 0; i < sz.teams; ++i) rel(teams[i], "playsIn", leagues[teamLeague[i]]);
  for (int i = 0; i < sz.athletes; ++i) rel(athletes[i], "playsFor", teams[athleteTeam[i]]);
  // derived, materialized from the world so every rule head exists
  for (int i = 0; i < sz.teams; ++i)
    rel(stadiums[i], "locatedInCity", cities[teamCity[i]]);
  for (int i = 0; i < sz.teams; ++i)
    rel(stadiums[i], "locatedInState", states[cityState[teamCity[i]]]);
  for (int i = 0; i < sz.athletes; ++i)
    rel(athletes[i], "playsInCity", cities[teamCity[athleteTeam[i]]]);
  for (int i = 0; i < sz.athletes; ++i)
    rel(athletes[i], "playsInState", states[cityState[teamCity[athleteTeam[i]]]]);
  // memberships
  for (const auto& e : states) rel(e, "isA", "State");
  for (const auto& e : cities) rel(e, "isA", "City");
  for (const auto& e : stadiums) rel(e, "isA", "Stadium");
  for (const auto& e : teams) rel(e, "isA", "SportsTeam");
  for (const auto& e : leagues) rel(e, "isA", "League");
  for (const auto& e : athletes) rel(e, "isA", "Athlete");
  for (const auto& e : landmarks) rel(e, "isA", "Landmark");

  if (static_cast<int>(rows.size()) != spec.betCount)
    throw Error("generator sizing bug: got " + std::to_string(rows.size()) + " beliefs");

  // corrupt roots down to the target accuracy: swap the object for another
  // entity of the same pool, never colliding with an existing triple
  const int corrupt =
      static_cast<int>(std::llround((1.0 - spec.targetGoldAcc) * spec.betCount));
  const std::set<std::string> rootPreds = {"cityInState", "homeCity", "homeStadiumOf",
                                           "playsIn", "playsFor"};
  std::map<std::string, std::vector<std::string>> rangePool;
  for (const TripleRow& r : rows)
    if (rootPreds.count(r.p)) {
      auto& pool = rangePool[r.p];
      if (std::find(pool.begin(), pool.end(), r.o) == pool.end()) pool.push_back(r.o);
    }
  std::set<std::string> taken;
  for (const TripleRow& r : rows) taken.insert(r.s + '\t' + r.p + '\t' + r.o);

  std::vector<int> eligible;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rootPreds.count(rows[i].p)) eligible.push_back(static_cast<int>(i));
  if (static_cast<int>(eligible.size()) < corrupt)
    throw Error("infeasible spec: not enough corruptible beliefs");
  rng.shuffle(eligible);
  eligible.resize(corrupt);
  std::sort(eligible.begin(), eligible.end());

  for (int idx : eligible) {
    TripleRow& r = rows[idx];
    std::vector<std::string> pool = rangePool[r.p];
    rng.shuffle(pool);
    bool done = false;
    for (const std::string& cand : pool) {
      if (cand == r.o) continue;
      const std::string key = r.s + '\t' + r.p + '\t' + cand;
      if (taken.count(key)) continue;
      taken.erase(r.s + '\t' + r.p + '\t' + r.o);
      taken.insert(key);
      r.o = cand;
      r.gold = 0;
      done = true;
      break;
    }
    if (!done) throw Error("infeasible spec: no replacement object available");
  }

  std::ostringstream triples;
  triples << "# synthetic sports-world benchmark, seed " << spec.rngSeed << "\n";
  for (const TripleRow& r : rows)
    triples << r.s << '\t' << r.p << '\t' << r.o << '\t' << r.gold << '\t'
            << format_double(spec.defaultCost) << '\n';

  std::ostringstream rulesOut;
  rulesOut << "# predicate signatures\n";
  auto decl = [&](const std::string& name, const std::string& dom, const std::string& rng_,
                  bool functional) {
    rulesOut << "@predicate " << name << " domain=" << dom << " range=" << rng_
             << (functional ? " functional" : "") << "\n";
  };
  decl("cityInState", "City", "State", true);
  decl("homeCity", "SportsTeam", "City", true);
  decl("homeStadiumOf", "Stadium", "SportsTeam", true);
  decl("playsIn", "SportsTeam", "League", true);
  decl("playsFor", "Athlete", "SportsTeam", true);
  decl("locatedInCity", "Stadium", "City", false);
  decl("locatedInState", "Stadium", "State", false);
  decl("playsInCity", "Athlete", "City", false);
  decl("playsInState", "Athlete", "State", false);

  rulesOut << "# type-consistency rules\n";
  const char* typed[9][3] = {
      {"cityInState", "City", "State"},       {"homeCity", "SportsTeam", "City"},
      {"homeStadiumOf", "Stadium", "SportsTeam"}, {"playsIn", "SportsTeam", "League"},
      {"playsFor", "Athlete", "SportsTeam"},  {"locatedInCity", "Stadium", "City"},
      {"locatedInState", "Stadium", "State"}, {"playsInCity", "Athlete", "City"},
      {"playsInState", "Athlete", "State"}};
  for (const auto& t : typed) {
    rulesOut << "0.9: " << t[0] << "(x,y) -> isA(x,\"" << t[1] << "\")\n";
    rulesOut << "0.9: " << t[0] << "(x,y) -> isA(y,\"" << t[2] << "\")\n";
  }
  if (spec.rulesProfile == "mixed") {
    rulesOut << "# multi-hop rules\n";
    rulesOut << "0.8: homeStadiumOf(x,y) & homeCity(y,z) -> locatedInCity(x,z)\n";
    rulesOut << "0.8: playsFor(a,t) & homeCity(t,c) -> playsInCity(a,c)\n";
    rulesOut << "0.7: homeStadiumOf(x,y) & homeCity(y,z) & cityInState(z,s) -> "
                "locatedInState(x,s)\n";
    rulesOut << "0.7: playsFor(a,t) & homeCity(t,c) & cityInState(c,s) -> playsInState(a,s)\n";
  }

  SyntheticData out;
  out.triplesText = triples.str();
  out.rulesText = rulesOut.str();
  {
    std::istringstream in(out.triplesText);
    out.kg = KnowledgeGraph::parse_triples(in, spec.defaultCost);
  }
  {
    std::istringstream in(out.rulesText);
    out.ruleset = parse_rules(in, out.kg);
    out.kg.apply_declarations(out.ruleset.declarations);
  }
  return out;
}

}  // namespace kgeval
