#include <sstream>

#include "doctest.h"
#include "kgeval/kg.hpp"
#include "testutil.hpp"

using namespace kgeval;

TEST_CASE("single well-formed line") {
  std::istringstream in("a\tp\tb\t1");
  KnowledgeGraph kg = KnowledgeGraph::parse_triples(in, 0.01);
  REQUIRE(kg.size() == 1);
  CHECK(kg.bet(0).gold == 1);
  CHECK(kg.bet(0).cost == doctest::Approx(0.01));
  CHECK(kg.entity_surface(kg.bet(0).subject) == "a");
  CHECK(kg.predicate_name(kg.bet(0).predicate) == "p");
}

TEST_CASE("empty stream gives empty graph") {
  std::istringstream in("");
  KnowledgeGraph kg = KnowledgeGraph::parse_triples(in);
  CHECK(kg.size() == 0);
}

TEST_CASE("comments and blank lines are skipped") {
  std::istringstream in("# header\n\na\tp\tb\n");
  KnowledgeGraph kg = KnowledgeGraph::parse_triples(in);
  REQUIRE(kg.size() == 1);
  CHECK_FALSE(kg.bet(0).gold.has_value());
  CHECK(kg.bet(0).cost == doctest::Approx(KnowledgeGraph::kDefaultCost));
}

TEST_CASE("malformed lines carry the line number") {
  SUBCASE("wrong arity") {
    std::istringstream in("a\tp\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::parse_triples(in),
                         doctest::Contains("line 1"), ParseError);
  }
  SUBCASE("non-binary gold") {
    std::istringstream in("a\tp\tb\n" "a\tp\tc\t2\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::parse_triples(in),
                         doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("negative cost") {
    std::istringstream in("a\tp\tb\t1\t-0.5\n");
    CHECK_THROWS_AS(KnowledgeGraph::parse_triples(in), ParseError);
  }
  SUBCASE("duplicate triple") {
    std::istringstream in("a\tp\tb\t1\na\tp\tb\t0\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::parse_triples(in),
                         doctest::Contains("duplicate"), ParseError);
  }
}

TEST_CASE("per-line cost overrides the default") {
  std::istringstream in("a\tp\tb\t1\t0.25\nc\tp\td\t0\n");
  KnowledgeGraph kg = KnowledgeGraph::parse_triples(in, 0.05);
  CHECK(kg.bet(0).cost == doctest::Approx(0.25));
  CHECK(kg.bet(1).cost == doctest::Approx(0.05));
}

TEST_CASE("overall gold accuracy") {
  SUBCASE("six true two false") {
    std::ostringstream text;
    for (int i = 0; i < 8; ++i)
      text << "e" << i << "\tp\tf" << i << "\t" << (i < 6 ? 1 : 0) << "\n";
    std::istringstream in(text.str());
    KnowledgeGraph kg = KnowledgeGraph::parse_triples(in);
    CHECK(kg.overall_gold_accuracy() == doctest::Approx(0.75));
  }
  SUBCASE("all true") {
    std::istringstream in("a\tp\tb\t1\nc\tp\td\t1\n");
    CHECK(KnowledgeGraph::parse_triples(in).overall_gold_accuracy() == doctest::Approx(1.0));
  }
  SUBCASE("half and half") {
    std::istringstream in("a\tp\tb\t1\nc\tp\td\t0\n");
    CHECK(KnowledgeGraph::parse_triples(in).overall_gold_accuracy() == doctest::Approx(0.5));
  }
  SUBCASE("incomplete gold errors") {
    std::istringstream in("a\tp\tb\t1\nc\tp\td\n");
    KnowledgeGraph kg = KnowledgeGraph::parse_triples(in);
    CHECK_THROWS_WITH_AS(kg.overall_gold_accuracy(), doctest::Contains("gold incomplete"),
                         Error);
  }
}

TEST_CASE("serialize then reparse is identity") {
  std::istringstream in(
      "a\tp\tb\t1\t0.25\n"
      "c\tq\td\t0\t0.01\n"
      "e\tp\tf\n");
  KnowledgeGraph kg = KnowledgeGraph::parse_triples(in);
  std::ostringstream out;
  kg.serialize(out);
  std::istringstream back(out.str());
  KnowledgeGraph kg2 = KnowledgeGraph::parse_triples(back);
  REQUIRE(kg2.size() == kg.size());
  for (int i = 0; i < kg.size(); ++i) {
    CHECK(kg2.bet(i).subject == kg.bet(i).subject);
    CHECK(kg2.bet(i).predicate == kg.bet(i).predicate);
    CHECK(kg2.bet(i).object == kg.bet(i).object);
    CHECK(kg2.bet(i).gold == kg.bet(i).gold);
    CHECK(kg2.bet(i).cost == kg.bet(i).cost);
  }
}

TEST_CASE("fig1 fixture loads with dense ids in file order") {
  auto f = testutil::load_fig1();
  REQUIRE(f.kg.size() == 8);
  CHECK(f.kg.overall_gold_accuracy() == doctest::Approx(0.75));
  CHECK(f.kg.predicate_name(f.kg.bet(0).predicate) == "homeStadiumOf");
  CHECK(f.kg.predicates().size() == 5);
}

TEST_CASE("gold accuracy equals brute-force mean on random graphs") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::ostringstream text;
    const int n = 1 + static_cast<int>(rng.below(40));
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      const int g = rng.bernoulli(0.6) ? 1 : 0;
      sum += g;
      text << "s" << i << "\tp" << (i % 3) << "\to" << i << "\t" << g << "\n";
    }
    std::istringstream in(text.str());
    KnowledgeGraph kg = KnowledgeGraph::parse_triples(in);
    CHECK(kg.overall_gold_accuracy() == doctest::Approx(sum / n));
  }
}
