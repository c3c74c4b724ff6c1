#include <gtest/gtest.h>

#include "support.hpp"

using namespace divcq;
using namespace testsupport;

TEST(Enumerate, PathQueryOverD1) {
  auto d1 = load_database(data_path("d1"));
  auto q = parse_cq("Q(x,y) <- R(x,z), R(z,y).");
  auto ans = enumerate_answers(q, d1);
  EXPECT_TRUE(ans.contains(tup("Q", {"a", "a"})));
  EXPECT_TRUE(ans.contains(tup("Q", {"b", "b"})));
  EXPECT_TRUE(ans.contains(tup("Q", {"a", "b"})));
  EXPECT_TRUE(ans.contains(tup("Q", {"b", "a"})));
  EXPECT_EQ(ans.size(), 4u);
}

TEST(Enumerate, RepeatedVariableFiltersRows) {
  auto d1 = load_database(data_path("d1"));
  auto ans = enumerate_answers(parse_cq("Q(x) <- R(x,x)."), d1);
  ASSERT_EQ(ans.size(), 1u);
  EXPECT_EQ(ans.answers[0], tup("Q", {"a"}));
}

TEST(Enumerate, EmptyDatabaseGivesNoAnswers) {
  auto d = load_database(data_path("empty"));
  EXPECT_TRUE(enumerate_answers(parse_cq("Q(x) <- R(x,y)."), d).empty());
}

TEST(Enumerate, UnknownRelationIsAnInputError) {
  auto d = load_database(data_path("d1"));
  EXPECT_THROW(enumerate_answers(parse_cq("Q(x) <- S(x,y)."), d), InputError);
  EXPECT_THROW(enumerate_answers(parse_cq("Q(x) <- R(x)."), d), InputError);
}

TEST(Enumerate, ExtensionCapIsEnforced) {
  std::vector<Tuple> facts;
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j)
      facts.push_back(Tuple{"E", {intern("n" + std::to_string(i)), intern("n" + std::to_string(j))}});
  auto db = database_of(facts, {{"E", 2}});
  auto q = parse_cq("Q(a,b,c,d) <- E(a,b), E(b,c), E(c,d).");
  JoinOptions opts;
  opts.max_extensions = 1000;
  EXPECT_THROW(enumerate_homomorphisms(
                   atom_inputs(q, db), q.var_count(),
                   [](const std::vector<Value>&, const std::vector<std::uint32_t>&) { return true; },
                   opts),
               CapExceeded);
}

TEST(EnumerateProperty, MatchesExhaustiveAssignmentOracle) {
  Rng rng(21);
  for (int i = 0; i < 150; ++i) {
    auto rq = random_acyclic_query(rng, 4, coin(rng), coin(rng));
    auto db = random_database(rng, rq.arities, 4, 10);
    auto got = enumerate_answers(rq.q, db);
    EXPECT_EQ(got.answers, oracle_answers(rq.q, db)) << rq.q.to_string();
  }
}

TEST(EnumerateProperty, CyclicQueriesMatchOracle) {
  Rng rng(22);
  auto q = parse_cq("Q(x,y,z) <- E(x,y), E(y,z), E(z,x).");
  for (int i = 0; i < 40; ++i) {
    auto db = random_database(rng, {{"E", 2}}, 5, 15);
    EXPECT_EQ(enumerate_answers(q, db).answers, oracle_answers(q, db));
  }
}

TEST(Yannakakis, AgreesOnPathQuery) {
  auto d2 = load_database(data_path("d2"));
  auto q = parse_cq("Q(x,y) <- R(x,z), R(z,y).");
  EXPECT_EQ(yannakakis_answers(q, *gyo_join_tree(q), d2), enumerate_answers(q, d2));
}

TEST(Yannakakis, RejectsInvalidOrWideDecompositions) {
  auto d1 = load_database(data_path("d1"));
  auto q = parse_cq("Q(x,y) <- R(x,z), R(z,y).");
  auto x = *q.find_var("x"), y = *q.find_var("y"), z = *q.find_var("z");
  TreeDecomposition wide(q, {{x, y, z}}, {-1}, 2);
  EXPECT_THROW(yannakakis_answers(q, wide, d1), InputError);
  TreeDecomposition missing(q, {{x, z}}, {-1});
  EXPECT_THROW(yannakakis_answers(q, missing, d1), InputError);
}

TEST(YannakakisProperty, EqualsNaiveEnumeration) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    auto rq = random_acyclic_query(rng, 5, coin(rng), coin(rng));
    auto db = random_database(rng, rq.arities, 4, 12);
    auto jt = gyo_join_tree(rq.q);
    ASSERT_TRUE(jt);
    EXPECT_EQ(yannakakis_answers(rq.q, *jt, db), enumerate_answers(rq.q, db)) << rq.q.to_string();
  }
}

TEST(BagRelation, ProjectsAndJoins) {
  auto d1 = load_database(data_path("d1"));
  auto q = parse_cq("Q(x,y) <- R(x,z), R(z,y).");
  auto rel = bag_relation(q, d1, {*q.find_var("z")});
  // z ranges over values that are both a target and a source
  EXPECT_EQ(rel.size(), 2u);
}

TEST(Provenance, ExampleAnswersOverD1) {
  auto d1 = load_database(data_path("d1"));
  auto q = parse_cq("Q(x,y) <- R(x,z), R(z,y).");
  auto pm = provenance_map(q, d1, {tup("Q", {"a", "a"}), tup("Q", {"b", "b"})});
  auto aa = pm.tuples(tup("Q", {"a", "a"}));
  EXPECT_EQ(aa, (std::vector<Tuple>{tup("R", {"a", "a"}), tup("R", {"a", "b"}), tup("R", {"b", "a"})}));
  auto bb = pm.tuples(tup("Q", {"b", "b"}));
  EXPECT_EQ(bb, (std::vector<Tuple>{tup("R", {"a", "b"}), tup("R", {"b", "a"})}));
  EXPECT_THROW(provenance_map(q, d1, {tup("Q", {"c", "c"})}), InputError);
}

TEST(ProvenanceProperty, MatchesOracle) {
  Rng rng(24);
  for (int i = 0; i < 120; ++i) {
    auto rq = random_acyclic_query(rng, 4, coin(rng), coin(rng));
    auto db = random_database(rng, rq.arities, 4, 8);
    auto expect = oracle_provenance(rq.q, db);
    std::vector<Tuple> answers;
    for (const auto& [a, s] : expect) answers.push_back(a);
    auto pm = provenance_map(rq.q, db, answers);
    for (const auto& [a, s] : expect) {
      auto got = pm.tuples(a);
      EXPECT_EQ(std::set<Tuple>(got.begin(), got.end()), s) << rq.q.to_string();
    }
  }
}
