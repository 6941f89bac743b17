#include <catch2/catch_amalgamated.hpp>

#include "disjax/closure.hpp"
#include "disjax/knowledge_base.hpp"

#include "support/brute_force.hpp"
#include "support/random_kb.hpp"

using namespace disjax;

namespace {

KnowledgeBase chain_abc() {
  KnowledgeBase kb;
  const ClassId a = kb.intern(Iri("http://ex/A"));
  const ClassId b = kb.intern(Iri("http://ex/B"));
  const ClassId c = kb.intern(Iri("http://ex/C"));
  kb.add_subclass(a, b);
  kb.add_subclass(b, c);
  return kb;
}

}  // namespace

TEST_CASE("closure is transitive") {
  const KnowledgeBase kb = chain_abc();
  const auto cl = SubclassClosure::compute(kb);
  const ClassId a = *kb.find("http://ex/A");
  const ClassId b = *kb.find("http://ex/B");
  const ClassId c = *kb.find("http://ex/C");
  CHECK(cl.reaches(a, a));
  CHECK(cl.reaches(a, b));
  CHECK(cl.reaches(a, c));
  CHECK(cl.reaches(b, c));
  CHECK_FALSE(cl.reaches(c, a));
  CHECK(cl.ancestors_of(a).count() == 3);
  CHECK(cl.descendants_of(c).count() == 3);
}

TEST_CASE("closure is reflexive with no edges") {
  KnowledgeBase kb;
  const ClassId a = kb.intern(Iri("http://ex/A"));
  const ClassId b = kb.intern(Iri("http://ex/B"));
  const auto cl = SubclassClosure::compute(kb);
  CHECK(cl.reaches(a, a));
  CHECK(cl.reaches(b, b));
  CHECK_FALSE(cl.reaches(a, b));
  CHECK(cl.ancestors_of(a).count() == 1);
}

TEST_CASE("cycles make all members mutual sub- and superclasses") {
  KnowledgeBase kb;
  const ClassId a = kb.intern(Iri("http://ex/A"));
  const ClassId b = kb.intern(Iri("http://ex/B"));
  const ClassId c = kb.intern(Iri("http://ex/C"));
  const ClassId top = kb.intern(Iri("http://ex/Top"));
  kb.add_subclass(a, b);
  kb.add_subclass(b, c);
  kb.add_subclass(c, a);  // cycle a-b-c
  kb.add_subclass(c, top);
  const auto cl = SubclassClosure::compute(kb);
  for (const ClassId x : {a, b, c}) {
    for (const ClassId y : {a, b, c}) {
      CHECK(cl.reaches(x, y));
    }
    CHECK(cl.reaches(x, top));
  }
  CHECK_FALSE(cl.reaches(top, a));
}

TEST_CASE("closure equals the DFS path-existence oracle on random DAGs") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto g = testsupport::arbitrary_kb(seed);
    const auto cl = SubclassClosure::compute(g.kb);
    const std::size_t n = g.kb.class_count();
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        const ClassId from{i};
        const ClassId to{j};
        INFO("seed " << seed << " from " << i << " to " << j);
        REQUIRE(cl.reaches(from, to) ==
                testsupport::bf_subsumed(g.kb, from, to));
      }
    }
  }
}

TEST_CASE("descendants are the exact transpose of ancestors") {
  for (std::uint64_t seed = 1000; seed < 1050; ++seed) {
    const auto g = testsupport::arbitrary_kb(seed);
    const auto cl = SubclassClosure::compute(g.kb);
    const std::size_t n = g.kb.class_count();
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        CHECK(cl.ancestors_of(ClassId{i}).test(j) ==
              cl.descendants_of(ClassId{j}).test(i));
      }
    }
  }
}
