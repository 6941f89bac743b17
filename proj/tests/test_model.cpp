#include <catch2/catch_amalgamated.hpp>

#include "disjax/iri.hpp"
#include "disjax/knowledge_base.hpp"

using namespace disjax;

TEST_CASE("Iri accepts absolute IRIs and rejects junk") {
  CHECK(Iri::valid("http://example.org/Fish"));
  CHECK(Iri::valid("urn:uuid:1234"));

  std::string why;
  CHECK_FALSE(Iri::valid("", &why));
  CHECK_FALSE(Iri::valid("not an iri", &why));
  CHECK(why.find("whitespace") != std::string::npos);
  CHECK(why.find("offset 3") != std::string::npos);
  CHECK_FALSE(Iri::valid("no-colon-here"));
  CHECK_FALSE(Iri::valid(std::string("http://x/\x01"), nullptr));

  CHECK_THROWS_AS(Iri("not an iri"), ValidationError);
  CHECK_NOTHROW(Iri("http://example.org/x"));
}

TEST_CASE("intern is idempotent and injective") {
  KnowledgeBase kb;
  const ClassId a1 = kb.intern(Iri("http://ex/A"));
  const ClassId a2 = kb.intern(Iri("http://ex/A"));
  const ClassId b = kb.intern(Iri("http://ex/B"));
  CHECK(a1 == a2);
  CHECK(a1 != b);
  CHECK(kb.class_count() == 2);
  CHECK(kb.iri_of(a1) == "http://ex/A");
  CHECK(kb.find("http://ex/B") == b);
  CHECK_FALSE(kb.find("http://ex/C").has_value());
}

TEST_CASE("intern round-trips through the IRI") {
  KnowledgeBase kb;
  for (const char* iri : {"http://ex/Fish", "http://ex/Mammal", "urn:x:y"}) {
    const ClassId id = kb.intern(Iri(iri));
    CHECK(kb.intern(Iri(kb.iri_of(id))) == id);
  }
}

TEST_CASE("label derivation splits camel case and lowercases") {
  CHECK(derive_label("http://ex/AcademicConference") == "academic conference");
  CHECK(derive_label("http://ex/Fish") == "fish");
  CHECK(derive_label("http://ex/onto#LatterDaySaint") == "latter day saint");
  CHECK(derive_label("http://ex/USPresident") == "us president");
  CHECK(derive_label("http://ex/BaseballLeague") == "baseball league");
  SECTION("digits stay attached to the preceding word") {
    CHECK(derive_label("http://ex/Formula1Race") == "formula1 race");
  }
  SECTION("underscores and hyphens separate words") {
    CHECK(derive_label("http://ex/file_system") == "file system");
    CHECK(derive_label("http://ex/beauty-queen") == "beauty queen");
  }
}

TEST_CASE("label_of prefers stored labels, lowercased") {
  KnowledgeBase kb;
  const ClassId person = kb.intern(Iri("http://ex/Person"));
  CHECK(kb.label_of(person) == "person");  // derived

  kb.add_label(person, "Person", "en", 0);
  CHECK(kb.label_of(person) == "person");  // stored, lowercased

  SECTION("English-tagged label wins over other languages") {
    const ClassId c = kb.intern(Iri("http://ex/Castle"));
    kb.add_label(c, "Burg", "de", 0);
    CHECK(kb.label_of(c) == "burg");
    kb.add_label(c, "Castle", "en", 0);
    CHECK(kb.label_of(c) == "castle");
    kb.add_label(c, "Aaa", "fr", 0);  // loses despite sorting first
    CHECK(kb.label_of(c) == "castle");
  }

  SECTION("ties break on lexicographically smaller text") {
    const ClassId c = kb.intern(Iri("http://ex/Tower"));
    kb.add_label(c, "Tower B", "en", 0);
    kb.add_label(c, "Tower A", "en", 0);
    CHECK(kb.label_of(c) == "tower a");
  }

  SECTION("lower source rank wins over English tagging") {
    const ClassId c = kb.intern(Iri("http://ex/Garden"));
    kb.add_label(c, "Jardin", "fr", 0);   // rdfs:label slot
    kb.add_label(c, "Garden", "en", 1);   // skos:prefLabel slot
    CHECK(kb.label_of(c) == "jardin");
  }
}

TEST_CASE("label_of is total and deterministic") {
  KnowledgeBase kb;
  const ClassId c = kb.intern(Iri("http://ex/MeanOfTransportation"));
  const std::string first = kb.label_of(c);
  CHECK(first == "mean of transportation");
  CHECK(kb.label_of(c) == first);
}

TEST_CASE("self-disjointness is rejected") {
  KnowledgeBase kb;
  const ClassId a = kb.intern(Iri("http://ex/A"));
  CHECK_THROWS_AS(kb.add_disjoint(a, a), ValidationError);
}

TEST_CASE("knowledge bases compare by content, not interning order") {
  KnowledgeBase kb1;
  const ClassId a1 = kb1.intern(Iri("http://ex/A"));
  const ClassId b1 = kb1.intern(Iri("http://ex/B"));
  kb1.add_subclass(a1, b1);
  kb1.add_instance(Iri("http://ex/i"), a1);

  KnowledgeBase kb2;
  const ClassId b2 = kb2.intern(Iri("http://ex/B"));
  const ClassId a2 = kb2.intern(Iri("http://ex/A"));
  kb2.add_subclass(a2, b2);
  kb2.add_instance(Iri("http://ex/i"), a2);

  CHECK(kb1 == kb2);

  kb2.add_disjoint(a2, b2);
  CHECK_FALSE(kb1 == kb2);
}
