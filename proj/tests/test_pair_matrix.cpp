#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "disjax/knowledge_base.hpp"
#include "disjax/pair_matrix.hpp"

#include "support/random_kb.hpp"

using namespace disjax;

namespace {

KnowledgeBase kb_with(std::initializer_list<const char*> iris) {
  KnowledgeBase kb;
  for (const char* iri : iris) kb.intern(Iri(iri));
  return kb;
}

}  // namespace

TEST_CASE("four classes make six unknown pairs") {
  const auto kb = kb_with({"http://ex/A", "http://ex/B", "http://ex/C",
                           "http://ex/D"});
  const PairMatrix m = PairMatrix::build(kb);
  CHECK(m.pair_count() == 6);
  CHECK(m.unknown_count() == 6);
  for (std::size_t i = 0; i < m.pair_count(); ++i) {
    CHECK(m.label_at(i) == PairLabel::Unknown);
    CHECK(m.provenance_at(i) == Provenance::None);
  }
}

TEST_CASE("pairs come out in canonical IRI order") {
  KnowledgeBase kb;
  const ClassId b = kb.intern(Iri("http://ex/B"));
  const ClassId a = kb.intern(Iri("http://ex/A"));  // interned second
  const PairMatrix m = PairMatrix::build(kb);
  REQUIRE(m.pair_count() == 1);
  const auto [first, second] = m.pair_at(0);
  CHECK(first == a);
  CHECK(second == b);
  CHECK(m.index_of(a, b) == 0);
  CHECK(m.index_of(b, a) == 0);
}

TEST_CASE("degenerate matrices") {
  CHECK(PairMatrix::build(kb_with({"http://ex/Only"})).pair_count() == 0);
  CHECK(PairMatrix::build(kb_with({})).pair_count() == 0);
}

TEST_CASE("index_of and pair_at are inverse") {
  const auto g = testsupport::arbitrary_kb(42);
  const PairMatrix m = PairMatrix::build(g.kb);
  for (std::size_t idx = 0; idx < m.pair_count(); ++idx) {
    const auto [a, b] = m.pair_at(idx);
    CHECK(m.index_of(a, b) == idx);
    CHECK(g.kb.iri_of(a) < g.kb.iri_of(b));
  }
}

TEST_CASE("labels move away from Unknown exactly once") {
  const auto kb = kb_with({"http://ex/A", "http://ex/B"});
  PairMatrix m = PairMatrix::build(kb);
  CHECK(m.try_label(0, PairLabel::Disjoint, Provenance::Asserted) ==
        PairMatrix::LabelOutcome::Newly);
  CHECK(m.unknown_count() == 0);
  CHECK(m.try_label(0, PairLabel::Disjoint, Provenance::InferredDisjoint) ==
        PairMatrix::LabelOutcome::Same);
  CHECK(m.provenance_at(0) == Provenance::Asserted);  // first writer wins
  CHECK(m.try_label(0, PairLabel::NotDisjoint, Provenance::JointSubclass) ==
        PairMatrix::LabelOutcome::Clash);
  CHECK(m.label_at(0) == PairLabel::Disjoint);  // clash does not overwrite

  m.force_conflict(0);
  CHECK(m.label_at(0) == PairLabel::Conflict);
  CHECK(m.try_label(0, PairLabel::Disjoint, Provenance::Asserted) ==
        PairMatrix::LabelOutcome::Same);  // terminal
}

TEST_CASE("kth_unknown matches a linear scan as labels land") {
  const auto g = testsupport::arbitrary_kb(7);
  PairMatrix m = PairMatrix::build(g.kb);
  std::mt19937_64 rng(99);
  while (m.unknown_count() > 0) {
    std::vector<std::size_t> unknowns;
    for (std::size_t i = 0; i < m.pair_count(); ++i) {
      if (m.label_at(i) == PairLabel::Unknown) unknowns.push_back(i);
    }
    REQUIRE(unknowns.size() == m.unknown_count());
    for (std::size_t k = 0; k < unknowns.size(); ++k) {
      REQUIRE(m.kth_unknown(k) == unknowns[k]);
    }
    const std::size_t pick = unknowns[rng() % unknowns.size()];
    m.try_label(pick, PairLabel::NotDisjoint, Provenance::JointSubclass);
  }
  CHECK_THROWS_AS(m.kth_unknown(0), ContractViolation);
}

TEST_CASE("TSV export and import round-trip") {
  const auto g = testsupport::arbitrary_kb(21);
  PairMatrix m = PairMatrix::build(g.kb);
  if (m.pair_count() >= 3) {
    m.try_label(0, PairLabel::Disjoint, Provenance::Asserted);
    m.try_label(1, PairLabel::NotDisjoint, Provenance::JointInstance);
    m.force_conflict(2);
  }
  std::ostringstream out;
  m.export_tsv(out, g.kb);
  const std::string text = out.str();
  CHECK(text.rfind("class_a\tclass_b\tlabel\tprovenance\n", 0) == 0);
  CHECK(text.back() == '\n');

  std::istringstream in(text);
  const PairMatrix back = PairMatrix::import_tsv(in, g.kb);
  CHECK(back.same_labels(m));

  SECTION("filtered export omits unknown rows but imports identically") {
    std::ostringstream filtered;
    m.export_tsv(filtered, g.kb, /*only_labeled=*/true);
    std::istringstream fin(filtered.str());
    const PairMatrix back2 = PairMatrix::import_tsv(fin, g.kb);
    CHECK(back2.same_labels(m));
  }
}

TEST_CASE("import rejects unknown tokens and foreign classes") {
  const auto kb = kb_with({"http://ex/A", "http://ex/B"});
  {
    std::istringstream in(
        "class_a\tclass_b\tlabel\tprovenance\n"
        "http://ex/A\thttp://ex/B\tmaybe\tnone\n");
    CHECK_THROWS_AS(PairMatrix::import_tsv(in, kb), ParseError);
  }
  {
    std::istringstream in(
        "class_a\tclass_b\tlabel\tprovenance\n"
        "http://ex/A\thttp://ex/Z\tdisjoint\tasserted\n");
    CHECK_THROWS_AS(PairMatrix::import_tsv(in, kb), ParseError);
  }
  {
    std::istringstream in("not a header\n");
    CHECK_THROWS_AS(PairMatrix::import_tsv(in, kb), ParseError);
  }
}
