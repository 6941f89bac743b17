// Seeded generators for desk-scale knowledge bases. Two flavors:
//  - arbitrary_kb: anything goes, conflicts included;
//  - world_kb: classes get extensions in a small constructed world, the gold
//    labeling is read off those extensions, and every KB assertion is sampled
//    from the world, so gold is consistent with the KB by construction.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "disjax/knowledge_base.hpp"
#include "disjax/oracle.hpp"
#include "disjax/pair_matrix.hpp"

#include "brute_force.hpp"

namespace testsupport {

inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t bound) {
  return rng() % bound;  // test-generation only; bias is irrelevant here
}

inline std::string class_iri(std::size_t k) {
  std::ostringstream os;
  os << "http://example.org/k/C" << (k < 10 ? "0" : "") << k;
  return os.str();
}

inline std::string individual_iri(std::size_t u) {
  return "http://example.org/k/ind" + std::to_string(u);
}

struct GeneratedKb {
  disjax::KnowledgeBase kb;
  std::vector<disjax::ClassId> ids;
};

/// Random DAG + random disjointness and typing assertions; may well be
/// conflicted. IRIs are assigned through a random permutation so canonical
/// order carries no relation to the taxonomy.
inline GeneratedKb arbitrary_kb(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeneratedKb g;
  const std::size_t n = 2 + rand_below(rng, 11);  // 2..12 classes

  std::vector<std::size_t> topo(n);
  for (std::size_t i = 0; i < n; ++i) topo[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(topo[i - 1], topo[rand_below(rng, i)]);
  }

  for (std::size_t k = 0; k < n; ++k) {
    g.ids.push_back(g.kb.intern(disjax::Iri(class_iri(k))));
  }
  // Edge child -> parent goes from later to earlier in topo order: a DAG.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rand_below(rng, 100) < 18) {
        g.kb.add_subclass(g.ids[topo[j]], g.ids[topo[i]]);
      }
    }
  }
  const std::size_t n_disjoint = rand_below(rng, 4);
  for (std::size_t k = 0; k < n_disjoint; ++k) {
    const std::size_t a = rand_below(rng, n);
    const std::size_t b = rand_below(rng, n);
    if (a != b) g.kb.add_disjoint(g.ids[a], g.ids[b]);
  }
  const std::size_t n_individuals = rand_below(rng, 7);
  for (std::size_t u = 0; u < n_individuals; ++u) {
    const disjax::Iri individual(individual_iri(u));
    const std::size_t n_types = 1 + rand_below(rng, 2);
    for (std::size_t t = 0; t < n_types; ++t) {
      g.kb.add_instance(individual, g.ids[rand_below(rng, n)]);
    }
  }
  return g;
}

struct WorldKb {
  disjax::KnowledgeBase kb;
  std::vector<disjax::ClassId> ids;
  // Class extensions in the constructed world, indexed by ClassId value.
  std::vector<std::set<int>> extension;

  bool gold_disjoint(disjax::ClassId a, disjax::ClassId b) const {
    for (int e : extension[a.value]) {
      if (extension[b.value].count(e)) return false;
    }
    return true;
  }

  disjax::VerdictValue gold_verdict(disjax::ClassId a,
                                    disjax::ClassId b) const {
    return gold_disjoint(a, b) ? disjax::VerdictValue::Disjoint
                               : disjax::VerdictValue::NotDisjoint;
  }

  /// Gold labeling for every pair, in the pair-matrix TSV schema.
  std::string gold_tsv() const {
    const disjax::PairMatrix m = disjax::PairMatrix::build(kb);
    std::ostringstream os;
    os << "class_a\tclass_b\tlabel\tprovenance\n";
    for (std::size_t idx = 0; idx < m.pair_count(); ++idx) {
      const auto [a, b] = m.pair_at(idx);
      os << kb.iri_of(a) << '\t' << kb.iri_of(b) << '\t'
         << (gold_disjoint(a, b) ? "disjoint" : "not_disjoint") << "\tnone\n";
    }
    return os.str();
  }

  disjax::MockGoldBackend gold_backend() const {
    disjax::MockGoldBackend mock;
    const disjax::PairMatrix m = disjax::PairMatrix::build(kb);
    for (std::size_t idx = 0; idx < m.pair_count(); ++idx) {
      const auto [a, b] = m.pair_at(idx);
      mock.add_pair(kb.label_of(a), kb.label_of(b), gold_verdict(a, b));
    }
    return mock;
  }
};

struct WorldKbOptions {
  std::size_t min_classes = 2;
  std::size_t max_classes = 12;
  /// Prepends an evidence-free chain A ⊑ B ⊑ C plus a class X whose world
  /// component is separate, with IRIs that put the (C, X) pair first in
  /// canonical order: a guaranteed disjoint frontier crossed by a chain.
  bool with_frontier_gadget = false;
};

inline WorldKb world_kb(std::uint64_t seed, const WorldKbOptions& opts = {}) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  WorldKb w;

  std::size_t gadget_count = 0;
  if (opts.with_frontier_gadget) {
    // Sorts before every generated class IRI: g/a0 = C, g/a1 = X, g/a2 = B,
    // g/a3 = A with A -> B -> C.
    const auto c = w.kb.intern(disjax::Iri("http://example.org/g/a0"));
    const auto x = w.kb.intern(disjax::Iri("http://example.org/g/a1"));
    const auto b = w.kb.intern(disjax::Iri("http://example.org/g/a2"));
    const auto a = w.kb.intern(disjax::Iri("http://example.org/g/a3"));
    w.kb.add_subclass(a, b);
    w.kb.add_subclass(b, c);
    w.ids.insert(w.ids.end(), {c, x, b, a});
    gadget_count = 4;
  }

  const std::size_t span = opts.max_classes - opts.min_classes + 1;
  const std::size_t n = opts.min_classes + rand_below(rng, span);

  std::vector<std::size_t> topo(n);
  for (std::size_t i = 0; i < n; ++i) topo[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(topo[i - 1], topo[rand_below(rng, i)]);
  }

  std::vector<disjax::ClassId> body;
  for (std::size_t k = 0; k < n; ++k) {
    body.push_back(w.kb.intern(disjax::Iri(class_iri(k))));
  }
  w.ids.insert(w.ids.end(), body.begin(), body.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rand_below(rng, 100) < 18) {
        w.kb.add_subclass(body[topo[j]], body[topo[i]]);
      }
    }
  }

  // World: every class seeds a nonempty raw set; the extension of a class is
  // the union of the raw sets of its subclasses (itself included), which
  // realizes C ⊑ D as extension(C) ⊆ extension(D).
  const std::size_t total = w.kb.class_count();
  const int universe = static_cast<int>(2 * n + 3);
  std::vector<std::set<int>> raw(total);
  for (const disjax::ClassId c : body) {
    const std::size_t picks = 1 + rand_below(rng, 3);
    for (std::size_t p = 0; p < picks; ++p) {
      raw[c.value].insert(static_cast<int>(rand_below(rng, universe)));
    }
  }
  if (opts.with_frontier_gadget) {
    // Fresh world elements keep the gadget's component disjoint from the
    // random part, so all gadget-vs-body pairs are genuinely disjoint.
    raw[w.ids[0].value] = {universe + 1};  // C
    raw[w.ids[1].value] = {universe + 4};  // X
    raw[w.ids[2].value] = {universe + 2};  // B
    raw[w.ids[3].value] = {universe + 3};  // A
  }

  w.extension.assign(total, {});
  for (std::uint32_t c = 0; c < total; ++c) {
    for (std::uint32_t s = 0; s < total; ++s) {
      if (bf_subsumed(w.kb, disjax::ClassId{s}, disjax::ClassId{c})) {
        w.extension[c].insert(raw[s].begin(), raw[s].end());
      }
    }
  }

  // Assertions sampled from the world; the gadget stays pristine.
  std::vector<std::pair<disjax::ClassId, disjax::ClassId>> disjoint_pool;
  for (std::size_t i = 0; i < body.size(); ++i) {
    for (std::size_t j = i + 1; j < body.size(); ++j) {
      if (w.gold_disjoint(body[i], body[j])) {
        disjoint_pool.emplace_back(body[i], body[j]);
      }
    }
  }
  if (!disjoint_pool.empty()) {
    const std::size_t n_assert = rand_below(rng, 3);
    for (std::size_t k = 0; k < n_assert; ++k) {
      const auto& [a, b] = disjoint_pool[rand_below(rng, disjoint_pool.size())];
      w.kb.add_disjoint(a, b);
    }
  }
  const std::size_t n_typings = rand_below(rng, 5);
  for (std::size_t k = 0; k < n_typings; ++k) {
    const disjax::ClassId c = body[rand_below(rng, body.size())];
    if (w.extension[c.value].empty()) continue;
    std::vector<int> members(w.extension[c.value].begin(),
                             w.extension[c.value].end());
    const int u = members[rand_below(rng, members.size())];
    w.kb.add_instance(disjax::Iri(individual_iri(static_cast<std::size_t>(u))),
                      c);
  }
  (void)gadget_count;
  return w;
}

}  // namespace testsupport
