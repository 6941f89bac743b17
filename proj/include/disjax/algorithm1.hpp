#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "disjax/closure.hpp"
#include "disjax/errors.hpp"
#include "disjax/iri.hpp"
#include "disjax/knowledge_base.hpp"
#include "disjax/pair_matrix.hpp"

namespace disjax {

struct UnsatWitness {
  std::string individual;
  ClassId class_a;
  ClassId class_b;
};

struct ConflictRecord {
  std::size_t pair_index = 0;
  ClassId class_a;
  ClassId class_b;
  Provenance existing = Provenance::None;
  Provenance incoming = Provenance::None;
};

/// Incoherence, unsatisfiability, and label-conflict findings. An unsat
/// witness is an individual that is an instance of both members of a pair
/// that was labeled Disjoint.
struct Diagnostics {
  std::set<ClassId> incoherent_classes;
  std::vector<UnsatWitness> unsat_witnesses;
  std::vector<ConflictRecord> conflicts;
};

struct ClosureOptions {
  bool assume_nonempty = true;
};

/// Builds the canonical all-pairs matrix, every pair Unknown.
inline PairMatrix build_pair_matrix(const KnowledgeBase& kb) {
  return PairMatrix::build(kb);
}

/// Downward propagation of asserted disjointness: for every asserted pair
/// {D1, D2} each pair of a descendant of D1 with a descendant of D2 is
/// disjoint. A class below both D1 and D2 is incoherent.
inline std::size_t propagate_asserted_disjointness(PairMatrix& m,
                                                   const KnowledgeBase& kb,
                                                   const SubclassClosure& cl,
                                                   Diagnostics& diag) {
  std::size_t labeled = 0;
  for (const auto& [d1, d2] : kb.asserted_disjoint()) {
    const std::size_t asserted_idx = m.index_of(d1, d2);
    cl.descendants_of(d1).for_each_set([&](std::size_t c1_raw) {
      const ClassId c1{static_cast<std::uint32_t>(c1_raw)};
      cl.descendants_of(d2).for_each_set([&](std::size_t c2_raw) {
        const ClassId c2{static_cast<std::uint32_t>(c2_raw)};
        if (c1 == c2) {
          diag.incoherent_classes.insert(c1);
          return;
        }
        const std::size_t idx = m.index_of(c1, c2);
        const Provenance prov = idx == asserted_idx
                                    ? Provenance::Asserted
                                    : Provenance::InferredDisjoint;
        switch (m.try_label(idx, PairLabel::Disjoint, prov)) {
          case PairMatrix::LabelOutcome::Newly:
            ++labeled;
            break;
          case PairMatrix::LabelOutcome::Same:
            break;
          case PairMatrix::LabelOutcome::Clash: {
            const auto [a, b] = m.pair_at(idx);
            diag.conflicts.push_back(
                {idx, a, b, m.provenance_at(idx), prov});
            m.force_conflict(idx);
            break;
          }
        }
      });
    });
  }
  return labeled;
}

/// Marks every pair with a common subclass as not disjoint; rests on the
/// assumption that named classes are non-empty. Contradictions with an
/// already-derived Disjoint label become terminal conflicts.
inline std::size_t mark_joint_subclass_pairs(PairMatrix& m,
                                             const SubclassClosure& cl,
                                             Diagnostics& diag) {
  std::size_t labeled = 0;
  const std::size_t n = cl.size();
  for (std::size_t s = 0; s < n; ++s) {
    const Bitset& up = cl.ancestors_of(ClassId{static_cast<std::uint32_t>(s)});
    std::vector<std::size_t> ancestors;
    up.for_each_set([&](std::size_t a) { ancestors.push_back(a); });
    for (std::size_t i = 0; i < ancestors.size(); ++i) {
      for (std::size_t j = i + 1; j < ancestors.size(); ++j) {
        const ClassId a{static_cast<std::uint32_t>(ancestors[i])};
        const ClassId b{static_cast<std::uint32_t>(ancestors[j])};
        const std::size_t idx = m.index_of(a, b);
        switch (m.try_label(idx, PairLabel::NotDisjoint,
                            Provenance::JointSubclass)) {
          case PairMatrix::LabelOutcome::Newly:
            ++labeled;
            break;
          case PairMatrix::LabelOutcome::Same:
            break;
          case PairMatrix::LabelOutcome::Clash: {
            const auto [pa, pb] = m.pair_at(idx);
            diag.conflicts.push_back({idx, pa, pb, m.provenance_at(idx),
                                      Provenance::JointSubclass});
            m.force_conflict(idx);
            break;
          }
        }
      }
    }
  }
  return labeled;
}

/// Marks every pair whose upward-closed instance sets intersect as not
/// disjoint. A shared instance on a Disjoint pair is an unsatisfiability
/// witness and flips the pair to Conflict.
inline std::size_t mark_joint_instance_pairs(PairMatrix& m,
                                             const KnowledgeBase& kb,
                                             const SubclassClosure& cl,
                                             Diagnostics& diag) {
  std::size_t labeled = 0;
  for (const auto& [individual, types] : kb.instance_types()) {
    Bitset closed(cl.size());
    for (ClassId t : types) closed.or_with(cl.ancestors_of(t));
    std::vector<std::size_t> members;
    closed.for_each_set([&](std::size_t c) { members.push_back(c); });
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const ClassId a{static_cast<std::uint32_t>(members[i])};
        const ClassId b{static_cast<std::uint32_t>(members[j])};
        const std::size_t idx = m.index_of(a, b);
        switch (m.try_label(idx, PairLabel::NotDisjoint,
                            Provenance::JointInstance)) {
          case PairMatrix::LabelOutcome::Newly:
            ++labeled;
            break;
          case PairMatrix::LabelOutcome::Same:
            break;
          case PairMatrix::LabelOutcome::Clash: {
            const auto [pa, pb] = m.pair_at(idx);
            diag.unsat_witnesses.push_back({individual, pa, pb});
            diag.conflicts.push_back({idx, pa, pb, m.provenance_at(idx),
                                      Provenance::JointInstance});
            m.force_conflict(idx);
            break;
          }
        }
      }
    }
  }
  return labeled;
}

struct Algorithm1Result {
  PairMatrix matrix;
  Diagnostics diagnostics;
  std::size_t asserted_labeled = 0;
  std::size_t joint_subclass_labeled = 0;
  std::size_t joint_instance_labeled = 0;
};

/// The complete derivation pass: build the pair list, then apply asserted
/// disjointness, joint subclasses, and joint instances in that order. The
/// result carries only labels that follow from the knowledge base.
inline Algorithm1Result run_algorithm1(const KnowledgeBase& kb,
                                       const SubclassClosure& cl,
                                       const ClosureOptions& opts = {}) {
  Algorithm1Result result{build_pair_matrix(kb), {}, 0, 0, 0};
  result.asserted_labeled = propagate_asserted_disjointness(
      result.matrix, kb, cl, result.diagnostics);
  if (opts.assume_nonempty) {
    result.joint_subclass_labeled =
        mark_joint_subclass_pairs(result.matrix, cl, result.diagnostics);
  }
  result.joint_instance_labeled =
      mark_joint_instance_pairs(result.matrix, kb, cl, result.diagnostics);
  return result;
}

}  // namespace disjax
