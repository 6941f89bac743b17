#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disjax/algorithm1.hpp"
#include "disjax/knowledge_base.hpp"
#include "disjax/ntriples.hpp"

namespace disjax {

inline nlohmann::json diagnostics_to_json(const Diagnostics& diag,
                                          const KnowledgeBase& kb) {
  nlohmann::json j;
  std::vector<std::string> incoherent;
  for (ClassId c : diag.incoherent_classes) incoherent.push_back(kb.iri_of(c));
  std::sort(incoherent.begin(), incoherent.end());
  j["incoherent_classes"] = incoherent;

  nlohmann::json witnesses = nlohmann::json::array();
  auto sorted_witnesses = diag.unsat_witnesses;
  std::sort(sorted_witnesses.begin(), sorted_witnesses.end(),
            [&](const UnsatWitness& x, const UnsatWitness& y) {
              return std::tie(x.individual, kb.iri_of(x.class_a),
                              kb.iri_of(x.class_b)) <
                     std::tie(y.individual, kb.iri_of(y.class_a),
                              kb.iri_of(y.class_b));
            });
  for (const UnsatWitness& w : sorted_witnesses) {
    witnesses.push_back({{"individual", w.individual},
                         {"class_a", kb.iri_of(w.class_a)},
                         {"class_b", kb.iri_of(w.class_b)}});
  }
  j["unsat_witnesses"] = std::move(witnesses);

  nlohmann::json conflicts = nlohmann::json::array();
  auto sorted_conflicts = diag.conflicts;
  std::sort(sorted_conflicts.begin(), sorted_conflicts.end(),
            [&](const ConflictRecord& x, const ConflictRecord& y) {
              return std::tie(kb.iri_of(x.class_a), kb.iri_of(x.class_b)) <
                     std::tie(kb.iri_of(y.class_a), kb.iri_of(y.class_b));
            });
  for (const ConflictRecord& c : sorted_conflicts) {
    conflicts.push_back(
        {{"class_a", kb.iri_of(c.class_a)},
         {"class_b", kb.iri_of(c.class_b)},
         {"existing", std::string(provenance_token(c.existing))},
         {"incoming", std::string(provenance_token(c.incoming))}});
  }
  j["conflicts"] = std::move(conflicts);
  return j;
}

inline nlohmann::json parse_report_to_json(const ParseReport& rep) {
  nlohmann::json j;
  j["total_statements"] = rep.total_statements;
  j["consumed"] = {{"subclass", rep.consumed_subclass},
                   {"disjoint", rep.consumed_disjoint},
                   {"type", rep.consumed_type},
                   {"label", rep.consumed_label},
                   {"class_marker", rep.consumed_class_marker}};
  j["ignored_triples"] = rep.ignored;
  j["skipped_blank_nodes"] = rep.skipped_blank_nodes;
  j["dropped_type_statements"] = rep.dropped_type_statements;
  j["dropped_label_statements"] = rep.dropped_label_statements;
  j["semantic_errors"] = rep.semantic_errors;
  return j;
}

}  // namespace disjax
