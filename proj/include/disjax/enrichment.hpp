#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "disjax/algorithm1.hpp"
#include "disjax/closure.hpp"
#include "disjax/errors.hpp"
#include "disjax/knowledge_base.hpp"
#include "disjax/ntriples.hpp"
#include "disjax/oracle.hpp"
#include "disjax/pair_matrix.hpp"
#include "disjax/prompt.hpp"

namespace disjax {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Unbiased uniform draw in [0, bound) that depends only on (seed, ordinal);
/// resumable runs replay the identical stream.
inline std::uint64_t bounded_uniform(std::uint64_t seed, std::uint64_t ordinal,
                                     std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  const std::uint64_t stream = splitmix64(seed) ^ splitmix64(~ordinal);
  std::uint64_t n = 0;
  while (true) {
    const std::uint64_t x = splitmix64(stream + n++);
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

}  // namespace detail

struct SelectionPolicy {
  enum class Kind { Random, Lexicographic };
  Kind kind = Kind::Random;
  std::uint64_t seed = 0;

  static SelectionPolicy random(std::uint64_t seed) {
    return {Kind::Random, seed};
  }
  static SelectionPolicy lexicographic() { return {Kind::Lexicographic, 0}; }
};

/// Picks the next Unknown pair: uniform over the remaining Unknowns for
/// Random (a deterministic stream in the ordinal of the draw), the first in
/// canonical order for Lexicographic. Returns the pair's canonical index.
inline std::optional<std::size_t> select_next_unknown(
    const PairMatrix& m, const SelectionPolicy& policy,
    std::uint64_t ordinal = 0) {
  const std::size_t unknowns = m.unknown_count();
  if (unknowns == 0) return std::nullopt;
  if (policy.kind == SelectionPolicy::Kind::Lexicographic) {
    return m.kth_unknown(0);
  }
  return m.kth_unknown(static_cast<std::size_t>(
      detail::bounded_uniform(policy.seed, ordinal, unknowns)));
}

struct ApplyCounts {
  std::size_t labeled_down = 0;
  std::size_t labeled_up = 0;
};

/// Applies a verdict on an Unknown pair and propagates it through the
/// closure: Disjoint flows down to descendant pairs, NotDisjoint flows up to
/// ancestor pairs. Already-labeled pairs are never overwritten. The queried
/// pair is counted in its own direction.
inline ApplyCounts apply_verdict(PairMatrix& m, const SubclassClosure& cl,
                                 std::size_t pair_index, VerdictValue v) {
  if (m.label_at(pair_index) != PairLabel::Unknown) {
    throw ContractViolation("apply_verdict on a pair that is not Unknown");
  }
  const auto [d1, d2] = m.pair_at(pair_index);
  ApplyCounts counts;
  const Bitset& side1 = v == VerdictValue::Disjoint ? cl.descendants_of(d1)
                                                    : cl.ancestors_of(d1);
  const Bitset& side2 = v == VerdictValue::Disjoint ? cl.descendants_of(d2)
                                                    : cl.ancestors_of(d2);
  const PairLabel target = v == VerdictValue::Disjoint
                               ? PairLabel::Disjoint
                               : PairLabel::NotDisjoint;
  side1.for_each_set([&](std::size_t c1_raw) {
    const ClassId c1{static_cast<std::uint32_t>(c1_raw)};
    side2.for_each_set([&](std::size_t c2_raw) {
      const ClassId c2{static_cast<std::uint32_t>(c2_raw)};
      if (c1 == c2) return;
      const std::size_t idx = m.index_of(c1, c2);
      if (m.label_at(idx) != PairLabel::Unknown) return;
      const Provenance prov = idx == pair_index ? Provenance::OracleVerdict
                                                : Provenance::OraclePropagation;
      if (m.try_label(idx, target, prov) == PairMatrix::LabelOutcome::Newly) {
        if (v == VerdictValue::Disjoint) {
          ++counts.labeled_down;
        } else {
          ++counts.labeled_up;
        }
      }
    });
  });
  return counts;
}

struct GuardWitness {
  std::size_t pair_index = 0;
  PairLabel label = PairLabel::Unknown;
};

/// Evidence precedence: a Disjoint verdict is downgraded to NotDisjoint when
/// some descendant pair already holds NotDisjoint (or terminal Conflict,
/// which subsumes material overlap evidence); accepting it would contradict
/// that evidence under downward propagation. A NotDisjoint verdict passes
/// through; its upward targets can never be Disjoint, which is asserted.
inline VerdictValue guard_verdict(const PairMatrix& m,
                                  const SubclassClosure& cl,
                                  std::size_t pair_index, VerdictValue v,
                                  GuardWitness* witness = nullptr) {
  if (m.label_at(pair_index) != PairLabel::Unknown) {
    throw ContractViolation("guard_verdict on a pair that is not Unknown");
  }
  const auto [d1, d2] = m.pair_at(pair_index);
  if (v == VerdictValue::Disjoint) {
    VerdictValue effective = v;
    cl.descendants_of(d1).for_each_set([&](std::size_t c1_raw) {
      if (effective == VerdictValue::NotDisjoint) return;
      const ClassId c1{static_cast<std::uint32_t>(c1_raw)};
      cl.descendants_of(d2).for_each_set([&](std::size_t c2_raw) {
        if (effective == VerdictValue::NotDisjoint) return;
        const ClassId c2{static_cast<std::uint32_t>(c2_raw)};
        if (c1 == c2) return;
        const std::size_t idx = m.index_of(c1, c2);
        const PairLabel label = m.label_at(idx);
        if (label == PairLabel::NotDisjoint || label == PairLabel::Conflict) {
          effective = VerdictValue::NotDisjoint;
          if (witness) *witness = {idx, label};
        }
      });
    });
    return effective;
  }
  cl.ancestors_of(d1).for_each_set([&](std::size_t c1_raw) {
    const ClassId c1{static_cast<std::uint32_t>(c1_raw)};
    cl.ancestors_of(d2).for_each_set([&](std::size_t c2_raw) {
      const ClassId c2{static_cast<std::uint32_t>(c2_raw)};
      if (c1 == c2) return;
      if (m.label_at(m.index_of(c1, c2)) == PairLabel::Disjoint) {
        throw ContractViolation(
            "ancestor pair is Disjoint while a descendant pair is still "
            "Unknown; downward propagation was skipped somewhere");
      }
    });
  });
  return v;
}

struct EnrichStats {
  std::uint64_t initially_labeled = 0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t propagated_disjoint = 0;
  std::uint64_t propagated_not_disjoint = 0;
  std::uint64_t overridden_verdicts = 0;
  std::uint64_t conflicts = 0;

  bool operator==(const EnrichStats&) const = default;
};

struct VerdictEvent {
  std::uint64_t ordinal = 0;
  ClassId class_a;
  ClassId class_b;
  VerdictValue raw_verdict = VerdictValue::NotDisjoint;
  VerdictValue effective_verdict = VerdictValue::NotDisjoint;
  std::size_t labeled_down = 0;
  std::size_t labeled_up = 0;
  std::size_t unknown_after = 0;
  bool from_cache = false;
};

struct RunControl {
  /// Stop after this many verdicts (0 = run to completion).
  std::uint64_t max_verdicts = 0;
  /// Called after each verdict is applied and accounted; used for flushing.
  std::function<void(const VerdictEvent&, const EnrichStats&)> on_verdict;
};

struct EnrichmentRun {
  SelectionPolicy policy;
  EnrichStats stats;
  bool completed = false;
  std::uint64_t next_ordinal = 0;
};

/// The oracle loop: select an Unknown pair, query, guard, apply, repeat
/// until no Unknown pair remains. No pair is ever queried after its label is
/// determined. `start_ordinal` and `stats` resume an interrupted run.
inline EnrichmentRun run_algorithm2(PairMatrix& m, const KnowledgeBase& kb,
                                    const SubclassClosure& cl,
                                    LlmOracle& oracle, const PromptSpec& spec,
                                    const SelectionPolicy& policy,
                                    EnrichStats stats = {},
                                    std::uint64_t start_ordinal = 0,
                                    const RunControl& control = {}) {
  if (start_ordinal == 0) {
    stats.initially_labeled = m.pair_count() - m.unknown_count();
    stats.conflicts = m.count(PairLabel::Conflict);
  }
  std::uint64_t ordinal = start_ordinal;
  std::uint64_t steps = 0;
  while (m.unknown_count() > 0) {
    if (control.max_verdicts != 0 && steps == control.max_verdicts) {
      return {policy, stats, false, ordinal};
    }
    const std::size_t idx = *select_next_unknown(m, policy, ordinal);
    const auto [a, b] = m.pair_at(idx);
    const Verdict verdict = oracle.query(spec, kb.label_of(a), kb.label_of(b));
    const VerdictValue effective = guard_verdict(m, cl, idx, verdict.value);
    if (effective != verdict.value) ++stats.overridden_verdicts;
    const ApplyCounts counts = apply_verdict(m, cl, idx, effective);
    ++stats.oracle_calls;
    if (effective == VerdictValue::Disjoint) {
      stats.propagated_disjoint += counts.labeled_down - 1;
    } else {
      stats.propagated_not_disjoint += counts.labeled_up - 1;
    }
    VerdictEvent event;
    event.ordinal = ordinal;
    event.class_a = a;
    event.class_b = b;
    event.raw_verdict = verdict.value;
    event.effective_verdict = effective;
    event.labeled_down = counts.labeled_down;
    event.labeled_up = counts.labeled_up;
    event.unknown_after = m.unknown_count();
    event.from_cache = verdict.from_cache;
    ++ordinal;
    ++steps;
    if (control.on_verdict) control.on_verdict(event, stats);
  }
  return {policy, stats, true, ordinal};
}

/// Unordered class pairs destined to become disjointness axioms.
struct AxiomSet {
  std::vector<std::pair<ClassId, ClassId>> pairs;  // canonical, sorted by IRI
};

/// The matrix's Disjoint pairs in canonical order.
inline AxiomSet axioms_from_matrix(const PairMatrix& m) {
  AxiomSet out;
  for (std::size_t idx = 0; idx < m.pair_count(); ++idx) {
    if (m.label_at(idx) == PairLabel::Disjoint) {
      out.pairs.push_back(m.pair_at(idx));
    }
  }
  return out;
}

/// True iff disjointness of q entails disjointness of p under downward
/// propagation through the subclass closure.
inline bool pair_entails(const SubclassClosure& cl,
                         const std::pair<ClassId, ClassId>& q,
                         const std::pair<ClassId, ClassId>& p) {
  return (cl.reaches(p.first, q.first) && cl.reaches(p.second, q.second)) ||
         (cl.reaches(p.first, q.second) && cl.reaches(p.second, q.first));
}

/// Reduces a disjointness set to the pairs maximal under the entailment
/// preorder: a pair goes iff a kept pair entails it. Among mutually
/// entailing pairs the canonically last one survives, which makes the result
/// agree exactly with a greedy remove-when-still-entailed sweep in canonical
/// order. The output entails the input and no proper subset of it does.
inline AxiomSet prune(const AxiomSet& input, const KnowledgeBase& kb,
                      const SubclassClosure& cl) {
  auto canonical_key = [&kb](const std::pair<ClassId, ClassId>& p) {
    std::pair<std::string, std::string> key{kb.iri_of(p.first),
                                            kb.iri_of(p.second)};
    if (key.second < key.first) std::swap(key.first, key.second);
    return key;
  };
  AxiomSet out;
  for (std::size_t i = 0; i < input.pairs.size(); ++i) {
    const auto& p = input.pairs[i];
    bool dominated = false;
    for (std::size_t j = 0; j < input.pairs.size() && !dominated; ++j) {
      if (i == j) continue;
      const auto& q = input.pairs[j];
      if (!pair_entails(cl, q, p)) continue;
      if (!pair_entails(cl, p, q) || canonical_key(p) < canonical_key(q)) {
        dominated = true;
      }
    }
    if (!dominated) out.pairs.push_back(p);
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [&](const auto& x, const auto& y) {
              return canonical_key(x) < canonical_key(y);
            });
  return out;
}

namespace detail {

/// Escapes the ASCII characters N-Triples forbids inside an IRIREF; IRIs
/// already exclude whitespace and control characters.
inline std::string escape_iriref(std::string_view iri) {
  std::string out;
  out.reserve(iri.size());
  for (const char c : iri) {
    switch (c) {
      case '<': out += "\\u003C"; break;
      case '>': out += "\\u003E"; break;
      case '"': out += "\\u0022"; break;
      case '{': out += "\\u007B"; break;
      case '}': out += "\\u007D"; break;
      case '|': out += "\\u007C"; break;
      case '^': out += "\\u005E"; break;
      case '`': out += "\\u0060"; break;
      case '\\': out += "\\u005C"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Serializes the axioms as owl:disjointWith triples, one per line, in
/// canonical (smaller IRI first) order, sorted, newline-terminated.
inline std::string emit_axioms(const AxiomSet& axioms,
                               const KnowledgeBase& kb) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(axioms.pairs.size());
  for (const auto& [a, b] : axioms.pairs) {
    std::string ia = kb.iri_of(a);
    std::string ib = kb.iri_of(b);
    if (ib < ia) std::swap(ia, ib);
    rows.emplace_back(std::move(ia), std::move(ib));
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::string out;
  for (const auto& [ia, ib] : rows) {
    out += '<';
    out += detail::escape_iriref(ia);
    out += "> <";
    out += vocab::kDisjointWith;
    out += "> <";
    out += detail::escape_iriref(ib);
    out += "> .\n";
  }
  return out;
}

/// One self-contained snapshot per applied verdict makes an interrupted run
/// resumable from exactly the last applied verdict: labels, counters, and
/// the selection ordinal travel together and are swapped in atomically.
struct EnrichState {
  static constexpr std::string_view kFormat = "disjax-enrich-state-v1";

  SelectionPolicy policy;
  PromptSpec spec;
  std::string model_name;
  EnrichStats stats;
  std::uint64_t ordinal = 0;
};

inline void save_enrich_state(const std::filesystem::path& path,
                              const KnowledgeBase& kb, const PairMatrix& m,
                              const EnrichState& state) {
    nlohmann::json j;
    j["format"] = std::string(EnrichState::kFormat);
    j["policy"] = state.policy.kind == SelectionPolicy::Kind::Random
                      ? "random"
                      : "lex";
    j["seed"] = state.policy.seed;
    j["strategy"] = std::string(strategy_token(state.spec.strategy));
    j["qa_mode"] = std::string(qa_mode_token(state.spec.qa_mode));
    j["model"] = state.model_name;
    j["ordinal"] = state.ordinal;
    j["stats"] = {{"initially_labeled", state.stats.initially_labeled},
                  {"oracle_calls", state.stats.oracle_calls},
                  {"propagated_disjoint", state.stats.propagated_disjoint},
                  {"propagated_not_disjoint",
                   state.stats.propagated_not_disjoint},
                  {"overridden_verdicts", state.stats.overridden_verdicts},
                  {"conflicts", state.stats.conflicts}};
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t r = 0; r < m.class_count(); ++r) {
      classes.push_back(kb.iri_of(m.class_at_rank(r)));
    }
    j["classes"] = std::move(classes);
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t idx = 0; idx < m.pair_count(); ++idx) {
      const PairLabel label = m.label_at(idx);
      if (label == PairLabel::Unknown) continue;
      entries.push_back({idx, std::string(label_token(label)),
                         std::string(provenance_token(m.provenance_at(idx)))});
    }
    j["entries"] = std::move(entries);

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) {
        throw ConfigError("cannot write state file: " + tmp.string());
      }
      out << j.dump() << '\n';
      out.flush();
    }
    std::filesystem::rename(tmp, path);
}

struct LoadedEnrichState {
  PairMatrix matrix;
  EnrichState state;
};

inline std::optional<LoadedEnrichState> load_enrich_state(
    const std::filesystem::path& path, const KnowledgeBase& kb) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() ||
      j.value("format", "") != EnrichState::kFormat) {
    throw ConfigError("unreadable enrichment state file: " + path.string());
  }
  LoadedEnrichState loaded{PairMatrix::build(kb), {}};
  PairMatrix& m = loaded.matrix;
  const auto& classes = j.at("classes");
  if (classes.size() != m.class_count()) {
    throw ConfigError("state file does not match the ontology (class count)");
  }
  for (std::size_t r = 0; r < m.class_count(); ++r) {
    if (classes[r].get<std::string>() != kb.iri_of(m.class_at_rank(r))) {
      throw ConfigError("state file does not match the ontology (class " +
                        classes[r].get<std::string>() + ")");
    }
  }
  for (const auto& entry : j.at("entries")) {
    const std::size_t idx = entry.at(0).get<std::size_t>();
    if (idx >= m.pair_count()) {
      throw ConfigError("state file entry out of range");
    }
    const auto label = parse_label_token(entry.at(1).get<std::string>());
    const auto prov = parse_provenance_token(entry.at(2).get<std::string>());
    if (!label || !prov) {
      throw ConfigError("state file entry holds unknown tokens");
    }
    if (*label == PairLabel::Conflict) {
      m.force_conflict(idx);
    } else if (*label != PairLabel::Unknown) {
      m.try_label(idx, *label, *prov);
    }
  }
  EnrichState& st = loaded.state;
  st.policy.kind = j.value("policy", "random") == "lex"
                       ? SelectionPolicy::Kind::Lexicographic
                       : SelectionPolicy::Kind::Random;
  st.policy.seed = j.value("seed", std::uint64_t{0});
  const auto strategy = parse_strategy_token(j.value("strategy", ""));
  const auto qa = parse_qa_mode_token(j.value("qa_mode", ""));
  if (!strategy || !qa) {
    throw ConfigError("state file holds unknown prompt tokens");
  }
  st.spec = {*strategy, *qa};
  st.model_name = j.value("model", "");
  st.ordinal = j.value("ordinal", std::uint64_t{0});
  const auto& stats = j.at("stats");
  st.stats.initially_labeled = stats.value("initially_labeled", 0ull);
  st.stats.oracle_calls = stats.value("oracle_calls", 0ull);
  st.stats.propagated_disjoint = stats.value("propagated_disjoint", 0ull);
  st.stats.propagated_not_disjoint =
      stats.value("propagated_not_disjoint", 0ull);
  st.stats.overridden_verdicts = stats.value("overridden_verdicts", 0ull);
  st.stats.conflicts = stats.value("conflicts", 0ull);
  return loaded;
}

/// Serializes one verdict event as a JSON line for the enrichment event log.
inline std::string event_log_line(const VerdictEvent& event,
                                  const KnowledgeBase& kb) {
  nlohmann::json j{
      {"ordinal", event.ordinal},
      {"class_a", kb.iri_of(event.class_a)},
      {"class_b", kb.iri_of(event.class_b)},
      {"raw_verdict", std::string(verdict_token(event.raw_verdict))},
      {"effective_verdict",
       std::string(verdict_token(event.effective_verdict))},
      {"labeled_down", event.labeled_down},
      {"labeled_up", event.labeled_up},
      {"unknown_after", event.unknown_after}};
  return j.dump();
}

}  // namespace disjax
