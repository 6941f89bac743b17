#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disjax/errors.hpp"
#include "disjax/iri.hpp"
#include "disjax/knowledge_base.hpp"

namespace disjax {

enum class PairLabel : std::uint8_t { Unknown, Disjoint, NotDisjoint, Conflict };

enum class Provenance : std::uint8_t {
  None,
  Asserted,
  InferredDisjoint,
  JointSubclass,
  JointInstance,
  OracleVerdict,
  OraclePropagation,
  ConflictEvidence,
};

inline std::string_view label_token(PairLabel l) {
  switch (l) {
    case PairLabel::Unknown: return "unknown";
    case PairLabel::Disjoint: return "disjoint";
    case PairLabel::NotDisjoint: return "not_disjoint";
    case PairLabel::Conflict: return "conflict";
  }
  throw ContractViolation("unreachable label");
}

inline std::optional<PairLabel> parse_label_token(std::string_view s) {
  if (s == "unknown") return PairLabel::Unknown;
  if (s == "disjoint") return PairLabel::Disjoint;
  if (s == "not_disjoint") return PairLabel::NotDisjoint;
  if (s == "conflict") return PairLabel::Conflict;
  return std::nullopt;
}

inline std::string_view provenance_token(Provenance p) {
  switch (p) {
    case Provenance::None: return "none";
    case Provenance::Asserted: return "asserted";
    case Provenance::InferredDisjoint: return "inferred_disjoint";
    case Provenance::JointSubclass: return "joint_subclass";
    case Provenance::JointInstance: return "joint_instance";
    case Provenance::OracleVerdict: return "oracle_verdict";
    case Provenance::OraclePropagation: return "oracle_propagation";
    case Provenance::ConflictEvidence: return "conflict_evidence";
  }
  throw ContractViolation("unreachable provenance");
}

inline std::optional<Provenance> parse_provenance_token(std::string_view s) {
  if (s == "none") return Provenance::None;
  if (s == "asserted") return Provenance::Asserted;
  if (s == "inferred_disjoint") return Provenance::InferredDisjoint;
  if (s == "joint_subclass") return Provenance::JointSubclass;
  if (s == "joint_instance") return Provenance::JointInstance;
  if (s == "oracle_verdict") return Provenance::OracleVerdict;
  if (s == "oracle_propagation") return Provenance::OraclePropagation;
  if (s == "conflict_evidence") return Provenance::ConflictEvidence;
  return std::nullopt;
}

/// All unordered pairs of distinct classes in canonical order: classes are
/// sorted by IRI, pairs enumerated as (i, j) with i < j in that order, with
/// IRI(first) lexicographically smaller than IRI(second). Labels only move
/// away from Unknown; Conflict is terminal.
class PairMatrix {
 public:
  enum class LabelOutcome { Newly, Same, Clash };

  static PairMatrix build(const KnowledgeBase& kb) {
    PairMatrix m;
    m.sorted_ = kb.classes_sorted_by_iri();
    m.rank_.assign(kb.class_count(), 0);
    for (std::size_t r = 0; r < m.sorted_.size(); ++r) {
      m.rank_[m.sorted_[r].value] = r;
    }
    const std::size_t n = m.sorted_.size();
    m.pair_count_ = n < 2 ? 0 : n * (n - 1) / 2;
    m.labels_.assign(m.pair_count_, PairLabel::Unknown);
    m.provenance_.assign(m.pair_count_, Provenance::None);
    m.unknown_count_ = m.pair_count_;
    m.fenwick_.assign(m.pair_count_ + 1, 0);
    for (std::size_t i = 1; i <= m.pair_count_; ++i) {
      m.fenwick_[i] += 1;
      const std::size_t up = i + (i & (~i + 1));
      if (up <= m.pair_count_) m.fenwick_[up] += m.fenwick_[i];
    }
    return m;
  }

  std::size_t class_count() const { return sorted_.size(); }
  std::size_t pair_count() const { return pair_count_; }
  std::size_t unknown_count() const { return unknown_count_; }

  std::size_t rank_of(ClassId c) const { return rank_[c.value]; }
  ClassId class_at_rank(std::size_t r) const { return sorted_[r]; }

  /// Canonical index of the unordered pair {a, b}; order of arguments is
  /// irrelevant. a == b is not a pair.
  std::size_t index_of(ClassId a, ClassId b) const {
    if (a == b) {
      throw ContractViolation("no pair of a class with itself");
    }
    std::size_t i = rank_[a.value];
    std::size_t j = rank_[b.value];
    if (i > j) std::swap(i, j);
    return index_of_ranks(i, j);
  }

  std::size_t index_of_ranks(std::size_t i, std::size_t j) const {
    const std::size_t n = sorted_.size();
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
  }

  /// The pair at a canonical index, first component IRI-smaller.
  std::pair<ClassId, ClassId> pair_at(std::size_t index) const {
    const auto [i, j] = ranks_at(index);
    return {sorted_[i], sorted_[j]};
  }

  std::pair<std::size_t, std::size_t> ranks_at(std::size_t index) const {
    const std::size_t n = sorted_.size();
    std::size_t i = 0;
    std::size_t row = n - 1;
    while (index >= row) {
      index -= row;
      --row;
      ++i;
    }
    return {i, i + 1 + index};
  }

  PairLabel label_at(std::size_t index) const { return labels_[index]; }
  Provenance provenance_at(std::size_t index) const {
    return provenance_[index];
  }

  /// Attempts to move a pair from Unknown to `label`. Returns Newly on
  /// success, Same when the pair already carries `label` (or is terminally
  /// Conflict), and Clash when it carries the opposite label; a clash never
  /// overwrites.
  LabelOutcome try_label(std::size_t index, PairLabel label, Provenance prov) {
    if (label == PairLabel::Unknown) {
      throw ContractViolation("cannot relabel a pair back to unknown");
    }
    const PairLabel current = labels_[index];
    if (current == PairLabel::Unknown) {
      labels_[index] = label;
      provenance_[index] = prov;
      mark_decided(index);
      return LabelOutcome::Newly;
    }
    if (current == label || current == PairLabel::Conflict) {
      return LabelOutcome::Same;
    }
    return LabelOutcome::Clash;
  }

  /// Terminal transition for contradictory evidence on a decided pair.
  void force_conflict(std::size_t index) {
    if (labels_[index] == PairLabel::Unknown) mark_decided(index);
    labels_[index] = PairLabel::Conflict;
    provenance_[index] = Provenance::ConflictEvidence;
  }

  /// k-th Unknown pair (0-based) in canonical order.
  std::size_t kth_unknown(std::size_t k) const {
    if (k >= unknown_count_) {
      throw ContractViolation("kth_unknown out of range");
    }
    std::size_t pos = 0;
    std::size_t remaining = k + 1;
    std::size_t mask = 1;
    while (mask * 2 <= pair_count_) mask *= 2;
    for (; mask > 0; mask /= 2) {
      const std::size_t next = pos + mask;
      if (next <= pair_count_ && fenwick_[next] < remaining) {
        pos = next;
        remaining -= fenwick_[next];
      }
    }
    return pos;  // pos is the 0-based index of the (k+1)-th unknown
  }

  std::size_t count(PairLabel label) const {
    std::size_t n = 0;
    for (PairLabel l : labels_) n += (l == label) ? 1 : 0;
    return n;
  }

  /// TSV export: `class_a<TAB>class_b<TAB>label<TAB>provenance`, canonical
  /// row order, newline-terminated.
  void export_tsv(std::ostream& out, const KnowledgeBase& kb,
                  bool only_labeled = false) const {
    out << "class_a\tclass_b\tlabel\tprovenance\n";
    for (std::size_t idx = 0; idx < pair_count_; ++idx) {
      if (only_labeled && labels_[idx] == PairLabel::Unknown) continue;
      const auto [a, b] = pair_at(idx);
      out << kb.iri_of(a) << '\t' << kb.iri_of(b) << '\t'
          << label_token(labels_[idx]) << '\t'
          << provenance_token(provenance_[idx]) << '\n';
    }
  }

  /// TSV import over an existing knowledge base. Pairs missing from the file
  /// stay Unknown; unknown IRIs, label tokens, or conflicting duplicate rows
  /// are errors.
  static PairMatrix import_tsv(std::istream& in, const KnowledgeBase& kb) {
    PairMatrix m = build(kb);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (!saw_header) {
        if (line != "class_a\tclass_b\tlabel\tprovenance") {
          throw ParseError("bad pair-matrix header", line_no, 1);
        }
        saw_header = true;
        continue;
      }
      std::vector<std::string> cols;
      std::size_t start = 0;
      while (true) {
        const std::size_t tab = line.find('\t', start);
        cols.push_back(line.substr(
            start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cols.size() != 4) {
        throw ParseError("expected 4 tab-separated columns", line_no, 1);
      }
      const auto a = kb.find(cols[0]);
      const auto b = kb.find(cols[1]);
      if (!a || !b) {
        throw ParseError("pair references a class missing from the ontology: " +
                             (a ? cols[1] : cols[0]),
                         line_no, 1);
      }
      const auto label = parse_label_token(cols[2]);
      if (!label) {
        throw ParseError("unknown label token \"" + cols[2] + "\"", line_no, 1);
      }
      const auto prov = parse_provenance_token(cols[3]);
      if (!prov) {
        throw ParseError("unknown provenance token \"" + cols[3] + "\"",
                         line_no, 1);
      }
      const std::size_t idx = m.index_of(*a, *b);
      if (*label == PairLabel::Unknown) continue;
      if (m.labels_[idx] != PairLabel::Unknown &&
          m.labels_[idx] != *label) {
        throw ParseError("conflicting duplicate rows for pair", line_no, 1);
      }
      if (m.labels_[idx] == PairLabel::Unknown) {
        m.labels_[idx] = *label;
        m.provenance_[idx] = *prov;
        m.mark_decided(idx);
      }
    }
    if (!saw_header) throw ParseError("empty pair-matrix file", 1, 1);
    return m;
  }

  bool same_labels(const PairMatrix& other) const {
    return labels_ == other.labels_;
  }

 private:
  void mark_decided(std::size_t index) {
    --unknown_count_;
    for (std::size_t i = index + 1; i <= pair_count_;
         i += i & (~i + 1)) {
      fenwick_[i] -= 1;
    }
  }

  std::vector<ClassId> sorted_;
  std::vector<std::size_t> rank_;
  std::size_t pair_count_ = 0;
  std::size_t unknown_count_ = 0;
  std::vector<PairLabel> labels_;
  std::vector<Provenance> provenance_;
  std::vector<std::size_t> fenwick_;
};

}  // namespace disjax
