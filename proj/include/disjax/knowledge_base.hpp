#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "disjax/errors.hpp"
#include "disjax/iri.hpp"

namespace disjax {

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool is_english_tag(std::string_view lang) {
  if (lang.size() < 2) return false;
  const char a = static_cast<char>(lang[0] | 0x20);
  const char b = static_cast<char>(lang[1] | 0x20);
  if (a != 'e' || b != 'n') return false;
  return lang.size() == 2 || lang[2] == '-';
}

/// Splits a CamelCase local name into lowercase words. Digits stay glued to
/// the word before them; '_' and '-' act as separators.
inline std::string camel_to_words(std::string_view s) {
  auto is_upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto is_lower = [](char c) { return c >= 'a' && c <= 'z'; };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };

  std::string out;
  out.reserve(s.size() + 8);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '_' || c == '-') {
      if (!out.empty() && out.back() != ' ') out += ' ';
      continue;
    }
    if (is_upper(c) && !out.empty() && out.back() != ' ') {
      const char prev = s[i - 1];
      const bool next_lower = i + 1 < s.size() && is_lower(s[i + 1]);
      if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) {
        out += ' ';
      }
    }
    out += is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  std::size_t start = 0;
  while (start < out.size() && out[start] == ' ') ++start;
  return out.substr(start);
}

}  // namespace detail

/// Derives a display label from an IRI: local name (after the last '/' or
/// '#'), camel-case split, lowercased.
inline std::string derive_label(std::string_view iri) {
  const std::size_t cut = iri.find_last_of("/#");
  std::string_view local =
      (cut == std::string_view::npos) ? iri : iri.substr(cut + 1);
  if (local.empty()) local = iri;
  std::string words = detail::camel_to_words(local);
  if (words.empty()) words = detail::ascii_lower(local);
  return words;
}

/// In-memory model of the ontology: interned classes, subclass edges,
/// asserted disjointness, instance typings, and display labels. Built
/// single-threaded; immutable afterwards and safe to read concurrently.
class KnowledgeBase {
 public:
  /// Idempotently interns an IRI as a class and returns its handle.
  ClassId intern(const Iri& iri) {
    auto it = index_.find(iri.str());
    if (it != index_.end()) return it->second;
    const ClassId id{static_cast<std::uint32_t>(iris_.size())};
    index_.emplace(iri.str(), id);
    iris_.push_back(iri.str());
    labels_.push_back({});
    return id;
  }

  std::optional<ClassId> find(std::string_view iri) const {
    auto it = index_.find(std::string(iri));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& iri_of(ClassId id) const {
    check_id(id);
    return iris_[id.value];
  }

  std::size_t class_count() const { return iris_.size(); }

  void add_subclass(ClassId child, ClassId parent) {
    check_id(child);
    check_id(parent);
    subclass_edges_.emplace(child, parent);
  }

  void add_disjoint(ClassId a, ClassId b) {
    check_id(a);
    check_id(b);
    if (a == b) {
      throw ValidationError("disjointness of a class with itself is not a "
                            "statement: " + iri_of(a));
    }
    asserted_disjoint_.emplace(std::min(a, b), std::max(a, b));
  }

  void add_instance(const Iri& individual, ClassId type) {
    check_id(type);
    instance_types_[individual.str()].insert(type);
  }

  /// Records a label candidate. `source_rank` orders labeling properties
  /// (lower wins, e.g. rdfs:label before skos:prefLabel); among candidates of
  /// equal rank an English-tagged text wins, then the lexicographically
  /// smallest text.
  void add_label(ClassId c, std::string_view text, std::string_view lang = "",
                 int source_rank = 0) {
    check_id(c);
    LabelChoice candidate{source_rank, detail::is_english_tag(lang) ? 0 : 1,
                          std::string(text)};
    LabelChoice& current = labels_[c.value];
    if (current.text.empty() || candidate < current) {
      current = std::move(candidate);
    }
  }

  bool has_stored_label(ClassId c) const {
    check_id(c);
    return !labels_[c.value].text.empty();
  }

  /// Lowercased stored label if one exists, else a label derived from the
  /// IRI local name. Total and deterministic.
  std::string label_of(ClassId c) const {
    check_id(c);
    const LabelChoice& choice = labels_[c.value];
    if (!choice.text.empty()) return detail::ascii_lower(choice.text);
    return derive_label(iris_[c.value]);
  }

  const std::set<std::pair<ClassId, ClassId>>& subclass_edges() const {
    return subclass_edges_;
  }

  /// Pairs normalized to (min, max) by handle.
  const std::set<std::pair<ClassId, ClassId>>& asserted_disjoint() const {
    return asserted_disjoint_;
  }

  const std::map<std::string, std::set<ClassId>>& instance_types() const {
    return instance_types_;
  }

  /// Class handles sorted by IRI text; the canonical class order used for
  /// pair enumeration and every serialized output.
  std::vector<ClassId> classes_sorted_by_iri() const {
    std::vector<ClassId> ids;
    ids.reserve(iris_.size());
    for (std::uint32_t i = 0; i < iris_.size(); ++i) ids.push_back(ClassId{i});
    std::sort(ids.begin(), ids.end(), [this](ClassId a, ClassId b) {
      return iris_[a.value] < iris_[b.value];
    });
    return ids;
  }

  /// Content equality over IRIs, independent of interning order.
  bool operator==(const KnowledgeBase& other) const {
    return canonical_view() == other.canonical_view();
  }

  struct CanonicalView {
    std::set<std::string> classes;
    std::set<std::pair<std::string, std::string>> subclass_edges;
    std::set<std::pair<std::string, std::string>> asserted_disjoint;
    std::map<std::string, std::set<std::string>> instance_types;
    std::map<std::string, std::string> labels;

    bool operator==(const CanonicalView&) const = default;
  };

  CanonicalView canonical_view() const {
    CanonicalView v;
    for (const std::string& iri : iris_) v.classes.insert(iri);
    for (const auto& [child, parent] : subclass_edges_) {
      v.subclass_edges.emplace(iri_of(child), iri_of(parent));
    }
    for (const auto& [a, b] : asserted_disjoint_) {
      std::string ia = iri_of(a);
      std::string ib = iri_of(b);
      if (ib < ia) std::swap(ia, ib);
      v.asserted_disjoint.emplace(std::move(ia), std::move(ib));
    }
    for (const auto& [individual, types] : instance_types_) {
      std::set<std::string>& bucket = v.instance_types[individual];
      for (ClassId t : types) bucket.insert(iri_of(t));
    }
    for (std::uint32_t i = 0; i < iris_.size(); ++i) {
      if (!labels_[i].text.empty()) v.labels[iris_[i]] = label_of(ClassId{i});
    }
    return v;
  }

 private:
  struct LabelChoice {
    int source_rank = 0;
    int non_english = 1;
    std::string text;

    bool operator<(const LabelChoice& other) const {
      if (source_rank != other.source_rank) {
        return source_rank < other.source_rank;
      }
      if (non_english != other.non_english) {
        return non_english < other.non_english;
      }
      return text < other.text;
    }
  };

  void check_id(ClassId id) const {
    if (id.value >= iris_.size()) {
      throw ContractViolation("ClassId " + std::to_string(id.value) +
                              " is not interned in this knowledge base");
    }
  }

  std::unordered_map<std::string, ClassId> index_;
  std::vector<std::string> iris_;
  std::vector<LabelChoice> labels_;
  std::set<std::pair<ClassId, ClassId>> subclass_edges_;
  std::set<std::pair<ClassId, ClassId>> asserted_disjoint_;
  std::map<std::string, std::set<ClassId>> instance_types_;
};

}  // namespace disjax
