#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disjax/errors.hpp"
#include "disjax/iri.hpp"
#include "disjax/knowledge_base.hpp"

namespace disjax {

namespace vocab {
inline constexpr std::string_view kSubClassOf =
    "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kDisjointWith =
    "http://www.w3.org/2002/07/owl#disjointWith";
inline constexpr std::string_view kType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kLabel =
    "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kPrefLabel =
    "http://www.w3.org/2004/02/skos/core#prefLabel";
inline constexpr std::string_view kOwlClass =
    "http://www.w3.org/2002/07/owl#Class";
}  // namespace vocab

/// Predicate IRIs the ingester reacts to. `label_preds` is ordered: earlier
/// entries win when a class carries labels under several properties.
struct VocabularyMap {
  Iri subclass_pred;
  Iri disjoint_pred;
  Iri type_pred;
  std::vector<Iri> label_preds;
  Iri class_marker;

  static VocabularyMap defaults() {
    return VocabularyMap{
        Iri(std::string(vocab::kSubClassOf)),
        Iri(std::string(vocab::kDisjointWith)),
        Iri(std::string(vocab::kType)),
        {Iri(std::string(vocab::kLabel)), Iri(std::string(vocab::kPrefLabel))},
        Iri(std::string(vocab::kOwlClass))};
  }
};

/// One RDF term as parsed from a statement.
struct Term {
  enum class Kind { IriRef, BlankNode, Literal };
  Kind kind = Kind::IriRef;
  std::string value;     // IRI text or blank node label or literal lexical form
  std::string lang;      // literal language tag, may be empty
  std::string datatype;  // literal datatype IRI, may be empty
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;
};

/// Ingestion accounting. Every syntactically valid statement is either
/// counted in exactly one `consumed_*` bucket or in `ignored`; blank-node
/// statements and soft semantic errors are also tracked separately (both are
/// subsets of `ignored`).
struct ParseReport {
  std::uint64_t total_statements = 0;
  std::uint64_t consumed_subclass = 0;
  std::uint64_t consumed_disjoint = 0;
  std::uint64_t consumed_type = 0;
  std::uint64_t consumed_label = 0;
  std::uint64_t consumed_class_marker = 0;
  std::uint64_t ignored = 0;
  std::uint64_t skipped_blank_nodes = 0;
  std::uint64_t dropped_type_statements = 0;
  std::uint64_t dropped_label_statements = 0;
  std::vector<std::string> semantic_errors;

  std::uint64_t consumed_total() const {
    return consumed_subclass + consumed_disjoint + consumed_type +
           consumed_label + consumed_class_marker;
  }
};

namespace detail {

class NtLine {
 public:
  NtLine(std::string_view text, std::size_t line_no)
      : text_(text), line_(line_no) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  std::size_t column() const { return pos_ + 1; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, column());
  }

  [[noreturn]] void fail_at(const std::string& message, std::size_t col) const {
    throw ParseError(message, line_, col);
  }

  Term parse_subject() {
    skip_ws();
    if (at_end()) fail("expected subject");
    if (peek() == '<') return parse_iriref();
    if (peek() == '_') return parse_blank();
    fail("expected IRI or blank node as subject");
  }

  Term parse_predicate() {
    skip_ws();
    if (at_end()) fail("expected predicate");
    if (peek() == '<') return parse_iriref();
    fail("expected IRI as predicate");
  }

  Term parse_object() {
    skip_ws();
    if (at_end()) fail("expected object");
    if (peek() == '<') return parse_iriref();
    if (peek() == '_') return parse_blank();
    if (peek() == '"') return parse_literal();
    fail("expected IRI, blank node, or literal as object");
  }

  void parse_terminator() {
    skip_ws();
    if (at_end() || peek() != '.') fail("expected '.' terminating statement");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected content after '.'");
  }

 private:
  Term parse_iriref() {
    const std::size_t start_col = column();
    ++pos_;  // consume '<'
    std::string out;
    while (true) {
      if (at_end()) fail_at("unterminated IRI", start_col);
      const char c = text_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '<' || c == '"') fail("'" + std::string(1, c) + "' in IRI");
      if (c == '\\') {
        append_ucs_escape(out, /*in_literal=*/false);
        continue;
      }
      out += c;
      ++pos_;
    }
    std::string why;
    if (!Iri::valid(out, &why)) fail_at("invalid IRI: " + why, start_col);
    Term t;
    t.kind = Term::Kind::IriRef;
    t.value = std::move(out);
    return t;
  }

  Term parse_blank() {
    const std::size_t start_col = column();
    ++pos_;
    if (at_end() || peek() != ':') fail_at("malformed blank node", start_col);
    ++pos_;
    std::string label;
    while (!at_end() && !is_term_break(peek())) {
      label += text_[pos_];
      ++pos_;
    }
    if (label.empty()) fail_at("blank node with empty label", start_col);
    Term t;
    t.kind = Term::Kind::BlankNode;
    t.value = std::move(label);
    return t;
  }

  Term parse_literal() {
    const std::size_t start_col = column();
    ++pos_;  // consume '"'
    std::string out;
    while (true) {
      if (at_end()) fail_at("unterminated literal", start_col);
      const char c = text_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        append_literal_escape(out);
        continue;
      }
      out += c;
      ++pos_;
    }
    Term t;
    t.kind = Term::Kind::Literal;
    t.value = std::move(out);
    if (!at_end() && peek() == '@') {
      ++pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                           peek() == '-')) {
        t.lang += text_[pos_];
        ++pos_;
      }
      if (t.lang.empty()) fail("empty language tag");
    } else if (pos_ + 1 < text_.size() && text_[pos_] == '^' &&
               text_[pos_ + 1] == '^') {
      pos_ += 2;
      if (at_end() || peek() != '<') fail("expected datatype IRI after '^^'");
      t.datatype = parse_iriref().value;
    }
    return t;
  }

  static bool is_term_break(char c) {
    return c == ' ' || c == '\t' || c == '.' || c == '<';
  }

  void append_literal_escape(std::string& out) {
    const std::size_t esc_col = column();
    ++pos_;  // consume '\\'
    if (at_end()) fail_at("dangling escape", esc_col);
    const char c = text_[pos_];
    ++pos_;
    switch (c) {
      case 't': out += '\t'; return;
      case 'b': out += '\b'; return;
      case 'n': out += '\n'; return;
      case 'r': out += '\r'; return;
      case 'f': out += '\f'; return;
      case '"': out += '"'; return;
      case '\'': out += '\''; return;
      case '\\': out += '\\'; return;
      case 'u': append_codepoint(out, read_hex(4, esc_col), esc_col); return;
      case 'U': append_codepoint(out, read_hex(8, esc_col), esc_col); return;
      default: fail_at(std::string("unknown escape '\\") + c + "'", esc_col);
    }
  }

  void append_ucs_escape(std::string& out, bool in_literal) {
    (void)in_literal;
    const std::size_t esc_col = column();
    ++pos_;
    if (at_end()) fail_at("dangling escape", esc_col);
    const char c = text_[pos_];
    ++pos_;
    if (c == 'u') {
      append_codepoint(out, read_hex(4, esc_col), esc_col);
    } else if (c == 'U') {
      append_codepoint(out, read_hex(8, esc_col), esc_col);
    } else {
      fail_at(std::string("unknown escape '\\") + c + "' in IRI", esc_col);
    }
  }

  std::uint32_t read_hex(int digits, std::size_t esc_col) {
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      if (at_end()) fail_at("truncated \\u escape", esc_col);
      const char c = text_[pos_];
      std::uint32_t nibble;
      if (c >= '0' && c <= '9') {
        nibble = static_cast<std::uint32_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        nibble = static_cast<std::uint32_t>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        nibble = static_cast<std::uint32_t>(c - 'A' + 10);
      } else {
        fail("non-hex digit in \\u escape");
      }
      cp = (cp << 4) | nibble;
      ++pos_;
    }
    return cp;
  }

  void append_codepoint(std::string& out, std::uint32_t cp,
                        std::size_t esc_col) {
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
      fail_at("escape is not a Unicode scalar value", esc_col);
    }
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xc0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xe0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
      out += static_cast<char>(0xf0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    }
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one N-Triples statement. Returns nullopt for blank and
/// comment-only lines; throws ParseError on malformed input.
inline std::optional<Triple> parse_ntriples_line(std::string_view line,
                                                 std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  detail::NtLine cursor(line, line_no);
  cursor.skip_ws();
  if (cursor.at_end() || cursor.peek() == '#') return std::nullopt;
  Triple t;
  t.subject = cursor.parse_subject();
  t.predicate = cursor.parse_predicate();
  t.object = cursor.parse_object();
  cursor.parse_terminator();
  return t;
}

/// Streaming N-Triples ingestion. Single pass over the stream with deferred
/// resolution: rdf:type objects and label subjects are matched against the
/// class set only once the whole stream has been read, so statement order
/// never matters.
inline KnowledgeBase parse_ntriples(std::istream& in, const VocabularyMap& vm,
                                    ParseReport* report = nullptr) {
  struct PendingType {
    std::string subject;
    std::string object;
  };
  struct PendingLabel {
    std::string subject;
    std::string text;
    std::string lang;
    int source_rank;
  };

  ParseReport local;
  ParseReport& rep = report ? *report : local;
  rep = ParseReport{};

  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::pair<std::string, std::string>> disjoints;
  std::vector<std::string> marked_classes;
  std::vector<PendingType> pending_types;
  std::vector<PendingLabel> pending_labels;

  auto label_rank = [&vm](std::string_view pred) -> std::optional<int> {
    for (std::size_t i = 0; i < vm.label_preds.size(); ++i) {
      if (vm.label_preds[i].str() == pred) return static_cast<int>(i);
    }
    return std::nullopt;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::optional<Triple> parsed = parse_ntriples_line(line, line_no);
    if (!parsed) continue;
    const Triple& t = *parsed;
    ++rep.total_statements;

    if (t.subject.kind == Term::Kind::BlankNode ||
        t.object.kind == Term::Kind::BlankNode) {
      ++rep.skipped_blank_nodes;
      ++rep.ignored;
      continue;
    }

    const std::string& pred = t.predicate.value;
    const bool object_is_literal = t.object.kind == Term::Kind::Literal;

    if (pred == vm.subclass_pred.str() || pred == vm.disjoint_pred.str()) {
      if (object_is_literal) {
        rep.semantic_errors.push_back(
            "line " + std::to_string(line_no) + ": literal object for <" +
            pred + ">; statement skipped");
        ++rep.ignored;
        continue;
      }
      if (pred == vm.subclass_pred.str()) {
        edges.emplace_back(t.subject.value, t.object.value);
        ++rep.consumed_subclass;
      } else {
        if (t.subject.value == t.object.value) {
          rep.semantic_errors.push_back(
              "line " + std::to_string(line_no) +
              ": class declared disjoint with itself; statement skipped");
          ++rep.ignored;
          continue;
        }
        disjoints.emplace_back(t.subject.value, t.object.value);
        ++rep.consumed_disjoint;
      }
      continue;
    }

    if (pred == vm.type_pred.str()) {
      if (object_is_literal) {
        rep.semantic_errors.push_back("line " + std::to_string(line_no) +
                                      ": literal object for <" + pred +
                                      ">; statement skipped");
        ++rep.ignored;
        continue;
      }
      if (t.object.value == vm.class_marker.str()) {
        marked_classes.push_back(t.subject.value);
        ++rep.consumed_class_marker;
      } else {
        pending_types.push_back({t.subject.value, t.object.value});
      }
      continue;
    }

    if (auto rank = label_rank(pred)) {
      if (!object_is_literal) {
        rep.semantic_errors.push_back("line " + std::to_string(line_no) +
                                      ": non-literal object for <" + pred +
                                      ">; statement skipped");
        ++rep.ignored;
        continue;
      }
      pending_labels.push_back(
          {t.subject.value, t.object.value, t.object.lang, *rank});
      continue;
    }

    ++rep.ignored;
  }
  if (in.bad()) {
    throw ParseError("stream read failure", line_no, 1);
  }

  KnowledgeBase kb;
  for (const auto& [child, parent] : edges) {
    kb.add_subclass(kb.intern(Iri(child)), kb.intern(Iri(parent)));
  }
  for (const auto& [a, b] : disjoints) {
    kb.add_disjoint(kb.intern(Iri(a)), kb.intern(Iri(b)));
  }
  for (const std::string& c : marked_classes) kb.intern(Iri(c));

  for (const PendingType& pt : pending_types) {
    if (auto cls = kb.find(pt.object)) {
      kb.add_instance(Iri(pt.subject), *cls);
      ++rep.consumed_type;
    } else {
      ++rep.dropped_type_statements;
      ++rep.ignored;
    }
  }
  for (const PendingLabel& pl : pending_labels) {
    if (auto cls = kb.find(pl.subject)) {
      kb.add_label(*cls, pl.text, pl.lang, pl.source_rank);
      ++rep.consumed_label;
    } else {
      ++rep.dropped_label_statements;
      ++rep.ignored;
    }
  }
  return kb;
}

}  // namespace disjax
