#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "disjax/errors.hpp"

namespace disjax {

enum class Strategy { Naive, TaskDescription, FewShot };
enum class QaMode { Positive, Negative };

struct PromptSpec {
  Strategy strategy = Strategy::Naive;
  QaMode qa_mode = QaMode::Positive;
};

inline std::string_view strategy_token(Strategy s) {
  switch (s) {
    case Strategy::Naive: return "naive";
    case Strategy::TaskDescription: return "task";
    case Strategy::FewShot: return "fewshot";
  }
  throw ContractViolation("unreachable strategy");
}

inline std::optional<Strategy> parse_strategy_token(std::string_view s) {
  if (s == "naive") return Strategy::Naive;
  if (s == "task") return Strategy::TaskDescription;
  if (s == "fewshot") return Strategy::FewShot;
  return std::nullopt;
}

inline std::string_view qa_mode_token(QaMode m) {
  switch (m) {
    case QaMode::Positive: return "positive";
    case QaMode::Negative: return "negative";
  }
  throw ContractViolation("unreachable qa mode");
}

inline std::optional<QaMode> parse_qa_mode_token(std::string_view s) {
  if (s == "positive") return QaMode::Positive;
  if (s == "negative") return QaMode::Negative;
  return std::nullopt;
}

namespace templates {

inline constexpr std::string_view kNaive = "Answer only \"yes\" or \"no\".";

inline constexpr std::string_view kTaskDescription =
    "This is a question about ontological disjointness, answer only with "
    "\"yes\" or \"no\"";

inline constexpr std::string_view kFewShot =
    "This is a question about ontological disjointness, answer only with "
    "\"yes\" or \"no\".\n"
    "Examples of disjoint are: \"person\" and \"file system\", \"tower\" and "
    "\"person\", \"place\" and \"agent\", \"continent\" and \"sea\", "
    "\"baseball league\" and \"bowling league\", \"planet\" and \"star\".\n"
    "Examples of not disjoint are: \"basketball player\" and \"baseball "
    "player\", \"means of transportation\" and \"reptile\", \"garden\" and "
    "\"historic place\", \"president\" and \"beauty queen\", \"castle\" and "
    "\"prison\".";

}  // namespace templates

struct RenderedPrompt {
  std::string instruction;
  std::string question;
};

/// Renders the instruction and question texts for one pair of class labels.
inline RenderedPrompt render_prompt(const PromptSpec& spec,
                                    std::string_view label_a,
                                    std::string_view label_b) {
  if (label_a.empty() || label_b.empty()) {
    throw ValidationError("class labels in a prompt must be non-empty");
  }
  RenderedPrompt out;
  switch (spec.strategy) {
    case Strategy::Naive:
      out.instruction = templates::kNaive;
      break;
    case Strategy::TaskDescription:
      out.instruction = templates::kTaskDescription;
      break;
    case Strategy::FewShot:
      out.instruction = templates::kFewShot;
      break;
  }
  switch (spec.qa_mode) {
    case QaMode::Positive:
      out.question = "Is the class " + std::string(label_a) +
                     " disjoint from " + std::string(label_b) + "?";
      break;
    case QaMode::Negative:
      out.question = "Can a " + std::string(label_a) + " be a " +
                     std::string(label_b) + "?";
      break;
  }
  return out;
}

enum class VerdictValue { Disjoint, NotDisjoint };

inline std::string_view verdict_token(VerdictValue v) {
  return v == VerdictValue::Disjoint ? "disjoint" : "not_disjoint";
}

inline std::optional<VerdictValue> parse_verdict_token(std::string_view s) {
  if (s == "disjoint") return VerdictValue::Disjoint;
  if (s == "not_disjoint") return VerdictValue::NotDisjoint;
  return std::nullopt;
}

/// A resolved yes/no outcome for one queried pair.
struct Verdict {
  VerdictValue value = VerdictValue::NotDisjoint;
  std::string raw_response;
  int ambiguous_retries = 0;
  bool from_fallback = false;
  bool from_cache = false;
};

/// Normalizes a raw model response and maps it onto a verdict: trim,
/// lowercase, strip leading/trailing punctuation and quotes, take the first
/// whitespace-delimited token. "yes"/"no" invert between QA modes; anything
/// else is ambiguous (nullopt).
inline std::optional<VerdictValue> parse_verdict(std::string_view raw,
                                                 QaMode mode) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  auto is_punct = [](char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
  };

  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_space(raw[begin])) ++begin;
  while (end > begin && is_space(raw[end - 1])) --end;

  std::string text;
  text.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    char c = raw[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    text += c;
  }

  std::size_t lo = 0;
  std::size_t hi = text.size();
  while (lo < hi && is_punct(text[lo])) ++lo;
  while (hi > lo && is_punct(text[hi - 1])) --hi;

  std::size_t token_end = lo;
  while (token_end < hi && !is_space(text[token_end])) ++token_end;
  const std::string_view token =
      std::string_view(text).substr(lo, token_end - lo);

  const bool yes = token == "yes";
  const bool no = token == "no";
  if (!yes && !no) return std::nullopt;
  if (mode == QaMode::Positive) {
    return yes ? VerdictValue::Disjoint : VerdictValue::NotDisjoint;
  }
  return yes ? VerdictValue::NotDisjoint : VerdictValue::Disjoint;
}

}  // namespace disjax
