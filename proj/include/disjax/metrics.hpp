#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "disjax/errors.hpp"
#include "disjax/knowledge_base.hpp"
#include "disjax/oracle.hpp"
#include "disjax/pair_matrix.hpp"
#include "disjax/prompt.hpp"

namespace disjax {

/// Two-class confusion with Disjoint as the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fn + fp + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Scores over gold labels. Ratios with a zero denominator are absent, never
/// reported as 0. `f1` is the Disjoint-positive F1 (`f1_disjoint` in
/// reports); `ndf1` the NotDisjoint-positive one.
struct MetricsReport {
  std::optional<double> dr;
  std::optional<double> ndf1;
  std::optional<double> f1;
  std::optional<double> sc;
  std::optional<double> accuracy;
  ConfusionCounts counts;
  std::size_t n_pairs = 0;
  std::size_t n_sc_pairs = 0;
};

/// Counts the confusion between gold labels (Disjoint / NotDisjoint rows
/// only) and predictions. A gold pair without a prediction is an error.
inline ConfusionCounts confusion(
    const PairMatrix& gold, const KnowledgeBase& kb,
    const std::function<std::optional<VerdictValue>(ClassId, ClassId)>&
        predicted) {
  ConfusionCounts counts;
  for (std::size_t idx = 0; idx < gold.pair_count(); ++idx) {
    const PairLabel label = gold.label_at(idx);
    if (label != PairLabel::Disjoint && label != PairLabel::NotDisjoint) {
      continue;
    }
    const auto [a, b] = gold.pair_at(idx);
    const auto prediction = predicted(a, b);
    if (!prediction) {
      throw InputError("no prediction for gold pair <" + kb.iri_of(a) +
                       "> / <" + kb.iri_of(b) + ">");
    }
    const bool gold_disjoint = label == PairLabel::Disjoint;
    const bool pred_disjoint = *prediction == VerdictValue::Disjoint;
    if (gold_disjoint && pred_disjoint) ++counts.tp;
    if (gold_disjoint && !pred_disjoint) ++counts.fn;
    if (!gold_disjoint && pred_disjoint) ++counts.fp;
    if (!gold_disjoint && !pred_disjoint) ++counts.tn;
  }
  return counts;
}

/// DR, F1, NDF1, and accuracy from confusion counts. SC is not part of this
/// computation; it comes from both-order querying.
inline MetricsReport metrics(const ConfusionCounts& c) {
  MetricsReport r;
  r.counts = c;
  r.n_pairs = static_cast<std::size_t>(c.total());
  auto ratio = [](std::uint64_t num,
                  std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.dr = ratio(c.tp, c.tp + c.fn);
  r.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  r.ndf1 = ratio(2 * c.tn, 2 * c.tn + c.fn + c.fp);
  r.accuracy = ratio(c.tp + c.tn, c.total());
  return r;
}

/// Queries every pair in both orders and reports the fraction whose two
/// effective verdicts agree.
inline double symmetric_consistency(
    const std::vector<std::pair<std::string, std::string>>& label_pairs,
    LlmOracle& oracle, const PromptSpec& spec) {
  if (label_pairs.empty()) {
    throw InputError("symmetric consistency over an empty pair set");
  }
  std::size_t agree = 0;
  for (const auto& [a, b] : label_pairs) {
    const Verdict forward = oracle.query(spec, a, b);
    const Verdict backward = oracle.query(spec, b, a);
    if (forward.value == backward.value) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(label_pairs.size());
}

/// Full evaluation against a gold matrix: canonical-order verdicts feed the
/// confusion metrics, both-order verdicts feed SC.
inline MetricsReport report(const KnowledgeBase& kb, const PairMatrix& gold,
                            LlmOracle& oracle, const PromptSpec& spec) {
  std::vector<std::pair<std::string, std::string>> label_pairs;
  for (std::size_t idx = 0; idx < gold.pair_count(); ++idx) {
    const PairLabel label = gold.label_at(idx);
    if (label != PairLabel::Disjoint && label != PairLabel::NotDisjoint) {
      continue;
    }
    const auto [a, b] = gold.pair_at(idx);
    label_pairs.emplace_back(kb.label_of(a), kb.label_of(b));
  }
  if (label_pairs.empty()) throw InputError("no gold pairs");

  const ConfusionCounts counts =
      confusion(gold, kb, [&](ClassId a, ClassId b) {
        return oracle.query(spec, kb.label_of(a), kb.label_of(b)).value;
      });
  MetricsReport r = metrics(counts);
  r.sc = symmetric_consistency(label_pairs, oracle, spec);
  r.n_sc_pairs = label_pairs.size();
  return r;
}

inline std::string metric_cell(const std::optional<double>& value) {
  if (!value) return "na";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *value);
  return buf;
}

/// One row in the report TSV:
/// model, prompt, qa, dr, ndf1, f1, sc, accuracy.
inline std::string metrics_tsv_row(const MetricsReport& r,
                                   const std::string& model,
                                   const PromptSpec& spec) {
  std::string row;
  row += model;
  row += '\t';
  row += strategy_token(spec.strategy);
  row += '\t';
  row += qa_mode_token(spec.qa_mode);
  row += '\t';
  row += metric_cell(r.dr);
  row += '\t';
  row += metric_cell(r.ndf1);
  row += '\t';
  row += metric_cell(r.f1);
  row += '\t';
  row += metric_cell(r.sc);
  row += '\t';
  row += metric_cell(r.accuracy);
  return row;
}

inline nlohmann::json metrics_to_json(const MetricsReport& r,
                                      const std::string& model,
                                      const PromptSpec& spec) {
  nlohmann::json j;
  j["model"] = model;
  j["prompt"] = std::string(strategy_token(spec.strategy));
  j["qa"] = std::string(qa_mode_token(spec.qa_mode));
  auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("dr", r.dr);
  put("ndf1", r.ndf1);
  put("f1_disjoint", r.f1);
  put("sc", r.sc);
  put("accuracy", r.accuracy);
  j["counts"] = {{"tp", r.counts.tp},
                 {"fn", r.counts.fn},
                 {"fp", r.counts.fp},
                 {"tn", r.counts.tn}};
  j["n_pairs"] = r.n_pairs;
  j["n_sc_pairs"] = r.n_sc_pairs;
  return j;
}

}  // namespace disjax
