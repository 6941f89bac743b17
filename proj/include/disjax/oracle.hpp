#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

#include "disjax/errors.hpp"
#include "disjax/knowledge_base.hpp"
#include "disjax/prompt.hpp"

namespace disjax {

/// Endpoint and policy knobs for the yes/no oracle.
struct OracleConfig {
  std::string endpoint_url;
  std::string model_name = "mock";
  double temperature = 0.0;
  int max_retries = 2;
  double timeout_seconds = 30.0;
  std::string cache_path;  // empty: in-memory cache only
  enum class AmbiguousFallback { NotDisjoint, Error };
  AmbiguousFallback ambiguous_fallback = AmbiguousFallback::NotDisjoint;
  enum class InstructionPlacement { SystemMessage, UserMessage };
  InstructionPlacement instruction_placement =
      InstructionPlacement::SystemMessage;
  std::string api_key;  // bearer token, usually from DISJAX_API_KEY
};

/// Everything a backend needs to answer one question.
struct ChatRequest {
  PromptSpec spec;
  std::string instruction;
  std::string question;
  std::string label_a;
  std::string label_b;
};

/// Produces a raw model response for one request. Implementations throw
/// TransportError / ProtocolError on failure.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct TranscriptRecord {
  std::string strategy;
  std::string qa_mode;
  std::string label_a;
  std::string label_b;
  std::string raw_response;
  std::string verdict;
  std::string timestamp;
};

inline std::string utc_timestamp_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

/// Append-only JSON-lines transcript keyed by (strategy, qa_mode, label_a,
/// label_b). Replay returns the recorded response verbatim; appends are
/// serialized and flushed per record.
class TranscriptCache {
 public:
  TranscriptCache() = default;

  explicit TranscriptCache(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        throw ParseError("transcript cache line is not JSON", line_no, 1);
      }
      TranscriptRecord rec;
      rec.strategy = j.value("strategy", "");
      rec.qa_mode = j.value("qa_mode", "");
      rec.label_a = j.value("label_a", "");
      rec.label_b = j.value("label_b", "");
      rec.raw_response = j.value("raw_response", "");
      rec.verdict = j.value("verdict", "");
      rec.timestamp = j.value("timestamp", "");
      records_[key_of(rec)] = rec;
    }
  }

  std::optional<TranscriptRecord> lookup(const PromptSpec& spec,
                                         std::string_view label_a,
                                         std::string_view label_b) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = records_.find(key_of(spec, label_a, label_b));
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  void append(const TranscriptRecord& rec) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_[key_of(rec)] = rec;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw ConfigError("cannot open transcript cache: " + path_);
    nlohmann::json j{{"strategy", rec.strategy},
                     {"qa_mode", rec.qa_mode},
                     {"label_a", rec.label_a},
                     {"label_b", rec.label_b},
                     {"raw_response", rec.raw_response},
                     {"verdict", rec.verdict},
                     {"timestamp", rec.timestamp}};
    out << j.dump() << '\n';
    out.flush();
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_.size();
  }

 private:
  using Key = std::tuple<std::string, std::string, std::string, std::string>;

  static Key key_of(const TranscriptRecord& rec) {
    return {rec.strategy, rec.qa_mode, rec.label_a, rec.label_b};
  }

  static Key key_of(const PromptSpec& spec, std::string_view label_a,
                    std::string_view label_b) {
    return {std::string(strategy_token(spec.strategy)),
            std::string(qa_mode_token(spec.qa_mode)), std::string(label_a),
            std::string(label_b)};
  }

  std::string path_;
  mutable std::mutex mutex_;
  std::map<Key, TranscriptRecord> records_;
};

/// The query engine: consults the transcript cache, renders the prompt,
/// re-asks ambiguous answers up to `max_retries` times, applies the fallback
/// policy on exhaustion, and appends the resolved record to the cache.
class LlmOracle {
 public:
  LlmOracle(std::shared_ptr<ChatBackend> backend, OracleConfig config,
            std::shared_ptr<TranscriptCache> cache = nullptr)
      : backend_(std::move(backend)),
        config_(std::move(config)),
        cache_(cache ? std::move(cache)
                     : std::make_shared<TranscriptCache>(config_.cache_path)) {}

  const OracleConfig& config() const { return config_; }
  TranscriptCache& cache() { return *cache_; }

  Verdict query(const PromptSpec& spec, const std::string& label_a,
                const std::string& label_b) {
    if (auto hit = cache_->lookup(spec, label_a, label_b)) {
      const auto value = parse_verdict_token(hit->verdict);
      if (!value) {
        throw ParseError("transcript cache holds unknown verdict token \"" +
                             hit->verdict + "\"",
                         1, 1);
      }
      Verdict v;
      v.value = *value;
      v.raw_response = hit->raw_response;
      v.from_cache = true;
      return v;
    }

    const RenderedPrompt prompt = render_prompt(spec, label_a, label_b);
    ChatRequest request{spec, prompt.instruction, prompt.question, label_a,
                        label_b};

    Verdict verdict;
    int ambiguous_seen = 0;
    int transport_failures = 0;
    while (true) {
      std::string raw;
      try {
        raw = backend_->complete(request);
      } catch (const TransportError& e) {
        ++transport_failures;
        if (transport_failures > config_.max_retries) {
          throw TransportError(std::string(e.what()) + " (pair \"" + label_a +
                               "\" / \"" + label_b + "\")");
        }
        continue;
      }
      verdict.raw_response = raw;
      if (auto value = parse_verdict(raw, spec.qa_mode)) {
        verdict.value = *value;
        verdict.ambiguous_retries = ambiguous_seen;
        break;
      }
      if (ambiguous_seen >= config_.max_retries) {
        if (config_.ambiguous_fallback ==
            OracleConfig::AmbiguousFallback::Error) {
          throw ProtocolError("oracle answer stayed ambiguous after " +
                              std::to_string(ambiguous_seen + 1) +
                              " attempts (pair \"" + label_a + "\" / \"" +
                              label_b + "\"); last response: " + raw);
        }
        verdict.value = VerdictValue::NotDisjoint;
        verdict.ambiguous_retries = ambiguous_seen;
        verdict.from_fallback = true;
        break;
      }
      ++ambiguous_seen;
    }

    TranscriptRecord rec;
    rec.strategy = strategy_token(spec.strategy);
    rec.qa_mode = qa_mode_token(spec.qa_mode);
    rec.label_a = label_a;
    rec.label_b = label_b;
    rec.raw_response = verdict.raw_response;
    rec.verdict = verdict_token(verdict.value);
    rec.timestamp = utc_timestamp_now();
    cache_->append(rec);
    return verdict;
  }

 private:
  std::shared_ptr<ChatBackend> backend_;
  OracleConfig config_;
  std::shared_ptr<TranscriptCache> cache_;
};

/// Test-double backend that answers from a gold pair labeling. Pairs are
/// keyed by the unordered pair of class labels derived from the gold file's
/// IRIs, so lookups are symmetric by construction.
class MockGoldBackend : public ChatBackend {
 public:
  explicit MockGoldBackend(
      VerdictValue default_verdict = VerdictValue::NotDisjoint)
      : default_verdict_(default_verdict) {}

  /// Loads a gold labeling in the pair-matrix TSV schema. Rows labeled
  /// unknown or conflict are treated as unlisted.
  static MockGoldBackend from_tsv(
      std::istream& in,
      VerdictValue default_verdict = VerdictValue::NotDisjoint) {
    MockGoldBackend mock(default_verdict);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (!saw_header) {
        if (line != "class_a\tclass_b\tlabel\tprovenance") {
          throw ParseError("bad gold TSV header", line_no, 1);
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
      const auto label = parse_label_token_for_gold(cols[2], line_no);
      if (!label) continue;  // unknown / conflict rows are unlisted
      mock.add_pair(derive_label(cols[0]), derive_label(cols[1]), *label,
                    line_no);
    }
    if (!saw_header) throw ParseError("empty gold TSV", 1, 1);
    return mock;
  }

  void add_pair(std::string label_a, std::string label_b, VerdictValue value,
                std::size_t line_no = 0) {
    if (label_b < label_a) std::swap(label_a, label_b);
    auto [it, inserted] =
        gold_.emplace(std::make_pair(std::move(label_a), std::move(label_b)),
                      value);
    if (!inserted && it->second != value) {
      throw InputError("gold file assigns both labels to pair \"" +
                       it->first.first + "\" / \"" + it->first.second +
                       "\" (line " + std::to_string(line_no) + ")");
    }
  }

  std::string complete(const ChatRequest& request) override {
    std::string a = request.label_a;
    std::string b = request.label_b;
    if (b < a) std::swap(a, b);
    VerdictValue value = default_verdict_;
    auto it = gold_.find({a, b});
    if (it != gold_.end()) value = it->second;
    const bool disjoint = value == VerdictValue::Disjoint;
    if (request.spec.qa_mode == QaMode::Positive) {
      return disjoint ? "yes" : "no";
    }
    return disjoint ? "no" : "yes";
  }

 private:
  static std::optional<VerdictValue> parse_label_token_for_gold(
      std::string_view token, std::size_t line_no) {
    const auto label = parse_label_token(token);
    if (!label) {
      throw ParseError("unknown label token \"" + std::string(token) + "\"",
                       line_no, 1);
    }
    if (*label == PairLabel::Disjoint) return VerdictValue::Disjoint;
    if (*label == PairLabel::NotDisjoint) return VerdictValue::NotDisjoint;
    return std::nullopt;
  }

  VerdictValue default_verdict_;
  std::map<std::pair<std::string, std::string>, VerdictValue> gold_;
};

/// Builds a ready-to-query mock oracle from a gold TSV stream.
inline LlmOracle mock_from_gold(
    std::istream& gold_tsv,
    VerdictValue default_verdict = VerdictValue::NotDisjoint,
    OracleConfig config = {}) {
  auto backend =
      std::make_shared<MockGoldBackend>(MockGoldBackend::from_tsv(
          gold_tsv, default_verdict));
  return LlmOracle(std::move(backend), std::move(config));
}

}  // namespace disjax
