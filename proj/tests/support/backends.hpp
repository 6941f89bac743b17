#pragma once

#include <string>
#include <vector>

#include "disjax/errors.hpp"
#include "disjax/oracle.hpp"
#include "disjax/prompt.hpp"

namespace testsupport {

/// Replays a fixed sequence of raw responses, then repeats the last one.
class ScriptedBackend : public disjax::ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  std::string complete(const disjax::ChatRequest&) override {
    ++calls;
    const std::size_t idx =
        next_ < responses_.size() ? next_ : responses_.size() - 1;
    ++next_;
    return responses_[idx];
  }

  int calls = 0;

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

/// Always claims disjointness, whichever way the question is asked.
class AdversarialDisjointBackend : public disjax::ChatBackend {
 public:
  std::string complete(const disjax::ChatRequest& request) override {
    return request.spec.qa_mode == disjax::QaMode::Positive ? "yes" : "no";
  }
};

/// Answers Disjoint iff the first label is lexicographically smaller; the
/// most order-sensitive oracle possible (symmetric consistency 0).
class AntisymmetricBackend : public disjax::ChatBackend {
 public:
  std::string complete(const disjax::ChatRequest& request) override {
    const bool disjoint = request.label_a < request.label_b;
    if (request.spec.qa_mode == disjax::QaMode::Positive) {
      return disjoint ? "yes" : "no";
    }
    return disjoint ? "no" : "yes";
  }
};

/// Fails transport `failures` times, then answers `answer` forever.
class FlakyBackend : public disjax::ChatBackend {
 public:
  FlakyBackend(int failures, std::string answer)
      : failures_(failures), answer_(std::move(answer)) {}

  std::string complete(const disjax::ChatRequest&) override {
    if (failures_ > 0) {
      --failures_;
      throw disjax::TransportError("injected failure");
    }
    return answer_;
  }

 private:
  int failures_;
  std::string answer_;
};

}  // namespace testsupport
