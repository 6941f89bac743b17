#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "disjax/errors.hpp"
#include "disjax/oracle.hpp"

namespace disjax {

/// Request body for the chat-completions wire contract: the instruction goes
/// into a system message (or is prepended to the user message, depending on
/// configuration), the question into a user message.
inline std::string build_chat_request_body(const OracleConfig& config,
                                           const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (config.instruction_placement ==
      OracleConfig::InstructionPlacement::SystemMessage) {
    messages.push_back({{"role", "system"}, {"content", request.instruction}});
    messages.push_back({{"role", "user"}, {"content", request.question}});
  } else {
    messages.push_back(
        {{"role", "user"},
         {"content", request.instruction + "\n" + request.question}});
  }
  nlohmann::json body{{"model", config.model_name},
                      {"temperature", config.temperature},
                      {"messages", std::move(messages)}};
  return body.dump();
}

/// Pulls the first choice's message content out of a chat-completions
/// response body.
inline std::string extract_chat_content(const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) {
    throw ProtocolError("endpoint response is not JSON: " +
                        body.substr(0, 200));
  }
  if (!j.contains("choices") || !j["choices"].is_array() ||
      j["choices"].empty()) {
    throw ProtocolError("endpoint response has no choices: " +
                        body.substr(0, 200));
  }
  const auto& first = j["choices"][0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw ProtocolError("endpoint response has no message content: " +
                        body.substr(0, 200));
  }
  return first["message"]["content"].get<std::string>();
}

struct EndpointParts {
  std::string host;
  int port = 80;
  std::string path_prefix;
};

inline EndpointParts parse_endpoint_url(const std::string& url) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind("https://", 0) == 0) {
    throw ConfigError(
        "https endpoints are not supported; point the oracle at a plain-http "
        "server (local model servers usually are)");
  }
  if (url.rfind(kScheme, 0) != 0) {
    throw ConfigError("endpoint_url must start with http://: " + url);
  }
  std::string rest = url.substr(kScheme.size());
  EndpointParts parts;
  const std::size_t slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) {
    parts.path_prefix = rest.substr(slash);
    while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/') {
      parts.path_prefix.pop_back();
    }
  }
  const std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    parts.host = authority;
  } else {
    parts.host = authority.substr(0, colon);
    try {
      parts.port = std::stoi(authority.substr(colon + 1));
    } catch (...) {
      throw ConfigError("bad port in endpoint_url: " + url);
    }
  }
  if (parts.host.empty()) throw ConfigError("empty host in endpoint_url: " + url);
  return parts;
}

/// Talks to a chat-completions endpoint over HTTP. Bearer credentials come
/// from OracleConfig::api_key (the CLI fills it from DISJAX_API_KEY).
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(OracleConfig config)
      : config_(std::move(config)),
        endpoint_(parse_endpoint_url(config_.endpoint_url)) {}

  std::string complete(const ChatRequest& request) override {
    httplib::Client client(endpoint_.host, endpoint_.port);
    const auto timeout_s = static_cast<time_t>(config_.timeout_seconds);
    const auto timeout_us = static_cast<time_t>(
        (config_.timeout_seconds - static_cast<double>(timeout_s)) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    const std::string body = build_chat_request_body(config_, request);
    auto result = client.Post(endpoint_.path_prefix + "/chat/completions",
                              headers, body, "application/json");
    if (!result) {
      throw TransportError("cannot reach " + config_.endpoint_url + ": " +
                           httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
      throw ProtocolError("endpoint returned HTTP " +
                          std::to_string(result->status) + ": " +
                          result->body.substr(0, 200));
    }
    return extract_chat_content(result->body);
  }

 private:
  OracleConfig config_;
  EndpointParts endpoint_;
};

}  // namespace disjax
