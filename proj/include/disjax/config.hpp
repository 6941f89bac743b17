#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "disjax/enrichment.hpp"
#include "disjax/oracle.hpp"
#include "disjax/prompt.hpp"

namespace disjax {

/// Run configuration as loadable from a flat `key = value` file. Every field
/// can also be set from the command line, which wins over the file.
struct Config {
  std::string ontology;
  std::string endpoint_url;
  std::string model_name;
  Strategy strategy = Strategy::Naive;
  QaMode qa_mode = QaMode::Positive;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  SelectionPolicy::Kind selection = SelectionPolicy::Kind::Random;
  std::string cache_path;
  bool assume_nonempty = true;
  OracleConfig::AmbiguousFallback ambiguous_fallback =
      OracleConfig::AmbiguousFallback::NotDisjoint;
  int max_retries = 2;
  double timeout = 30.0;
  OracleConfig::InstructionPlacement instruction_placement =
      OracleConfig::InstructionPlacement::SystemMessage;
};

namespace detail {

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool parse_bool_value(std::string_view v, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config key \"" + key + "\" expects true or false, got \"" +
                    std::string(v) + "\"");
}

}  // namespace detail

inline void apply_config_entry(Config& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "ontology") {
    cfg.ontology = value;
  } else if (key == "endpoint_url") {
    cfg.endpoint_url = value;
  } else if (key == "model_name") {
    cfg.model_name = value;
  } else if (key == "strategy") {
    const auto s = parse_strategy_token(value);
    if (!s) {
      throw ConfigError("unknown strategy \"" + value +
                        "\" (naive|task|fewshot)");
    }
    cfg.strategy = *s;
  } else if (key == "qa_mode") {
    const auto q = parse_qa_mode_token(value);
    if (!q) {
      throw ConfigError("unknown qa_mode \"" + value +
                        "\" (positive|negative)");
    }
    cfg.qa_mode = *q;
  } else if (key == "temperature") {
    try {
      cfg.temperature = std::stod(value);
    } catch (...) {
      throw ConfigError("temperature is not a number: \"" + value + "\"");
    }
  } else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (...) {
      throw ConfigError("seed is not an integer: \"" + value + "\"");
    }
  } else if (key == "selection") {
    if (value == "random") {
      cfg.selection = SelectionPolicy::Kind::Random;
    } else if (value == "lex") {
      cfg.selection = SelectionPolicy::Kind::Lexicographic;
    } else {
      throw ConfigError("unknown selection \"" + value + "\" (random|lex)");
    }
  } else if (key == "cache_path") {
    cfg.cache_path = value;
  } else if (key == "assume_nonempty") {
    cfg.assume_nonempty = detail::parse_bool_value(value, key);
  } else if (key == "ambiguous_fallback") {
    if (value == "not_disjoint") {
      cfg.ambiguous_fallback = OracleConfig::AmbiguousFallback::NotDisjoint;
    } else if (value == "error") {
      cfg.ambiguous_fallback = OracleConfig::AmbiguousFallback::Error;
    } else {
      throw ConfigError("unknown ambiguous_fallback \"" + value +
                        "\" (not_disjoint|error)");
    }
  } else if (key == "max_retries") {
    try {
      cfg.max_retries = std::stoi(value);
    } catch (...) {
      throw ConfigError("max_retries is not an integer: \"" + value + "\"");
    }
    if (cfg.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  } else if (key == "timeout") {
    try {
      cfg.timeout = std::stod(value);
    } catch (...) {
      throw ConfigError("timeout is not a number: \"" + value + "\"");
    }
  } else if (key == "instruction_placement") {
    if (value == "system") {
      cfg.instruction_placement =
          OracleConfig::InstructionPlacement::SystemMessage;
    } else if (value == "user") {
      cfg.instruction_placement =
          OracleConfig::InstructionPlacement::UserMessage;
    } else {
      throw ConfigError("unknown instruction_placement \"" + value +
                        "\" (system|user)");
    }
  } else {
    throw ConfigError("unknown config key \"" + key + "\"");
  }
}

/// Loads a flat `key = value` config file. `#` starts a comment, blank lines
/// are skipped, unknown keys are rejected.
inline Config load_config_file(const std::string& path, Config cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim_view(line);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not key = value: \"" + std::string(view) + "\"");
    }
    const std::string key{detail::trim_view(view.substr(0, eq))};
    const std::string value{detail::trim_view(view.substr(eq + 1))};
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " has an empty key");
    }
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

inline OracleConfig oracle_config_from(const Config& cfg) {
  OracleConfig oc;
  oc.endpoint_url = cfg.endpoint_url;
  oc.model_name = cfg.model_name.empty() ? "mock" : cfg.model_name;
  oc.temperature = cfg.temperature;
  oc.max_retries = cfg.max_retries;
  oc.timeout_seconds = cfg.timeout;
  oc.cache_path = cfg.cache_path;
  oc.ambiguous_fallback = cfg.ambiguous_fallback;
  oc.instruction_placement = cfg.instruction_placement;
  if (const char* key = std::getenv("DISJAX_API_KEY")) oc.api_key = key;
  return oc;
}

}  // namespace disjax
