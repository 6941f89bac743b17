#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "disjax/errors.hpp"

namespace disjax {

/// Absolute IRI text. Valid iff non-empty, free of whitespace and control
/// characters, and containing at least one ':'.
class Iri {
 public:
  explicit Iri(std::string text) : value_(std::move(text)) {
    std::string why;
    if (!valid(value_, &why)) {
      throw ValidationError("invalid IRI \"" + value_ + "\": " + why);
    }
  }

  static bool valid(std::string_view text, std::string* why = nullptr) {
    if (text.empty()) {
      if (why) *why = "empty";
      return false;
    }
    bool has_colon = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const unsigned char c = static_cast<unsigned char>(text[i]);
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
          c == '\v') {
        if (why) {
          *why = std::string("contains whitespace '") + printable(c) +
                 "' at offset " + std::to_string(i);
        }
        return false;
      }
      if (c < 0x20 || c == 0x7f) {
        if (why) {
          *why = std::string("contains control character ") + printable(c) +
                 " at offset " + std::to_string(i);
        }
        return false;
      }
      if (c == ':') has_colon = true;
    }
    if (!has_colon) {
      if (why) *why = "missing ':' (relative IRIs are not accepted)";
      return false;
    }
    return true;
  }

  const std::string& str() const { return value_; }

  auto operator<=>(const Iri&) const = default;

 private:
  static std::string printable(unsigned char c) {
    if (c >= 0x21 && c < 0x7f) return std::string(1, static_cast<char>(c));
    static const char* hex = "0123456789abcdef";
    std::string out = "\\x";
    out += hex[c >> 4];
    out += hex[c & 0xf];
    return out;
  }

  std::string value_;
};

/// Dense handle for an interned class IRI; unique within one KnowledgeBase.
struct ClassId {
  std::uint32_t value = 0;

  auto operator<=>(const ClassId&) const = default;
};

}  // namespace disjax

template <>
struct std::hash<disjax::ClassId> {
  std::size_t operator()(const disjax::ClassId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
