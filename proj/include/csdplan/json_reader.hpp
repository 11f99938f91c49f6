#pragma once

// Strict field access over nlohmann::json with path-qualified error messages.
// Every object read through ObjectReader must be finished with done(), which
// rejects keys that were never consumed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "csdplan/errors.hpp"

namespace csdplan::json_detail {

using nlohmann::json;

inline std::string join_path(std::string_view base, std::string_view key) {
  if (base.empty()) return std::string(key);
  return std::string(base) + "." + std::string(key);
}

inline std::string index_path(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

inline const char* type_name(const json& j) { return j.type_name(); }

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, std::string("expected a number, got ") + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

inline std::int64_t as_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  }
  throw ParseError(path, std::string("expected an integer, got ") + (j.is_number() ? j.dump() : type_name(j)));
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, std::string("expected a string, got ") + type_name(j));
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, std::string("expected an array, got ") + type_name(j));
  return j;
}

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ParseError(path_.empty() ? "<root>" : path_, std::string("expected an object, got ") + type_name(j_));
  }

  const std::string& path() const { return path_; }
  std::string field_path(std::string_view key) const { return join_path(path_, key); }

  bool has(std::string_view key) const { return j_.contains(key); }

  const json& required(std::string_view key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw ParseError(field_path(key), "missing required field");
    seen_.insert(std::string(key));
    return *it;
  }

  const json* optional(std::string_view key) {
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) {
      if (it != j_.end()) seen_.insert(std::string(key));
      return nullptr;
    }
    seen_.insert(std::string(key));
    return &*it;
  }

  double number(std::string_view key) { return as_number(required(key), field_path(key)); }
  std::int64_t integer(std::string_view key) { return as_integer(required(key), field_path(key)); }
  std::string string(std::string_view key) { return as_string(required(key), field_path(key)); }

  std::optional<double> optional_number(std::string_view key) {
    const json* v = optional(key);
    if (!v) return std::nullopt;
    return as_number(*v, field_path(key));
  }
  std::optional<std::int64_t> optional_integer(std::string_view key) {
    const json* v = optional(key);
    if (!v) return std::nullopt;
    return as_integer(*v, field_path(key));
  }
  std::optional<std::string> optional_string(std::string_view key) {
    const json* v = optional(key);
    if (!v) return std::nullopt;
    return as_string(*v, field_path(key));
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ParseError(field_path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Parses text, reporting syntax errors as "line L, column C".
inline json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column), msg);
  }
}

}  // namespace csdplan::json_detail
