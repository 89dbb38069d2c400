#pragma once

// Small helpers for strict field access with path-qualified errors.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "emocap/error.hpp"

namespace emocap::detail {

using nlohmann::json;

inline std::string join_path(std::string_view base, std::string_view key) {
  if (base.empty()) return std::string(key);
  return std::string(base) + "." + std::string(key);
}

inline std::string index_path(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

inline const json& require(const json& j, std::string_view key, std::string_view path) {
  if (!j.is_object()) throw SchemaError(std::string(path), "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(join_path(path, key), "missing required field");
  return *it;
}

inline std::string require_string(const json& j, std::string_view key, std::string_view path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw SchemaError(join_path(path, key), "expected a string");
  return v.get<std::string>();
}

inline const json& require_array(const json& j, std::string_view key, std::string_view path) {
  const json& v = require(j, key, path);
  if (!v.is_array()) throw SchemaError(join_path(path, key), "expected an array");
  return v;
}

inline std::string optional_string(const json& j, std::string_view key, std::string_view path,
                                   std::string fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw SchemaError(join_path(path, key), "expected a string");
  return it->get<std::string>();
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what), std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace emocap::detail
