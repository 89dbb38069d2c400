#pragma once

// Header-prefixed JSON-lines files. The first line of every file is
// {"schema": "<name>", "version": N}; each further line is one record.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace emocap {

namespace schema {
inline constexpr int kVersion = 1;
inline constexpr std::string_view kScenes = "emocap.scenes";
inline constexpr std::string_view kGroundTruth = "emocap.ground_truth";
inline constexpr std::string_view kJudgments = "emocap.judgments";
inline constexpr std::string_view kCaptions = "emocap.captions";
inline constexpr std::string_view kPredictions = "emocap.predictions";
inline constexpr std::string_view kCache = "emocap.cache";
}  // namespace schema

struct JsonlDocument {
  std::string schema;
  int version = schema::kVersion;
  std::vector<nlohmann::json> records;
};

std::string jsonl_header(std::string_view schema_name);

/// Throws SchemaError when `header` is not a supported header for the schema.
void check_jsonl_header(const nlohmann::json& header, std::string_view schema_name,
                        const std::filesystem::path& source);

/// Throws StoreError if the file is missing and SchemaError on a malformed
/// header or record (the message names the line).
JsonlDocument read_jsonl(const std::filesystem::path& path, std::string_view schema_name);

std::string format_jsonl(std::string_view schema_name, std::span<const nlohmann::json> records);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void write_jsonl(const std::filesystem::path& path, std::string_view schema_name,
                 std::span<const nlohmann::json> records);

}  // namespace emocap
