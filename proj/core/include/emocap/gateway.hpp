#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emocap/backend.hpp"
#include "emocap/prompt.hpp"

namespace emocap {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Stable digest of (template_version, caption_text, label_list,
/// model_name, temperature).
std::string prompt_hash(const PromptSpec& prompt, const BackendConfig& config);

struct CompletionBatch {
  std::string prompt_hash;
  std::vector<std::string> raw_completions;
  BackendKind backend = BackendKind::mock;
  std::string model_name;
  std::string started_at;
  std::string finished_at;
};

void to_json(nlohmann::json& j, const CompletionBatch& v);

/// Issues `repeats` sequential requests. Backend errors propagate; the
/// batch is all-or-nothing.
CompletionBatch complete_n(const PromptSpec& prompt, const BackendConfig& config, int repeats,
                           CompletionBackend& backend);

}  // namespace emocap
