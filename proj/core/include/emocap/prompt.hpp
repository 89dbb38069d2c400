#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emocap/caption.hpp"

namespace emocap {

inline constexpr std::string_view kPromptTemplateVersion = "emotion-choice-v1";

struct PromptOptions {
  /// Keep the literal "{placeholder}" token; when false the slot renders as
  /// "___".
  bool keep_placeholder = true;
};

struct PromptSpec {
  std::string caption_text;
  std::string subject_name;
  std::vector<std::string> label_list;
  /// Encodes the placeholder mode so that it takes part in the prompt hash.
  std::string template_version;

  std::string render() const;
  bool operator==(const PromptSpec&) const = default;
};

/// "A, B, and C" with an Oxford comma; a single item is returned as is.
std::string join_label_list(std::span<const std::string> labels);

/// Throws RenderError for an empty caption, a missing subject name or an
/// empty label list.
PromptSpec build_prompt(const Caption& caption, std::span<const std::string> labels,
                        const PromptOptions& options = {});

}  // namespace emocap
