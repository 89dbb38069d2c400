#include "emocap/prompt.hpp"

#include "emocap/error.hpp"
#include "text_util.hpp"

namespace emocap {

namespace {
constexpr std::string_view kBlankVersionSuffix = "+blank";
}

std::string join_label_list(std::span<const std::string> labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += labels.size() > 2 ? ", " : " ";
    if (i > 0 && i + 1 == labels.size()) out += "and ";
    out += labels[i];
  }
  return out;
}

std::string PromptSpec::render() const {
  const bool blank = std::string_view(template_version).ends_with(kBlankVersionSuffix);
  std::string out = caption_text;
  out += ' ';
  out += subject_name;
  out += " is likely feeling a high level of ";
  out += blank ? "___" : "{placeholder}";
  out += "? Choose one emotion from the list: ";
  out += join_label_list(label_list);
  out += '.';
  return out;
}

PromptSpec build_prompt(const Caption& caption, std::span<const std::string> labels,
                        const PromptOptions& options) {
  if (detail::trim(caption.text).empty()) throw RenderError("cannot prompt with an empty caption");
  if (labels.empty()) throw RenderError("cannot prompt with an empty label list");
  auto it = caption.name_assignment.find(caption.person_key);
  if (it == caption.name_assignment.end() || it->second.empty()) {
    throw RenderError("caption for '" + caption.scene_id + "/" + caption.person_key +
                      "' has no subject name");
  }
  PromptSpec spec;
  spec.caption_text = caption.text;
  spec.subject_name = it->second;
  spec.label_list.assign(labels.begin(), labels.end());
  spec.template_version = std::string(kPromptTemplateVersion);
  if (!options.keep_placeholder) spec.template_version += kBlankVersionSuffix;
  return spec;
}

}  // namespace emocap
