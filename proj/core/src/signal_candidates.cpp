#include "emocap/signal_candidates.hpp"

#include <cctype>
#include <unordered_set>

#include "emocap/error.hpp"
#include "emocap/gateway.hpp"
#include "emocap/taxonomy.hpp"
#include "text_util.hpp"

namespace emocap {

CandidateTemplate parse_candidate_template(std::string_view text) {
  if (text == "1" || text == "list-cues") return CandidateTemplate::list_cues;
  if (text == "2" || text == "describe-feeling") return CandidateTemplate::describe_feeling;
  throw SchemaError("template", "expected 1 (list-cues) or 2 (describe-feeling)");
}

std::string candidate_prompt(std::string_view emotion, CandidateTemplate form) {
  const std::string name = detail::to_lower_ascii(detail::collapse_whitespace(emotion));
  switch (form) {
    case CandidateTemplate::list_cues:
      return "List physical cues/physical expressions that would indicate the emotion of '" + name +
             "' in an image.";
    case CandidateTemplate::describe_feeling:
      return "Give a list of facial expressions/physical descriptions/physical movements that "
             "might indicate that a person is feeling '" +
             name + "'.";
  }
  return {};
}

namespace {

// "1.", "12)", "(3)", "-", "*", "•" and similar list markers.
std::string_view strip_list_marker(std::string_view line) {
  line = detail::trim(line);
  if (line.starts_with("\xE2\x80\xA2")) return detail::trim(line.substr(3));
  if (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '+')) {
    return detail::trim(line.substr(1));
  }
  std::size_t i = 0;
  if (i < line.size() && line[i] == '(') ++i;
  const std::size_t digits_start = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > digits_start && i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    return detail::trim(line.substr(i + 1));
  }
  return line;
}

std::string clean_item(std::string_view item) {
  std::string out = detail::collapse_whitespace(item);
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == ';')) {
    out.pop_back();
  }
  return detail::collapse_whitespace(out);
}

}  // namespace

std::vector<std::string> parse_candidate_list(std::string_view completion) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto line : detail::split_lines(completion)) {
    std::string item = clean_item(strip_list_marker(line));
    if (item.empty()) continue;
    if (seen.insert(signal_key(item)).second) out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::string> generate_signal_candidates(std::string_view emotion,
                                                    CandidateTemplate form,
                                                    CompletionBackend& backend,
                                                    const std::string& model_name) {
  CompletionRequest request;
  request.prompt = candidate_prompt(emotion, form);
  request.prompt_hash = sha256_hex(nlohmann::json::array({"signal-candidates-v1", request.prompt,
                                                          model_name})
                                       .dump());
  return parse_candidate_list(backend.complete(request));
}

}  // namespace emocap
