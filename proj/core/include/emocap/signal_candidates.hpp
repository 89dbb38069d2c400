#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "emocap/backend.hpp"

namespace emocap {

/// The two prompt forms used to ask a language model for physical cues.
enum class CandidateTemplate {
  /// "List physical cues/physical expressions that would indicate ..."
  list_cues,
  /// "Give a list of facial expressions/physical descriptions/... feeling ..."
  describe_feeling,
};

CandidateTemplate parse_candidate_template(std::string_view text);

std::string candidate_prompt(std::string_view emotion, CandidateTemplate form);

/// Splits a numbered, bulleted or line-separated list into items and drops
/// repeats (compared case-insensitively).
std::vector<std::string> parse_candidate_list(std::string_view completion);

/// Asks the backend for cue phrases. The result is for human curation; the
/// lexicon is never modified.
std::vector<std::string> generate_signal_candidates(std::string_view emotion,
                                                    CandidateTemplate form,
                                                    CompletionBackend& backend,
                                                    const std::string& model_name = {});

}  // namespace emocap
