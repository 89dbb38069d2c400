#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emocap/caption.hpp"
#include "emocap/gateway.hpp"
#include "emocap/taxonomy.hpp"

namespace emocap {

struct SampleRef {
  std::string scene_id;
  std::string person_key;
  CaptionVariant variant = CaptionVariant::full;
};

struct PredictionRecord {
  std::string scene_id;
  std::string person_key;
  CaptionVariant variant = CaptionVariant::full;
  std::vector<std::string> raw;
  std::vector<NormalizedLabel> normalized;
  NormalizedLabel final_label;
  bool tie_broken = false;

  bool operator==(const PredictionRecord&) const = default;
};

void to_json(nlohmann::json& j, const NormalizedLabel& v);
void from_json(const nlohmann::json& j, NormalizedLabel& v);
void to_json(nlohmann::json& j, const PredictionRecord& v);
void from_json(const nlohmann::json& j, PredictionRecord& v);

/// First non-empty line of a completion, which is what gets normalized.
std::string_view completion_candidate(std::string_view raw);

struct VoteResult {
  NormalizedLabel winner;
  bool tie_broken = false;
};

/// Mode of the votes. Among labels tied for the highest count, the one
/// that occurs first in `votes` wins and tie_broken is set. Out-of-list
/// values vote as themselves. Throws Error on an empty span.
VoteResult majority_vote(std::span<const NormalizedLabel> votes);

PredictionRecord aggregate(const CompletionBatch& batch, const SignalLexicon& lexicon,
                           const SampleRef& sample);

}  // namespace emocap
