#include "emocap/aggregation.hpp"

#include <map>

#include "emocap/error.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace emocap {

using nlohmann::json;

void to_json(json& j, const NormalizedLabel& v) {
  j = json{{"label", v.text()}, {"in_list", v.in_list()}};
}

void from_json(const json& j, NormalizedLabel& v) {
  const std::string text = detail::require_string(j, "label", "");
  const json& flag = detail::require(j, "in_list", "");
  if (!flag.is_boolean()) throw SchemaError("in_list", "expected a boolean");
  v = flag.get<bool>() ? NormalizedLabel::canonical(text) : NormalizedLabel::out_of_list(text);
}

void to_json(json& j, const PredictionRecord& v) {
  j = json{{"scene_id", v.scene_id},
           {"person_key", v.person_key},
           {"variant", to_string(v.variant)},
           {"raw", v.raw},
           {"normalized", v.normalized},
           {"final", v.final_label},
           {"tie_broken", v.tie_broken}};
}

void from_json(const json& j, PredictionRecord& v) {
  PredictionRecord r;
  r.scene_id = detail::require_string(j, "scene_id", "");
  r.person_key = detail::require_string(j, "person_key", "");
  r.variant = parse_variant(detail::require_string(j, "variant", ""));
  r.raw = detail::require_array(j, "raw", "").get<std::vector<std::string>>();
  r.normalized = detail::require_array(j, "normalized", "").get<std::vector<NormalizedLabel>>();
  r.final_label = detail::require(j, "final", "").get<NormalizedLabel>();
  const json& tie = detail::require(j, "tie_broken", "");
  if (!tie.is_boolean()) throw SchemaError("tie_broken", "expected a boolean");
  r.tie_broken = tie.get<bool>();
  if (r.raw.size() != r.normalized.size()) {
    throw SchemaError("normalized", "length differs from raw");
  }
  v = std::move(r);
}

std::string_view completion_candidate(std::string_view raw) {
  for (auto line : detail::split_lines(raw)) {
    if (!detail::trim(line).empty()) return line;
  }
  return {};
}

VoteResult majority_vote(std::span<const NormalizedLabel> votes) {
  if (votes.empty()) throw Error("majority vote over an empty batch");
  std::map<NormalizedLabel, std::size_t> counts;
  for (const auto& v : votes) ++counts[v];

  std::size_t best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  std::size_t tied = 0;
  for (const auto& [label, n] : counts) tied += n == best ? 1 : 0;

  for (const auto& v : votes) {
    if (counts[v] == best) return {v, tied > 1};
  }
  return {votes.front(), false};  // unreachable
}

PredictionRecord aggregate(const CompletionBatch& batch, const SignalLexicon& lexicon,
                           const SampleRef& sample) {
  if (batch.raw_completions.empty()) throw Error("cannot aggregate an empty completion batch");
  PredictionRecord record;
  record.scene_id = sample.scene_id;
  record.person_key = sample.person_key;
  record.variant = sample.variant;
  record.raw = batch.raw_completions;
  record.normalized.reserve(record.raw.size());
  for (const auto& raw : record.raw) {
    record.normalized.push_back(lexicon.normalize(completion_candidate(raw)));
  }
  const VoteResult vote = majority_vote(record.normalized);
  record.final_label = vote.winner;
  record.tie_broken = vote.tie_broken;
  return record;
}

}  // namespace emocap
