#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emocap/taxonomy.hpp"

namespace emocap {

enum class Sex { male, female, unspecified };
enum class AgeGroup { child, teenager, adult, elderly };

std::string_view to_string(Sex sex);
std::string_view to_string(AgeGroup age);
Sex parse_sex(std::string_view text);
AgeGroup parse_age_group(std::string_view text);

struct SignalRef {
  std::string category;
  std::string phrase;

  bool operator==(const SignalRef&) const = default;
};

/// The other person described by age/sex and a noun ("child", "customer").
struct Demographic {
  std::string descriptor;
  AgeGroup age = AgeGroup::adult;
  Sex sex = Sex::unspecified;

  bool operator==(const Demographic&) const = default;
};

/// The other person described relative to the subject. `relation` is stored
/// without the possessive ("bride", rendered "Lucas' bride").
struct Relationship {
  std::string relation;
  Sex sex = Sex::unspecified;

  bool operator==(const Relationship&) const = default;
};

struct Interaction {
  /// Pinned display name for the other person; empty means "assign one".
  std::string other_name;
  std::variant<Demographic, Relationship> other;
  /// May contain {subj} and {subj_pos}.
  std::string action;

  Sex other_sex() const;
  bool operator==(const Interaction&) const = default;
};

struct PersonAnnotation {
  /// Bounding-box colour or index.
  std::string person_key;
  /// Pinned display name; empty until assigned by the caption engine.
  std::string display_name;
  Sex sex = Sex::unspecified;
  AgeGroup age = AgeGroup::adult;
  std::optional<std::string> social_identity;
  std::vector<SignalRef> signals;
  std::vector<Interaction> interactions;
  std::optional<std::string> environment;

  bool operator==(const PersonAnnotation&) const = default;
};

enum class SceneType { one_person, multiple_people };

std::string_view to_string(SceneType type);

struct SceneAnnotation {
  std::string scene_id;
  std::string image_uri;
  std::vector<PersonAnnotation> persons;
  std::string annotator_id;
  /// person_key -> canonical label, for persons the annotator judged.
  std::map<std::string, std::string> emotion_judgment;
  /// Bumped by the store on every accepted write.
  std::uint64_t version = 0;

  const PersonAnnotation* find_person(std::string_view key) const;
  /// One person with no interactions is a one-person scene.
  SceneType type() const;

  bool operator==(const SceneAnnotation&) const = default;
};

enum class ViolationCode {
  empty_scene_id,
  no_persons,
  empty_person_key,
  duplicate_person_key,
  unknown_category,
  signal_not_in_category,
  duplicate_signal,
  empty_social_identity,
  empty_environment,
  empty_action,
  malformed_placeholder,
  unknown_placeholder,
  empty_descriptor,
  possessive_in_relation,
  unknown_judgment_label,
  judgment_for_unknown_person,
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  /// JSON-style path to the offending field, e.g. "persons[0].signals[1]".
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Every invariant violation in the scene; empty means valid.
std::vector<Violation> validate_scene(const SceneAnnotation& scene, const SignalLexicon& lexicon);

/// Placeholder names found in an action string, or nullopt when the braces
/// are unbalanced.
std::optional<std::vector<std::string>> action_placeholders(std::string_view action);

struct GroundTruthSample {
  std::string scene_id;
  std::string person_key;
  std::string label;

  bool operator==(const GroundTruthSample&) const = default;
};

struct Judgment {
  std::string scene_id;
  std::string person_key;
  std::string annotator_id;
  std::string label;

  bool operator==(const Judgment&) const = default;
};

/// Both judgments, ordered by (annotator_id, label) so that resolution is
/// symmetric in its arguments.
struct Disagreement {
  std::string scene_id;
  std::string person_key;
  Judgment first;
  Judgment second;

  bool operator==(const Disagreement&) const = default;
};

using Resolution = std::variant<GroundTruthSample, Disagreement>;

/// Throws ReferenceError when the judgments refer to different persons.
Resolution resolve_ground_truth(const Judgment& a, const Judgment& b);

struct LabelCounts {
  std::string label;
  std::size_t one_person = 0;
  std::size_t multiple_people = 0;

  std::size_t total() const { return one_person + multiple_people; }
  bool operator==(const LabelCounts&) const = default;
};

struct DatasetStatistics {
  std::vector<LabelCounts> rows;
  std::size_t one_person_total = 0;
  std::size_t multiple_people_total = 0;

  std::size_t total() const { return one_person_total + multiple_people_total; }
  const LabelCounts* row(std::string_view label) const;
};

/// Per-label sample counts split by scene type. Each agreed (scene, person)
/// pair counts once, so two same-label persons in one image count twice.
/// Throws ReferenceError for a sample whose scene is missing or whose label
/// is not canonical.
DatasetStatistics dataset_statistics(std::span<const GroundTruthSample> samples,
                                     std::span<const SceneAnnotation> scenes,
                                     const SignalLexicon& lexicon);

}  // namespace emocap
