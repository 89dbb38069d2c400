#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emocap/scene.hpp"

namespace emocap {

enum class CaptionVariant { full, minus_interactions, minus_environments };

inline constexpr std::array<CaptionVariant, 3> kAllVariants{
    CaptionVariant::full, CaptionVariant::minus_interactions, CaptionVariant::minus_environments};

/// "full", "minus-interactions", "minus-environments".
std::string_view to_string(CaptionVariant variant);
/// "Full Caption", "Minus Interactions", "Minus Environments".
std::string_view display_name(CaptionVariant variant);
CaptionVariant parse_variant(std::string_view text);

struct NamePool {
  std::vector<std::string> male;
  std::vector<std::string> female;
  std::vector<std::string> neutral;

  /// Starts with the names seen in the published captions.
  static NamePool defaults();
  /// Throws SchemaError on an empty pool or a name used twice.
  void validate() const;
};

void to_json(nlohmann::json& j, const NamePool& v);
void from_json(const nlohmann::json& j, NamePool& v);

/// person_key -> display name for every person in the scene, and
/// "<person_key>#<i>" -> name for the i-th interaction partner.
using NameAssignment = std::map<std::string, std::string>;

std::string interaction_name_key(std::string_view person_key, std::size_t index);

/// Persons first (scene order) then interaction partners (person order,
/// interaction order). Pinned names are honoured and never handed out
/// again. Throws RenderError when a pool runs out.
NameAssignment assign_names(const SceneAnnotation& scene, const NamePool& pool);

enum class ApostropheStyle {
  /// U+0027, as in the printed prompt.
  ascii,
  /// U+2019, as in the typeset caption table.
  typographic,
};

struct CaptionOptions {
  /// Replace the literal "a(n)" (and the demographic "a") with a/an.
  bool resolve_articles = false;
  ApostropheStyle apostrophe = ApostropheStyle::ascii;
  /// Overrides for the age words ("elderly" -> "senior", ...).
  std::map<AgeGroup, std::string> age_words;

  std::string age_word(AgeGroup age) const;
};

void to_json(nlohmann::json& j, const CaptionOptions& v);
void from_json(const nlohmann::json& j, CaptionOptions& v);

/// "Sean" -> "Sean's", "Lucas" -> "Lucas'". Throws RenderError on "".
std::string possessive(std::string_view name, ApostropheStyle style = ApostropheStyle::ascii);

struct Caption {
  std::string scene_id;
  std::string person_key;
  CaptionVariant variant = CaptionVariant::full;
  std::string text;
  NameAssignment name_assignment;

  /// The captioned person's display name.
  const std::string& subject_name() const;
  bool operator==(const Caption&) const = default;
};

void to_json(nlohmann::json& j, const Caption& v);
void from_json(const nlohmann::json& j, Caption& v);

/// Structural ablation, applied before rendering.
PersonAnnotation ablate(const PersonAnnotation& person, CaptionVariant variant);

/// The caption's sentences in emission order, each ending in ".".
std::vector<std::string> render_sentences(const SceneAnnotation& scene,
                                          std::string_view person_key, CaptionVariant variant,
                                          const NamePool& pool, const CaptionOptions& options = {});

/// Sentences joined by single spaces. Throws RenderError for an unknown
/// person or an unresolvable placeholder.
Caption render(const SceneAnnotation& scene, std::string_view person_key, CaptionVariant variant,
               const NamePool& pool, const CaptionOptions& options = {});

}  // namespace emocap
