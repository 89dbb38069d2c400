#pragma once

// JSON mapping for the annotation model. Parsing is strict: missing or
// mistyped fields raise SchemaError with the field path.

#include <nlohmann/json.hpp>

#include "emocap/scene.hpp"

namespace emocap {

void to_json(nlohmann::json& j, const SignalRef& v);
void from_json(const nlohmann::json& j, SignalRef& v);
void to_json(nlohmann::json& j, const Interaction& v);
void from_json(const nlohmann::json& j, Interaction& v);
void to_json(nlohmann::json& j, const PersonAnnotation& v);
void from_json(const nlohmann::json& j, PersonAnnotation& v);
void to_json(nlohmann::json& j, const SceneAnnotation& v);
void from_json(const nlohmann::json& j, SceneAnnotation& v);
void to_json(nlohmann::json& j, const GroundTruthSample& v);
void from_json(const nlohmann::json& j, GroundTruthSample& v);
void to_json(nlohmann::json& j, const Judgment& v);
void from_json(const nlohmann::json& j, Judgment& v);
void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const DatasetStatistics& v);

}  // namespace emocap
