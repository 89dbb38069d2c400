#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "emocap/store.hpp"

namespace emocap {

enum class ExportFormat {
  /// lexicon.json, scenes.jsonl, ground_truth.jsonl, captions-<variant>.jsonl
  jsonl,
  /// captions-<variant>.txt, one "scene_id<TAB>person_key<TAB>caption" per line
  text,
};

ExportFormat parse_export_format(std::string_view text);

/// Writes a redistributable bundle (no image data, URIs only). Returns the
/// files written.
std::vector<std::filesystem::path> export_dataset(const ProjectStore& store,
                                                  const std::filesystem::path& out_dir,
                                                  ExportFormat format);

struct DatasetBundle {
  std::optional<SignalLexicon> lexicon;
  std::vector<SceneAnnotation> scenes;
  std::vector<GroundTruthRecord> ground_truth;

  std::vector<GroundTruthSample> agreed() const;
};

/// Reads a jsonl bundle. Scenes are validated against the bundle lexicon
/// (or the default lexicon when the bundle has none).
DatasetBundle import_bundle(const std::filesystem::path& dir);

}  // namespace emocap
