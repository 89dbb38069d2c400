#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emocap/backend.hpp"
#include "emocap/caption.hpp"
#include "emocap/error.hpp"
#include "emocap/evaluation.hpp"
#include "emocap/prompt.hpp"
#include "emocap/scene.hpp"
#include "emocap/taxonomy.hpp"

namespace emocap {

inline constexpr int kManifestSchemaVersion = 1;

struct StoreManifest {
  int schema_version = kManifestSchemaVersion;
  std::string lexicon_version;
  BackendConfig backend;
  CaptionOptions caption;
  PromptOptions prompt;
  NamePool names = NamePool::defaults();
  int repeats = 10;
};

void to_json(nlohmann::json& j, const StoreManifest& v);
void from_json(const nlohmann::json& j, StoreManifest& v);

enum class GroundTruthStatus { agreed, excluded };

/// Agreed samples carry `label`; excluded ones keep the disagreement for
/// auditing.
struct GroundTruthRecord {
  std::string scene_id;
  std::string person_key;
  GroundTruthStatus status = GroundTruthStatus::agreed;
  std::string label;
  std::optional<Disagreement> disagreement;

  static GroundTruthRecord from(const Resolution& resolution);
  bool operator==(const GroundTruthRecord&) const = default;
};

void to_json(nlohmann::json& j, const GroundTruthRecord& v);
void from_json(const nlohmann::json& j, GroundTruthRecord& v);

/// validate_scene() rejected a write.
class SceneRejected : public StoreError {
 public:
  explicit SceneRejected(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Optimistic concurrency failure: the caller edited an older version.
class VersionConflict : public StoreError {
 public:
  VersionConflict(std::string scene_id, std::uint64_t expected, std::uint64_t current);
  std::uint64_t current_version() const noexcept { return current_; }

 private:
  std::uint64_t current_;
};

/// A project directory:
///
///   manifest.json        schema version, lexicon version, backend config
///   lexicon.json         the active signal lexicon
///   scenes.jsonl         one SceneAnnotation per line
///   judgments.jsonl      per-annotator emotion judgments
///   ground_truth.jsonl   resolved samples (agreed and excluded)
///   cache.jsonl          completion cache (append-only)
///   captions/, predictions/, reports/   per-variant outputs
///
/// Every rewrite goes through write-temp-then-rename. The store is a single
/// writer; callers sharing one instance across threads must serialize
/// mutations.
class ProjectStore {
 public:
  static ProjectStore init(const std::filesystem::path& root,
                           const SignalLexicon& lexicon = default_lexicon(),
                           StoreManifest manifest = {});
  static ProjectStore open(const std::filesystem::path& root);

  const std::filesystem::path& root() const noexcept { return root_; }
  const StoreManifest& manifest() const noexcept { return manifest_; }
  const SignalLexicon& lexicon() const noexcept { return lexicon_; }
  void update_manifest(StoreManifest manifest);

  const std::vector<SceneAnnotation>& scenes() const noexcept { return scenes_; }
  const SceneAnnotation* find_scene(std::string_view scene_id) const;

  /// Validates and stores the scene with version + 1. When
  /// `expected_version` is given it must equal the stored version (0 for a
  /// new scene). Judgments in the scene are recorded for its annotator and
  /// resolved once two annotators have judged the same person.
  const SceneAnnotation& save_scene(SceneAnnotation scene,
                                    std::optional<std::uint64_t> expected_version = std::nullopt);

  const std::vector<Judgment>& judgments() const noexcept { return judgments_; }
  const std::vector<GroundTruthRecord>& ground_truth_records() const noexcept { return truth_; }
  /// Agreed samples only, in record order.
  std::vector<GroundTruthSample> ground_truth() const;

  /// Records both judgments and their resolution.
  Resolution submit_judgments(const Judgment& a, const Judgment& b);

  /// Replaces scenes and ground truth wholesale (bundle import).
  void replace_dataset(std::vector<SceneAnnotation> scenes, std::vector<GroundTruthRecord> truth);

  std::filesystem::path cache_path() const { return root_ / "cache.jsonl"; }
  std::filesystem::path captions_path(CaptionVariant variant, std::string_view ext) const;
  std::filesystem::path predictions_path(CaptionVariant variant) const;
  std::filesystem::path report_path(CaptionVariant variant, std::string_view ext) const;
  std::optional<EvaluationReport> load_report(CaptionVariant variant) const;

 private:
  ProjectStore() = default;
  void load();
  void write_manifest() const;
  void write_scenes() const;
  void write_judgments() const;
  void write_truth() const;
  void record_judgment(const Judgment& judgment);
  void resolve_pending(const std::string& scene_id, const std::string& person_key);
  void upsert_truth(GroundTruthRecord record);

  std::filesystem::path root_;
  StoreManifest manifest_;
  SignalLexicon lexicon_;
  std::vector<SceneAnnotation> scenes_;
  std::vector<Judgment> judgments_;
  std::vector<GroundTruthRecord> truth_;
};

/// Exclusive advisory lock on <root>/.emocap.lock, held for the object's
/// lifetime. Throws StoreError if another process holds it.
class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& root);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace emocap
