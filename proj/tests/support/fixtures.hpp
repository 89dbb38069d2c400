#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emocap/aggregation.hpp"
#include "emocap/scene.hpp"
#include "emocap/store.hpp"

namespace emocap::fx {

/// The airplane-passenger scene from the annotation-interface figure.
SceneAnnotation passenger_scene();

inline constexpr const char* kPassengerFull =
    "Sean is a male adult. Sean is a(n) passenger. Sean is or has raising eyebrows, side-eyeing. "
    "Mia is a child and she is sitting behind Sean and kicking Sean’s chair. "
    "Sean’s physical environment is on an airplane.";
inline constexpr const char* kPassengerMinusInteractions =
    "Sean is a male adult. Sean is a(n) passenger. Sean is or has raising eyebrows, side-eyeing. "
    "Sean’s physical environment is on an airplane.";
inline constexpr const char* kPassengerMinusEnvironments =
    "Sean is a male adult. Sean is a(n) passenger. Sean is or has raising eyebrows, side-eyeing. "
    "Mia is a child and she is sitting behind Sean and kicking Sean’s chair.";
inline constexpr const char* kPassengerPrompt =
    "Sean is a male adult. Sean is a(n) passenger. Sean is or has raising eyebrows, side-eyeing. "
    "Mia is a child and she is sitting behind Sean and kicking Sean's chair. Sean's physical "
    "environment is on an airplane. Sean is likely feeling a high level of {placeholder}? Choose "
    "one emotion from the list: Anger, Annoyance, Aversion, Confusion, Disapproval, "
    "Disconnection, Disquietment, Embarrassment, Fatigue, Fear, Pain/Suffering (emotional), "
    "Pain/Suffering (physical), and Sadness.";

/// Removes itself on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// tests/data/sample_manifest: 331 images, 360 agreed samples.
std::filesystem::path sample_manifest_dir();

/// Fresh store at `root` holding the sample manifest.
ProjectStore sample_store(const std::filesystem::path& root);

// Published per-label metrics, one row per label and variant.
struct PublishedMetric {
  const char* label;
  int variant;  // 0 full, 1 minus interactions, 2 minus environments
  double precision;
  double recall;
  double f1;
};
const std::vector<PublishedMetric>& published_metrics();

struct PublishedCount {
  const char* label;
  int one_person;
  int multiple_people;
  int total;
};
const std::vector<PublishedCount>& published_counts();

// Independent tally used to check the evaluator. It only looks at
// (truth, predicted text, in_list) triples and never calls library code.
struct ScoringCase {
  std::vector<std::string> labels;
  std::vector<GroundTruthSample> truth;
  std::vector<PredictionRecord> predictions;
};

struct OracleResult {
  std::vector<std::string> columns;
  std::vector<std::vector<std::size_t>> cells;
  std::vector<double> precision, recall, f1;
  std::vector<std::size_t> support, tp, predicted;
  double accuracy = 0;
  std::size_t samples = 0;
};

ScoringCase random_scoring_case(std::uint64_t seed);
OracleResult brute_force_score(const ScoringCase& c);

}  // namespace emocap::fx
