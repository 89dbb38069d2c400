#include "fixtures.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "emocap/export.hpp"

namespace emocap::fx {

namespace fs = std::filesystem;

SceneAnnotation passenger_scene() {
  PersonAnnotation sean;
  sean.person_key = "red";
  sean.sex = Sex::male;
  sean.age = AgeGroup::adult;
  sean.social_identity = "passenger";
  sean.signals = {{"Eyes", "Raising eyebrows"}, {"Eyes", "Side-eyeing"}};
  Interaction kick;
  kick.other = Demographic{"child", AgeGroup::child, Sex::female};
  kick.action = "sitting behind {subj} and kicking {subj_pos} chair";
  sean.interactions.push_back(kick);
  sean.environment = "on an airplane";

  SceneAnnotation scene;
  scene.scene_id = "airplane";
  scene.image_uri = "images/airplane.jpg";
  scene.persons.push_back(sean);
  return scene;
}

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "emocap-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path sample_manifest_dir() { return fs::path(EMOCAP_TEST_DATA_DIR) / "sample_manifest"; }

ProjectStore sample_store(const fs::path& root) {
  ProjectStore store = ProjectStore::init(root);
  DatasetBundle bundle = import_bundle(sample_manifest_dir());
  store.replace_dataset(std::move(bundle.scenes), std::move(bundle.ground_truth));
  return store;
}

const std::vector<PublishedMetric>& published_metrics() {
  static const std::vector<PublishedMetric> rows = {
      {"Anger", 0, 0.59, 0.77, 0.67},         {"Anger", 1, 0.55, 0.73, 0.63},
      {"Anger", 2, 0.47, 0.70, 0.56},         {"Annoyance", 0, 0.64, 0.23, 0.34},
      {"Annoyance", 1, 0.67, 0.20, 0.31},     {"Annoyance", 2, 0.43, 0.10, 0.16},
      {"Aversion", 0, 0, 0, 0},               {"Aversion", 1, 0, 0, 0},
      {"Aversion", 2, 0, 0, 0},               {"Confusion", 0, 0.75, 0.19, 0.30},
      {"Confusion", 1, 0.75, 0.19, 0.30},     {"Confusion", 2, 1.00, 0.13, 0.22},
      {"Disapproval", 0, 0.25, 0.47, 0.32},   {"Disapproval", 1, 0.23, 0.47, 0.31},
      {"Disapproval", 2, 0.24, 0.50, 0.32},   {"Disconnection", 0, 0.25, 0.07, 0.11},
      {"Disconnection", 1, 0, 0, 0},          {"Disconnection", 2, 0.25, 0.10, 0.14},
      {"Disquietment", 0, 0, 0, 0},           {"Disquietment", 1, 0, 0, 0},
      {"Disquietment", 2, 0, 0, 0},           {"Embarrassment", 0, 0.28, 0.79, 0.41},
      {"Embarrassment", 1, 0.24, 0.50, 0.33}, {"Embarrassment", 2, 0.26, 0.71, 0.38},
      {"Fatigue", 0, 0.68, 0.43, 0.53},       {"Fatigue", 1, 0.70, 0.47, 0.56},
      {"Fatigue", 2, 0.73, 0.37, 0.49},       {"Fear", 0, 0.39, 0.77, 0.52},
      {"Fear", 1, 0.37, 0.70, 0.48},          {"Fear", 2, 0.26, 0.50, 0.34},
      {"Pain/Suffering (emotional)", 0, 0.25, 0.03, 0.06},
      {"Pain/Suffering (emotional)", 1, 0, 0, 0},
      {"Pain/Suffering (emotional)", 2, 0.13, 0.03, 0.05},
      {"Pain/Suffering (physical)", 0, 0.86, 0.63, 0.73},
      {"Pain/Suffering (physical)", 1, 0.75, 0.40, 0.52},
      {"Pain/Suffering (physical)", 2, 1.00, 0.30, 0.46},
      {"Sadness", 0, 0.27, 0.87, 0.42},       {"Sadness", 1, 0.21, 0.80, 0.33},
      {"Sadness", 2, 0.24, 0.80, 0.37},
  };
  return rows;
}

const std::vector<PublishedCount>& published_counts() {
  static const std::vector<PublishedCount> rows = {
      {"Anger", 14, 16, 30},         {"Annoyance", 16, 14, 30},
      {"Aversion", 16, 14, 30},      {"Confusion", 12, 4, 16},
      {"Disapproval", 18, 12, 30},   {"Disconnection", 18, 12, 30},
      {"Disquietment", 15, 15, 30},  {"Embarrassment", 0, 14, 14},
      {"Fatigue", 23, 7, 30},        {"Fear", 15, 15, 30},
      {"Pain/Suffering (emotional)", 15, 15, 30},
      {"Pain/Suffering (physical)", 15, 15, 30},
      {"Sadness", 15, 15, 30},
  };
  return rows;
}

ScoringCase random_scoring_case(std::uint64_t seed) {
  static const std::vector<std::string> kLabels = {
      "Anger",   "Annoyance", "Aversion", "Confusion", "Disapproval",
      "Disconnection", "Disquietment", "Embarrassment", "Fatigue", "Fear",
      "Pain/Suffering (emotional)", "Pain/Suffering (physical)", "Sadness"};
  static const std::vector<std::string> kStray = {"Happiness", "Boredom", "Joy", "Surprise"};
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  ScoringCase c;
  c.labels = kLabels;
  const std::size_t n = 1 + pick(50);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string scene = "s" + std::to_string(i / 2);
    const std::string person = i % 2 == 0 ? "red" : "blue";
    c.truth.push_back({scene, person, kLabels[pick(kLabels.size())]});
    PredictionRecord p;
    p.scene_id = scene;
    p.person_key = person;
    // About one in eight predictions falls outside the list.
    p.final_label = pick(8) == 0 ? NormalizedLabel::out_of_list(kStray[pick(kStray.size())])
                                 : NormalizedLabel::canonical(kLabels[pick(kLabels.size())]);
    c.predictions.push_back(p);
  }
  std::shuffle(c.predictions.begin(), c.predictions.end(), rng);
  return c;
}

OracleResult brute_force_score(const ScoringCase& c) {
  OracleResult o;
  o.columns = c.labels;
  std::set<std::string> stray;
  for (const auto& p : c.predictions) {
    if (!p.final_label.in_list()) stray.insert(p.final_label.text());
  }
  o.columns.insert(o.columns.end(), stray.begin(), stray.end());

  auto truth_of = [&](const PredictionRecord& p) -> const std::string& {
    for (const auto& t : c.truth) {
      if (t.scene_id == p.scene_id && t.person_key == p.person_key) return t.label;
    }
    throw std::logic_error("prediction without truth");
  };

  o.cells.assign(c.labels.size(), std::vector<std::size_t>(o.columns.size(), 0));
  for (std::size_t r = 0; r < c.labels.size(); ++r) {
    for (std::size_t col = 0; col < o.columns.size(); ++col) {
      const bool in_list = col < c.labels.size();
      for (const auto& p : c.predictions) {
        if (truth_of(p) == c.labels[r] && p.final_label.text() == o.columns[col] &&
            p.final_label.in_list() == in_list) {
          ++o.cells[r][col];
        }
      }
    }
  }

  std::size_t correct = 0;
  for (const auto& p : c.predictions) {
    if (p.final_label.in_list() && p.final_label.text() == truth_of(p)) ++correct;
  }
  o.samples = c.predictions.size();
  o.accuracy = o.samples == 0 ? 0.0 : double(correct) / double(o.samples);

  for (const auto& label : c.labels) {
    std::size_t tp = 0, predicted = 0, support = 0;
    for (const auto& p : c.predictions) {
      const bool said = p.final_label.in_list() && p.final_label.text() == label;
      const bool is = truth_of(p) == label;
      tp += said && is;
      predicted += said;
      support += is;
    }
    const double prec = predicted ? double(tp) / double(predicted) : 0.0;
    const double rec = support ? double(tp) / double(support) : 0.0;
    o.tp.push_back(tp);
    o.predicted.push_back(predicted);
    o.support.push_back(support);
    o.precision.push_back(prec);
    o.recall.push_back(rec);
    o.f1.push_back(prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0);
  }
  return o;
}

}  // namespace emocap::fx
