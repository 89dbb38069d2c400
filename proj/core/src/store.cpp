#include "emocap/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "emocap/jsonl.hpp"
#include "emocap/scene_json.hpp"
#include "json_util.hpp"

namespace emocap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kLexiconFile = "lexicon.json";
constexpr const char* kScenesFile = "scenes.jsonl";
constexpr const char* kJudgmentsFile = "judgments.jsonl";
constexpr const char* kTruthFile = "ground_truth.jsonl";

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename T>
std::vector<json> to_records(const std::vector<T>& items) {
  std::vector<json> out;
  out.reserve(items.size());
  for (const auto& item : items) out.emplace_back(item);
  return out;
}

template <typename T>
std::vector<T> from_records(const fs::path& path, std::string_view schema_name) {
  std::vector<T> out;
  if (!fs::exists(path)) return out;
  const auto doc = read_jsonl(path, schema_name);
  out.reserve(doc.records.size());
  for (std::size_t i = 0; i < doc.records.size(); ++i) {
    try {
      out.push_back(doc.records[i].get<T>());
    } catch (const SchemaError& e) {
      // Header is line 1.
      throw SchemaError("", path.filename().string() + ":" + std::to_string(i + 2) + ": " +
                                e.what());
    } catch (const json::exception& e) {
      throw SchemaError("", path.filename().string() + ":" + std::to_string(i + 2) + ": " +
                                e.what());
    }
  }
  return out;
}

std::string violation_summary(const std::vector<Violation>& violations) {
  std::string out = "scene rejected:";
  for (const auto& v : violations) out += " [" + std::string(to_string(v.code)) + " at " + v.path + "]";
  return out;
}

}  // namespace

void to_json(json& j, const StoreManifest& v) {
  j = json{{"schema_version", v.schema_version},
           {"lexicon_version", v.lexicon_version},
           {"backend", v.backend},
           {"caption", v.caption},
           {"prompt", {{"keep_placeholder", v.prompt.keep_placeholder}}},
           {"names", v.names},
           {"repeats", v.repeats}};
}

void from_json(const json& j, StoreManifest& v) {
  StoreManifest m;
  m.schema_version = detail::require(j, "schema_version", "").get<int>();
  if (m.schema_version != kManifestSchemaVersion) {
    throw SchemaError("schema_version",
                      "unsupported manifest version " + std::to_string(m.schema_version));
  }
  m.lexicon_version = detail::require_string(j, "lexicon_version", "");
  if (auto it = j.find("backend"); it != j.end()) m.backend = it->get<BackendConfig>();
  if (auto it = j.find("caption"); it != j.end()) m.caption = it->get<CaptionOptions>();
  if (auto it = j.find("prompt"); it != j.end()) {
    m.prompt.keep_placeholder = it->value("keep_placeholder", true);
  }
  if (auto it = j.find("names"); it != j.end()) m.names = it->get<NamePool>();
  m.repeats = j.value("repeats", 10);
  if (m.repeats < 1) throw SchemaError("repeats", "must be at least 1");
  v = std::move(m);
}

GroundTruthRecord GroundTruthRecord::from(const Resolution& resolution) {
  GroundTruthRecord r;
  if (const auto* s = std::get_if<GroundTruthSample>(&resolution)) {
    r.scene_id = s->scene_id;
    r.person_key = s->person_key;
    r.label = s->label;
  } else {
    const auto& d = std::get<Disagreement>(resolution);
    r.scene_id = d.scene_id;
    r.person_key = d.person_key;
    r.status = GroundTruthStatus::excluded;
    r.disagreement = d;
  }
  return r;
}

void to_json(json& j, const GroundTruthRecord& v) {
  j = json{{"scene_id", v.scene_id}, {"person_key", v.person_key}};
  if (v.status == GroundTruthStatus::agreed) {
    j["status"] = "agreed";
    j["label"] = v.label;
  } else {
    j["status"] = "excluded";
    if (v.disagreement) j["judgments"] = json::array({v.disagreement->first, v.disagreement->second});
  }
}

void from_json(const json& j, GroundTruthRecord& v) {
  GroundTruthRecord r;
  r.scene_id = detail::require_string(j, "scene_id", "");
  r.person_key = detail::require_string(j, "person_key", "");
  // Plain GroundTruthSample lines (no status) count as agreed.
  const std::string status = j.value("status", std::string("agreed"));
  if (status == "agreed") {
    r.label = detail::require_string(j, "label", "");
  } else if (status == "excluded") {
    r.status = GroundTruthStatus::excluded;
    if (auto it = j.find("judgments"); it != j.end()) {
      if (!it->is_array() || it->size() != 2) {
        throw SchemaError("judgments", "expected two judgments");
      }
      r.disagreement =
          Disagreement{r.scene_id, r.person_key, (*it)[0].get<Judgment>(), (*it)[1].get<Judgment>()};
    }
  } else {
    throw SchemaError("status", "expected 'agreed' or 'excluded'");
  }
  v = std::move(r);
}

SceneRejected::SceneRejected(std::vector<Violation> violations)
    : StoreError(violation_summary(violations)), violations_(std::move(violations)) {}

VersionConflict::VersionConflict(std::string scene_id, std::uint64_t expected, std::uint64_t current)
    : StoreError("scene '" + scene_id + "' is at version " + std::to_string(current) +
                 ", edit was based on " + std::to_string(expected)),
      current_(current) {}

ProjectStore ProjectStore::init(const fs::path& root, const SignalLexicon& lexicon,
                                StoreManifest manifest) {
  if (fs::exists(root / kManifestFile)) {
    throw StoreError("a project already exists at " + root.string());
  }
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw StoreError("cannot create " + root.string() + ": " + ec.message());

  manifest.backend.validate();
  manifest.names.validate();
  manifest.lexicon_version = lexicon.version();
  ProjectStore store;
  store.root_ = root;
  store.manifest_ = std::move(manifest);
  store.lexicon_ = lexicon;
  save_lexicon(lexicon, root / kLexiconFile);
  store.write_scenes();
  store.write_judgments();
  store.write_truth();
  // Manifest last: its presence marks a complete project.
  store.write_manifest();
  return store;
}

ProjectStore ProjectStore::open(const fs::path& root) {
  if (!fs::exists(root / kManifestFile)) {
    throw StoreError("no project at " + root.string() + " (missing " + kManifestFile + ")");
  }
  ProjectStore store;
  store.root_ = root;
  store.load();
  return store;
}

void ProjectStore::load() {
  const json manifest = detail::parse_json(read_text(root_ / kManifestFile), kManifestFile);
  try {
    manifest_ = manifest.get<StoreManifest>();
  } catch (const json::exception& e) {
    throw SchemaError("", std::string(kManifestFile) + ": " + e.what());
  }
  lexicon_ = load_lexicon(root_ / kLexiconFile);
  if (lexicon_.version() != manifest_.lexicon_version) {
    throw StoreError("lexicon version '" + lexicon_.version() + "' does not match manifest '" +
                     manifest_.lexicon_version + "'");
  }
  scenes_ = from_records<SceneAnnotation>(root_ / kScenesFile, schema::kScenes);
  judgments_ = from_records<Judgment>(root_ / kJudgmentsFile, schema::kJudgments);
  truth_ = from_records<GroundTruthRecord>(root_ / kTruthFile, schema::kGroundTruth);
}

void ProjectStore::update_manifest(StoreManifest manifest) {
  manifest.backend.validate();
  manifest.names.validate();
  if (manifest.repeats < 1) throw SchemaError("repeats", "must be at least 1");
  manifest.lexicon_version = lexicon_.version();
  manifest_ = std::move(manifest);
  write_manifest();
}

void ProjectStore::write_manifest() const {
  write_file_atomic(root_ / kManifestFile, json(manifest_).dump(2) + "\n");
}

void ProjectStore::write_scenes() const {
  write_jsonl(root_ / kScenesFile, schema::kScenes, to_records(scenes_));
}

void ProjectStore::write_judgments() const {
  write_jsonl(root_ / kJudgmentsFile, schema::kJudgments, to_records(judgments_));
}

void ProjectStore::write_truth() const {
  write_jsonl(root_ / kTruthFile, schema::kGroundTruth, to_records(truth_));
}

const SceneAnnotation* ProjectStore::find_scene(std::string_view scene_id) const {
  for (const auto& s : scenes_) {
    if (s.scene_id == scene_id) return &s;
  }
  return nullptr;
}

const SceneAnnotation& ProjectStore::save_scene(SceneAnnotation scene,
                                                std::optional<std::uint64_t> expected_version) {
  auto violations = validate_scene(scene, lexicon_);
  if (!violations.empty()) throw SceneRejected(std::move(violations));

  auto it = std::find_if(scenes_.begin(), scenes_.end(),
                         [&](const SceneAnnotation& s) { return s.scene_id == scene.scene_id; });
  const std::uint64_t current = it == scenes_.end() ? 0 : it->version;
  if (expected_version && *expected_version != current) {
    throw VersionConflict(scene.scene_id, *expected_version, current);
  }
  scene.version = current + 1;

  const bool judged = !scene.annotator_id.empty() && !scene.emotion_judgment.empty();
  if (it == scenes_.end()) {
    scenes_.push_back(std::move(scene));
    it = scenes_.end() - 1;
  } else {
    *it = std::move(scene);
  }
  write_scenes();

  if (judged) {
    for (const auto& [person_key, label] : it->emotion_judgment) {
      record_judgment({it->scene_id, person_key, it->annotator_id, label});
    }
    write_judgments();
    for (const auto& [person_key, label] : it->emotion_judgment) {
      resolve_pending(it->scene_id, person_key);
    }
    write_truth();
  }
  return *it;
}

void ProjectStore::record_judgment(const Judgment& judgment) {
  for (auto& j : judgments_) {
    if (j.scene_id == judgment.scene_id && j.person_key == judgment.person_key &&
        j.annotator_id == judgment.annotator_id) {
      j.label = judgment.label;
      return;
    }
  }
  judgments_.push_back(judgment);
}

void ProjectStore::resolve_pending(const std::string& scene_id, const std::string& person_key) {
  std::vector<const Judgment*> found;
  for (const auto& j : judgments_) {
    if (j.scene_id == scene_id && j.person_key == person_key) found.push_back(&j);
  }
  // The first two annotators decide; later ones are kept but not consulted.
  if (found.size() < 2) return;
  upsert_truth(GroundTruthRecord::from(resolve_ground_truth(*found[0], *found[1])));
}

void ProjectStore::upsert_truth(GroundTruthRecord record) {
  for (auto& r : truth_) {
    if (r.scene_id == record.scene_id && r.person_key == record.person_key) {
      r = std::move(record);
      return;
    }
  }
  truth_.push_back(std::move(record));
}

std::vector<GroundTruthSample> ProjectStore::ground_truth() const {
  std::vector<GroundTruthSample> out;
  for (const auto& r : truth_) {
    if (r.status == GroundTruthStatus::agreed) out.push_back({r.scene_id, r.person_key, r.label});
  }
  return out;
}

Resolution ProjectStore::submit_judgments(const Judgment& a, const Judgment& b) {
  if (a.annotator_id == b.annotator_id) {
    throw ReferenceError("both judgments come from annotator '" + a.annotator_id + "'");
  }
  const SceneAnnotation* scene = find_scene(a.scene_id);
  if (scene == nullptr) throw ReferenceError("unknown scene '" + a.scene_id + "'");
  if (scene->find_person(a.person_key) == nullptr) {
    throw ReferenceError("unknown person '" + a.person_key + "' in scene '" + a.scene_id + "'");
  }
  for (const Judgment* j : {&a, &b}) {
    if (!lexicon_.is_canonical(j->label)) {
      throw ReferenceError("'" + j->label + "' is not a canonical emotion label");
    }
  }
  Resolution res = resolve_ground_truth(a, b);
  record_judgment(a);
  record_judgment(b);
  upsert_truth(GroundTruthRecord::from(res));
  write_judgments();
  write_truth();
  return res;
}

void ProjectStore::replace_dataset(std::vector<SceneAnnotation> scenes,
                                   std::vector<GroundTruthRecord> truth) {
  for (const auto& s : scenes) {
    auto violations = validate_scene(s, lexicon_);
    if (!violations.empty()) throw SceneRejected(std::move(violations));
  }
  std::vector<GroundTruthSample> agreed;
  for (const auto& r : truth) {
    if (r.status == GroundTruthStatus::agreed) agreed.push_back({r.scene_id, r.person_key, r.label});
  }
  // Reference and label checks.
  dataset_statistics(agreed, scenes, lexicon_);
  scenes_ = std::move(scenes);
  truth_ = std::move(truth);
  write_scenes();
  write_truth();
}

fs::path ProjectStore::captions_path(CaptionVariant variant, std::string_view ext) const {
  return root_ / "captions" / (std::string(to_string(variant)) + "." + std::string(ext));
}

fs::path ProjectStore::predictions_path(CaptionVariant variant) const {
  return root_ / "predictions" / (std::string(to_string(variant)) + ".jsonl");
}

fs::path ProjectStore::report_path(CaptionVariant variant, std::string_view ext) const {
  return root_ / "reports" / (std::string(to_string(variant)) + "." + std::string(ext));
}

std::optional<EvaluationReport> ProjectStore::load_report(CaptionVariant variant) const {
  const fs::path path = report_path(variant, "json");
  if (!fs::exists(path)) return std::nullopt;
  return detail::parse_json(read_text(path), path.filename().string()).get<EvaluationReport>();
}

StoreLock::StoreLock(const fs::path& root) {
  const fs::path path = root / ".emocap.lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StoreError("cannot open " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw StoreError("project " + root.string() + " is in use by another process");
  }
}

StoreLock::~StoreLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace emocap
