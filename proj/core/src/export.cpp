#include "emocap/export.hpp"

#include "emocap/experiment.hpp"
#include "emocap/jsonl.hpp"
#include "emocap/scene_json.hpp"

namespace emocap {

namespace fs = std::filesystem;
using nlohmann::json;

ExportFormat parse_export_format(std::string_view text) {
  if (text == "jsonl") return ExportFormat::jsonl;
  if (text == "text" || text == "txt") return ExportFormat::text;
  throw SchemaError("format", "expected 'jsonl' or 'text', got '" + std::string(text) + "'");
}

std::vector<fs::path> export_dataset(const ProjectStore& store, const fs::path& out_dir,
                                     ExportFormat format) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw StoreError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  if (format == ExportFormat::jsonl) {
    save_lexicon(store.lexicon(), out_dir / "lexicon.json");
    written.push_back(out_dir / "lexicon.json");

    std::vector<json> scenes(store.scenes().begin(), store.scenes().end());
    write_jsonl(out_dir / "scenes.jsonl", schema::kScenes, scenes);
    written.push_back(out_dir / "scenes.jsonl");

    std::vector<json> truth(store.ground_truth_records().begin(),
                            store.ground_truth_records().end());
    write_jsonl(out_dir / "ground_truth.jsonl", schema::kGroundTruth, truth);
    written.push_back(out_dir / "ground_truth.jsonl");
  }

  for (CaptionVariant variant : kAllVariants) {
    const auto captions = render_samples(store, variant);
    const std::string stem = "captions-" + std::string(to_string(variant));
    if (format == ExportFormat::jsonl) {
      std::vector<json> records(captions.begin(), captions.end());
      write_jsonl(out_dir / (stem + ".jsonl"), schema::kCaptions, records);
      written.push_back(out_dir / (stem + ".jsonl"));
    } else {
      std::string text;
      for (const auto& c : captions) text += c.scene_id + "\t" + c.person_key + "\t" + c.text + "\n";
      write_file_atomic(out_dir / (stem + ".txt"), text);
      written.push_back(out_dir / (stem + ".txt"));
    }
  }
  return written;
}

std::vector<GroundTruthSample> DatasetBundle::agreed() const {
  std::vector<GroundTruthSample> out;
  for (const auto& r : ground_truth) {
    if (r.status == GroundTruthStatus::agreed) out.push_back({r.scene_id, r.person_key, r.label});
  }
  return out;
}

DatasetBundle import_bundle(const fs::path& dir) {
  DatasetBundle bundle;
  if (fs::exists(dir / "lexicon.json")) bundle.lexicon = load_lexicon(dir / "lexicon.json");
  const SignalLexicon& lexicon = bundle.lexicon ? *bundle.lexicon : default_lexicon();

  const auto scenes = read_jsonl(dir / "scenes.jsonl", schema::kScenes);
  for (std::size_t i = 0; i < scenes.records.size(); ++i) {
    const std::string where = "scenes.jsonl:" + std::to_string(i + 2);
    SceneAnnotation scene;
    try {
      scene = scenes.records[i].get<SceneAnnotation>();
    } catch (const SchemaError& e) {
      throw SchemaError("", where + ": " + e.what());
    }
    auto violations = validate_scene(scene, lexicon);
    if (!violations.empty()) {
      throw SchemaError("", where + ": " + violations.front().path + ": " + violations.front().message);
    }
    bundle.scenes.push_back(std::move(scene));
  }

  const auto truth = read_jsonl(dir / "ground_truth.jsonl", schema::kGroundTruth);
  for (std::size_t i = 0; i < truth.records.size(); ++i) {
    try {
      bundle.ground_truth.push_back(truth.records[i].get<GroundTruthRecord>());
    } catch (const SchemaError& e) {
      throw SchemaError("", "ground_truth.jsonl:" + std::to_string(i + 2) + ": " + e.what());
    }
  }
  dataset_statistics(bundle.agreed(), bundle.scenes, lexicon);
  return bundle;
}

}  // namespace emocap
