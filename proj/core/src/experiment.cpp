#include "emocap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "emocap/gateway.hpp"
#include "emocap/jsonl.hpp"
#include "emocap/prompt.hpp"

namespace emocap {

namespace {

std::vector<Caption> render_for(const ProjectStore& store, CaptionVariant variant,
                                const std::vector<GroundTruthSample>& samples) {
  std::vector<Caption> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const SceneAnnotation* scene = store.find_scene(s.scene_id);
    if (scene == nullptr) {
      throw ReferenceError("ground truth references unknown scene '" + s.scene_id + "'");
    }
    out.push_back(render(*scene, s.person_key, variant, store.manifest().names,
                         store.manifest().caption));
  }
  return out;
}

void persist(const ProjectStore& store, CaptionVariant variant, const ExperimentResult& result) {
  std::filesystem::create_directories(store.captions_path(variant, "jsonl").parent_path());
  std::filesystem::create_directories(store.predictions_path(variant).parent_path());
  std::filesystem::create_directories(store.report_path(variant, "json").parent_path());

  std::vector<nlohmann::json> captions(result.captions.begin(), result.captions.end());
  write_jsonl(store.captions_path(variant, "jsonl"), schema::kCaptions, captions);
  std::string text;
  for (const auto& c : result.captions) text += c.text + "\n";
  write_file_atomic(store.captions_path(variant, "txt"), text);

  std::vector<nlohmann::json> predictions(result.predictions.begin(), result.predictions.end());
  write_jsonl(store.predictions_path(variant), schema::kPredictions, predictions);

  write_file_atomic(store.report_path(variant, "json"), report_json(result.report));
  write_file_atomic(store.report_path(variant, "csv"), report_csv(result.report));
  write_file_atomic(store.report_path(variant, "txt"), confusion_matrix_text(result.report.matrix));
}

}  // namespace

std::vector<Caption> render_samples(const ProjectStore& store, CaptionVariant variant) {
  return render_for(store, variant, store.ground_truth());
}

std::vector<Caption> render_all(const ProjectStore& store, CaptionVariant variant) {
  std::vector<Caption> out;
  for (const auto& scene : store.scenes()) {
    for (const auto& person : scene.persons) {
      out.push_back(render(scene, person.person_key, variant, store.manifest().names,
                           store.manifest().caption));
    }
  }
  return out;
}

ExperimentResult predict_samples(const ProjectStore& store, const ExperimentOptions& options,
                                 CompletionBackend& backend) {
  const BackendConfig config = options.backend.value_or(store.manifest().backend);
  const int repeats = options.repeats.value_or(store.manifest().repeats);
  if (repeats < 1) throw SchemaError("repeats", "must be at least 1");
  const auto labels = store.lexicon().label_names();

  ExperimentResult result;
  result.captions = render_samples(store, options.variant);
  const std::size_t n = result.captions.size();
  result.predictions.resize(n);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const Caption& caption = result.captions[i];
        const PromptSpec prompt = build_prompt(caption, labels, store.manifest().prompt);
        const CompletionBatch batch = complete_n(prompt, config, repeats, backend);
        result.predictions[i] = aggregate(
            batch, store.lexicon(), {caption.scene_id, caption.person_key, options.variant});
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.parallelism, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  result.completions = n * static_cast<std::size_t>(repeats);
  return result;
}

ExperimentResult run_experiment(ProjectStore& store, const ExperimentOptions& options,
                                CompletionBackend& backend) {
  ExperimentResult result = predict_samples(store, options, backend);
  const auto truth = store.ground_truth();
  const auto labels = store.lexicon().label_names();
  result.report = score(result.predictions, truth, options.variant, labels);
  if (options.persist) persist(store, options.variant, result);
  return result;
}

MockBackend truth_echo_backend(const ProjectStore& store, CaptionVariant variant,
                               const std::optional<BackendConfig>& backend) {
  const BackendConfig config = backend.value_or(store.manifest().backend);
  const auto labels = store.lexicon().label_names();
  const auto truth = store.ground_truth();
  const auto captions = render_for(store, variant, truth);
  MockBackend::Transcript table;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const PromptSpec prompt = build_prompt(captions[i], labels, store.manifest().prompt);
    const std::string hash = prompt_hash(prompt, config);
    auto [it, inserted] = table.emplace(hash, std::vector<std::string>{truth[i].label});
    if (!inserted && it->second.front() != truth[i].label) {
      throw Error("samples " + truth[i].scene_id + "/" + truth[i].person_key +
                  " and another sample render the same prompt with different labels");
    }
  }
  return MockBackend::from_transcript(std::move(table));
}

}  // namespace emocap
