// emocap command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "emocap/aggregation.hpp"
#include "emocap/experiment.hpp"
#include "emocap/export.hpp"
#include "emocap/jsonl.hpp"
#include "emocap/response_cache.hpp"
#include "emocap/scene_json.hpp"
#include "emocap/service.hpp"
#include "emocap/signal_candidates.hpp"
#include "emocap/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emocap;

namespace {

struct BackendFlags {
  std::string kind;
  std::optional<int> repeats;
  std::string cache;
  std::optional<std::uint64_t> mock_seed;
  std::string mock_table;
  bool mock_echo_truth = false;
  std::size_t parallelism = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "live, mock or replay (default: manifest)")
        ->check(CLI::IsMember({"live", "mock", "replay"}));
    cmd->add_option("--repeats", repeats, "completions per prompt (default: manifest)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cache", cache, "response cache file (default: <store>/cache.jsonl)");
    auto* seed = cmd->add_option("--mock-seed", mock_seed, "mock: seeded random labels");
    auto* table = cmd->add_option("--mock-table", mock_table, "mock: transcript JSON file")
                      ->check(CLI::ExistingFile);
    auto* echo = cmd->add_flag("--mock-echo-truth", mock_echo_truth,
                               "mock: answer each sample with its ground-truth label");
    seed->excludes(table)->excludes(echo);
    table->excludes(echo);
    cmd->add_option("--parallelism", parallelism, "samples in flight")->check(CLI::PositiveNumber);
  }

  BackendConfig config(const ProjectStore& store) const {
    BackendConfig cfg = store.manifest().backend;
    if (!kind.empty()) cfg.kind = parse_backend_kind(kind);
    return cfg;
  }

  fs::path cache_path(const ProjectStore& store) const {
    return cache.empty() ? store.cache_path() : fs::path(cache);
  }

  std::unique_ptr<CompletionBackend> make(const ProjectStore& store, CaptionVariant variant) const {
    const BackendConfig cfg = config(store);
    switch (cfg.kind) {
      case BackendKind::live:
        return make_backend(cfg, std::make_shared<ResponseCache>(cache_path(store)));
      case BackendKind::replay:
        return std::make_unique<ReplayBackend>(std::make_shared<ResponseCache>(cache_path(store)));
      case BackendKind::mock:
        break;
    }
    if (mock_seed) {
      return std::make_unique<MockBackend>(MockBackend::seeded(*mock_seed, store.lexicon().label_names()));
    }
    if (!mock_table.empty()) return std::make_unique<MockBackend>(MockBackend::load_transcript(mock_table));
    if (mock_echo_truth) return std::make_unique<MockBackend>(truth_echo_backend(store, variant, cfg));
    throw SchemaError("backend", "the mock backend needs --mock-seed, --mock-table or --mock-echo-truth");
  }
};

std::vector<CaptionVariant> variants_of(const std::string& text) {
  if (text == "all") return {kAllVariants.begin(), kAllVariants.end()};
  return {parse_variant(text)};
}

template <typename T>
std::vector<T> read_records(const fs::path& path, std::string_view schema_name) {
  const auto doc = read_jsonl(path, schema_name);
  std::vector<T> out;
  for (std::size_t i = 0; i < doc.records.size(); ++i) {
    try {
      out.push_back(doc.records[i].get<T>());
    } catch (const std::exception& e) {
      throw SchemaError("", path.string() + ":" + std::to_string(i + 2) + ": " + e.what());
    }
  }
  return out;
}

void print_violations(const std::string& where, const std::vector<Violation>& violations) {
  for (const auto& v : violations) {
    std::cout << where << ": " << v.path << ": " << to_string(v.code) << ": " << v.message << "\n";
  }
}

int cmd_validate(const fs::path& store_root, const std::vector<std::string>& files) {
  std::optional<ProjectStore> store;
  if (fs::exists(store_root / "manifest.json")) store = ProjectStore::open(store_root);
  const SignalLexicon& lexicon = store ? store->lexicon() : default_lexicon();

  std::size_t checked = 0;
  std::size_t bad = 0;
  auto check = [&](const std::string& where, const SceneAnnotation& scene) {
    ++checked;
    auto violations = validate_scene(scene, lexicon);
    if (!violations.empty()) {
      ++bad;
      print_violations(where, violations);
    }
  };
  if (files.empty()) {
    if (!store) throw StoreError("no project at " + store_root.string() + " and no files given");
    for (const auto& scene : store->scenes()) check(scene.scene_id, scene);
    const auto samples = store->ground_truth();
    dataset_statistics(samples, store->scenes(), store->lexicon());
  } else {
    for (const auto& file : files) {
      const auto doc = read_jsonl(file, schema::kScenes);
      for (std::size_t i = 0; i < doc.records.size(); ++i) {
        const std::string where = file + ":" + std::to_string(i + 2);
        try {
          check(where, doc.records[i].get<SceneAnnotation>());
        } catch (const SchemaError& e) {
          ++checked;
          ++bad;
          std::cout << where << ": " << e.what() << "\n";
        }
      }
    }
  }
  std::cerr << checked << " scene(s) checked, " << bad << " invalid\n";
  return bad == 0 ? 0 : 1;
}

void write_output(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    write_file_atomic(out, content);
  }
}

void print_table(const EvaluationReport& report) {
  std::cout << display_name(report.variant) << "\n" << report_csv(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caption-based contextual emotion estimation workbench"};
  app.require_subcommand(1);
  std::string store_dir = ".";
  app.add_option("-s,--store", store_dir, "project directory");

  // init
  auto* init = app.add_subcommand("init", "create a project directory");
  std::string init_lexicon;
  std::string init_backend;
  int init_repeats = 10;
  init->add_option("--lexicon", init_lexicon, "lexicon JSON (default: built-in)")->check(CLI::ExistingFile);
  init->add_option("--backend-config", init_backend, "BackendConfig JSON")->check(CLI::ExistingFile);
  init->add_option("--repeats", init_repeats, "default completions per prompt")->check(CLI::PositiveNumber);

  // validate
  auto* validate = app.add_subcommand("validate", "check scenes against the lexicon");
  std::vector<std::string> validate_files;
  validate->add_option("files", validate_files, "scenes.jsonl files (default: the project)");

  // render
  auto* render_cmd = app.add_subcommand("render", "render captions");
  std::string render_variant = "full";
  std::string render_out;
  bool render_all_persons = false;
  bool render_jsonl = false;
  render_cmd->add_option("--variant", render_variant, "caption variant or 'all'");
  render_cmd->add_option("-o,--out", render_out, "output file (default: stdout)");
  render_cmd->add_flag("--all-persons", render_all_persons, "every person, not only ground-truth samples");
  render_cmd->add_flag("--jsonl", render_jsonl, "emit caption records instead of text");

  // predict
  auto* predict = app.add_subcommand("predict", "query the backend and write predictions");
  std::string predict_variant = "full";
  std::string predict_out;
  BackendFlags predict_flags;
  predict->add_option("--variant", predict_variant, "caption variant");
  predict->add_option("-o,--out", predict_out, "predictions file (default: <store>/predictions/<variant>.jsonl)");
  predict_flags.attach(predict);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
  std::string eval_predictions;
  std::string eval_truth;
  std::string eval_variant = "full";
  std::string eval_lexicon;
  std::string eval_out_dir;
  evaluate->add_option("--predictions", eval_predictions, "predictions JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_truth, "ground-truth JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--variant", eval_variant, "caption variant")->required();
  evaluate->add_option("--lexicon", eval_lexicon, "lexicon JSON (default: project or built-in)");
  evaluate->add_option("--out-dir", eval_out_dir, "also write report.json, report.csv, matrix.txt");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "render, predict and evaluate in one step");
  std::string exp_variant = "all";
  BackendFlags exp_flags;
  experiment->add_option("--variant", exp_variant, "caption variant or 'all'");
  exp_flags.attach(experiment);

  // stats
  auto* stats = app.add_subcommand("stats", "ground-truth counts per label and scene type");

  // export / import
  auto* export_cmd = app.add_subcommand("export", "write a redistributable dataset bundle");
  std::string export_out;
  std::string export_format = "jsonl";
  export_cmd->add_option("-o,--out", export_out, "output directory")->required();
  export_cmd->add_option("--format", export_format, "jsonl or text")->check(CLI::IsMember({"jsonl", "text"}));

  auto* import_cmd = app.add_subcommand("import", "replace the project's dataset with a bundle");
  std::string import_dir;
  import_cmd->add_option("bundle", import_dir, "bundle directory")->required()->check(CLI::ExistingDirectory);

  // candidates
  auto* candidates = app.add_subcommand("candidates", "ask the backend for emotion cue phrases");
  std::string cand_emotion;
  std::string cand_template = "list-cues";
  BackendFlags cand_flags;
  candidates->add_option("--emotion", cand_emotion, "emotion word")->required();
  candidates->add_option("--template", cand_template, "list-cues or describe-feeling");
  cand_flags.attach(candidates);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port (0 picks one)");
  serve_cmd->add_option("--ui", ui_dir, "static UI directory");

  CLI11_PARSE(app, argc, argv);
  const fs::path root = store_dir;

  try {
    if (*init) {
      StoreManifest manifest;
      manifest.repeats = init_repeats;
      if (!init_backend.empty()) {
        std::ifstream in(init_backend);
        manifest.backend = json::parse(in).get<BackendConfig>();
      }
      const SignalLexicon lexicon = init_lexicon.empty() ? default_lexicon() : load_lexicon(init_lexicon);
      ProjectStore::init(root, lexicon, manifest);
      std::cout << "initialized " << root.string() << " (lexicon " << lexicon.version() << ")\n";
      return 0;
    }

    if (*validate) return cmd_validate(root, validate_files);

    if (*evaluate) {
      // Works without a project when --lexicon is given.
      SignalLexicon lexicon;
      if (!eval_lexicon.empty()) {
        lexicon = load_lexicon(eval_lexicon);
      } else if (fs::exists(root / "manifest.json")) {
        lexicon = ProjectStore::open(root).lexicon();
      } else {
        lexicon = default_lexicon();
      }
      const auto variant = parse_variant(eval_variant);
      const auto predictions = read_records<PredictionRecord>(eval_predictions, schema::kPredictions);
      std::vector<GroundTruthSample> truth;
      for (const auto& r : read_records<GroundTruthRecord>(eval_truth, schema::kGroundTruth)) {
        if (r.status == GroundTruthStatus::agreed) truth.push_back({r.scene_id, r.person_key, r.label});
      }
      const auto labels = lexicon.label_names();
      const EvaluationReport report = score(predictions, truth, variant, labels);
      if (!eval_out_dir.empty()) {
        fs::create_directories(eval_out_dir);
        write_file_atomic(fs::path(eval_out_dir) / "report.json", report_json(report));
        write_file_atomic(fs::path(eval_out_dir) / "report.csv", report_csv(report));
        write_file_atomic(fs::path(eval_out_dir) / "matrix.txt", confusion_matrix_text(report.matrix));
      }
      print_table(report);
      return 0;
    }

    if (*serve_cmd) {
      ServiceOptions options;
      options.ui_dir = ui_dir;
      serve(root, host, port, options, [&](int bound) {
        std::cout << "listening on http://" << host << ":" << bound << std::endl;
      });
      return 0;
    }

    if (*candidates) {
      std::optional<ProjectStore> store;
      BackendConfig cfg;
      if (fs::exists(root / "manifest.json")) {
        store = ProjectStore::open(root);
        cfg = cand_flags.config(*store);
      }
      if (!cand_flags.kind.empty()) cfg.kind = parse_backend_kind(cand_flags.kind);
      std::unique_ptr<CompletionBackend> backend;
      if (cfg.kind == BackendKind::mock) {
        if (cand_flags.mock_table.empty()) throw SchemaError("backend", "candidates with a mock backend need --mock-table");
        backend = std::make_unique<MockBackend>(MockBackend::load_transcript(cand_flags.mock_table));
      } else {
        const fs::path cache = cand_flags.cache.empty() ? root / "cache.jsonl" : fs::path(cand_flags.cache);
        backend = make_backend(cfg, std::make_shared<ResponseCache>(cache));
      }
      for (const auto& phrase : generate_signal_candidates(
               cand_emotion, parse_candidate_template(cand_template), *backend, cfg.model_name)) {
        std::cout << phrase << "\n";
      }
      return 0;
    }

    // Everything below needs a project.
    std::optional<StoreLock> lock;
    if (*import_cmd || *predict || *experiment) lock.emplace(root);
    ProjectStore store = ProjectStore::open(root);

    if (*render_cmd) {
      std::string content;
      for (CaptionVariant variant : variants_of(render_variant)) {
        const auto captions = render_all_persons ? render_all(store, variant) : render_samples(store, variant);
        for (const auto& c : captions) {
          content += render_jsonl ? json(c).dump() + "\n" : c.text + "\n";
        }
      }
      write_output(render_out, content);
      return 0;
    }

    if (*predict) {
      ExperimentOptions opts;
      opts.variant = parse_variant(predict_variant);
      opts.repeats = predict_flags.repeats;
      opts.backend = predict_flags.config(store);
      opts.parallelism = predict_flags.parallelism;
      auto backend = predict_flags.make(store, opts.variant);
      const ExperimentResult result = predict_samples(store, opts, *backend);
      const fs::path out = predict_out.empty() ? store.predictions_path(opts.variant) : fs::path(predict_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      std::vector<json> records(result.predictions.begin(), result.predictions.end());
      write_jsonl(out, schema::kPredictions, records);
      std::cerr << result.predictions.size() << " prediction(s), " << result.completions
                << " completion(s) -> " << out.string() << "\n";
      return 0;
    }

    if (*experiment) {
      std::vector<EvaluationReport> reports;
      for (CaptionVariant variant : variants_of(exp_variant)) {
        ExperimentOptions opts;
        opts.variant = variant;
        opts.repeats = exp_flags.repeats;
        opts.backend = exp_flags.config(store);
        opts.parallelism = exp_flags.parallelism;
        auto backend = exp_flags.make(store, variant);
        reports.push_back(run_experiment(store, opts, *backend).report);
        print_table(reports.back());
      }
      if (reports.size() > 1) {
        write_file_atomic(store.root() / "reports" / "comparison.csv", comparison_csv(reports));
      }
      return 0;
    }

    if (*stats) {
      const auto samples = store.ground_truth();
      const DatasetStatistics s = dataset_statistics(samples, store.scenes(), store.lexicon());
      std::cout << "Emotion,One Person,Multiple People,Total\n";
      for (const auto& r : s.rows) {
        std::cout << r.label << ',' << r.one_person << ',' << r.multiple_people << ',' << r.total() << "\n";
      }
      std::cout << "Total," << s.one_person_total << ',' << s.multiple_people_total << ',' << s.total() << "\n";
      return 0;
    }

    if (*export_cmd) {
      for (const auto& p : export_dataset(store, export_out, parse_export_format(export_format))) {
        std::cout << p.string() << "\n";
      }
      return 0;
    }

    if (*import_cmd) {
      DatasetBundle bundle = import_bundle(import_dir);
      if (bundle.lexicon && !(*bundle.lexicon == store.lexicon())) {
        throw StoreError("bundle lexicon '" + bundle.lexicon->version() +
                         "' differs from the project lexicon '" + store.lexicon().version() + "'");
      }
      const std::size_t n = bundle.scenes.size();
      store.replace_dataset(std::move(bundle.scenes), std::move(bundle.ground_truth));
      std::cout << "imported " << n << " scene(s)\n";
      return 0;
    }
  } catch (const SceneRejected& e) {
    print_violations("scene", e.violations());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
