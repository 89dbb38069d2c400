#include "emocap/service.hpp"

#include <mutex>
#include <thread>

#include "emocap/experiment.hpp"
#include "emocap/response_cache.hpp"
#include "emocap/scene_json.hpp"
#include "httplib.h"

namespace emocap {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, json{{"error", message}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) throw SchemaError("", "request body is empty");
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
}

// Maps library errors onto status codes.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const SceneRejected& e) {
    reply(res, 422, json{{"error", "scene rejected"}, {"violations", e.violations()}});
  } catch (const VersionConflict& e) {
    reply(res, 409, json{{"error", e.what()}, {"current_version", e.current_version()}});
  } catch (const SchemaError& e) {
    reply(res, 400, json{{"error", e.what()}, {"field", e.field()}});
  } catch (const json::exception& e) {
    reply_error(res, 400, e.what());
  } catch (const ReferenceError& e) {
    reply_error(res, 404, e.what());
  } catch (const RenderError& e) {
    reply_error(res, 422, e.what());
  } catch (const EvaluationError& e) {
    reply_error(res, 422, e.what());
  } catch (const BackendError& e) {
    reply_error(res, 502, e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

std::vector<std::string> label_names_of(const ProjectStore& store) {
  return store.lexicon().label_names();
}

}  // namespace

std::unique_ptr<CompletionBackend> default_backend_factory(const json& request,
                                                           const ProjectStore& store) {
  BackendConfig config = store.manifest().backend;
  if (auto it = request.find("backend"); it != request.end()) config = it->get<BackendConfig>();
  if (config.kind != BackendKind::mock) {
    return make_backend(config, std::make_shared<ResponseCache>(store.cache_path()));
  }
  auto mock = request.find("mock");
  if (mock == request.end() || !mock->is_object()) {
    throw SchemaError("mock", "a mock run needs one of seed, echo_truth or transcript");
  }
  if (auto seed = mock->find("seed"); seed != mock->end()) {
    return std::make_unique<MockBackend>(
        MockBackend::seeded(seed->get<std::uint64_t>(), label_names_of(store)));
  }
  if (mock->value("echo_truth", false)) {
    const auto variant = parse_variant(request.value("variant", std::string("full")));
    return std::make_unique<MockBackend>(truth_echo_backend(store, variant, config));
  }
  if (auto t = mock->find("transcript"); t != mock->end()) {
    MockBackend::Transcript table;
    for (const auto& [hash, value] : t->items()) {
      table[hash] = value.is_string() ? std::vector<std::string>{value.get<std::string>()}
                                      : value.get<std::vector<std::string>>();
    }
    return std::make_unique<MockBackend>(MockBackend::from_transcript(std::move(table)));
  }
  throw SchemaError("mock", "a mock run needs one of seed, echo_truth or transcript");
}

struct WorkbenchService::Impl {
  ProjectStore store;
  ServiceOptions options;
  httplib::Server server;
  std::mutex mutex;
  std::thread thread;
  bool bound = false;

  Impl(ProjectStore s, ServiceOptions o) : store(std::move(s)), options(std::move(o)) { routes(); }

  void routes();
};

void WorkbenchService::Impl::routes() {
  server.Get("/api/lexicon", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { res.set_content(serialize_lexicon(store.lexicon()), kJson); });
  });

  server.Get("/api/scenes", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mutex);
      reply(res, 200, json{{"scenes", store.scenes()}});
    });
  });

  server.Get(R"(/api/scenes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mutex);
      const SceneAnnotation* scene = store.find_scene(req.matches[1].str());
      if (scene == nullptr) return reply_error(res, 404, "no scene '" + req.matches[1].str() + "'");
      reply(res, 200, *scene);
    });
  });

  // A body "version" is the version the client edited (0 for a new scene).
  server.Post("/api/scenes", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      SceneAnnotation scene = body.get<SceneAnnotation>();
      std::optional<std::uint64_t> expected;
      if (body.contains("version") && !body["version"].is_null()) expected = scene.version;
      std::lock_guard lock(mutex);
      const bool existed = store.find_scene(scene.scene_id) != nullptr;
      const SceneAnnotation& saved = store.save_scene(std::move(scene), expected);
      reply(res, existed ? 200 : 201, saved);
    });
  });

  // Renders the posted form state, or the stored scene when the body is empty.
  server.Post(R"(/api/scenes/([^/]+)/preview)",
              [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1].str();
      std::lock_guard lock(mutex);
      SceneAnnotation scene;
      if (req.body.empty()) {
        const SceneAnnotation* stored = store.find_scene(id);
        if (stored == nullptr) return reply_error(res, 404, "no scene '" + id + "'");
        scene = *stored;
      } else {
        scene = parse_body(req).get<SceneAnnotation>();
        if (scene.scene_id != id) throw SchemaError("scene_id", "does not match the URL");
        auto violations = validate_scene(scene, store.lexicon());
        if (!violations.empty()) throw SceneRejected(std::move(violations));
      }
      const CaptionVariant variant =
          req.has_param("variant") ? parse_variant(req.get_param_value("variant"))
                                   : CaptionVariant::full;
      if (scene.persons.empty()) throw RenderError("scene has no persons");
      const std::string person =
          req.has_param("person") ? req.get_param_value("person") : scene.persons.front().person_key;
      const auto& m = store.manifest();
      const Caption caption = render(scene, person, variant, m.names, m.caption);
      json body = caption;
      body["sentences"] = render_sentences(scene, person, variant, m.names, m.caption);
      reply(res, 200, body);
    });
  });

  server.Get("/api/ground-truth", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mutex);
      reply(res, 200, json{{"records", store.ground_truth_records()}});
    });
  });

  // {"judgments": [a, b]}
  server.Post("/api/ground-truth", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const json& pair = body.at("judgments");
      if (!pair.is_array() || pair.size() != 2) {
        throw SchemaError("judgments", "expected exactly two judgments");
      }
      const auto a = pair[0].get<Judgment>();
      const auto b = pair[1].get<Judgment>();
      std::lock_guard lock(mutex);
      reply(res, 200, GroundTruthRecord::from(store.submit_judgments(a, b)));
    });
  });

  server.Get("/api/statistics", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mutex);
      const auto samples = store.ground_truth();
      reply(res, 200, dataset_statistics(samples, store.scenes(), store.lexicon()));
    });
  });

  server.Post("/api/experiments", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      ExperimentOptions opts;
      opts.variant = parse_variant(body.value("variant", std::string("full")));
      if (body.contains("repeats")) opts.repeats = body["repeats"].get<int>();
      if (body.contains("backend")) opts.backend = body["backend"].get<BackendConfig>();
      opts.parallelism = body.value("parallelism", std::size_t{1});
      std::lock_guard lock(mutex);
      auto backend = options.backend_factory(body, store);
      const ExperimentResult result = run_experiment(store, opts, *backend);
      json out = result.report;
      out["completions"] = result.completions;
      reply(res, 200, out);
    });
  });

  server.Get(R"(/api/reports/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const CaptionVariant variant = parse_variant(req.matches[1].str());
      std::lock_guard lock(mutex);
      auto report = store.load_report(variant);
      if (!report) return reply_error(res, 404, "no report for " + req.matches[1].str());
      reply(res, 200, *report);
    });
  });

  if (!options.ui_dir.empty() && std::filesystem::is_directory(options.ui_dir)) {
    server.set_mount_point("/", options.ui_dir.string());
  }
}

WorkbenchService::WorkbenchService(ProjectStore store, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(store), std::move(options))) {}

WorkbenchService::~WorkbenchService() { stop(); }

int WorkbenchService::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw StoreError("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw StoreError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void WorkbenchService::run() {
  if (!impl_->bound) throw StoreError("service is not bound");
  impl_->server.listen_after_bind();
}

void WorkbenchService::start() {
  if (!impl_->bound) throw StoreError("service is not bound");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void WorkbenchService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void serve(const std::filesystem::path& store_root, const std::string& host, int port,
           ServiceOptions options, const std::function<void(int)>& on_ready) {
  StoreLock lock(store_root);
  WorkbenchService service(ProjectStore::open(store_root), std::move(options));
  const int bound = service.bind(host, port);
  if (on_ready) on_ready(bound);
  service.run();
}

}  // namespace emocap
