#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "emocap/backend.hpp"
#include "emocap/store.hpp"

namespace emocap {

/// Builds the backend for POST /api/experiments from the request body.
using BackendFactory =
    std::function<std::unique_ptr<CompletionBackend>(const nlohmann::json& request,
                                                     const ProjectStore& store)>;

/// Understands {"backend": {...}} plus, for mock runs, one of
/// {"mock": {"seed": N}}, {"mock": {"echo_truth": true}} or
/// {"mock": {"transcript": {...}}}.
std::unique_ptr<CompletionBackend> default_backend_factory(const nlohmann::json& request,
                                                           const ProjectStore& store);

struct ServiceOptions {
  /// Served at "/" when the directory exists.
  std::filesystem::path ui_dir;
  BackendFactory backend_factory = default_backend_factory;
};

/// HTTP JSON API over a ProjectStore:
///
///   GET  /api/lexicon
///   GET  /api/scenes               POST /api/scenes
///   GET  /api/scenes/{id}
///   POST /api/scenes/{id}/preview?variant=...&person=...
///   GET  /api/ground-truth         POST /api/ground-truth
///   GET  /api/statistics
///   POST /api/experiments
///   GET  /api/reports/{variant}
///
/// Store mutations are serialized inside the service.
class WorkbenchService {
 public:
  explicit WorkbenchService(ProjectStore store, ServiceOptions options = {});
  ~WorkbenchService();
  WorkbenchService(const WorkbenchService&) = delete;
  WorkbenchService& operator=(const WorkbenchService&) = delete;

  /// Binds without serving. Port 0 picks a free port. Returns the port;
  /// throws StoreError on bind failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Takes the store lock, binds and serves until the process is stopped.
/// `on_ready` receives the bound port before serving starts.
void serve(const std::filesystem::path& store_root, const std::string& host, int port,
           ServiceOptions options = {}, const std::function<void(int)>& on_ready = {});

}  // namespace emocap
