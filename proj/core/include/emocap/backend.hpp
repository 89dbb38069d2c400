#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace emocap {

class ResponseCache;

enum class BackendKind { live, mock, replay };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
};

struct BackendConfig {
  BackendKind kind = BackendKind::mock;
  /// Base URL of an OpenAI-compatible API, e.g. "https://api.openai.com/v1".
  std::string endpoint;
  std::string model_name = "text-davinci-003";
  double temperature = 0.0;
  int max_tokens = 16;
  std::string api_key_env = "OPENAI_API_KEY";
  RetryPolicy retry;
  std::chrono::seconds timeout{60};

  /// Throws SchemaError when temperature < 0, max_tokens < 1, or a live
  /// backend lacks an endpoint or key variable name.
  void validate() const;
};

void to_json(nlohmann::json& j, const BackendConfig& cfg);
void from_json(const nlohmann::json& j, BackendConfig& cfg);

struct CompletionRequest {
  std::string prompt;
  std::string prompt_hash;
  int repeat_index = 0;
};

/// One completion per call. Implementations must be callable from several
/// threads at once.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual BackendKind kind() const noexcept = 0;
};

/// Deterministic in-process backend driven by a responder function.
class MockBackend final : public CompletionBackend {
 public:
  using Responder = std::function<std::string(const CompletionRequest&)>;
  /// prompt_hash -> responses; repeat i receives entry i modulo the size.
  using Transcript = std::map<std::string, std::vector<std::string>>;

  explicit MockBackend(Responder responder);

  static MockBackend constant(std::string response);

  /// Unknown prompt hashes raise ReplayMissError, like a cache miss.
  static MockBackend from_transcript(Transcript table);

  /// Picks a response from `vocabulary` by hashing (seed, prompt_hash,
  /// repeat_index), so results do not depend on call order.
  static MockBackend seeded(std::uint64_t seed, std::vector<std::string> vocabulary);

  /// Loads a transcript table from a JSON object of
  /// {"<prompt_hash>": "response" | ["r0", "r1", ...]}.
  static MockBackend load_transcript(const std::filesystem::path& path);

  std::string complete(const CompletionRequest& request) override;
  BackendKind kind() const noexcept override { return BackendKind::mock; }

 private:
  Responder responder_;
};

/// Serves stored completions; never touches the network.
class ReplayBackend final : public CompletionBackend {
 public:
  explicit ReplayBackend(std::shared_ptr<const ResponseCache> cache);

  std::string complete(const CompletionRequest& request) override;
  BackendKind kind() const noexcept override { return BackendKind::replay; }

 private:
  std::shared_ptr<const ResponseCache> cache_;
};

/// POSTs to {endpoint}/completions. Every successful response is written to
/// the cache before it is returned.
class LiveBackend final : public CompletionBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  LiveBackend(BackendConfig config, std::shared_ptr<ResponseCache> cache);

  /// Replaces the sleep used between retries (tests pass a recorder).
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

  std::string complete(const CompletionRequest& request) override;
  BackendKind kind() const noexcept override { return BackendKind::live; }

  /// The JSON body sent for a prompt.
  nlohmann::json request_body(std::string_view prompt) const;

 private:
  BackendConfig config_;
  std::shared_ptr<ResponseCache> cache_;
  std::string api_key_;
  Sleeper sleeper_;
};

/// Builds a live or replay backend from configuration. Mock backends carry
/// test data and must be constructed directly; asking for one here throws.
std::unique_ptr<CompletionBackend> make_backend(const BackendConfig& config,
                                                std::shared_ptr<ResponseCache> cache);

}  // namespace emocap
