#include "emocap/backend.hpp"

#include <fstream>
#include <sstream>

#include "emocap/error.hpp"
#include "emocap/response_cache.hpp"
#include "json_util.hpp"

namespace emocap {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::live: return "live";
    case BackendKind::mock: return "mock";
    case BackendKind::replay: return "replay";
  }
  return "mock";
}

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "live") return BackendKind::live;
  if (text == "mock") return BackendKind::mock;
  if (text == "replay") return BackendKind::replay;
  throw SchemaError("backend.kind", "expected live, mock or replay, got '" + std::string(text) + "'");
}

void BackendConfig::validate() const {
  if (!(temperature >= 0.0)) throw SchemaError("backend.temperature", "must be >= 0");
  if (max_tokens < 1) throw SchemaError("backend.max_tokens", "must be >= 1");
  if (retry.max_attempts < 1) throw SchemaError("backend.retry.max_attempts", "must be >= 1");
  if (kind == BackendKind::live) {
    if (endpoint.empty()) throw SchemaError("backend.endpoint", "a live backend needs an endpoint");
    if (api_key_env.empty()) {
      throw SchemaError("backend.api_key_env", "a live backend needs an API key variable name");
    }
  }
}

void to_json(json& j, const BackendConfig& cfg) {
  j = json{{"kind", to_string(cfg.kind)},
           {"endpoint", cfg.endpoint},
           {"model", cfg.model_name},
           {"temperature", cfg.temperature},
           {"max_tokens", cfg.max_tokens},
           {"api_key_env", cfg.api_key_env},
           {"retry",
            {{"max_attempts", cfg.retry.max_attempts},
             {"initial_backoff_ms", cfg.retry.initial_backoff.count()},
             {"multiplier", cfg.retry.multiplier}}},
           {"timeout_s", cfg.timeout.count()}};
}

void from_json(const json& j, BackendConfig& cfg) {
  if (!j.is_object()) throw SchemaError("backend", "expected an object");
  BackendConfig c;
  if (auto it = j.find("kind"); it != j.end()) {
    if (!it->is_string()) throw SchemaError("backend.kind", "expected a string");
    c.kind = parse_backend_kind(it->get<std::string>());
  }
  c.endpoint = detail::optional_string(j, "endpoint", "backend", c.endpoint);
  c.model_name = detail::optional_string(j, "model", "backend", c.model_name);
  c.api_key_env = detail::optional_string(j, "api_key_env", "backend", c.api_key_env);
  auto number = [&](const json& obj, const char* key, const std::string& path, auto& out) {
    if (auto it = obj.find(key); it != obj.end()) {
      if (!it->is_number()) throw SchemaError(path + "." + key, "expected a number");
      it->get_to(out);
    }
  };
  number(j, "temperature", "backend", c.temperature);
  number(j, "max_tokens", "backend", c.max_tokens);
  if (auto it = j.find("retry"); it != j.end()) {
    number(*it, "max_attempts", "backend.retry", c.retry.max_attempts);
    long long backoff = c.retry.initial_backoff.count();
    number(*it, "initial_backoff_ms", "backend.retry", backoff);
    c.retry.initial_backoff = std::chrono::milliseconds(backoff);
    number(*it, "multiplier", "backend.retry", c.retry.multiplier);
  }
  long long timeout = c.timeout.count();
  number(j, "timeout_s", "backend", timeout);
  c.timeout = std::chrono::seconds(timeout);
  c.validate();
  cfg = std::move(c);
}

MockBackend::MockBackend(Responder responder) : responder_(std::move(responder)) {
  if (!responder_) throw BackendError("mock backend needs a responder");
}

MockBackend MockBackend::constant(std::string response) {
  return MockBackend([response = std::move(response)](const CompletionRequest&) { return response; });
}

MockBackend MockBackend::from_transcript(Transcript table) {
  return MockBackend([table = std::move(table)](const CompletionRequest& req) {
    auto it = table.find(req.prompt_hash);
    if (it == table.end() || it->second.empty()) {
      throw ReplayMissError("mock transcript has no entry for prompt " + req.prompt_hash);
    }
    const auto& responses = it->second;
    return responses[static_cast<std::size_t>(req.repeat_index) % responses.size()];
  });
}

namespace {

std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 14695981039346656037ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

MockBackend MockBackend::seeded(std::uint64_t seed, std::vector<std::string> vocabulary) {
  if (vocabulary.empty()) throw BackendError("seeded mock needs a non-empty vocabulary");
  return MockBackend([seed, vocabulary = std::move(vocabulary)](const CompletionRequest& req) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(fnv1a(req.prompt_hash) +
                                                         static_cast<std::uint64_t>(req.repeat_index)));
    return vocabulary[h % vocabulary.size()];
  });
}

MockBackend MockBackend::load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot open mock transcript " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const json doc = detail::parse_json(buf.str(), "transcript");
  if (!doc.is_object()) throw SchemaError("transcript", "expected an object of prompt hashes");
  Transcript table;
  for (const auto& [hash, value] : doc.items()) {
    if (value.is_string()) {
      table[hash] = {value.get<std::string>()};
    } else if (value.is_array() && !value.empty()) {
      for (const auto& r : value) {
        if (!r.is_string()) throw SchemaError("transcript." + hash, "expected strings");
        table[hash].push_back(r.get<std::string>());
      }
    } else {
      throw SchemaError("transcript." + hash, "expected a string or a non-empty array");
    }
  }
  return from_transcript(std::move(table));
}

std::string MockBackend::complete(const CompletionRequest& request) { return responder_(request); }

ReplayBackend::ReplayBackend(std::shared_ptr<const ResponseCache> cache) : cache_(std::move(cache)) {
  if (!cache_) throw BackendError("replay backend needs a response cache");
}

std::string ReplayBackend::complete(const CompletionRequest& request) {
  if (auto hit = cache_->get(request.prompt_hash, request.repeat_index)) return *hit;
  throw ReplayMissError("no cached completion for prompt " + request.prompt_hash + " repeat " +
                        std::to_string(request.repeat_index));
}

std::unique_ptr<CompletionBackend> make_backend(const BackendConfig& config,
                                                std::shared_ptr<ResponseCache> cache) {
  config.validate();
  switch (config.kind) {
    case BackendKind::live: return std::make_unique<LiveBackend>(config, std::move(cache));
    case BackendKind::replay: return std::make_unique<ReplayBackend>(std::move(cache));
    case BackendKind::mock: break;
  }
  throw SchemaError("kind", "mock backends are built from a transcript or seed, not from configuration");
}

}  // namespace emocap
