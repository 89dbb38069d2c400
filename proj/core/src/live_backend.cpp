#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "emocap/backend.hpp"
#include "emocap/error.hpp"
#include "emocap/response_cache.hpp"

namespace emocap {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // "" or "/v1"
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw SchemaError("backend.endpoint", "expected an absolute http(s) URL");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) e.base_path = url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

}  // namespace

LiveBackend::LiveBackend(BackendConfig config, std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)),
      cache_(std::move(cache)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  config_.validate();
  split_endpoint(config_.endpoint);
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

json LiveBackend::request_body(std::string_view prompt) const {
  return json{{"model", config_.model_name},
              {"prompt", prompt},
              {"temperature", config_.temperature},
              {"max_tokens", config_.max_tokens},
              {"n", 1}};
}

std::string LiveBackend::complete(const CompletionRequest& request) {
  const Endpoint endpoint = split_endpoint(config_.endpoint);
  const std::string body = request_body(request.prompt).dump();
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  bool rate_limited = false;
  auto backoff = config_.retry.initial_backoff;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      sleeper_(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * config_.retry.multiplier));
    }

    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto res = client.Post(endpoint.base_path + "/completions", headers, body, "application/json");

    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    if (res->status == 429) {
      last_error = "rate limited (HTTP 429)";
      rate_limited = true;
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error (HTTP " + std::to_string(res->status) + ")";
      rate_limited = false;
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError("completion request rejected with HTTP " + std::to_string(res->status) +
                          ": " + res->body.substr(0, 512));
    }

    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw ProtocolError(std::string("completion response is not JSON: ") + e.what());
    }
    const auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty() ||
        !(*choices)[0].contains("text") || !(*choices)[0]["text"].is_string()) {
      throw ProtocolError("completion response lacks choices[0].text");
    }
    std::string text = (*choices)[0]["text"].get<std::string>();
    if (cache_) cache_->put(request.prompt_hash, request.repeat_index, text, config_.model_name);
    return text;
  }

  const std::string message = "completion failed after " +
                              std::to_string(config_.retry.max_attempts) + " attempts: " + last_error;
  if (rate_limited) throw RateLimitError(message);
  throw NetworkError(message);
}

}  // namespace emocap
