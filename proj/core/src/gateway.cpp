#include "emocap/gateway.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "emocap/error.hpp"

namespace emocap {

using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms
      << 'Z';
  return out.str();
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

std::string prompt_hash(const PromptSpec& prompt, const BackendConfig& config) {
  // nlohmann prints doubles in shortest round-trip form, which is stable
  // across platforms.
  const json key = json::array({prompt.template_version, prompt.caption_text, prompt.label_list,
                                config.model_name, config.temperature});
  return sha256_hex(key.dump());
}

void to_json(json& j, const CompletionBatch& v) {
  j = json{{"prompt_hash", v.prompt_hash},
           {"raw_completions", v.raw_completions},
           {"backend", to_string(v.backend)},
           {"model", v.model_name},
           {"started_at", v.started_at},
           {"finished_at", v.finished_at}};
}

CompletionBatch complete_n(const PromptSpec& prompt, const BackendConfig& config, int repeats,
                           CompletionBackend& backend) {
  if (repeats < 1) throw SchemaError("repeats", "repeats must be at least 1");
  CompletionBatch batch;
  batch.prompt_hash = prompt_hash(prompt, config);
  batch.backend = backend.kind();
  batch.model_name = config.model_name;
  batch.started_at = utc_now();

  CompletionRequest request{prompt.render(), batch.prompt_hash, 0};
  batch.raw_completions.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    request.repeat_index = i;
    batch.raw_completions.push_back(backend.complete(request));
  }
  batch.finished_at = utc_now();
  return batch;
}

}  // namespace emocap
