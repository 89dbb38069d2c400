#include "emocap/response_cache.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "emocap/error.hpp"
#include "emocap/jsonl.hpp"

namespace emocap {

using nlohmann::json;

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

void ResponseCache::load() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error&) {
      // Torn final append from an interrupted writer.
      ++skipped_lines_;
      continue;
    }
    if (first) {
      first = false;
      if (doc.contains("schema")) {
        check_jsonl_header(doc, schema::kCache, path_);
        continue;
      }
    }
    if (!doc.is_object() || !doc.contains("prompt_hash") || !doc.contains("index") ||
        !doc.contains("response")) {
      ++skipped_lines_;
      continue;
    }
    entries_[doc["prompt_hash"].get<std::string>()][doc["index"].get<int>()] =
        doc["response"].get<std::string>();
  }
}

std::optional<std::string> ResponseCache::get(const std::string& prompt_hash, int index) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(prompt_hash);
  if (it == entries_.end()) return std::nullopt;
  auto r = it->second.find(index);
  if (r == it->second.end()) return std::nullopt;
  return r->second;
}

std::vector<std::string> ResponseCache::responses(const std::string& prompt_hash) const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  auto it = entries_.find(prompt_hash);
  if (it == entries_.end()) return out;
  for (int i = 0;; ++i) {
    auto r = it->second.find(i);
    if (r == it->second.end()) break;
    out.push_back(r->second);
  }
  return out;
}

void ResponseCache::put(const std::string& prompt_hash, int index, const std::string& response,
                        const std::string& model) {
  std::lock_guard lock(mutex_);
  entries_[prompt_hash][index] = response;
  if (path_.empty()) return;

  const bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
  std::string chunk;
  if (fresh) chunk = jsonl_header(schema::kCache) + "\n";
  chunk += json{{"prompt_hash", prompt_hash}, {"index", index}, {"response", response}, {"model", model}}
               .dump() +
           "\n";
  // One write per record; a crash can only tear the final line, which load()
  // skips.
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot append to response cache " + path_.string());
  out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  out.flush();
  if (!out) throw StoreError("failed appending to response cache " + path_.string());
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& [hash, responses] : entries_) n += responses.size();
  return n;
}

}  // namespace emocap
