#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace emocap {

/// Append-only JSON-lines store of completions keyed by (prompt_hash,
/// repeat index). Writes are serialized; a put is visible to get() in the
/// same process as soon as put() returns. A truncated final line (from a
/// crash mid-append) is ignored on load.
class ResponseCache {
 public:
  /// In-memory only.
  ResponseCache() = default;
  /// Loads `path` if it exists; the file is created on first put().
  explicit ResponseCache(std::filesystem::path path);

  std::optional<std::string> get(const std::string& prompt_hash, int index) const;
  /// All stored responses for a prompt, by index; stops at the first gap.
  std::vector<std::string> responses(const std::string& prompt_hash) const;
  void put(const std::string& prompt_hash, int index, const std::string& response,
           const std::string& model);

  std::size_t size() const;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::size_t skipped_lines() const noexcept { return skipped_lines_; }

 private:
  void load();

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::map<int, std::string>> entries_;
  std::size_t skipped_lines_ = 0;
};

}  // namespace emocap
