#include "emocap/jsonl.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "emocap/error.hpp"

namespace emocap {

using nlohmann::json;

std::string jsonl_header(std::string_view schema_name) {
  return json{{"schema", schema_name}, {"version", schema::kVersion}}.dump();
}

void check_jsonl_header(const json& header, std::string_view schema_name,
                        const std::filesystem::path& source) {
  const std::string where = source.string() + ":1";
  if (!header.is_object() || !header.contains("schema") || !header["schema"].is_string()) {
    throw SchemaError(where, "missing schema header");
  }
  if (header["schema"].get<std::string>() != schema_name) {
    throw SchemaError(where, "expected schema '" + std::string(schema_name) + "', found '" +
                                 header["schema"].get<std::string>() + "'");
  }
  if (!header.contains("version") || !header["version"].is_number_integer() ||
      header["version"].get<int>() != schema::kVersion) {
    throw SchemaError(where, "unsupported schema version");
  }
}

JsonlDocument read_jsonl(const std::filesystem::path& path, std::string_view schema_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path.string());
  JsonlDocument doc;
  doc.schema = std::string(schema_name);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno),
                        std::string("invalid JSON: ") + e.what());
    }
    if (!header_seen) {
      check_jsonl_header(value, schema_name, path);
      header_seen = true;
      continue;
    }
    doc.records.push_back(std::move(value));
  }
  if (!header_seen) throw SchemaError(path.string(), "empty file, expected a schema header");
  return doc;
}

std::string format_jsonl(std::string_view schema_name, std::span<const json> records) {
  std::string out = jsonl_header(schema_name);
  out.push_back('\n');
  for (const auto& r : records) {
    out += r.dump();
    out.push_back('\n');
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  static std::atomic<unsigned> counter{0};
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw StoreError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw StoreError("cannot replace " + path.string() + ": " + ec.message());
  }
}

void write_jsonl(const std::filesystem::path& path, std::string_view schema_name,
                 std::span<const json> records) {
  write_file_atomic(path, format_jsonl(schema_name, records));
}

}  // namespace emocap
