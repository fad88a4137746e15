#include "bgcoh/result_cache.hpp"

#include <cstdlib>

#include "bgcoh/manifest.hpp"

namespace bgcoh {

namespace fs = std::filesystem;

ResultCache::ResultCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<ResultCache> ResultCache::from_env() {
  const char* dir = std::getenv("BGCOH_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return ResultCache(dir);
}

std::string ResultCache::key(const std::string& operation, const Json& config) {
  const nlohmann::json canon = nlohmann::json::parse(config.dump());
  return sha256_hex(operation + "\n" + canon.dump());
}

fs::path ResultCache::entry_path(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<std::string> ResultCache::load(const std::string& key) const {
  const fs::path p = entry_path(key);
  std::error_code ec;
  if (!fs::exists(p, ec)) return std::nullopt;
  try {
    const Json entry = Json::parse(read_file(p));
    const std::string payload = entry.at("payload").get<std::string>();
    if (entry.at("key").get<std::string>() == key && entry.at("checksum").get<std::string>() == sha256_hex(payload))
      return payload;
  } catch (const std::exception&) {
  }
  fs::remove(p, ec);
  return std::nullopt;
}

void ResultCache::store(const std::string& key, const std::string& payload) const {
  const Json entry{{"key", key}, {"checksum", sha256_hex(payload)}, {"payload", payload}};
  write_file_atomic(entry_path(key), entry.dump() + "\n");
}

}  // namespace bgcoh
