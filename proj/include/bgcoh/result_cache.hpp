#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "bgcoh/json_io.hpp"

namespace bgcoh {

/// On-disk cache of result payloads. Entries carry their own checksum;
/// unreadable or mismatching entries are deleted and reported as misses.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir);

  /// Cache rooted at $BGCOH_CACHE_DIR, or nullopt when the variable is unset or empty.
  static std::optional<ResultCache> from_env();

  static std::string key(const std::string& operation, const Json& config);

  std::optional<std::string> load(const std::string& key) const;
  void store(const std::string& key, const std::string& payload) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;
  std::filesystem::path dir_;
};

}  // namespace bgcoh
