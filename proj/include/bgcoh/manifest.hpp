#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bgcoh/json_io.hpp"

namespace bgcoh {

inline constexpr const char* kArtifactName = "bgcoh";
inline constexpr const char* kArtifactVersion = "0.1.0";

std::string sha256_hex(const std::string& data);
/// Throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct ManifestOutput {
  std::string path;  ///< relative to the manifest's directory
  std::string sha256;
};

struct RunManifest {
  std::string artifact = kArtifactName;
  std::string version = kArtifactVersion;
  std::string command;
  Json config = Json::object();
  Json provenance = Json::object();
  Json input_hashes = Json::object();
  std::string hash;
  std::vector<ManifestOutput> outputs;
  double wall_clock_seconds = 0;  ///< not part of the hash
};

/// SHA-256 over the canonical text of artifact, version, command, config,
/// provenance and input hashes.
std::string compute_manifest_hash(const RunManifest& m);

Json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

struct ManifestCheck {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Re-derives the hash, then checks every listed output: present, matching
/// checksum, and carrying the same manifest hash.
ManifestCheck verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace bgcoh
