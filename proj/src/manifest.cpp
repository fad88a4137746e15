#include "bgcoh/manifest.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace bgcoh {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw ComputeError("SHA-256 computation failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return buf.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("error while writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

namespace {

// Integral doubles print as integers in written files, so they are hashed as integers too.
nlohmann::json canonical(const Json& j) {
  nlohmann::json out = nlohmann::json::parse(j.dump());
  std::function<void(nlohmann::json&)> fix = [&](nlohmann::json& v) {
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && std::trunc(x) == x && std::abs(x) < 9.0e15) v = static_cast<long long>(x);
    } else if (v.is_structured()) {
      for (auto& child : v) fix(child);
    }
  };
  fix(out);
  return out;
}

}  // namespace

std::string compute_manifest_hash(const RunManifest& m) {
  // nlohmann::json sorts keys, which makes the text canonical.
  nlohmann::json canon;
  canon["artifact"] = m.artifact;
  canon["version"] = m.version;
  canon["command"] = m.command;
  canon["config"] = canonical(m.config);
  canon["provenance"] = canonical(m.provenance);
  canon["input_hashes"] = canonical(m.input_hashes);
  return sha256_hex(canon.dump());
}

Json manifest_to_json(const RunManifest& m) {
  Json outs = Json::array();
  for (const auto& o : m.outputs) outs.push_back(Json{{"path", o.path}, {"sha256", o.sha256}});
  return Json{{"artifact", m.artifact},
              {"version", m.version},
              {"command", m.command},
              {"config", m.config},
              {"provenance", m.provenance},
              {"input_hashes", m.input_hashes},
              {"hash", m.hash},
              {"outputs", outs},
              {"wall_clock_seconds", m.wall_clock_seconds}};
}

RunManifest manifest_from_json(const Json& j) {
  try {
    RunManifest m;
    m.artifact = j.at("artifact").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.provenance = j.at("provenance");
    m.input_hashes = j.at("input_hashes");
    m.hash = j.at("hash").get<std::string>();
    for (const auto& o : j.at("outputs"))
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest: malformed: ") + e.what());
  }
}

ManifestCheck verify_manifest(const fs::path& manifest_path) {
  ManifestCheck chk;
  RunManifest m;
  try {
    m = manifest_from_json(Json::parse(read_file(manifest_path)));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest: not valid JSON: ") + e.what());
  }
  auto problem = [&](std::string msg) {
    chk.ok = false;
    chk.problems.push_back(std::move(msg));
  };
  if (compute_manifest_hash(m) != m.hash) problem("manifest hash does not match its contents");
  if (m.outputs.empty()) problem("manifest lists no outputs");
  const fs::path base = manifest_path.parent_path();
  for (const auto& o : m.outputs) {
    const fs::path p = base / o.path;
    std::string body;
    try {
      body = read_file(p);
    } catch (const IoError&) {
      problem(o.path + ": missing");
      continue;
    }
    if (sha256_hex(body) != o.sha256) problem(o.path + ": checksum mismatch");
    std::string embedded;
    if (p.extension() == ".csv") {
      const std::string prefix = "# manifest_hash=";
      const auto eol = body.find('\n');
      const std::string first = body.substr(0, eol);
      if (first.rfind(prefix, 0) == 0) embedded = first.substr(prefix.size());
    } else {
      try {
        embedded = Json::parse(body).at("manifest_hash").get<std::string>();
      } catch (const nlohmann::json::exception&) {
      }
    }
    if (embedded != m.hash) problem(o.path + ": does not reference this manifest");
  }
  return chk;
}

}  // namespace bgcoh
