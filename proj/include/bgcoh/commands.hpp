#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bgcoh/admissible.hpp"
#include "bgcoh/json_io.hpp"
#include "bgcoh/radial_spectral.hpp"

namespace bgcoh {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitCompute = 3, kExitIo = 4 };

/// Validated parameters of one run. `echo` is the normalized configuration
/// (defaults filled in) that is hashed into the manifest.
struct RunConfig {
  std::string command;
  WeightedAction action{{1}, 0};
  long long m_lo = 0;
  long long m_hi = 0;
  std::vector<long long> k_values;
  std::string s = "ref-sqrt";
  std::string s1 = "ref-sqrt";
  std::string s2 = "built";
  std::string floor = "sqrt";
  double epsilon = 1.0;
  double target = 1e3;
  int samples = 64;
  std::uint64_t seed = 1;
  long long extra_twist = 0;
  GridParams grid;
  Thresholds thresholds;
  std::string out_dir = ".";
  std::string format = "both";
  Json echo;
};

/// Parses "a..b" or "a" into an inclusive window.
std::pair<long long, long long> parse_window(const std::string& text, const std::string& field);

/// Builds a RunConfig from merged flag/file values. Throws ValidationError
/// naming the offending field.
RunConfig parse_run_config(const std::string& command, const Json& values);

/// Resolves an admissible-function selector: ref-sqrt, const, built,
/// "<c>*<selector>", or a path to a JSON file. File hashes are added to `input_hashes`.
AdmissibleFunction resolve_function(const std::string& selector, const RunConfig& cfg, Json& input_hashes);

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bgcoh
