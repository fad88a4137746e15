#include "bgcoh/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include "bgcoh/manifest.hpp"
#include "bgcoh/result_cache.hpp"
#include "bgcoh/weight_combinatorics.hpp"

namespace bgcoh {

namespace fs = std::filesystem;

namespace {

std::string key_name(const std::string& flag) {
  std::string k = flag;
  for (auto& c : k)
    if (c == '-') c = '_';
  return k;
}

std::string as_text(const Json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ValidationError(field + ": expected a scalar value");
}

long long as_int(const Json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long long>();
  const std::string s = as_text(v, field);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(s, &pos);
    if (pos == s.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(field + ": expected an integer, got '" + s + "'");
}

double as_double(const Json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  const std::string s = as_text(v, field);
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos == s.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(field + ": expected a number, got '" + s + "'");
}

std::vector<int> as_weights(const Json& v) {
  std::vector<int> w;
  if (v.is_array()) {
    for (const auto& x : v) w.push_back(static_cast<int>(as_int(x, "weights")));
  } else {
    const std::string s = as_text(v, "weights");
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto comma = s.find(',', start);
      const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const long long x = as_int(Json(part), "weights");
      if (x < -1000000 || x > 1000000) throw ValidationError("weights: value out of range");
      w.push_back(static_cast<int>(x));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  WeightedAction{w, 0}.validate();
  return w;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::set<std::string> base{"weights", "twist", "out", "format"};
  static const std::set<std::string> builder{"floor", "epsilon", "target", "samples", "seed"};
  static const std::set<std::string> grid{"n", "radius", "spacing", "stretch", "zero_rel", "gap_rel", "window"};
  auto merge = [](std::initializer_list<std::set<std::string>> parts, std::set<std::string> extra) {
    for (const auto& p : parts) extra.insert(p.begin(), p.end());
    return extra;
  };
  static const std::map<std::string, std::set<std::string>> keys{
      {"betti", merge({base}, {"m"})},
      {"index", merge({base}, {"m"})},
      {"admissible-build", merge({base, builder}, {})},
      {"admissible-verify", merge({base, builder}, {"s"})},
      {"spectrum", merge({base, builder, grid}, {"m", "s", "extra_twist"})},
      {"invariance", merge({base, builder, grid}, {"m", "s1", "s2"})},
      {"kodaira", merge({base, builder, grid}, {"m", "k", "s"})},
  };
  return keys;
}

}  // namespace

std::pair<long long, long long> parse_window(const std::string& text, const std::string& field) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const long long v = as_int(Json(text), field);
    return {v, v};
  }
  const long long lo = as_int(Json(text.substr(0, dots)), field);
  const long long hi = as_int(Json(text.substr(dots + 2)), field);
  return {lo, hi};
}

RunConfig parse_run_config(const std::string& command, const Json& values) {
  const auto it = allowed_keys().find(command);
  if (it == allowed_keys().end()) throw ValidationError("unknown command '" + command + "'");
  const auto& allowed = it->second;
  if (!values.is_object()) throw ValidationError("config: expected a JSON object");
  for (auto v = values.begin(); v != values.end(); ++v)
    if (!allowed.count(v.key())) throw ValidationError("config: field '" + v.key() + "' does not apply to " + command);

  auto has = [&](const char* k) { return values.contains(k); };
  RunConfig cfg;
  cfg.command = command;
  Json& e = cfg.echo;

  cfg.action.weights = has("weights") ? as_weights(values["weights"]) : std::vector<int>{1};
  cfg.action.twist = has("twist") ? as_int(values["twist"], "twist") : 0;
  e["weights"] = cfg.action.weights;
  e["twist"] = cfg.action.twist;
  cfg.out_dir = has("out") ? as_text(values["out"], "out") : ".";
  cfg.format = has("format") ? as_text(values["format"], "format") : "both";
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "both")
    throw ValidationError("format: expected json, csv or both");
  e["format"] = cfg.format;

  if (allowed.count("m")) {
    const std::string def = command == "kodaira" ? "0" : "0..10";
    auto [lo, hi] = parse_window(has("m") ? as_text(values["m"], "m") : def, "m");
    cfg.m_lo = lo;
    cfg.m_hi = hi;
    const long long limit = (command == "betti" || command == "index") ? 1000000 : 1000;
    if (hi - lo + 1 > limit) throw ValidationError("m: window longer than " + std::to_string(limit));
    if (command == "kodaira" && lo != hi) throw ValidationError("m: kodaira takes a single label");
    e["m"] = Json::array({lo, hi});
  }
  if (allowed.count("k")) {
    auto [lo, hi] = parse_window(has("k") ? as_text(values["k"], "k") : "0..20", "k");
    if (lo < 0) throw ValidationError("k: must be >= 0");
    if (hi - lo + 1 > 1000) throw ValidationError("k: range longer than 1000");
    for (long long k = lo; k <= hi; ++k) cfg.k_values.push_back(k);
    e["k"] = Json::array({lo, hi});
  }
  if (allowed.count("floor")) {
    cfg.floor = has("floor") ? as_text(values["floor"], "floor") : "sqrt";
    named_floor(cfg.floor);
    cfg.epsilon = has("epsilon") ? as_double(values["epsilon"], "epsilon") : 1.0;
    if (!(cfg.epsilon > 0)) throw ValidationError("epsilon: must be positive");
    cfg.target = has("target") ? as_double(values["target"], "target") : 1e3;
    if (!(cfg.target > 0)) throw ValidationError("target: must be positive");
    cfg.samples = static_cast<int>(has("samples") ? as_int(values["samples"], "samples") : 64);
    if (cfg.samples < 1 || cfg.samples > 10000000) throw ValidationError("samples: must be in 1..10^7");
    const long long seed = has("seed") ? as_int(values["seed"], "seed") : 1;
    if (seed < 0) throw ValidationError("seed: must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    e["floor"] = cfg.floor;
    e["epsilon"] = cfg.epsilon;
    e["target"] = cfg.target;
    e["samples"] = cfg.samples;
    e["seed"] = seed;
  }
  for (const char* sel : {"s", "s1", "s2"}) {
    if (!allowed.count(sel)) continue;
    const std::string def = std::string(sel) == "s2" ? "built" : "ref-sqrt";
    const std::string v = has(sel) ? as_text(values[sel], sel) : def;
    if (v.empty()) throw ValidationError(std::string(sel) + ": empty selector");
    (std::string(sel) == "s" ? cfg.s : std::string(sel) == "s1" ? cfg.s1 : cfg.s2) = v;
    e[sel] = v;
  }
  if (allowed.count("n")) {
    const long long n = has("n") ? as_int(values["n"], "n") : 2000;
    if (n < 8 || n > 200000) throw ValidationError("n: must be in 8..200000");
    cfg.grid.n = static_cast<int>(n);
    if (has("radius")) {
      cfg.grid.radius = as_double(values["radius"], "radius");
      if (!(*cfg.grid.radius > 0)) throw ValidationError("radius: must be positive");
    }
    cfg.grid.spacing = parse_spacing(has("spacing") ? as_text(values["spacing"], "spacing") : "geometric");
    cfg.grid.stretch = has("stretch") ? as_double(values["stretch"], "stretch") : 2.0;
    if (!(cfg.grid.stretch > 0)) throw ValidationError("stretch: must be positive");
    cfg.thresholds.zero_rel = has("zero_rel") ? as_double(values["zero_rel"], "zero_rel") : 1e-6;
    cfg.thresholds.gap_rel = has("gap_rel") ? as_double(values["gap_rel"], "gap_rel") : 1e-2;
    if (!(cfg.thresholds.zero_rel > 0) || !(cfg.thresholds.zero_rel < cfg.thresholds.gap_rel))
      throw ValidationError("zero_rel/gap_rel: need 0 < zero_rel < gap_rel");
    cfg.thresholds.window = static_cast<int>(has("window") ? as_int(values["window"], "window") : 6);
    if (cfg.thresholds.window < 2 || cfg.thresholds.window > 100) throw ValidationError("window: must be in 2..100");
    e["n"] = n;
    e["radius"] = cfg.grid.radius ? Json(*cfg.grid.radius) : Json(nullptr);
    e["spacing"] = spacing_name(cfg.grid.spacing);
    e["stretch"] = cfg.grid.stretch;
    e["zero_rel"] = cfg.thresholds.zero_rel;
    e["gap_rel"] = cfg.thresholds.gap_rel;
    e["window"] = cfg.thresholds.window;
    if (cfg.action.dimension() != 1) throw ValidationError("weights: spectral commands need exactly one weight");
  }
  if (allowed.count("extra_twist")) {
    cfg.extra_twist = has("extra_twist") ? as_int(values["extra_twist"], "extra_twist") : 0;
    if (cfg.extra_twist < 0) throw ValidationError("extra_twist: must be >= 0");
    e["extra_twist"] = cfg.extra_twist;
  }
  if (command == "admissible-verify" && cfg.action.twist < 0)
    throw ValidationError("twist: admissibility for E_k needs k >= 0");
  return cfg;
}

AdmissibleFunction resolve_function(const std::string& selector, const RunConfig& cfg, Json& input_hashes) {
  const auto star = selector.find('*');
  if (star != std::string::npos) {
    const double c = as_double(Json(selector.substr(0, star)), "selector coefficient");
    if (!(c > 0)) throw ValidationError("selector coefficient must be positive");
    return AdmissibleFunction::combination({{c, resolve_function(selector.substr(star + 1), cfg, input_hashes)}});
  }
  if (selector == "ref-sqrt") return reference_sqrt();
  if (selector == "const") return AdmissibleFunction::constant(1.0);
  if (selector == "built") {
    const LevelSetProfile prof = level_set_profile(cfg.action, default_build_levels(), cfg.samples, cfg.seed);
    return build_admissible(prof, named_floor(cfg.floor), {cfg.epsilon, 0.25, cfg.target});
  }
  if (fs::path(selector).extension() == ".json") {
    const std::string body = read_file(selector);
    input_hashes[selector] = sha256_hex(body);
    try {
      return admissible_from_json(Json::parse(body));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(selector + ": not valid JSON: " + e.what());
    }
  }
  throw ValidationError("unknown function selector '" + selector + "' (expected ref-sqrt, const, built, c*name or a .json file)");
}

namespace {

struct Output {
  std::string stem;
  Json payload;
  std::string csv;  // empty when the command has no table
};

Json provenance_for(const std::string& command) {
  static const std::map<std::string, Json> table{
      {"betti", Json{{"betti_table", "denumerant by dynamic programming over the generating function, exact integers"}}},
      {"index", Json{{"index_character", "alternating sum of the Betti table"}}},
      {"admissible-build",
       Json{{"build_admissible", "constructive build: convex majorant r, auxiliary c, tail integral"},
            {"verify_admissible", "refined level-set ratio on sampled profiles"}}},
      {"admissible-verify", Json{{"verify_admissible", "refined level-set ratio on sampled profiles"}}},
      {"spectrum",
       Json{{"kernel_dims", "radial finite differences, shift-invert Lanczos, two-threshold kernel rule"}}},
      {"invariance", Json{{"invariance_check", "kernel dimensions under two admissible functions"}}},
      {"kodaira", Json{{"kodaira_scan", "lowest degree-1 eigenvalue along powers of the positive line bundle"}}},
  };
  return table.at(command);
}

void emit(const RunConfig& cfg, RunManifest manifest, const Output& o, double seconds, std::ostream& out) {
  manifest.hash = compute_manifest_hash(manifest);
  const fs::path dir = cfg.out_dir;
  if (cfg.format != "csv") {
    Json doc{{"manifest_hash", manifest.hash}};
    for (auto it = o.payload.begin(); it != o.payload.end(); ++it) doc[it.key()] = it.value();
    const std::string body = dump_json(doc);
    write_file_atomic(dir / (o.stem + ".json"), body);
    manifest.outputs.push_back({o.stem + ".json", sha256_hex(body)});
  }
  if (cfg.format != "json" && !o.csv.empty()) {
    const std::string body = "# manifest_hash=" + manifest.hash + "\n" + o.csv;
    write_file_atomic(dir / (o.stem + ".csv"), body);
    manifest.outputs.push_back({o.stem + ".csv", sha256_hex(body)});
  }
  manifest.wall_clock_seconds = seconds;
  write_file_atomic(dir / (o.stem + ".manifest.json"), dump_json(manifest_to_json(manifest)));
  out << "wrote";
  for (const auto& f : manifest.outputs) out << " " << (dir / f.path).string();
  out << " " << (dir / (o.stem + ".manifest.json")).string() << "\n";
}

// Runs `compute` through the result cache when one is configured.
Json cached(const RunConfig& cfg, const Json& input_hashes, const std::function<Json()>& compute) {
  auto cache = ResultCache::from_env();
  if (!cache) return compute();
  Json keyed{{"config", cfg.echo}, {"inputs", input_hashes}, {"version", kArtifactVersion}};
  const std::string key = ResultCache::key(cfg.command, keyed);
  if (auto hit = cache->load(key)) {
    try {
      return Json::parse(*hit);
    } catch (const nlohmann::json::exception&) {
    }
  }
  Json result = compute();
  cache->store(key, result.dump());
  return result;
}

Output run_command(const RunConfig& cfg, Json& input_hashes, std::ostream& out) {
  const std::string& c = cfg.command;
  if (c == "betti") {
    const BettiTable t = betti_table(cfg.action, cfg.m_lo, cfg.m_hi);
    out << "betti: " << t.entries[0].size() << " labels\n";
    return {"betti", to_json(t), betti_csv(t)};
  }
  if (c == "index") {
    const IndexCharacter ch = index_character(cfg.action, cfg.m_lo, cfg.m_hi);
    out << "index: " << ch.values.size() << " labels\n";
    return {"index", to_json(ch, cfg.action), index_csv(ch)};
  }
  if (c == "admissible-build") {
    const LevelSetProfile prof = level_set_profile(cfg.action, default_build_levels(), cfg.samples, cfg.seed);
    const AdmissibleFunction s = build_admissible(prof, named_floor(cfg.floor), {cfg.epsilon, 0.25, cfg.target});
    const AdmissibilityReport rep = verify_admissible(s, prof, cfg.target);
    const LevelSetProfile long_prof = level_set_profile(cfg.action, default_verify_levels(), cfg.samples, cfg.seed);
    const AdmissibilityReport long_rep = verify_admissible(s, long_prof, cfg.target);
    out << "admissible build: " << (rep.pass && long_rep.pass ? "pass" : "fail") << "\n";
    return {"admissible_build",
            Json{{"function", to_json(s, true)}, {"report", to_json(rep)}, {"long_report", to_json(long_rep)}},
            ratio_csv(rep)};
  }
  if (c == "admissible-verify") {
    const AdmissibleFunction s = resolve_function(cfg.s, cfg, input_hashes);
    const LevelSetProfile prof = level_set_profile(cfg.action, default_verify_levels(), cfg.samples, cfg.seed);
    const AdmissibilityReport rep = admissible_for_twist(s, prof, cfg.action.twist, cfg.target);
    out << "admissible verify: " << (rep.pass ? "pass" : "fail");
    if (!rep.pass && rep.first_offending_t) out << " (" << rep.reason << " at t=" << *rep.first_offending_t << ")";
    out << "\n";
    return {"admissible_verify", Json{{"function", to_json(s)}, {"report", to_json(rep)}}, ratio_csv(rep)};
  }
  if (c == "spectrum") {
    const AdmissibleFunction s = resolve_function(cfg.s, cfg, input_hashes);
    std::vector<SpectrumResult> results;
    Json payload = cached(cfg, input_hashes, [&] {
      Json arr = Json::array();
      for (long long m = cfg.m_lo; m <= cfg.m_hi; ++m) {
        results.push_back(kernel_dims({cfg.action, m, s, cfg.extra_twist}, cfg.grid, cfg.thresholds));
        arr.push_back(to_json(results.back()));
      }
      return Json{{"weights", cfg.action.weights}, {"twist", cfg.action.twist}, {"results", arr}};
    });
    std::ostringstream csv;
    csv << "m,dim0,dim1\n";
    for (const auto& r : payload["results"]) {
      csv << r["m"].get<long long>() << "," << r["kernel_dims"][0].get<int>() << "," << r["kernel_dims"][1].get<int>()
          << "\n";
      out << "m=" << r["m"].get<long long>() << " kernel_dims=(" << r["kernel_dims"][0].get<int>() << ","
          << r["kernel_dims"][1].get<int>() << ")\n";
    }
    return {"spectrum", payload, csv.str()};
  }
  if (c == "invariance") {
    const AdmissibleFunction s1 = resolve_function(cfg.s1, cfg, input_hashes);
    const AdmissibleFunction s2 = resolve_function(cfg.s2, cfg, input_hashes);
    const LevelSetProfile prof = level_set_profile(cfg.action, default_verify_levels(), cfg.samples, cfg.seed);
    if (!verify_admissible(s1, prof, cfg.target).pass) throw ValidationError("s1: does not pass verify_admissible");
    if (!verify_admissible(s2, prof, cfg.target).pass) throw ValidationError("s2: does not pass verify_admissible");
    Json payload = cached(cfg, input_hashes, [&] {
      std::vector<long long> ms;
      for (long long m = cfg.m_lo; m <= cfg.m_hi; ++m) ms.push_back(m);
      InvarianceReport rep = invariance_check(cfg.action, ms, s1, s2, cfg.grid, cfg.thresholds);
      Json j = to_json(rep);
      j["csv"] = invariance_csv(rep);
      return j;
    });
    std::string table = payload["csv"].get<std::string>();
    payload.erase("csv");
    out << "invariance: " << (payload["all_equal"].get<bool>() ? "all dimensions equal" : "MISMATCH") << "\n";
    return {"invariance", payload, table};
  }
  if (c == "kodaira") {
    const AdmissibleFunction s = resolve_function(cfg.s, cfg, input_hashes);
    Json payload = cached(cfg, input_hashes, [&] {
      KodairaScan scan = kodaira_scan(cfg.action, cfg.m_lo, s, cfg.k_values, cfg.grid, cfg.thresholds);
      Json j = to_json(scan);
      j["csv"] = kodaira_csv(scan);
      return j;
    });
    std::string table = payload["csv"].get<std::string>();
    payload.erase("csv");
    out << "kodaira: k0=" << (payload["k0"].is_null() ? std::string("none") : payload["k0"].dump()) << "\n";
    return {"kodaira", payload, table};
  }
  throw ValidationError("unknown command '" + c + "'");
}

int execute(const std::string& command, const Json& merged, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = parse_run_config(command, merged);
  RunManifest manifest;
  manifest.command = command;
  manifest.config = cfg.echo;
  manifest.provenance = provenance_for(command);
  Json input_hashes = Json::object();
  Output o = run_command(cfg, input_hashes, out);
  manifest.input_hashes = input_hashes;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(cfg, manifest, o, secs, out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bgcoh: background cohomology of C^n with a weighted circle action"};
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, std::string> config_path;
  std::map<CLI::App*, std::string> command_of;

  auto add = [&](CLI::App* sub, const std::string& cmd, std::initializer_list<std::pair<const char*, const char*>> list) {
    for (const auto& [flag, help] : list) {
      const std::string key = key_name(flag);
      opts[cmd][key] = sub->add_option(std::string("--") + flag, flags[cmd][key], help);
    }
    if (!command_of.count(sub)) {
      sub->add_option("--config", config_path[cmd], "JSON file with defaults; flags take precedence");
      command_of[sub] = cmd;
    }
  };
  const std::initializer_list<std::pair<const char*, const char*>> common{
      {"weights", "comma-separated positive weights"},
      {"twist", "twist level k of E_k"},
      {"out", "output directory"},
      {"format", "json, csv or both"}};
  const std::initializer_list<std::pair<const char*, const char*>> builder{
      {"floor", "floor for built functions: zero, sqrt, quadratic"},
      {"epsilon", "growth scale of the builder"},
      {"target", "divergence target of the ratio"},
      {"samples", "samples per level set"},
      {"seed", "sampling seed"}};
  const std::initializer_list<std::pair<const char*, const char*>> grid{
      {"n", "number of radial nodes"},
      {"radius", "truncation radius (default: decay rule)"},
      {"spacing", "uniform or geometric"},
      {"stretch", "geometric grading"},
      {"zero-rel", "eps_zero relative to the window scale"},
      {"gap-rel", "gap_floor relative to the window scale"},
      {"window", "number of eigenvalues per degree"}};

  auto* betti = app.add_subcommand("betti", "background Betti numbers over an m-window");
  add(betti, "betti", common);
  add(betti, "betti", {{"m", "label window a..b"}});
  auto* index = app.add_subcommand("index", "index character over an m-window");
  add(index, "index", common);
  add(index, "index", {{"m", "label window a..b"}});
  auto* adm = app.add_subcommand("admissible", "build or verify admissible functions");
  adm->require_subcommand(1);
  auto* build = adm->add_subcommand("build", "construct an admissible function above a floor");
  add(build, "admissible-build", common);
  add(build, "admissible-build", builder);
  auto* verify = adm->add_subcommand("verify", "evaluate the admissibility ratio");
  add(verify, "admissible-verify", common);
  add(verify, "admissible-verify", builder);
  add(verify, "admissible-verify", {{"s", "function: ref-sqrt, const, built, c*name or file.json"}});
  auto* spectrum = app.add_subcommand("spectrum", "kernel dimensions of the deformed Laplacian per mode");
  add(spectrum, "spectrum", common);
  add(spectrum, "spectrum", builder);
  add(spectrum, "spectrum", grid);
  add(spectrum, "spectrum", {{"m", "label window a..b"}, {"s", "admissible function"}, {"extra-twist", "power of the positive line bundle"}});
  auto* inv = app.add_subcommand("invariance", "compare kernel dimensions under two functions");
  add(inv, "invariance", common);
  add(inv, "invariance", builder);
  add(inv, "invariance", grid);
  add(inv, "invariance", {{"m", "label window a..b"}, {"s1", "first function"}, {"s2", "second function"}});
  auto* kod = app.add_subcommand("kodaira", "degree-1 gap along powers of the positive line bundle");
  add(kod, "kodaira", common);
  add(kod, "kodaira", builder);
  add(kod, "kodaira", grid);
  add(kod, "kodaira", {{"m", "label"}, {"k", "range a..b of powers"}, {"s", "admissible function"}});
  auto* vm = app.add_subcommand("verify-manifest", "re-derive a manifest hash and check its outputs");
  std::string manifest_path;
  vm->add_option("manifest", manifest_path, "path to a .manifest.json file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (vm->parsed()) {
      const ManifestCheck chk = verify_manifest(manifest_path);
      if (chk.ok) {
        out << "manifest ok: " << manifest_path << "\n";
        return kExitOk;
      }
      for (const auto& p : chk.problems) err << "manifest problem: " << p << "\n";
      return kExitValidation;
    }
    CLI::App* sub = nullptr;
    for (auto* cand : {betti, index, build, verify, spectrum, inv, kod})
      if (cand->parsed()) sub = cand;
    const std::string cmd = command_of.at(sub);

    Json merged = Json::object();
    if (!config_path[cmd].empty()) {
      const std::string body = read_file(config_path[cmd]);
      try {
        merged = Json::parse(body);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config: " + config_path[cmd] + " is not valid JSON: " + e.what());
      }
      if (!merged.is_object()) throw ValidationError("config: top level must be an object");
    }
    for (const auto& [key, opt] : opts[cmd])
      if (opt->count() > 0) merged[key] = flags[cmd][key];
    return execute(cmd, merged, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ComputeError& e) {
    err << "compute error: " << e.what() << "\n";
    return kExitCompute;
  }
}

}  // namespace bgcoh
