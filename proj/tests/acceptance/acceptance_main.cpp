// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "bgcoh/commands.hpp"
#include "bgcoh/dense_oracle.hpp"
#include "bgcoh/manifest.hpp"
#include "bgcoh/radial_spectral.hpp"
#include "bgcoh/weight_combinatorics.hpp"

using namespace bgcoh;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Criterion {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

int report(int id, const std::string& name, Criterion& c) {
  std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name;
  const std::string d = c.detail.str();
  if (!d.empty()) std::cout << " (" << d << ")";
  std::cout << std::endl;
  return c.pass ? 0 : 1;
}

// Counts exponent vectors with Σ a_i w_i = t for every t <= t_max by walking all of them.
std::vector<long long> brute_force_counts(const std::vector<int>& w, int t_max) {
  std::vector<long long> counts(t_max + 1, 0);
  std::function<void(std::size_t, int)> walk = [&](std::size_t i, int sum) {
    if (i == w.size()) {
      ++counts[sum];
      return;
    }
    for (int s = sum; s <= t_max; s += w[i]) walk(i + 1, s);
  };
  walk(0, 0);
  return counts;
}

std::vector<std::vector<int>> weight_multisets(int max_len, int max_entry) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int lo) {
    if (!cur.empty()) out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_len) return;
    for (int v = lo; v <= max_entry; ++v) {
      cur.push_back(v);
      rec(v);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

GridParams resolved(const SpectrumResult& r) {
  GridParams g;
  g.n = r.grid.n;
  g.radius = r.grid.radius;
  g.spacing = r.grid.spacing;
  g.stretch = r.grid.stretch;
  return g;
}

AdmissibleFunction built_for(const WeightedAction& a, const std::string& floor = "sqrt") {
  return build_admissible(level_set_profile(a, default_build_levels(), 64, 1), named_floor(floor));
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bgcoh");
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

int criterion_denumerant() {
  Criterion c;
  const auto t0 = Clock::now();
  const auto sets = weight_multisets(4, 5);
  long long checked = 0;
  for (const auto& w : sets) {
    const auto brute = brute_force_counts(w, 120);
    std::vector<int> rev(w.rbegin(), w.rend());
    for (int t = 0; t <= 120; ++t) {
      ++checked;
      if (denumerant(w, t) != brute[t] || denumerant(rev, t) != brute[t]) {
        std::ostringstream m;
        m << "mismatch at t=" << t;
        c.fail(m.str());
      }
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 10) c.fail("runtime " + std::to_string(secs) + " s");
  if (c.pass) c.detail << sets.size() << " weight vectors, " << checked << " values, " << secs << " s";
  return report(1, "denumerant matches brute-force enumeration", c);
}

struct ModeRun {
  ModeSpec spec;
  SpectrumResult ref;
  SpectrumResult built;
};

std::vector<ModeRun> run_modes(Criterion& c2, double& secs) {
  const auto t0 = Clock::now();
  std::vector<ModeRun> runs;
  for (int lambda : {1, 2, 3}) {
    for (long long k : {0, 1, 4}) {
      const WeightedAction a{{lambda}, k};
      const auto built = built_for(a);
      for (long long m = k - 3; m <= k + 12; ++m) {
        ModeRun r{{a, m}, {}, {}};
        GridParams g;
        g.n = 2000;
        try {
          r.ref = kernel_dims(r.spec, g);
          ModeSpec sb = r.spec;
          sb.s = built;
          r.built = kernel_dims(sb, g);
        } catch (const std::exception& e) {
          c2.fail("m=" + std::to_string(m) + ": " + e.what());
          continue;
        }
        const long long expected = static_cast<long long>(denumerant({lambda}, m - k));
        std::ostringstream where;
        where << "lambda=" << lambda << " k=" << k << " m=" << m;
        if (r.ref.kernel_dims[0] != expected || r.ref.kernel_dims[1] != 0)
          c2.fail(where.str() + ": dims (" + std::to_string(r.ref.kernel_dims[0]) + "," +
                  std::to_string(r.ref.kernel_dims[1]) + ")");
        if (r.ref.grid.refinement > 1) c2.fail(where.str() + ": more than one refinement");
        runs.push_back(std::move(r));
      }
    }
  }
  secs = seconds_since(t0);
  return runs;
}

int criterion_index(const std::vector<ModeRun>& runs) {
  Criterion c;
  int checked = 0;
  for (const auto& r : runs) {
    const auto ch = index_character(r.spec.action, r.spec.m, r.spec.m);
    const long long expected = static_cast<long long>(ch.values[0]);
    for (const auto* res : {&r.ref, &r.built}) {
      ++checked;
      if (res->kernel_dims[0] - res->kernel_dims[1] != expected)
        c.fail("m=" + std::to_string(r.spec.m) + " lambda=" + std::to_string(r.spec.action.weights[0]));
    }
  }
  if (runs.size() != 144) c.fail("only " + std::to_string(runs.size()) + " of 144 modes computed");
  if (c.pass) c.detail << checked << " (mode, function) pairs";
  return report(3, "index identity for reference and built functions", c);
}

int criterion_admissible() {
  Criterion c;
  std::vector<AdmissibleFunction> pool{reference_sqrt()};
  for (const auto& w : std::vector<std::vector<int>>{{1}, {1, 1}, {1, 2}}) {
    const WeightedAction a{w, 0};
    const auto build_prof = level_set_profile(a, default_build_levels(), 64, 1);
    const auto long_prof = level_set_profile(a, default_verify_levels(), 64, 1);
    for (const std::string name : {"zero", "sqrt", "quadratic"}) {
      AdmissibleFunction s = reference_sqrt();
      try {
        s = build_admissible(build_prof, named_floor(name));
      } catch (const std::exception& e) {
        c.fail(std::string("build failed: ") + e.what());
        continue;
      }
      const auto floor = named_floor(name);
      for (const auto& k : s.knots())
        if (!(k.s >= floor(k.u)) || !(k.s_prime >= floor(k.u))) c.fail("floor violated at u=" + std::to_string(k.u));
      if (!verify_admissible(s, build_prof, 1e3).pass) c.fail("built " + name + " fails on the build profile");
      if (!verify_admissible(s, long_prof, 1e3).pass) c.fail("built " + name + " fails on the long profile");
      if (w == std::vector<int>{1}) pool.push_back(s);
    }
  }
  const auto prof = level_set_profile({{1}, 0}, default_verify_levels(), 64, 1);
  std::mt19937_64 rng(20261018);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_real_distribution<double> coef(0.25, 4.0);
  int passed = 0;
  for (int i = 0; i < 50; ++i) {
    const auto s = convex_combine(pool[pick(rng)], pool[pick(rng)], coef(rng), coef(rng));
    if (verify_admissible(s, prof, 1e3).pass)
      ++passed;
    else
      c.fail("combination " + std::to_string(i) + " fails");
  }
  if (c.pass) c.detail << "9 builds, " << passed << "/50 combinations";
  return report(4, "admissibility suite", c);
}

int criterion_kodaira() {
  Criterion c;
  std::vector<long long> ks;
  for (long long k = 0; k <= 20; ++k) ks.push_back(k);
  std::ostringstream k0s;
  for (long long m : {0, 1, 2}) {
    try {
      const auto scan = kodaira_scan({{1}, 0}, m, reference_sqrt(), ks, {});
      if (!scan.k0) c.fail("m=" + std::to_string(m) + ": no crossing");
      if (!scan.dims_match) c.fail("m=" + std::to_string(m) + ": degree-0 dims disagree");
      if (!scan.tail_monotone) c.fail("m=" + std::to_string(m) + ": tail not monotone");
      k0s << " m=" << m << ":k0=" << (scan.k0 ? std::to_string(*scan.k0) : "none");
    } catch (const std::exception& e) {
      c.fail(e.what());
    }
  }
  if (c.pass) c.detail << "crossings" << k0s.str();
  return report(5, "degree-1 gap crosses 1 along the line bundle powers", c);
}

int criterion_numerics(const std::vector<ModeRun>& runs) {
  Criterion c;
  struct Triple {
    int lambda;
    long long k, m;
  };
  double worst = 0;
  for (const Triple t : {Triple{1, 0, 0}, {1, 0, 1}, {1, 0, -1}, {2, 1, 1}, {2, 0, -2}, {3, 0, 3}}) {
    const ModeSpec spec{{{t.lambda}, t.k}, t.m};
    OracleGrid og;
    const auto oracle = dense_2d_oracle(spec, og, 3);
    GridParams g;
    g.n = og.n_r;
    g.radius = oracle.radius;
    g.spacing = og.spacing;
    for (int degree : {0, 1}) {
      const auto radial = low_spectrum(assemble_radial_operator(spec, degree, g), 3);
      const auto& o = oracle.eigenvalues[degree];
      double first_gap = 0;
      for (double v : o)
        if (first_gap == 0 && v > 1e-6 * o.back()) first_gap = v;
      for (int i = 0; i < 3; ++i) {
        const double rel = std::abs(radial.eigenvalues[i] - o[i]) / std::max(std::abs(o[i]), first_gap);
        worst = std::max(worst, rel);
        if (rel > 0.02) c.fail("oracle disagreement " + std::to_string(rel) + " at m=" + std::to_string(t.m));
      }
    }
  }
  double min_cos = 1, min_eig = 0;
  for (const auto& r : runs) {
    for (const auto& d : r.ref.degrees)
      for (double v : d.eigenvalues) min_eig = std::min(min_eig, v);
    if (r.ref.kernel_dims[0] == 1) {
      const double cs = kernel_profile_cosine(r.spec, resolved(r.ref), r.ref.degrees[0]);
      min_cos = std::min(min_cos, cs);
    }
  }
  if (!(min_cos > 0.999)) c.fail("kernel cosine " + std::to_string(min_cos));
  if (min_eig < -1e-9) c.fail("negative eigenvalue " + std::to_string(min_eig));
  double drift = 0;
  for (const ModeSpec spec : {ModeSpec{{{1}, 0}, 0}, ModeSpec{{{1}, 0}, 3}, ModeSpec{{{1}, 0}, -2},
                              ModeSpec{{{2}, 1}, 5}, ModeSpec{{{3}, 0}, 6}}) {
    const auto chk = grid_doubling_check(spec, {});
    drift = std::max(drift, chk.max_gap_drift);
    if (!chk.zeros_decrease) c.fail("near-zero eigenvalue grew under doubling at m=" + std::to_string(spec.m));
    if (!(chk.max_gap_drift < 0.01)) c.fail("gap drift " + std::to_string(chk.max_gap_drift));
  }
  if (c.pass)
    c.detail << "oracle worst " << worst << ", cosine min " << min_cos << ", eigenvalue min " << min_eig
             << ", doubling drift " << drift;
  return report(6, "numerical soundness", c);
}

int criterion_determinism(const fs::path& golden_dir) {
  Criterion c;
  const fs::path base = fs::temp_directory_path() / "bgcoh_acceptance";
  fs::remove_all(base);
  struct Case {
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> goldens;  // output, golden file
    std::vector<std::string> outputs;
  };
  const std::vector<Case> cases{
      {{"betti", "--weights", "1,2", "--twist", "0", "--m", "0..6"},
       {{"betti.csv", "betti_1_2.csv"}, {"betti.json", "betti_1_2.json"}},
       {"betti.csv", "betti.json"}},
      {{"index", "--weights", "2", "--m", "0..4"},
       {{"index.csv", "index_2.csv"}, {"index.json", "index_2.json"}},
       {"index.csv", "index.json"}},
      {{"spectrum", "--weights", "1", "--m", "-2..4"}, {{"spectrum.csv", "spectrum_1.csv"}}, {"spectrum.json"}},
      {{"admissible", "build", "--weights", "1,2", "--seed", "3"}, {}, {"admissible_build.json", "admissible_build.csv"}},
      {{"kodaira", "--m", "0", "--k", "0..6"}, {}, {"kodaira.json", "kodaira.csv"}},
  };
  int files = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& cs = cases[i];
    std::vector<fs::path> dirs{base / (std::to_string(i) + "a"), base / (std::to_string(i) + "b")};
    for (const auto& d : dirs) {
      auto args = cs.args;
      args.push_back("--out");
      args.push_back(d.string());
      if (cli(args) != 0) c.fail(cs.args[0] + " exited nonzero");
    }
    try {
      for (const auto& [out, gold] : cs.goldens) {
        ++files;
        if (read_file(dirs[0] / out) != read_file(golden_dir / gold)) c.fail(out + " differs from golden");
      }
      for (const auto& out : cs.outputs) {
        ++files;
        if (read_file(dirs[0] / out) != read_file(dirs[1] / out)) c.fail(out + " not reproducible");
      }
      const std::string stem = cs.outputs.front().substr(0, cs.outputs.front().find('.'));
      if (!verify_manifest(dirs[0] / (stem + ".manifest.json")).ok) c.fail(stem + " manifest does not verify");
    } catch (const std::exception& e) {
      c.fail(e.what());
    }
  }
  fs::remove_all(base);
  if (c.pass) c.detail << files << " file comparisons";
  return report(7, "golden files and byte-identical reruns", c);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path golden_dir = argc > 1 ? fs::path(argv[1]) : fs::path(BGCOH_GOLDEN_DIR);
  int failures = 0;
  failures += criterion_denumerant();

  Criterion c2;
  double secs = 0;
  const auto runs = run_modes(c2, secs);
  if (secs >= 300) c2.fail("runtime " + std::to_string(secs) + " s");
  if (c2.pass) c2.detail << runs.size() << " modes at N=2000, " << secs << " s";
  failures += report(2, "kernel dimensions equal the denumerant", c2);

  failures += criterion_index(runs);
  failures += criterion_admissible();
  failures += criterion_kodaira();
  failures += criterion_numerics(runs);
  failures += criterion_determinism(golden_dir);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
