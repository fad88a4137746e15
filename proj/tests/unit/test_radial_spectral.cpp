#include <doctest.h>

#include <cmath>

#include "bgcoh/dense_oracle.hpp"
#include "bgcoh/radial_spectral.hpp"
#include "bgcoh/weight_combinatorics.hpp"

using namespace bgcoh;

namespace {

ModeSpec mode(int lambda, long long k, long long m) { return ModeSpec{{{lambda}, k}, m}; }

GridParams resolved(const SpectrumResult& r) {
  GridParams g;
  g.n = r.grid.n;
  g.radius = r.grid.radius;
  g.spacing = r.grid.spacing;
  g.stretch = r.grid.stretch;
  return g;
}

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("mode index and empty modes") {
  CHECK(mode_index(mode(1, 0, 3)) == 3);
  CHECK(mode_index(mode(2, 0, 4)) == 2);
  CHECK_FALSE(mode_index(mode(2, 0, 3)).has_value());
  CHECK(mode_index(mode(3, 1, -5)) == -2);
  CHECK_THROWS_AS(mode_index(ModeSpec{{{1, 1}, 0}, 0}), ValidationError);
}

TEST_CASE("nodes are increasing and end at the radius") {
  for (auto sp : {Spacing::Uniform, Spacing::Geometric}) {
    const auto r = radial_nodes(100, 7.0, sp, 2.0);
    REQUIRE(r.size() == 101);
    CHECK(r.front() > 0);
    CHECK(r.back() == doctest::Approx(7.0));
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  }
  const auto g = radial_nodes(100, 7.0, Spacing::Geometric, 2.0);
  CHECK(g[1] - g[0] < g[100] - g[99]);
  CHECK(parse_spacing("uniform") == Spacing::Uniform);
  CHECK_THROWS_AS(parse_spacing("chebyshev"), ValidationError);
}

TEST_CASE("auto radius gives the requested decay") {
  const auto spec = mode(1, 0, 4);
  const double R = auto_radius(spec, 40.0);
  const double j = 4;
  double peak = -1e300;
  for (double r = 1e-3; r < R; r += 1e-3) peak = std::max(peak, (j + 1) * std::log(r) - phi(spec, r));
  CHECK(peak - ((j + 1) * std::log(R) - phi(spec, R)) >= 40.0 - 1e-9);
  GridParams g;
  g.radius = 0.5;
  CHECK_THROWS_AS(assemble_radial_operator(spec, 0, g), ValidationError);
}

TEST_CASE("kernel dimensions from the spec examples") {
  const auto a = kernel_dims(mode(1, 0, 3), {});
  CHECK(a.kernel_dims == std::array<int, 2>{1, 0});
  const auto b = kernel_dims(mode(2, 0, 3), {});
  CHECK(b.empty_mode);
  CHECK(b.kernel_dims == std::array<int, 2>{0, 0});
  const auto c = kernel_dims(mode(1, 5, 5), {});
  CHECK(c.kernel_dims == std::array<int, 2>{1, 0});
  const auto d = kernel_dims(mode(1, 0, -1), {});
  CHECK(d.kernel_dims == std::array<int, 2>{0, 0});
}

TEST_CASE("kernel dimensions follow the denumerant on a short window") {
  for (int lambda : {1, 2}) {
    for (long long m = -2; m <= 6; ++m) {
      const auto r = kernel_dims(mode(lambda, 0, m), {});
      CHECK(r.kernel_dims[0] == denumerant({lambda}, m));
      CHECK(r.kernel_dims[1] == 0);
    }
  }
}

TEST_CASE("spectra are nonnegative and certified") {
  for (long long m : {-2, 0, 3}) {
    const auto r = kernel_dims(mode(1, 0, m), {});
    for (const auto& d : r.degrees) {
      for (double v : d.eigenvalues) CHECK(v >= -1e-9);
      CHECK(d.eps_zero < d.gap_floor);
    }
  }
}

TEST_CASE("degree-zero kernel vector matches the holomorphic profile") {
  for (long long m : {0, 2, 5}) {
    const auto spec = mode(1, 0, m);
    const auto r = kernel_dims(spec, {});
    REQUIRE(r.kernel_dims[0] == 1);
    CHECK(kernel_profile_cosine(spec, resolved(r), r.degrees[0]) > 0.999);
  }
}

TEST_CASE("kernel classification") {
  DegreeSpectrum ok{{1e-12, 2.0, 3.0, 4.0}};
  classify_kernel(ok, {});
  CHECK(ok.kernel_dim == 1);
  DegreeSpectrum ambiguous{{1e-12, 5e-3, 1.0, 1.0}};
  CHECK_THROWS_AS(classify_kernel(ambiguous, {}), AmbiguousKernel);
  DegreeSpectrum all_zero{{0.0, 0.0}};
  CHECK_THROWS_AS(classify_kernel(all_zero, {}), AmbiguousKernel);
  CHECK_THROWS_AS(kernel_dims(mode(1, 0, 0), {}, {1e-2, 1e-3, 6}), ValidationError);
}

TEST_CASE("grid doubling keeps the spectrum stable") {
  GridParams g;
  g.n = 1000;
  const auto chk = grid_doubling_check(mode(1, 0, 2), g);
  CHECK(chk.zeros_decrease);
  CHECK(chk.max_gap_drift < 0.01);
  CHECK(chk.stable);
}

TEST_CASE("invariance under a change of admissible function") {
  const WeightedAction a{{1}, 0};
  const auto twice = AdmissibleFunction::combination({{2.0, reference_sqrt()}});
  const auto rep = invariance_check(a, {-1, 0, 1, 4}, reference_sqrt(), twice, {});
  CHECK(rep.all_equal);
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) CHECK(e.equal);
}

TEST_CASE("kernel dimensions are constant along a linear family of functions") {
  const WeightedAction a{{1}, 0};
  const auto built = build_admissible(level_set_profile(a, default_build_levels(), 32, 1), named_floor("sqrt"));
  for (long long m : {-1, 0, 2, 5}) {
    const auto base = kernel_dims({a, m, reference_sqrt()}, {}).kernel_dims;
    for (int step = 1; step <= 8; ++step) {
      const auto s = AdmissibleFunction::combination({{1.0, reference_sqrt()}, {0.25 * step, built}});
      CHECK(kernel_dims({a, m, s}, {}).kernel_dims == base);
    }
  }
}

TEST_CASE("kodaira scan reaches a unit gap") {
  const auto scan = kodaira_scan({{1}, 0}, 0, reference_sqrt(), {0, 1, 2, 3, 4, 5}, {});
  REQUIRE(scan.points.size() == 6);
  CHECK(scan.k0.has_value());
  CHECK(scan.dims_match);
  CHECK(scan.tail_monotone);
  for (std::size_t i = 1; i < scan.points.size(); ++i) CHECK(scan.points[i].gap > scan.points[i - 1].gap);
  CHECK_THROWS_AS(kodaira_scan({{1}, 0}, 0, reference_sqrt(), {2, 1}, {}), ValidationError);
}

TEST_CASE("dense oracle agrees with the radial reduction") {
  const auto spec = mode(1, 0, 1);
  OracleGrid og;
  og.n_r = 40;
  og.n_theta = 24;
  const auto oracle = dense_2d_oracle(spec, og, 3);
  GridParams g;
  g.n = og.n_r;
  g.radius = oracle.radius;
  g.spacing = Spacing::Uniform;
  for (int degree : {0, 1}) {
    const auto radial = low_spectrum(assemble_radial_operator(spec, degree, g), 3);
    const auto& o = oracle.eigenvalues[degree];
    REQUIRE(o.size() == 3);
    double first_gap = 0;
    for (double v : o)
      if (first_gap == 0 && v > 1e-6 * o.back()) first_gap = v;
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(radial.eigenvalues[i] - o[i]) <= 0.02 * std::max(std::abs(o[i]), first_gap));
  }
}

TEST_CASE("dense oracle enforces its size guard") {
  OracleGrid og;
  og.n_r = 61;
  CHECK_THROWS_AS(dense_2d_oracle(mode(1, 0, 0), og), ValidationError);
  CHECK_THROWS_AS(dense_2d_oracle(mode(2, 0, 1), OracleGrid{}), ValidationError);
}

}
