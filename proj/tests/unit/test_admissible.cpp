#include <doctest.h>

#include <cmath>
#include <random>

#include "bgcoh/admissible.hpp"
#include "bgcoh/json_io.hpp"

using namespace bgcoh;

namespace {

LevelSetProfile verify_profile(const WeightedAction& a) { return level_set_profile(a, default_verify_levels(), 32, 1); }
LevelSetProfile build_profile(const WeightedAction& a) { return level_set_profile(a, default_build_levels(), 32, 1); }

void check_derivatives(const AdmissibleFunction& s, const std::vector<double>& points) {
  for (double u : points) {
    const double h = 1e-5 * std::max(1.0, u);
    const double fd1 = (s.value(u + h) - s.value(u - h)) / (2 * h);
    CHECK(s.derivative(u) == doctest::Approx(fd1).epsilon(1e-5));
    const double fd2 = (s.derivative(u + h) - s.derivative(u - h)) / (2 * h);
    CHECK(s.second_derivative(u) == doctest::Approx(fd2).epsilon(1e-4).scale(std::abs(s.derivative(u))));
    CHECK(s.log_derivative(u) == doctest::Approx(std::log(s.derivative(u))));
  }
}

}  // namespace

TEST_SUITE("admissible") {

TEST_CASE("coordinates") {
  CHECK(level_to_s_arg(3.0) == 4.5);
  CHECK(s_arg_to_level(4.5) == doctest::Approx(3.0));
}

TEST_CASE("reference sqrt values and derivatives") {
  const auto s = reference_sqrt();
  CHECK(s.kind() == AdmissibleFunction::Kind::Sqrt);
  CHECK(s.value(0.0) > 0);
  CHECK(s.value(4.5) == doctest::Approx(3.0));
  CHECK(s.value(1.0) == doctest::Approx(std::sqrt(2.0)));
  check_derivatives(s, {0.1, 1.0, 7.5, 300.0});
}

TEST_CASE("reference sqrt is admissible for every weight tested") {
  for (const auto& w : std::vector<std::vector<int>>{{1}, {2}, {3}, {1, 1}, {1, 2}}) {
    const auto rep = verify_admissible(reference_sqrt(), verify_profile({w, 0}), 1e3);
    CHECK_MESSAGE(rep.pass, rep.reason);
    CHECK(rep.threshold_t.has_value());
    CHECK(rep.bochner_tail);
  }
}

TEST_CASE("constant function fails with the first offending level") {
  const auto prof = verify_profile({{1}, 0});
  const auto rep = verify_admissible(AdmissibleFunction::constant(1.0), prof, 1e3);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.first_offending_t.has_value());
  CHECK(*rep.first_offending_t == prof.t.front());
  CHECK_THROWS_AS(AdmissibleFunction::constant(-1.0), ValidationError);
}

TEST_CASE("a target above the reachable ratio fails") {
  const auto rep = verify_admissible(reference_sqrt(), verify_profile({{1}, 0}), 1e300);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.reason.empty());
}

TEST_CASE("twist requirement is checked at the shifted bound") {
  const auto prof = verify_profile({{1}, 0});
  const auto r0 = admissible_for_twist(reference_sqrt(), prof, 0, 1e3);
  const auto r3 = admissible_for_twist(reference_sqrt(), prof, 3, 1e3);
  CHECK(r0.pass);
  CHECK(r3.twist == 3);
  for (std::size_t i = 0; i < r0.log_ratio.size(); ++i) CHECK(r3.log_ratio[i] <= r0.log_ratio[i] + 1e-12);
  CHECK_THROWS_AS(admissible_for_twist(reference_sqrt(), prof, -1, 1e3), ValidationError);
}

TEST_CASE("built functions pass on C^1 and C^2 and respect the floor") {
  for (const auto& w : std::vector<std::vector<int>>{{1}, {1, 2}}) {
    for (const std::string name : {"zero", "sqrt", "quadratic"}) {
      const WeightedAction a{w, 0};
      const auto prof = build_profile(a);
      const auto floor = named_floor(name);
      const auto s = build_admissible(prof, floor);
      CHECK(s.kind() == AdmissibleFunction::Kind::Grid);
      REQUIRE(s.trace().has_value());
      for (const auto& k : s.knots()) {
        CHECK(k.s >= floor(k.u));
        CHECK(k.s_prime >= floor(k.u));
        CHECK(k.s_prime > 0);
      }
      const auto& tr = *s.trace();
      for (std::size_t i = 0; i < tr.u.size(); ++i) CHECK(s.derivative(tr.u[i]) >= tr.epsilon * tr.c[i] * (1 - 1e-9));
      const auto rep = verify_admissible(s, prof, 1e3);
      CHECK_MESSAGE(rep.pass, name << ": " << rep.reason);
      const auto long_rep = verify_admissible(s, verify_profile(a), 1e3);
      CHECK_MESSAGE(long_rep.pass, name << ": " << long_rep.reason);
    }
  }
}

TEST_CASE("built function derivatives agree with finite differences") {
  const auto s = build_admissible(build_profile({{1}, 0}), named_floor("sqrt"));
  check_derivatives(s, {0.3, 2.2, 17.0, 150.0, 400.0});
}

TEST_CASE("builder rejects bad options") {
  const auto prof = build_profile({{1}, 0});
  CHECK_THROWS_AS(build_admissible(prof, named_floor("sqrt"), {0.0, 0.25, 1e3}), ValidationError);
  CHECK_THROWS_AS(build_admissible(prof, named_floor("sqrt"), {100.0, 0.25, 1e3}), BuildError);
  CHECK_THROWS_AS(named_floor("cubic"), ValidationError);
}

TEST_CASE("positive combinations stay admissible") {
  const WeightedAction a{{1}, 0};
  const auto prof = verify_profile(a);
  const auto built = build_admissible(build_profile(a), named_floor("sqrt"));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(0.25, 4.0);
  for (int i = 0; i < 10; ++i) {
    const auto c = convex_combine(reference_sqrt(), built, coef(rng), coef(rng));
    CHECK(c.kind() == AdmissibleFunction::Kind::Combination);
    CHECK(verify_admissible(c, prof, 1e3).pass);
  }
  const auto c = convex_combine(reference_sqrt(), built, 0.5, 2.0);
  CHECK(c.value(3.0) == doctest::Approx(0.5 * reference_sqrt().value(3.0) + 2.0 * built.value(3.0)));
  check_derivatives(c, {0.5, 5.0, 80.0});
  CHECK_THROWS_AS(convex_combine(reference_sqrt(), built, 0.0, 1.0), ValidationError);
}

TEST_CASE("grid functions validate their knots") {
  CHECK_THROWS_AS(AdmissibleFunction::grid({{0, 1, 1}}, 1.0), ValidationError);
  CHECK_THROWS_AS(AdmissibleFunction::grid({{0, 1, 1}, {0, 2, 1}}, 1.0), ValidationError);
  CHECK_THROWS_AS(AdmissibleFunction::grid({{0, 1, 1}, {1, 2, 1}}, -1.0), ValidationError);
  const auto g = AdmissibleFunction::grid({{0, 1, 1}, {1, 2, 1}}, 0.0);
  CHECK(g.value(0.5) == doctest::Approx(1.5));
  CHECK(g.value(3.0) == doctest::Approx(4.0));
}

TEST_CASE("serialization round trip preserves values") {
  const auto built = build_admissible(build_profile({{1}, 0}), named_floor("sqrt"));
  const auto c = convex_combine(reference_sqrt(), built, 1.5, 0.75);
  for (const auto& s : {reference_sqrt(), AdmissibleFunction::constant(2.0), built, c}) {
    const auto back = admissible_from_json(Json::parse(dump_json(to_json(s))));
    CHECK(back.kind() == s.kind());
    for (double u : {0.0, 0.7, 12.0, 250.0, 5000.0}) {
      CHECK(back.value(u) == s.value(u));
      CHECK(back.derivative(u) == s.derivative(u));
    }
  }
  CHECK_THROWS_AS(admissible_from_json(Json{{"kind", "spline"}}), ValidationError);
}

}
