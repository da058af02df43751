#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sortition/fixtures.hpp"
#include "sortition/targets.hpp"
#include "test_util.hpp"

using namespace sortition;
using testutil::city;

TEST_CASE("built-in target functions") {
  CHECK(target_function("sqrt")(0.25) == doctest::Approx(0.5));
  CHECK(target_function("constant")(0.7) == doctest::Approx(1.0));
  CHECK(target_function("proportional")(0.1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(target_function("cubic"), UnknownFunction);
}

TEST_CASE("tabulated target function interpolates monotonically") {
  auto f = tabulated_target_function({{0.0, 1.0}, {0.5, 2.0}, {1.0, 4.0}});
  CHECK(f(0.25) == doctest::Approx(1.5));
  CHECK(f(0.75) == doctest::Approx(3.0));
  CHECK(f(-1.0) == doctest::Approx(1.0)); // clamped
  CHECK(f(2.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(tabulated_target_function({{0.0, 2.0}, {1.0, 1.0}}), UnknownFunction);
}

TEST_CASE("boundary t = n gives fair-share targets with unit widths") {
  Fixture f = fixture("example1");
  ProblemInstance inst = validate(f.cities, f.letters, 4);
  TargetProfile p = solve_kappa(inst, "sqrt", inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    CHECK(p.tau[static_cast<size_t>(i)] == doctest::Approx(inst.fair_share(i)));
    CHECK(p.widths[static_cast<size_t>(i)] == doctest::Approx(1.0));
  }
}

TEST_CASE("boundary t = sum of widths gives cap targets") {
  // widths (0.5, 0.5, 1.0) sum to 2 exactly
  ProblemInstance inst =
      validate({city("a", 1.0, 4.0), city("b", 1.0, 4.0), city("c", 2.0, 4.0)}, 8, 2);
  WidthProfile wp = width_profile(inst);
  REQUIRE(wp.total == doctest::Approx(2.0));
  TargetProfile p = solve_kappa(inst, "sqrt", 2);
  for (int i = 0; i < inst.n(); ++i)
    CHECK(p.tau[static_cast<size_t>(i)] == doctest::Approx(inst.cities[static_cast<size_t>(i)].cap));
}

TEST_CASE("example1 sqrt targets at t=4 satisfy the width equation") {
  Fixture f = fixture("example1");
  ProblemInstance inst = validate(f.cities, f.letters, 4);
  TargetProfile p = solve_kappa(inst, "sqrt", 4);
  double sum = 0.0;
  for (double w : p.widths) sum += w;
  CHECK(std::abs(sum - 4.0) <= 1e-9);
  for (int i = 0; i < inst.n(); ++i) {
    CHECK(p.tau[static_cast<size_t>(i)] >= inst.fair_share(i) - 1e-12);
    CHECK(p.tau[static_cast<size_t>(i)] <= inst.cities[static_cast<size_t>(i)].cap + 1e-12);
  }
}

TEST_CASE("width equation holds across functions and random instances") {
  std::mt19937 rng(17);
  int done = 0;
  while (done < 100) {
    ProblemInstance inst = testutil::random_instance(rng, 8, 30);
    WidthProfile wp = width_profile(inst);
    for (const char* fn : {"sqrt", "constant", "proportional"}) {
      for (int t = std::max(1, wp.lower_bound_t); t <= inst.n(); ++t) {
        TargetProfile p = solve_kappa(inst, fn, t);
        double sum = 0.0;
        for (double w : p.widths) sum += w;
        CHECK(std::abs(sum - static_cast<double>(t)) <= 1e-9);
        for (int i = 0; i < inst.n(); ++i) {
          CHECK(p.tau[static_cast<size_t>(i)] >= inst.fair_share(i) - 1e-9);
          CHECK(p.tau[static_cast<size_t>(i)] <=
                inst.cities[static_cast<size_t>(i)].cap + 1e-9);
          CHECK(p.widths[static_cast<size_t>(i)] <= 1.0 + 1e-9);
          CHECK(p.widths[static_cast<size_t>(i)] > 0.0);
        }
      }
    }
    ++done;
  }
}

TEST_CASE("width sum is monotone in kappa (bisection premise)") {
  Fixture f = fixture("example1");
  ProblemInstance inst = validate(f.cities, f.letters, 4);
  auto fn = target_function("sqrt");
  double prev = 1e300;
  for (double kappa : {0.0, 1.0, 5.0, 20.0, 100.0, 1000.0}) {
    double sum = 0.0;
    for (int i = 0; i < inst.n(); ++i) {
      double tau = std::max(inst.fair_share(i),
                            std::min(inst.cities[static_cast<size_t>(i)].cap,
                                     kappa * fn(inst.pi[static_cast<size_t>(i)])));
      sum += inst.fair_share(i) / tau;
    }
    CHECK(sum <= prev + 1e-12);
    prev = sum;
  }
}

TEST_CASE("out-of-range width requests are rejected with the attainable interval") {
  Fixture f = fixture("example1");
  ProblemInstance inst = validate(f.cities, f.letters, 4);
  CHECK_THROWS_AS(solve_kappa(inst, "sqrt", 2), WidthOutOfRange); // below 8/3
  try {
    solve_kappa(inst, "sqrt", 9); // above n = 8
    CHECK(false);
  } catch (const WidthOutOfRange& e) {
    CHECK(e.attainable_high == doctest::Approx(8.0));
    CHECK(e.attainable_low == doctest::Approx(8.0 / 3.0));
  }
}
