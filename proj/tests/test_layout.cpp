#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "sortition/greedy_equal.hpp"
#include "sortition/layout.hpp"
#include "sortition/rng.hpp"
#include "sortition/serialize.hpp"
#include "test_util.hpp"

using namespace sortition;

namespace {

Layout single_city_layout(long long letters) {
  Layout layout;
  layout.columns = 1;
  layout.letters = letters;
  layout.segments.push_back({0, 0.0, 1.0, static_cast<double>(letters)});
  return layout;
}

} // namespace

TEST_CASE("single segment extracts to a point mass") {
  Layout layout = single_city_layout(12);
  LetterDistribution dist = extract_distribution(layout, 1);
  REQUIRE(dist.entries.size() == 1);
  CHECK(dist.entries[0].probability == doctest::Approx(1.0));
  CHECK(dist.entries[0].allocation.letters_per_city[0] == doctest::Approx(12.0));
}

TEST_CASE("breakpoint at one third yields two entries") {
  Layout layout;
  layout.columns = 1;
  layout.letters = 9;
  layout.segments.push_back({0, 0.0, 1.0 / 3.0, 15.0});
  layout.segments.push_back({1, 1.0 / 3.0, 1.0, 6.0});
  LetterDistribution dist = extract_distribution(layout, 2);
  REQUIRE(dist.entries.size() == 2);
  CHECK(dist.entries[0].probability == doctest::Approx(1.0 / 3.0));
  CHECK(dist.entries[0].allocation.letters_per_city[0] == doctest::Approx(15.0));
  CHECK(dist.entries[1].probability == doctest::Approx(2.0 / 3.0));
  CHECK(dist.entries[1].allocation.letters_per_city[1] == doctest::Approx(6.0));
}

TEST_CASE("coverage gap detected") {
  Layout layout;
  layout.columns = 1;
  layout.letters = 10;
  layout.segments.push_back({0, 0.0, 0.5, 10.0});
  CHECK_THROWS_AS(extract_distribution(layout, 1), CoverageGap);
}

TEST_CASE("wrapped segments add up across layers") {
  // One city spans [0.5, 1.5) at height 4: at alpha in [0,0.5) it is in
  // layer 1, at [0.5,1) in layer 0; a second city fills the rest.
  Layout layout;
  layout.columns = 2;
  layout.letters = 10;
  layout.segments.push_back({0, 0.5, 1.5, 4.0});
  layout.segments.push_back({1, 0.0, 0.5, 6.0});
  layout.segments.push_back({1, 1.5, 2.0, 6.0});
  // Both halves carry the same (4, 6) totals, so they merge into one entry.
  LetterDistribution dist = extract_distribution(layout, 2);
  REQUIRE(dist.entries.size() == 1);
  CHECK(dist.entries[0].probability == doctest::Approx(1.0));
  CHECK(dist.entries[0].allocation.letters_per_city[0] == doctest::Approx(4.0));
  CHECK(dist.entries[0].allocation.letters_per_city[1] == doctest::Approx(6.0));
}

TEST_CASE("sample is a pure function of rho") {
  Layout layout;
  layout.columns = 1;
  layout.letters = 9;
  layout.segments.push_back({0, 0.0, 1.0 / 3.0, 15.0});
  layout.segments.push_back({1, 1.0 / 3.0, 1.0, 6.0});
  Allocation a0 = sample(layout, 2, 0.0);
  CHECK(a0.letters_per_city[0] == doctest::Approx(15.0));
  Allocation just_below = sample(layout, 2, 1.0 / 3.0 - 1e-9);
  Allocation just_above = sample(layout, 2, 1.0 / 3.0 + 1e-9);
  CHECK(just_below.letters_per_city[0] == doctest::Approx(15.0));
  CHECK(just_above.letters_per_city[1] == doctest::Approx(6.0));
  // byte-for-byte determinism
  Allocation again = sample(layout, 2, 0.2);
  Allocation again2 = sample(layout, 2, 0.2);
  CHECK(again.letters_per_city == again2.letters_per_city);

  LetterDistribution dist = extract_distribution(layout, 2);
  CHECK(sample(dist, 0.0).letters_per_city[0] == doctest::Approx(15.0));
  CHECK(sample(dist, 0.99).letters_per_city[1] == doctest::Approx(6.0));
}

TEST_CASE("dependent rounding: integral input unchanged") {
  Allocation a{{1.0, 2.0, 0.0, 3.0}};
  Allocation out = dependent_round(a, 6, 42);
  CHECK(out.letters_per_city == std::vector<double>{1.0, 2.0, 0.0, 3.0});
}

TEST_CASE("dependent rounding: two half letters split evenly") {
  int twos = 0;
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    Allocation out = dependent_round(Allocation{{1.5, 1.5}}, 3, static_cast<std::uint64_t>(s));
    CHECK(out.letters_per_city[0] + out.letters_per_city[1] == doctest::Approx(3.0));
    CHECK(out.is_integral());
    if (out.letters_per_city[0] == 2.0) ++twos;
  }
  // exact split probability 1/2; 3 sigma ~ 0.0106
  CHECK(std::abs(twos / static_cast<double>(trials) - 0.5) < 0.011);
}

TEST_CASE("dependent rounding: fixed three-city probabilities") {
  // a = (0.25, 0.75, 2.0): city 3 fixed, (A1,A2) in {(0,1),(1,0)} with
  // probabilities (0.75, 0.25).
  std::map<std::pair<int, int>, int> counts;
  const int trials = 40000;
  for (int s = 0; s < trials; ++s) {
    Allocation out = dependent_round(Allocation{{0.25, 0.75, 2.0}}, 3, static_cast<std::uint64_t>(s));
    CHECK(out.letters_per_city[2] == doctest::Approx(2.0));
    CHECK(out.total() == doctest::Approx(3.0));
    counts[{static_cast<int>(out.letters_per_city[0]), static_cast<int>(out.letters_per_city[1])}]++;
  }
  REQUIRE(counts.size() == 2);
  double p01 = counts[{0, 1}] / static_cast<double>(trials);
  CHECK(std::abs(p01 - 0.75) < 0.01);
}

TEST_CASE("dependent rounding preserves marginals and support") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3 + static_cast<int>(rng() % 5);
    long long l = 10 + static_cast<int>(rng() % 10);
    // random fractional allocation summing to l
    std::vector<double> a(static_cast<size_t>(n), 0.0);
    double left = static_cast<double>(l);
    for (int i = 0; i + 1 < n; ++i) {
      a[static_cast<size_t>(i)] = ud(rng) * left / 2.0;
      left -= a[static_cast<size_t>(i)];
    }
    a[static_cast<size_t>(n - 1)] = left;
    std::vector<double> mean(static_cast<size_t>(n), 0.0);
    const int draws = 20000;
    for (int s = 0; s < draws; ++s) {
      Allocation out = dependent_round(Allocation{a}, l, static_cast<std::uint64_t>(s * 977 + trial));
      CHECK(out.total() == doctest::Approx(static_cast<double>(l)));
      for (int i = 0; i < n; ++i) {
        CHECK(out.letters_per_city[static_cast<size_t>(i)] >= std::floor(a[static_cast<size_t>(i)]) - 1e-12);
        CHECK(out.letters_per_city[static_cast<size_t>(i)] <= std::ceil(a[static_cast<size_t>(i)]) + 1e-12);
        if (a[static_cast<size_t>(i)] == 0.0) CHECK(out.letters_per_city[static_cast<size_t>(i)] == 0.0);
        mean[static_cast<size_t>(i)] += out.letters_per_city[static_cast<size_t>(i)];
      }
    }
    for (int i = 0; i < n; ++i) {
      double m = mean[static_cast<size_t>(i)] / draws;
      double f = a[static_cast<size_t>(i)] - std::floor(a[static_cast<size_t>(i)]);
      double sigma = std::sqrt(std::max(f * (1 - f), 1e-12) / draws);
      CHECK(std::abs(m - a[static_cast<size_t>(i)]) <= 3.0 * sigma + 1e-9);
    }
  }
}

TEST_CASE("mass mismatch rejected") {
  CHECK_THROWS_AS(dependent_round(Allocation{{1.0, 1.0}}, 3, 1), MassMismatch);
}

TEST_CASE("artifact serialization round-trips solver output") {
  std::mt19937 rng(61);
  ProblemInstance inst = testutil::random_instance(rng, 6, 18);
  WidthProfile wp = width_profile(inst);
  GreedyResult r = greedy_equal(inst, std::max(1, wp.lower_bound_t) + 1, true);
  if (!r.ok()) return;
  LetterDistribution dist = extract_distribution(*r.layout, inst.n());
  dist.instance_digest = inst.digest;

  LetterDistribution dist2 = distribution_from_json(distribution_to_json(dist));
  CHECK(dist2.instance_digest == dist.instance_digest);
  CHECK(dist2.mode == dist.mode);
  REQUIRE(dist2.entries.size() == dist.entries.size());
  for (size_t k = 0; k < dist.entries.size(); ++k) {
    CHECK(dist2.entries[k].probability == doctest::Approx(dist.entries[k].probability).epsilon(1e-12));
    for (size_t i = 0; i < dist.entries[k].allocation.letters_per_city.size(); ++i)
      CHECK(dist2.entries[k].allocation.letters_per_city[i] ==
            doctest::Approx(dist.entries[k].allocation.letters_per_city[i]).epsilon(1e-12));
  }

  Layout layout2 = layout_from_json(layout_to_json(*r.layout));
  CHECK(layout2.columns == r.layout->columns);
  CHECK(layout2.instance_digest == r.layout->instance_digest);
  REQUIRE(layout2.segments.size() == r.layout->segments.size());
  // extraction of the round-tripped layout matches the original
  LetterDistribution d2 = extract_distribution(layout2, inst.n());
  REQUIRE(d2.entries.size() == dist.entries.size());
  for (size_t k = 0; k < dist.entries.size(); ++k)
    CHECK(d2.entries[k].probability == doctest::Approx(dist.entries[k].probability).epsilon(1e-12));
}
