#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sortition/buckets.hpp"
#include "sortition/colgen.hpp"
#include "sortition/fixtures.hpp"
#include "sortition/greedy_equal.hpp"
#include "sortition/report.hpp"
#include "test_util.hpp"

using namespace sortition;
using testutil::city;

namespace {

ProblemInstance example1() {
  Fixture f = fixture("example1");
  return validate(f.cities, f.letters, 4);
}

TargetProfile flat_targets(int n, double tau) {
  TargetProfile p;
  p.function_name = "constant";
  p.tau.assign(static_cast<size_t>(n), tau);
  p.widths.assign(static_cast<size_t>(n), 0.0);
  return p;
}

} // namespace

TEST_CASE("phi basics") {
  TargetProfile targets = flat_targets(3, 4.0);
  CHECK(phi(Allocation{{4.0, 0.0, 4.0}}, targets) == doctest::Approx(0.0));
  CHECK(phi(Allocation{{8.0, 0.0, 0.0}}, targets) == doctest::Approx(1.0)); // |2tau-tau|/tau
  // mixed allocation cross-checked against a direct loop
  Allocation a{{1.0, 0.0, 6.0}};
  double direct = std::abs(1.0 - 4.0) / 4.0 + std::abs(6.0 - 4.0) / 4.0;
  CHECK(phi(a, targets) == doctest::Approx(direct));
}

TEST_CASE("expected phi: point mass and mixtures") {
  TargetProfile targets = flat_targets(2, 3.0);
  LetterDistribution point;
  point.entries.push_back({1.0, Allocation{{3.0, 0.0}}});
  CHECK(expected_phi(point, targets) == doctest::Approx(phi(point.entries[0].allocation, targets)));

  LetterDistribution mix;
  mix.entries.push_back({0.5, Allocation{{3.0, 0.0}}}); // phi 0
  mix.entries.push_back({0.5, Allocation{{9.0, 0.0}}}); // phi 2
  CHECK(expected_phi(mix, targets) == doctest::Approx(1.0));

  LetterDistribution bad = mix;
  bad.entries[0].probability = 0.6;
  CHECK_THROWS_AS(expected_phi(bad, targets), ProbabilityMassError);
}

TEST_CASE("column generation never scores worse than buckets") {
  std::mt19937 rng(77);
  int checked = 0;
  while (checked < 15) {
    ProblemInstance inst = testutil::random_instance(rng, 6, 14);
    WidthProfile wp = width_profile(inst);
    int t = std::max(1, wp.lower_bound_t);
    if (t > inst.n()) continue;
    TargetProfile targets = solve_kappa(inst, "sqrt", t);
    BucketsResult b = buckets(inst, t, targets);
    if (!b.ok()) continue;
    LetterDistribution bucket_dist = extract_distribution(*b.layout, inst.n());
    ProportionalResult cg = optimize_proportional(inst, t, targets);
    if (!cg.optimal) continue;
    CHECK(expected_phi(cg.distribution, targets) <=
          expected_phi(bucket_dist, targets) + 1e-6);
    ++checked;
  }
}

TEST_CASE("SVG output is deterministic and structurally sane") {
  ProblemInstance inst = example1();
  GreedyResult r = greedy_equal(inst, 4);
  REQUIRE(r.ok());

  std::string flat1 = render_layout(*r.layout, inst.n(), RenderStyle::Flat);
  std::string flat2 = render_layout(*r.layout, inst.n(), RenderStyle::Flat);
  CHECK(flat1 == flat2); // byte-identical
  CHECK(flat1.find("<svg") == 0);
  CHECK(flat1.find("</svg>") != std::string::npos);

  std::string stacked = render_layout(*r.layout, inst.n(), RenderStyle::Stacked);
  CHECK(stacked == render_layout(*r.layout, inst.n(), RenderStyle::Stacked));
  // stacked picture has at least one rect per breakpoint interval and layer
  size_t rects = 0;
  for (size_t pos = stacked.find("<rect"); pos != std::string::npos;
       pos = stacked.find("<rect", pos + 1))
    ++rects;
  CHECK(rects >= 4u); // 4 layers

  LetterDistribution dist = extract_distribution(*r.layout, inst.n());
  TargetProfile targets = solve_kappa(inst, "sqrt", 4);
  std::string prop = render_proportionality(dist, inst, targets);
  CHECK(prop == render_proportionality(dist, inst, targets));
  CHECK(prop.find("<line") != std::string::npos); // target curve present
}

TEST_CASE("single-city layout renders one full-width rectangle") {
  ProblemInstance inst = validate({city("solo", 3.0, 9.0)}, 9, 1);
  GreedyResult r = greedy_equal(inst, 1);
  REQUIRE(r.ok());
  std::string svg = render_layout(*r.layout, 1, RenderStyle::Flat);
  size_t rects = 0;
  for (size_t pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1))
    ++rects;
  CHECK(rects == 1u);
}

TEST_CASE("stacked rectangles reproduce the example1 opening geometry") {
  ProblemInstance inst = example1();
  GreedyResult r = greedy_equal(inst, 4);
  REQUIRE(r.ok());
  // layer-0 pieces: heights 5, 5 on [0,1/3), [1/3,2/3) then 15 on [2/3,1)
  std::vector<Segment> layer0;
  for (const Segment& s : r.layout->segments)
    if (s.start < 1.0 - 1e-9) layer0.push_back(s);
  REQUIRE(layer0.size() >= 3);
  CHECK(layer0[0].height == doctest::Approx(5.0));
  CHECK(layer0[1].height == doctest::Approx(5.0));
  CHECK(layer0[2].height == doctest::Approx(15.0));
  CHECK(layer0[2].start == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("metrics csv names the shared audit rows") {
  ProblemInstance inst = example1();
  GreedyResult r = greedy_equal(inst, 4);
  REQUIRE(r.ok());
  LetterDistribution dist = extract_distribution(*r.layout, inst.n());
  TargetProfile targets = solve_kappa(inst, "sqrt", 4);
  std::string csv = metrics_csv(inst, dist, &targets);
  CHECK(csv.find("fairness_ok,1") != std::string::npos);
  CHECK(csv.find("monotone,1") != std::string::npos);
  CHECK(csv.find("expected_phi,") != std::string::npos);
  CHECK(csv.find("max_support,4") != std::string::npos);
}

TEST_CASE("selection probabilities respect the width floors") {
  std::mt19937 rng(88);
  int checked = 0;
  while (checked < 20) {
    ProblemInstance inst = testutil::random_instance(rng, 7, 20);
    WidthProfile wp = width_profile(inst);
    int t = std::max(1, wp.lower_bound_t);
    if (t > inst.n()) continue;
    GreedyResult g = greedy_equal(inst, t);
    if (g.ok()) {
      auto audit = selection_probability_audit(inst, extract_distribution(*g.layout, inst.n()));
      CHECK(audit.ok);
    }
    FeasibilityResult f = feasible(inst, t);
    if (f.feasible) {
      auto audit = selection_probability_audit(inst, *f.distribution);
      CHECK(audit.ok);
      ++checked;
    }
  }
}

TEST_CASE("binary outcome report flags multi-valued cities") {
  LetterDistribution dist;
  dist.entries.push_back({0.5, Allocation{{2.0, 0.0}}});
  dist.entries.push_back({0.5, Allocation{{3.0, 1.0}}});
  BinaryOutcomeReport rep = binary_outcome_report(dist, 2);
  CHECK(!rep.binary);
  CHECK(rep.distinct_positive[0] == 2);
  CHECK(rep.distinct_positive[1] == 1);
}
