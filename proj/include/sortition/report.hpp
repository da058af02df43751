#pragma once

#include <string>
#include <vector>

#include "sortition/layout.hpp"
#include "sortition/model.hpp"
#include "sortition/pricing.hpp"
#include "sortition/targets.hpp"

namespace sortition {

/// phi: total relative deviation from targets over selected cities.
double phi(const Allocation& a, const TargetProfile& targets);
/// Probability-weighted phi; the objective all three solvers are scored by.
double expected_phi(const LetterDistribution& dist, const TargetProfile& targets);

struct MonotonicityReport {
  int entries = 0;
  int violating_pairs = 0; // adjacent inversions summed over support entries
  int worst_entry = 0;     // max inversions in a single entry
  bool monotone = false;
};

/// slack 0 for fractional distributions; 1 for integral ones (monotone up to
/// one letter).
MonotonicityReport monotonicity_report(const LetterDistribution& dist, double slack);

struct BinaryOutcomeReport {
  std::vector<int> distinct_positive; // per city: distinct positive letter counts
  bool binary = false;                // every city has at most one
};

BinaryOutcomeReport binary_outcome_report(const LetterDistribution& dist, int n_cities);

enum class RenderStyle { Stacked, Flat, Proportionality };

/// Deterministic SVG. Stacked: layer columns over x in [0,1). Flat: the
/// height functions over [0, columns). Coordinates quantized to 1e-4.
std::string render_layout(const Layout& layout, int n_cities, RenderStyle style);

/// Proportionality strip: support rectangles per city in ascending size
/// order, fill encoding a_i/tau_i on a fixed diverging scale, targets as a
/// black step curve.
std::string render_proportionality(const LetterDistribution& dist, const ProblemInstance& inst,
                                   const TargetProfile& targets);

/// Key/value metrics rows shared by the CLI and tests.
std::string metrics_csv(const ProblemInstance& inst, const LetterDistribution& dist,
                        const TargetProfile* targets);

} // namespace sortition
