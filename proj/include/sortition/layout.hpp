#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sortition/model.hpp"

namespace sortition {

/// One rectangle of the flat picture: city `city` drawn at constant `height`
/// over the global interval [start, end) in [0, t). Segments may cross layer
/// (integer) boundaries when a city wraps.
struct Segment {
  int city = -1;
  double start = 0.0;
  double end = 0.0;
  double height = 0.0;
};

/// Piecewise-constant height functions over [0, columns). At every position
/// exactly one city is active per layer; a city's total area is its fair
/// share pi_i * l.
struct Layout {
  std::vector<Segment> segments;
  int columns = 0; // covered horizon; <= the budget the solver was asked for
  long long letters = 0;
  std::uint64_t instance_digest = 0;

  // Stacked height of all layers below `layer` at fractional position alpha,
  // plus the part of `layer` up to and including alpha's active segment is
  // not included: this is Lambda(layer - 1 + alpha) of the flat picture.
  double height_below(int layer, double alpha) const;
  // Total letters city receives at rho = alpha (sums over wrapped layers).
  std::vector<double> allocation_at(double alpha) const;
};

class CoverageGap : public std::runtime_error {
public:
  explicit CoverageGap(const std::string& what) : std::runtime_error(what) {}
};
class MassMismatch : public std::runtime_error {
public:
  explicit MassMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Breakpoint decomposition of a layout into a finite-support distribution.
/// Entry k covers [b_k, b_{k+1}) with its width as probability.
LetterDistribution extract_distribution(const Layout& layout, int n_cities);

/// Deterministic rho-line sample: the allocation of the breakpoint interval
/// containing rho.
Allocation sample(const Layout& layout, int n_cities, double rho);
Allocation sample(const LetterDistribution& dist, double rho);

/// Dependent randomized rounding by iterated pairwise pipage: every entry
/// moves to floor or ceiling, the sum stays exactly l, marginals are
/// preserved in expectation, and zero entries stay zero.
Allocation dependent_round(const Allocation& fractional, long long letters, std::uint64_t seed);

// Fractional parts of all segment endpoints, deduplicated (gap > merge tol),
// always starting at 0. Shared by extraction and sampling.
std::vector<double> breakpoints(const Layout& layout);

} // namespace sortition
