#pragma once

#include <optional>
#include <vector>

#include "sortition/layout.hpp"
#include "sortition/model.hpp"

namespace sortition {

// Oversized cities (pi_i > 1/t) and the u_i >= l requirement on them, for a
// budget that may differ from the one the instance was validated with.
std::vector<int> oversized_cities(const ProblemInstance& inst, int t);
std::vector<int> assumption_violations(const ProblemInstance& inst, int t);

struct GreedyPlacement {
  int city = -1;
  double start = 0.0;
  double end = 0.0;
  double height = 0.0;
  bool selects_average = false; // height equals the running average, not u_i
};

struct GreedyTrace {
  std::vector<GreedyPlacement> placements;
  std::optional<double> failure_point; // first x at or beyond the budget
  double final_x = 0.0;
};

enum class GreedyStatus {
  Success,
  BudgetExceeded,     // final x ran past t
  BelowWidthBound,    // refused: t < ceil(sum of widths)
  AssumptionViolated, // an oversized city actually exceeded its cap, no override
};

struct GreedyResult {
  GreedyStatus status = GreedyStatus::BudgetExceeded;
  std::optional<Layout> layout; // present on Success (and AssumptionViolated)
  GreedyTrace trace;
  std::vector<int> cap_violations; // cities whose sampled letters exceed u_i

  bool ok() const { return status == GreedyStatus::Success; }
};

/// Layer-filling construction: processes cities ascending by size, drawing
/// each at the lesser of its cap and the average height remaining for the
/// current layer, and fails when the drawing runs past t columns. Cities
/// wider than a layer wrap; cap compliance of the extraction is re-audited
/// afterwards, which is what Assumption 1 (u_i >= l for oversized cities)
/// guards in the first place.
GreedyResult greedy_equal(const ProblemInstance& inst, int t, bool override_assumption = false);

struct MinTResult {
  std::optional<int> t;
  std::vector<int> tried;
};

/// Smallest t in [max(1, width lower bound), t_max] where greedy_equal
/// succeeds; scans upward since success is not known to be monotone in t.
MinTResult min_t_greedy(const ProblemInstance& inst, int t_max, bool override_assumption = false);

} // namespace sortition
