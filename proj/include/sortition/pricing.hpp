#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "sortition/model.hpp"
#include "sortition/targets.hpp"

namespace sortition {

/// Dual prices for the separation problems: per-city prices y_i >= 0 and the
/// scalar y. The feasibility oracles test max_a sum a_i y_i against y; the
/// proportional oracle maximizes y + sum a_i y_i - deviation(a).
struct DualPoint {
  double y = 0.0;
  std::vector<double> per_city;
};

enum class BoundTag { WithinT, WithinTPlus1 };

struct PricedColumn {
  Allocation allocation;
  double value = 0.0;         // objective of the returned allocation
  double reduced_value = 0.0; // violation of the corresponding dual constraint
  double lp_bound = 0.0;      // relaxation optimum (price_relaxed only)
  BoundTag tag = BoundTag::WithinT;
  bool caps_floored = false;  // non-integral caps were floored for the DP
  bool heuristic = false;     // node budget hit before the gap closed
  double gap = 0.0;
  long nodes = 0;
};

class NonIntegralCaps : public std::runtime_error {
public:
  explicit NonIntegralCaps(const std::string& what) : std::runtime_error(what) {}
};

/// Exact separation over integral t-bounded allocations: maximizes
/// sum a_i y_i with a knapsack-style DP, guessing the least-price city that
/// takes the remainder while all other selected cities sit at their caps.
/// O(n^2 * t * l). Returns nothing when no integral t-bounded allocation
/// exists. reduced_value = max - duals.y.
std::optional<PricedColumn> price_exact(const ProblemInstance& inst, int t, const DualPoint& duals);

/// Polynomial-time approximate separation: solves the continuous relaxation
/// max sum z_i y_i u_i (sum z_i u_i = l, sum z_i <= t, z in [0,1]^n) at a
/// basic optimum, then rounds the at-most-two fractional letter counts
/// (higher price up, lower down). The result is (t+1)-bounded; lp_bound
/// carries the relaxation optimum that decides separation.
std::optional<PricedColumn> price_relaxed(const ProblemInstance& inst, int t, const DualPoint& duals);

enum class DeviationScope {
  SelectedOnly, // deviation counted for cities with a_i > 0 (the phi objective)
  AllCities,    // every city pays |a_i/tau_i - 1|, zeros included
};

/// Total relative deviation of an allocation from its targets. SelectedOnly
/// is the phi disproportionality measure; AllCities additionally charges 1
/// per unselected city.
double deviation_cost(const Allocation& a, const TargetProfile& targets, DeviationScope scope);

struct ProportionalOptions {
  DeviationScope scope = DeviationScope::SelectedOnly;
  long node_budget = 1000000;
  double gap_tolerance = 1e-6;
};

/// Separation for the proportionality master: maximizes
/// y + sum a_i y_i - deviation(a) over fractional t-bounded allocations by
/// branch and bound over support sets; for a fixed support the inner problem
/// is a separable concave maximization solved exactly by a slope greedy.
/// reduced_value equals the (true-objective) maximum found.
PricedColumn price_proportional(const ProblemInstance& inst, int t, const TargetProfile& targets,
                                const DualPoint& duals, const ProportionalOptions& opts = {});

/// Exact inner problem: maximize sum_{i in S} (a_i y_i - |a_i/tau_i - 1|)
/// with sum_{i in S} a_i = l, 0 <= a_i <= u_i, a_i = 0 off the support (the
/// deviation is charged to every support member, including those left at 0).
/// Returns nothing when the support cannot absorb l letters.
std::optional<std::pair<Allocation, double>> support_concave_max(const ProblemInstance& inst,
                                                                 const TargetProfile& targets,
                                                                 const DualPoint& duals,
                                                                 const std::vector<int>& support);

} // namespace sortition
