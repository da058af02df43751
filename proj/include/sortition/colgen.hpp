#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortition/model.hpp"
#include "sortition/pricing.hpp"
#include "sortition/targets.hpp"

namespace sortition {

class PricingStalled : public std::runtime_error {
public:
  explicit PricingStalled(const std::string& what) : std::runtime_error(what) {}
};
class InfeasibleStart : public std::runtime_error {
public:
  explicit InfeasibleStart(const std::string& what) : std::runtime_error(what) {}
};

struct IterationLog {
  int iteration = 0;
  double master_objective = 0.0;
  double reduced_value = 0.0;
  int columns = 0;
  long nodes = 0; // branch-and-bound nodes of the pricing call, if any
};

struct FeasibilityResult {
  bool feasible = false;
  std::optional<LetterDistribution> distribution; // on feasible
  std::optional<DualPoint> certificate;           // on infeasible (positive dual objective)
  std::vector<IterationLog> log;
  std::string note;
};

/// Phase-1 column generation: minimizes total fairness slack over generated
/// columns, pricing with the exact oracle until no dual constraint is
/// violated. Feasible iff the slack optimum vanishes.
FeasibilityResult feasible(const ProblemInstance& inst, int t);

enum class MinTMode { Exact, PlusOne };

struct MinTOutcome {
  std::optional<int> t;
  std::vector<IterationLog> log;
};

/// Smallest t with a fair t-bounded distribution. Exact mode scans
/// feasible() upward from the width lower bound. PlusOne mode prices with
/// the relaxed oracle: each round either certifies t infeasible or exhibits
/// a fair distribution over (t+1)-bounded allocations, so the result is
/// within one of the optimum.
MinTOutcome min_feasible_t(const ProblemInstance& inst, int t_max, MinTMode mode = MinTMode::Exact);

struct ProportionalResult {
  LetterDistribution distribution;
  double expected_deviation = 0.0; // master objective at termination
  bool optimal = false;            // every pricing call closed its gap
  std::vector<IterationLog> log;
  long total_nodes = 0;
};

struct ProportionalConfig {
  DeviationScope scope = DeviationScope::SelectedOnly;
  long node_budget = 1000000;
  int max_iterations = 20000;
};

/// Minimizes expected deviation from the targets over fair t-bounded
/// distributions. Master seeded with Buckets and GreedyEqual columns when
/// available, phase-1 columns otherwise; prices with the proportional
/// branch-and-bound oracle until the reduced value drops to tolerance.
ProportionalResult optimize_proportional(const ProblemInstance& inst, int t,
                                         const TargetProfile& targets,
                                         const ProportionalConfig& config = {});

} // namespace sortition
