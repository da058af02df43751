#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortition/model.hpp"
#include "sortition/targets.hpp"

namespace sortition {

class BudgetOutOfRange : public std::runtime_error {
public:
  explicit BudgetOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

enum class SizeClass { Small, Medium, Large };
const char* size_class_name(SizeClass c);

struct Group {
  std::string state;
  SizeClass size_class = SizeClass::Small;
  std::vector<int> members;             // indices into the national instance, ascending
  std::vector<std::string> member_ids;  // parallel city ids (stable across re-sorts)
  double share = 0.0;                   // population share of the group

  std::string key() const { return state + " (" + size_class_name(size_class) + ")"; }
};

/// Deterministic partition by (state, population class). Thresholds are the
/// class boundaries, strictly increasing; empty classes are omitted.
std::vector<Group> group_cities(const ProblemInstance& inst, const std::vector<double>& thresholds);

/// Systematic randomized rounding of the fair letter shares: l_G in
/// {floor, ceil}, the total is exactly l, and expectations over seeds match
/// share * l.
std::vector<long long> letters_per_group(const std::vector<Group>& groups, long long letters,
                                         std::uint64_t seed);

struct GroupBudget {
  int t_G = 0;
  int t_min = 1;
  int n_G = 0;
  double target_width = 0.0; // sum of global target widths of the members
};

struct ApportionResult {
  std::vector<GroupBudget> budgets;
  double gamma = 0.0;
};

/// Adams-style apportionment of the outreach budget: finds gamma with
/// sum_G max(min(ceil(gamma * width_G), n_G), t_min_G) = t, resolving
/// simultaneous ceiling jumps by decrementing groups in ascending order of
/// fractional part, then by group key.
ApportionResult apportion_t(const std::vector<Group>& groups,
                            const std::vector<double>& global_widths, int t,
                            const std::vector<int>& t_min);

struct GroupPlanEntry {
  Group group;
  long long letters = 0; // l_G
  GroupBudget budget;
  ProblemInstance local;        // group sub-instance at l_G
  TargetProfile local_targets;  // recomputed at (group, l_G, t_G)
  bool forced_point = false;    // t_G == 1: every member gets l_G when selected
};

struct GroupPlan {
  std::vector<GroupPlanEntry> entries;
  double gamma = 0.0;
  long long letters = 0;
  int budget = 0;
  std::uint64_t instance_digest = 0;
};

/// Assembles the full plan: local sub-instances, local target profiles via
/// solve_kappa (the forced point profile when t_G = 1).
GroupPlan assemble_plan(const ProblemInstance& inst, const std::vector<Group>& groups,
                        const std::vector<long long>& letters_G,
                        const std::vector<GroupBudget>& budgets, double gamma,
                        const std::string& target_function_name);

struct GroupReportRow {
  std::string group_key;
  int t_G = 0;
  bool forced_point = false;
  double max_ratio = 1.0; // worst of local/global and global/local over members
};

/// Compares local against global targets per group; groups with t_G = 1 are
/// flagged since their local targets do not depend on the target function.
std::vector<GroupReportRow> local_vs_global_report(const GroupPlan& plan,
                                                   const TargetProfile& global_targets);

} // namespace sortition
