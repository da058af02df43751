#include "sortition/apportion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sortition/rng.hpp"

namespace sortition {

const char* size_class_name(SizeClass c) {
  switch (c) {
    case SizeClass::Small: return "Small";
    case SizeClass::Medium: return "Medium";
    case SizeClass::Large: return "Large";
  }
  return "?";
}

std::vector<Group> group_cities(const ProblemInstance& inst, const std::vector<double>& thresholds) {
  for (size_t i = 0; i + 1 < thresholds.size(); ++i)
    if (!(thresholds[i] < thresholds[i + 1]))
      throw BudgetOutOfRange("size-class thresholds must be strictly increasing");

  auto classify = [&](double pop) {
    size_t k = 0;
    while (k < thresholds.size() && pop >= thresholds[k]) ++k;
    if (k == 0) return SizeClass::Small;
    if (k == 1) return SizeClass::Medium;
    return SizeClass::Large;
  };

  std::map<std::pair<std::string, int>, Group> by_key;
  for (int i = 0; i < inst.n(); ++i) {
    const City& c = inst.cities[static_cast<size_t>(i)];
    SizeClass sc = classify(c.population);
    auto key = std::make_pair(c.state, static_cast<int>(sc));
    Group& g = by_key[key];
    g.state = c.state;
    g.size_class = sc;
    g.members.push_back(i);
    g.member_ids.push_back(c.id);
    g.share += inst.pi[static_cast<size_t>(i)];
  }
  std::vector<Group> out;
  out.reserve(by_key.size());
  for (auto& [key, g] : by_key) out.push_back(std::move(g));
  return out;
}

std::vector<long long> letters_per_group(const std::vector<Group>& groups, long long letters,
                                         std::uint64_t seed) {
  std::vector<long long> out(groups.size());
  std::vector<double> frac(groups.size());
  long long base_total = 0;
  for (size_t g = 0; g < groups.size(); ++g) {
    double exact = groups[g].share * static_cast<double>(letters);
    double base = std::floor(exact + tol::kAbs);
    out[g] = static_cast<long long>(base);
    frac[g] = std::max(0.0, exact - base);
    base_total += out[g];
  }
  long long remainder = letters - base_total;

  // Systematic rounding: one uniform offset, +1 wherever the cumulative
  // fractional mass crosses an integer grid point.
  SeededRng rng(seed);
  double offset = rng.uniform();
  double cum = 0.0;
  long long given = 0;
  for (size_t g = 0; g < groups.size() && given < remainder; ++g) {
    double lo = cum;
    cum += frac[g];
    // grid points offset, offset+1, ... inside [lo, cum)
    double first = std::ceil(lo - offset - 1e-12) + offset;
    if (first < lo) first += 1.0;
    if (first < cum - 1e-12) {
      out[g] += 1;
      ++given;
    }
  }
  // Numerical slack: hand any unassigned remainder to the largest fractions.
  if (given < remainder) {
    std::vector<size_t> idx(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) idx[g] = g;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return frac[a] > frac[b]; });
    for (size_t k = 0; k < idx.size() && given < remainder; ++k) {
      if (out[idx[k]] == static_cast<long long>(std::floor(groups[idx[k]].share * letters + tol::kAbs))) {
        out[idx[k]] += 1;
        ++given;
      }
    }
  }
  return out;
}

namespace {

int clamped_budget(double gamma, const GroupBudget& b) {
  double scaled = gamma * b.target_width;
  int ceiled = static_cast<int>(std::ceil(scaled - 1e-12));
  return std::max(std::min(ceiled, b.n_G), b.t_min);
}

} // namespace

ApportionResult apportion_t(const std::vector<Group>& groups,
                            const std::vector<double>& global_widths, int t,
                            const std::vector<int>& t_min) {
  std::vector<GroupBudget> budgets(groups.size());
  long long min_sum = 0, max_sum = 0;
  for (size_t g = 0; g < groups.size(); ++g) {
    budgets[g].n_G = static_cast<int>(groups[g].members.size());
    budgets[g].t_min = std::max(1, t_min[g]);
    for (int i : groups[g].members) budgets[g].target_width += global_widths[static_cast<size_t>(i)];
    min_sum += budgets[g].t_min;
    max_sum += budgets[g].n_G;
  }
  if (t < min_sum || t > max_sum)
    throw BudgetOutOfRange("t=" + std::to_string(t) + " outside [" + std::to_string(min_sum) +
                           ", " + std::to_string(max_sum) + "]");

  auto total_at = [&](double gamma) {
    long long s = 0;
    for (const auto& b : budgets) s += clamped_budget(gamma, b);
    return s;
  };

  // Smallest gamma whose (non-decreasing, integer-stepped) total reaches t.
  double lo = 0.0, hi = 1.0;
  while (total_at(hi) < t) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (total_at(mid) >= t)
      hi = mid;
    else
      lo = mid;
  }
  double gamma = hi;

  for (size_t g = 0; g < budgets.size(); ++g) budgets[g].t_G = clamped_budget(gamma, budgets[g]);
  long long sum = 0;
  for (const auto& b : budgets) sum += b.t_G;

  // Simultaneous ceiling jumps can overshoot; pull back the most marginal
  // groups (smallest fractional part of gamma * width) first.
  while (sum > t) {
    int pick = -1;
    double pick_frac = 2.0;
    for (size_t g = 0; g < budgets.size(); ++g) {
      if (budgets[g].t_G <= budgets[g].t_min) continue;
      double scaled = gamma * budgets[g].target_width;
      double f = scaled - std::floor(scaled);
      if (f < pick_frac - 1e-15 ||
          (std::abs(f - pick_frac) <= 1e-15 && pick >= 0 &&
           groups[g].key() < groups[static_cast<size_t>(pick)].key())) {
        pick_frac = f;
        pick = static_cast<int>(g);
      }
    }
    if (pick < 0)
      throw BudgetOutOfRange("cannot settle apportionment at t=" + std::to_string(t));
    budgets[static_cast<size_t>(pick)].t_G -= 1;
    --sum;
  }
  return {std::move(budgets), gamma};
}

GroupPlan assemble_plan(const ProblemInstance& inst, const std::vector<Group>& groups,
                        const std::vector<long long>& letters_G,
                        const std::vector<GroupBudget>& budgets, double gamma,
                        const std::string& target_function_name) {
  GroupPlan plan;
  plan.gamma = gamma;
  plan.budget = 0;
  plan.letters = 0;
  plan.instance_digest = inst.digest;
  for (size_t g = 0; g < groups.size(); ++g) {
    GroupPlanEntry entry;
    entry.group = groups[g];
    entry.letters = letters_G[g];
    entry.budget = budgets[g];
    plan.letters += entry.letters;
    plan.budget += entry.budget.t_G;

    std::vector<City> members;
    for (int i : groups[g].members) {
      City c = inst.cities[static_cast<size_t>(i)];
      c.cap = c.cap_before_clamp; // local validation re-clamps against l_G
      members.push_back(std::move(c));
    }
    entry.local = validate(std::move(members), entry.letters, std::max(1, entry.budget.t_G));
    if (entry.budget.t_G <= 1) {
      entry.forced_point = true;
      entry.local_targets = point_profile(entry.local);
    } else {
      entry.local_targets = solve_kappa(entry.local, target_function_name, entry.budget.t_G);
    }
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

std::vector<GroupReportRow> local_vs_global_report(const GroupPlan& plan,
                                                   const TargetProfile& global_targets) {
  std::vector<GroupReportRow> rows;
  for (const auto& entry : plan.entries) {
    GroupReportRow row;
    row.group_key = entry.group.key();
    row.t_G = entry.budget.t_G;
    row.forced_point = entry.forced_point;
    // Local validation re-sorts, so pair local and national rows by city id.
    std::map<std::string, size_t> local_by_id;
    for (size_t k = 0; k < entry.local.cities.size(); ++k)
      local_by_id[entry.local.cities[k].id] = k;
    for (size_t m = 0; m < entry.group.members.size(); ++m) {
      int i = entry.group.members[m];
      size_t k = local_by_id.at(entry.group.member_ids[m]);
      double local_tau = entry.local_targets.tau[k];
      double global_tau = global_targets.tau[static_cast<size_t>(i)];
      double ratio = std::max(local_tau / global_tau, global_tau / local_tau);
      row.max_ratio = std::max(row.max_ratio, ratio);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace sortition
