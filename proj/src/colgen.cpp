#include "sortition/colgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sortition/buckets.hpp"
#include "sortition/greedy_equal.hpp"
#include "sortition/layout.hpp"
#include "sortition/lp.hpp"

namespace sortition {

namespace {

constexpr int kColumnCap = 100000;

std::vector<long long> column_key(const Allocation& a) {
  std::vector<long long> key(a.letters_per_city.size());
  for (size_t i = 0; i < key.size(); ++i) key[i] = std::llround(a.letters_per_city[i] * 1e9);
  return key;
}

// Restricted master: min sum_c cost_c x_c (+ sum_i s_i when slack is on)
// s.t. sum_c x_c = 1 and sum_c a_i x_c (+ s_i) >= pi_i * l.
struct Master {
  const ProblemInstance& inst;
  bool with_slack;
  std::vector<Allocation> columns;
  std::vector<double> costs;
  std::set<std::vector<long long>> keys;

  Master(const ProblemInstance& instance, bool slack) : inst(instance), with_slack(slack) {}

  bool add(const Allocation& a, double cost) {
    auto key = column_key(a);
    if (!keys.insert(std::move(key)).second) return false;
    columns.push_back(a);
    costs.push_back(cost);
    return true;
  }

  LpSolution solve_master() const {
    const int n = inst.n();
    const int nc = static_cast<int>(columns.size());
    LinearProgram lp;
    for (int c = 0; c < nc; ++c) lp.add_variable(costs[static_cast<size_t>(c)]);
    int slack0 = -1;
    if (with_slack) {
      slack0 = static_cast<int>(lp.objective.size());
      for (int i = 0; i < n; ++i) lp.add_variable(1.0);
    }
    const int nv = static_cast<int>(lp.objective.size());
    {
      std::vector<double> row(static_cast<size_t>(nv), 0.0);
      for (int c = 0; c < nc; ++c) row[static_cast<size_t>(c)] = 1.0;
      lp.add_row(row, Relation::Equal, 1.0);
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(static_cast<size_t>(nv), 0.0);
      for (int c = 0; c < nc; ++c)
        row[static_cast<size_t>(c)] = columns[static_cast<size_t>(c)].letters_per_city[static_cast<size_t>(i)];
      if (with_slack) row[static_cast<size_t>(slack0 + i)] = 1.0;
      lp.add_row(row, Relation::GreaterEqual, inst.fair_share(i));
    }
    return solve(lp);
  }

  DualPoint dual_point(const LpSolution& sol, bool flip_scalar) const {
    DualPoint dp;
    dp.y = flip_scalar ? -sol.duals[0] : sol.duals[0];
    dp.per_city.resize(static_cast<size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i)
      dp.per_city[static_cast<size_t>(i)] = std::max(0.0, sol.duals[static_cast<size_t>(1 + i)]);
    return dp;
  }

  LetterDistribution distribution(const LpSolution& sol) const {
    LetterDistribution dist;
    dist.instance_digest = inst.digest;
    double total = 0.0;
    for (size_t c = 0; c < columns.size(); ++c)
      if (sol.primal[c] > 1e-12) total += sol.primal[c];
    bool integral = true;
    for (size_t c = 0; c < columns.size(); ++c) {
      if (sol.primal[c] <= 1e-12) continue;
      dist.entries.push_back({sol.primal[c] / total, columns[c]});
      integral = integral && columns[c].is_integral();
    }
    dist.mode = integral ? DistributionMode::Integral : DistributionMode::Fractional;
    return dist;
  }
};

} // namespace

FeasibilityResult feasible(const ProblemInstance& inst, int t) {
  FeasibilityResult res;
  WidthProfile wp = width_profile(inst);
  if (t < wp.lower_bound_t) {
    res.note = "budget below the width lower bound " + std::to_string(wp.lower_bound_t);
    return res;
  }

  Master master(inst, /*slack=*/true);
  DualPoint zero;
  zero.per_city.assign(static_cast<size_t>(inst.n()), 0.0);
  auto seed = price_exact(inst, t, zero);
  if (!seed) {
    res.note = "no integral t-bounded allocation exists";
    return res;
  }
  master.add(seed->allocation, 0.0);

  LpSolution sol;
  for (int iter = 0;; ++iter) {
    if (static_cast<int>(master.columns.size()) > kColumnCap)
      throw PricingStalled("feasibility master exceeded " + std::to_string(kColumnCap) + " columns");
    sol = master.solve_master();
    DualPoint dp = master.dual_point(sol, /*flip_scalar=*/true);
    auto col = price_exact(inst, t, dp);
    res.log.push_back({iter, sol.objective, col ? col->reduced_value : 0.0,
                       static_cast<int>(master.columns.size())});
    if (!col || col->reduced_value <= tol::kPricingExact) break;
    if (!master.add(col->allocation, 0.0)) {
      // A genuinely violated column cannot already be in the master; a
      // repeat is tolerance noise at worst.
      if (col->reduced_value > 1e-6) throw PricingStalled("exact oracle repeated a master column");
      break;
    }
  }

  double slack_opt = sol.objective;
  if (slack_opt <= tol::kAbs * static_cast<double>(inst.letters)) {
    res.feasible = true;
    res.distribution = master.distribution(sol);
  } else {
    res.feasible = false;
    res.certificate = master.dual_point(sol, /*flip_scalar=*/true);
    res.note = "terminal slack " + std::to_string(slack_opt);
  }
  return res;
}

namespace {

// One plus-one probe at budget t. Outcomes: infeasible-at-t certificate,
// or a fair distribution over (t+1)-bounded columns.
struct RelaxedProbe {
  bool fair = false;
  bool all_within_t = false;
};

RelaxedProbe relaxed_feasibility(const ProblemInstance& inst, int t, std::vector<IterationLog>& log) {
  RelaxedProbe probe;
  Master master(inst, /*slack=*/true);
  DualPoint zero;
  zero.per_city.assign(static_cast<size_t>(inst.n()), 0.0);
  auto seed = price_relaxed(inst, t, zero);
  if (!seed) return probe; // even the relaxation is empty
  master.add(seed->allocation, 0.0);

  LpSolution sol;
  for (int iter = 0;; ++iter) {
    if (static_cast<int>(master.columns.size()) > kColumnCap)
      throw PricingStalled("relaxed master exceeded column cap");
    sol = master.solve_master();
    DualPoint dp = master.dual_point(sol, /*flip_scalar=*/true);
    auto col = price_relaxed(inst, t, dp);
    log.push_back({iter, sol.objective, col ? col->reduced_value : 0.0,
                   static_cast<int>(master.columns.size())});
    // The separation decision compares the relaxation optimum against y;
    // the rounded column only enters when genuinely violated.
    if (!col || col->reduced_value <= tol::kPricingExact) break;
    if (!master.add(col->allocation, 0.0)) {
      if (col->reduced_value > 1e-6) throw PricingStalled("relaxed oracle repeated a master column");
      break;
    }
  }
  if (sol.objective > tol::kAbs * static_cast<double>(inst.letters)) return probe;

  probe.fair = true;
  probe.all_within_t = true;
  for (size_t c = 0; c < master.columns.size(); ++c)
    if (sol.primal[c] > 1e-12 && master.columns[c].support_size() > t) probe.all_within_t = false;
  return probe;
}

} // namespace

MinTOutcome min_feasible_t(const ProblemInstance& inst, int t_max, MinTMode mode) {
  MinTOutcome out;
  WidthProfile wp = width_profile(inst);
  int t_lo = std::max(1, wp.lower_bound_t);
  for (int t = t_lo; t <= t_max; ++t) {
    if (mode == MinTMode::Exact) {
      FeasibilityResult r = feasible(inst, t);
      for (const auto& e : r.log) out.log.push_back(e);
      if (r.feasible) {
        out.t = t;
        return out;
      }
    } else {
      RelaxedProbe probe = relaxed_feasibility(inst, t, out.log);
      if (probe.fair) {
        // Distribution in hand is (t+1)-bounded; it certifies t when every
        // support column already fits in t cities.
        out.t = probe.all_within_t ? t : t + 1;
        return out;
      }
      // Otherwise the dual certifies t itself infeasible; move on.
    }
  }
  return out;
}

ProportionalResult optimize_proportional(const ProblemInstance& inst, int t,
                                         const TargetProfile& targets,
                                         const ProportionalConfig& config) {
  Master master(inst, /*slack=*/false);
  auto add_column = [&](const Allocation& a) {
    master.add(a, deviation_cost(a, targets, config.scope));
  };

  BucketsResult b = buckets(inst, t, targets);
  if (b.ok()) {
    LetterDistribution d = extract_distribution(*b.layout, inst.n());
    for (const auto& e : d.entries) add_column(e.allocation);
  }
  GreedyResult g = greedy_equal(inst, t);
  if (g.ok()) {
    LetterDistribution d = extract_distribution(*g.layout, inst.n());
    for (const auto& e : d.entries) add_column(e.allocation);
  }
  if (master.columns.empty()) {
    FeasibilityResult f = feasible(inst, t);
    if (!f.feasible)
      throw InfeasibleStart("no fair t-bounded distribution exists at t=" + std::to_string(t));
    for (const auto& e : f.distribution->entries) add_column(e.allocation);
  }

  ProportionalResult res;
  res.optimal = true;

  ProportionalOptions opts;
  opts.scope = config.scope;
  opts.node_budget = config.node_budget;
  opts.gap_tolerance = tol::kBnbGap;

  LpSolution sol;
  int iter = 0;
  for (;; ++iter) {
    if (iter >= config.max_iterations)
      throw PricingStalled("proportional master did not converge in " +
                           std::to_string(config.max_iterations) + " iterations");
    sol = master.solve_master();
    DualPoint dp = master.dual_point(sol, /*flip_scalar=*/false);
    PricedColumn col = price_proportional(inst, t, targets, dp, opts);
    res.total_nodes += col.nodes;
    if (col.heuristic) res.optimal = false;
    res.log.push_back({iter, sol.objective, col.reduced_value,
                       static_cast<int>(master.columns.size()), col.nodes});
    if (col.reduced_value <= tol::kPricingProportional) break;
    if (!master.add(col.allocation, deviation_cost(col.allocation, targets, config.scope))) {
      res.optimal = false; // repeated column with positive reduced value
      break;
    }
  }

  res.expected_deviation = sol.objective;
  res.distribution = master.distribution(sol);
  res.distribution.mode = DistributionMode::Fractional;
  return res;
}

} // namespace sortition
