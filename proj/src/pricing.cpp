#include "sortition/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "sortition/lp.hpp"

namespace sortition {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> clamped_prices(const ProblemInstance& inst, const DualPoint& duals) {
  std::vector<double> y(static_cast<size_t>(inst.n()), 0.0);
  for (int i = 0; i < inst.n() && i < static_cast<int>(duals.per_city.size()); ++i)
    y[static_cast<size_t>(i)] = std::max(0.0, duals.per_city[static_cast<size_t>(i)]);
  return y;
}

} // namespace

std::optional<PricedColumn> price_exact(const ProblemInstance& inst, int t, const DualPoint& duals) {
  const int n = inst.n();
  const long long l = inst.letters;
  if (t < 1 || n < 1) return std::nullopt;
  std::vector<double> y = clamped_prices(inst, duals);

  bool floored = false;
  std::vector<long long> u(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double cap = inst.cities[static_cast<size_t>(i)].cap;
    if (std::abs(cap - std::round(cap)) > tol::kAbs) floored = true;
    u[static_cast<size_t>(i)] = static_cast<long long>(std::floor(cap + tol::kAbs));
  }

  const int kmax = std::min(t - 1, n - 1);
  const size_t zdim = static_cast<size_t>(l) + 1;

  // Pass 1: value-only DP per remainder guess.
  double best = kNegInf;
  int best_star = -1;
  auto run_dp = [&](int star, std::vector<std::vector<char>>* take) {
    std::vector<std::vector<double>> val(static_cast<size_t>(kmax) + 1,
                                         std::vector<double>(zdim, kNegInf));
    val[0][0] = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == star) continue;
      long long uj = u[static_cast<size_t>(j)];
      if (uj <= 0 || uj > l) {
        if (take) take->push_back(std::vector<char>(static_cast<size_t>(kmax + 1) * zdim, 0));
        continue;
      }
      std::vector<char> taken;
      if (take) taken.assign(static_cast<size_t>(kmax + 1) * zdim, 0);
      for (int k = kmax; k >= 1; --k) {
        for (long long z = l; z >= uj; --z) {
          double cand = val[static_cast<size_t>(k - 1)][static_cast<size_t>(z - uj)];
          if (cand == kNegInf) continue;
          cand += y[static_cast<size_t>(j)] * static_cast<double>(uj);
          if (cand > val[static_cast<size_t>(k)][static_cast<size_t>(z)]) {
            val[static_cast<size_t>(k)][static_cast<size_t>(z)] = cand;
            if (take) taken[static_cast<size_t>(k) * zdim + static_cast<size_t>(z)] = 1;
          }
        }
      }
      if (take) take->push_back(std::move(taken));
    }
    return val;
  };

  for (int star = 0; star < n; ++star) {
    auto val = run_dp(star, nullptr);
    long long zmin = std::max<long long>(0, l - u[static_cast<size_t>(star)]);
    for (int k = 0; k <= kmax; ++k) {
      for (long long z = zmin; z <= l; ++z) {
        double v = val[static_cast<size_t>(k)][static_cast<size_t>(z)];
        if (v == kNegInf) continue;
        v += static_cast<double>(l - z) * y[static_cast<size_t>(star)];
        if (v > best + 1e-15) {
          best = v;
          best_star = star;
        }
      }
    }
  }
  if (best_star < 0) return std::nullopt;

  // Pass 2: rebuild the winner with decision tracking.
  std::vector<std::vector<char>> take;
  auto val = run_dp(best_star, &take);
  long long zmin = std::max<long long>(0, l - u[static_cast<size_t>(best_star)]);
  int bk = -1;
  long long bz = -1;
  double bval = kNegInf;
  for (int k = 0; k <= kmax; ++k) {
    for (long long z = zmin; z <= l; ++z) {
      double v = val[static_cast<size_t>(k)][static_cast<size_t>(z)];
      if (v == kNegInf) continue;
      v += static_cast<double>(l - z) * y[static_cast<size_t>(best_star)];
      if (v > bval + 1e-15) {
        bval = v;
        bk = k;
        bz = z;
      }
    }
  }

  PricedColumn col;
  col.caps_floored = floored;
  col.allocation.letters_per_city.assign(static_cast<size_t>(n), 0.0);
  col.allocation.letters_per_city[static_cast<size_t>(best_star)] += static_cast<double>(l - bz);
  // Walk the per-city decision layers backwards.
  int k = bk;
  long long z = bz;
  int layer = static_cast<int>(take.size()) - 1;
  for (int j = n - 1; j >= 0; --j) {
    if (j == best_star) continue;
    const std::vector<char>& taken = take[static_cast<size_t>(layer)];
    --layer;
    if (k >= 1 && z >= u[static_cast<size_t>(j)] &&
        taken[static_cast<size_t>(k) * zdim + static_cast<size_t>(z)]) {
      col.allocation.letters_per_city[static_cast<size_t>(j)] = static_cast<double>(u[static_cast<size_t>(j)]);
      z -= u[static_cast<size_t>(j)];
      --k;
    }
  }
  col.value = bval;
  col.reduced_value = bval - duals.y;
  col.tag = BoundTag::WithinT;
  return col;
}

std::optional<PricedColumn> price_relaxed(const ProblemInstance& inst, int t, const DualPoint& duals) {
  const int n = inst.n();
  const double l = static_cast<double>(inst.letters);
  std::vector<double> y = clamped_prices(inst, duals);

  LinearProgram lp;
  for (int i = 0; i < n; ++i)
    lp.add_variable(-y[static_cast<size_t>(i)] * inst.cities[static_cast<size_t>(i)].cap);
  {
    std::vector<double> row(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<size_t>(i)] = inst.cities[static_cast<size_t>(i)].cap;
    lp.add_row(row, Relation::Equal, l);
  }
  {
    std::vector<double> row(static_cast<size_t>(n), 1.0);
    lp.add_row(row, Relation::LessEqual, static_cast<double>(t));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    row[static_cast<size_t>(i)] = 1.0;
    lp.add_row(row, Relation::LessEqual, 1.0);
  }

  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  double lp_opt = -sol.objective;

  std::vector<double> a(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double zi = std::clamp(sol.primal[static_cast<size_t>(i)], 0.0, 1.0);
    if (zi < 1e-7) zi = 0.0;
    if (zi > 1.0 - 1e-7) zi = 1.0;
    a[static_cast<size_t>(i)] = zi * inst.cities[static_cast<size_t>(i)].cap;
  }

  // A basic optimum leaves at most two fractional letter counts; push the
  // higher-priced one up and the other down, which preserves the sum.
  std::vector<int> frac;
  for (int i = 0; i < n; ++i)
    if (std::abs(a[static_cast<size_t>(i)] - std::round(a[static_cast<size_t>(i)])) > 1e-7) frac.push_back(i);
  if (frac.size() == 2) {
    int hi = frac[0], lo = frac[1];
    if (y[static_cast<size_t>(lo)] > y[static_cast<size_t>(hi)]) std::swap(hi, lo);
    a[static_cast<size_t>(hi)] = std::ceil(a[static_cast<size_t>(hi)]);
    a[static_cast<size_t>(lo)] = std::floor(a[static_cast<size_t>(lo)]);
    // Absorb rounding noise so the total stays exactly l.
    double rest = 0.0;
    for (int i = 0; i < n; ++i)
      if (i != lo) rest += a[static_cast<size_t>(i)];
    a[static_cast<size_t>(lo)] =
        std::clamp(l - rest, 0.0, inst.cities[static_cast<size_t>(lo)].cap);
  } else if (!frac.empty()) {
    // Degenerate numerics; snap to nearest while repairing the sum on the
    // largest-cap fractional entry.
    for (int i : frac) a[static_cast<size_t>(i)] = std::round(a[static_cast<size_t>(i)]);
    double rest = 0.0;
    for (int i = 0; i < n; ++i)
      if (i != frac.back()) rest += a[static_cast<size_t>(i)];
    a[static_cast<size_t>(frac.back())] =
        std::clamp(l - rest, 0.0, inst.cities[static_cast<size_t>(frac.back())].cap);
  }

  PricedColumn col;
  col.allocation.letters_per_city = std::move(a);
  col.value = 0.0;
  for (int i = 0; i < n; ++i)
    col.value += col.allocation.letters_per_city[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
  col.lp_bound = lp_opt;
  col.reduced_value = lp_opt - duals.y;
  col.tag = col.allocation.support_size() <= t ? BoundTag::WithinT : BoundTag::WithinTPlus1;
  return col;
}

namespace {

struct Slab {
  double slope = 0.0;
  double length = 0.0;
  int city = -1;
};

} // namespace

std::optional<std::pair<Allocation, double>> support_concave_max(const ProblemInstance& inst,
                                                                 const TargetProfile& targets,
                                                                 const DualPoint& duals,
                                                                 const std::vector<int>& support) {
  const double l = static_cast<double>(inst.letters);
  std::vector<double> y = clamped_prices(inst, duals);

  double cap_sum = 0.0;
  for (int i : support) cap_sum += inst.cities[static_cast<size_t>(i)].cap;
  if (support.empty() || cap_sum < l - tol::kAbs) return std::nullopt;

  std::vector<Slab> slabs;
  slabs.reserve(2 * support.size());
  for (int i : support) {
    double tau = targets.tau[static_cast<size_t>(i)];
    double cap = inst.cities[static_cast<size_t>(i)].cap;
    slabs.push_back({y[static_cast<size_t>(i)] + 1.0 / tau, std::min(tau, cap), i});
    if (cap > tau) slabs.push_back({y[static_cast<size_t>(i)] - 1.0 / tau, cap - tau, i});
  }
  std::sort(slabs.begin(), slabs.end(), [](const Slab& a, const Slab& b) {
    if (a.slope != b.slope) return a.slope > b.slope;
    return a.city < b.city;
  });

  Allocation a;
  a.letters_per_city.assign(static_cast<size_t>(inst.n()), 0.0);
  double value = -static_cast<double>(support.size()); // every member pays |0/tau - 1| up front
  double remaining = l;
  for (const Slab& s : slabs) {
    if (remaining <= 0.0) break;
    double amount = std::min(s.length, remaining);
    a.letters_per_city[static_cast<size_t>(s.city)] += amount;
    value += s.slope * amount;
    remaining -= amount;
  }
  if (remaining > tol::kAbs) return std::nullopt;
  return std::make_pair(std::move(a), value);
}

double deviation_cost(const Allocation& a, const TargetProfile& targets, DeviationScope scope) {
  double cost = 0.0;
  for (size_t i = 0; i < a.letters_per_city.size(); ++i) {
    double v = a.letters_per_city[i];
    if (v > tol::kSupport)
      cost += std::abs(v / targets.tau[i] - 1.0);
    else if (scope == DeviationScope::AllCities)
      cost += 1.0;
  }
  return cost;
}

namespace {

struct BnbNode {
  long id = 0;
  int pos = 0;                  // next undecided index in branch order
  std::vector<int> chosen;      // selected city indices (instance order)
  double ub = 0.0;
};

struct NodeCompare {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.ub != b.ub) return a.ub < b.ub; // max-heap on the bound
    return a.id > b.id;                   // FIFO among ties: deterministic
  }
};

} // namespace

PricedColumn price_proportional(const ProblemInstance& inst, int t, const TargetProfile& targets,
                                const DualPoint& duals, const ProportionalOptions& opts) {
  const int n = inst.n();
  const double l = static_cast<double>(inst.letters);
  std::vector<double> y = clamped_prices(inst, duals);

  // Unconstrained per-city maxima of g_i(a) = a y_i - |a/tau_i - 1| over
  // [0, u_i]; always >= 0 (attained at tau_i at the latest).
  std::vector<double> peak(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double tau = targets.tau[static_cast<size_t>(i)];
    double cap = inst.cities[static_cast<size_t>(i)].cap;
    double at_tau = tau * y[static_cast<size_t>(i)];
    double at_cap = cap * y[static_cast<size_t>(i)] - std::abs(cap / tau - 1.0);
    peak[static_cast<size_t>(i)] = std::max(at_tau, at_cap);
  }

  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (peak[static_cast<size_t>(a)] != peak[static_cast<size_t>(b)]) return peak[static_cast<size_t>(a)] > peak[static_cast<size_t>(b)];
    return a < b;
  });
  // peak_prefix[k] = sum of the k largest remaining peaks from order[pos..].
  std::vector<double> order_peaks(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) order_peaks[static_cast<size_t>(k)] = peak[static_cast<size_t>(order[static_cast<size_t>(k)])];

  auto scope_penalty = [&](int max_support) {
    return opts.scope == DeviationScope::AllCities ? static_cast<double>(n - max_support) : 0.0;
  };

  // Upper bound for supports S with chosen ⊆ S ⊆ chosen ∪ order[pos..], |S| <= t.
  auto node_bound = [&](const BnbNode& node) {
    int room = t - static_cast<int>(node.chosen.size());
    double card = 0.0;
    for (int i : node.chosen) card += peak[static_cast<size_t>(i)];
    for (int k = node.pos, taken = 0; k < n && taken < room; ++k, ++taken)
      card += order_peaks[static_cast<size_t>(k)];
    // Linear majorant: deviations dropped, best prices fill l letters.
    std::vector<std::pair<double, double>> price_cap;
    for (int i : node.chosen)
      price_cap.push_back({y[static_cast<size_t>(i)], inst.cities[static_cast<size_t>(i)].cap});
    for (int k = node.pos; k < n; ++k) {
      int i = order[static_cast<size_t>(k)];
      price_cap.push_back({y[static_cast<size_t>(i)], inst.cities[static_cast<size_t>(i)].cap});
    }
    std::sort(price_cap.rbegin(), price_cap.rend());
    double fill = 0.0, remaining = l;
    for (auto& [price, cap] : price_cap) {
      if (remaining <= 0.0) break;
      double amount = std::min(cap, remaining);
      fill += price * amount;
      remaining -= amount;
    }
    if (remaining > tol::kAbs) return kNegInf; // cannot place l letters at all
    int avail = static_cast<int>(node.chosen.size()) + (n - node.pos);
    return duals.y + std::min(card, fill) - scope_penalty(std::min(t, avail));
  };

  PricedColumn best;
  best.allocation.letters_per_city.assign(static_cast<size_t>(n), 0.0);
  best.value = kNegInf;
  best.tag = BoundTag::WithinT;

  auto true_value = [&](const Allocation& a) {
    double v = duals.y;
    for (int i = 0; i < n; ++i) v += a.letters_per_city[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    return v - deviation_cost(a, targets, opts.scope);
  };

  auto try_support = [&](const std::vector<int>& support) {
    auto inner = support_concave_max(inst, targets, duals, support);
    if (!inner) return;
    double v = true_value(inner->first);
    if (v > best.value + 1e-15) {
      best.value = v;
      best.allocation = inner->first;
    }
  };

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeCompare> open;
  long next_id = 0;
  BnbNode root{next_id++, 0, {}, 0.0};
  root.ub = node_bound(root);
  if (root.ub > kNegInf) open.push(root);

  long pops = 0;
  double open_bound = kNegInf;
  while (!open.empty()) {
    BnbNode node = open.top();
    if (node.ub <= best.value + opts.gap_tolerance * 0.5) {
      open_bound = node.ub;
      break; // best-first: nothing left can beat the incumbent meaningfully
    }
    open.pop();
    if (++pops > opts.node_budget) {
      best.heuristic = true;
      open_bound = node.ub;
      break;
    }

    // Heuristic completion: pad the chosen set greedily to t cities.
    {
      std::vector<int> padded = node.chosen;
      for (int k = node.pos; k < n && static_cast<int>(padded.size()) < t; ++k)
        padded.push_back(order[static_cast<size_t>(k)]);
      try_support(padded);
    }

    if (node.pos >= n || static_cast<int>(node.chosen.size()) >= t) {
      try_support(node.chosen);
      continue;
    }

    int city = order[static_cast<size_t>(node.pos)];
    if (static_cast<int>(node.chosen.size()) < t) {
      BnbNode in{next_id++, node.pos + 1, node.chosen, 0.0};
      in.chosen.push_back(city);
      in.ub = node_bound(in);
      if (in.ub > best.value + opts.gap_tolerance * 0.5 && in.ub > kNegInf) open.push(in);
    }
    BnbNode out{next_id++, node.pos + 1, node.chosen, 0.0};
    out.ub = node_bound(out);
    if (out.ub > best.value + opts.gap_tolerance * 0.5 && out.ub > kNegInf) open.push(out);
  }

  best.nodes = pops;
  best.gap = best.heuristic || open_bound > best.value ? std::max(0.0, open_bound - best.value) : 0.0;
  best.reduced_value = best.value;
  return best;
}

} // namespace sortition
