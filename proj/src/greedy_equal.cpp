#include "sortition/greedy_equal.hpp"

#include <algorithm>
#include <cmath>

namespace sortition {

std::vector<int> oversized_cities(const ProblemInstance& inst, int t) {
  std::vector<int> out;
  for (int i = 0; i < inst.n(); ++i)
    if (inst.pi[static_cast<size_t>(i)] > 1.0 / static_cast<double>(t)) out.push_back(i);
  return out;
}

std::vector<int> assumption_violations(const ProblemInstance& inst, int t) {
  std::vector<int> out;
  for (int i : oversized_cities(inst, t))
    if (inst.cities[static_cast<size_t>(i)].cap_before_clamp < static_cast<double>(inst.letters) - tol::kAbs)
      out.push_back(i);
  return out;
}

namespace {

// Piecewise-constant profile on [0,1): value(alpha) for breakpoints[k] <=
// alpha < breakpoints[k+1]. Tracks the stacked height of finished layers.
struct Profile {
  std::vector<double> pos{0.0};
  std::vector<double> val{0.0};

  size_t index_at(double alpha) const {
    size_t k = static_cast<size_t>(std::upper_bound(pos.begin(), pos.end(), alpha + 1e-13) - pos.begin());
    return k == 0 ? 0 : k - 1;
  }
  double value_at(double alpha) const { return val[index_at(alpha)]; }
  double next_breakpoint(double alpha) const {
    size_t k = index_at(alpha);
    return k + 1 < pos.size() ? pos[k + 1] : 1.0;
  }

  // Add a layer's placements (fractional coordinates) on top of this profile.
  void fold(const std::vector<GreedyPlacement>& pieces, int layer) {
    std::vector<double> cuts = pos;
    for (const auto& p : pieces) {
      double from = p.start - layer;
      double to = p.end - layer;
      if (to <= 1e-13 || from >= 1.0 - 1e-13) continue;
      cuts.push_back(std::max(from, 0.0));
      if (to < 1.0 - 1e-13) cuts.push_back(to);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> npos, nval;
    for (double c : cuts) {
      if (!npos.empty() && c - npos.back() <= 1e-13) continue;
      double h = value_at(c);
      for (const auto& p : pieces) {
        double from = p.start - layer;
        double to = p.end - layer;
        if (c >= from - 1e-13 && c < to - 1e-13) h += p.height;
      }
      if (!nval.empty() && std::abs(h - nval.back()) < 1e-13) continue;
      npos.push_back(c);
      nval.push_back(h);
    }
    pos = std::move(npos);
    val = std::move(nval);
  }
};

} // namespace

GreedyResult greedy_equal(const ProblemInstance& inst, int t, bool override_assumption) {
  GreedyResult res;
  WidthProfile wp = width_profile(inst);
  if (t < wp.lower_bound_t) {
    res.status = GreedyStatus::BelowWidthBound;
    return res;
  }

  const double l = static_cast<double>(inst.letters);
  const double snap = 1e-12;

  Profile below;                              // finished layers under the current one
  std::vector<GreedyPlacement> current_layer; // pieces of the layer being drawn
  int layer = 0;
  double x = 0.0;

  auto advance_layer = [&](int to_layer) {
    while (layer < to_layer) {
      if (layer < t) below.fold(current_layer, layer);
      current_layer.clear();
      ++layer;
    }
  };

  for (int i = 0; i < inst.n(); ++i) {
    double area = inst.fair_share(i);
    const double cap = inst.cities[static_cast<size_t>(i)].cap;
    while (area > snap) {
      if (std::abs(x - std::round(x)) <= snap) x = std::round(x);
      int k = static_cast<int>(std::floor(x));
      if (k > layer) advance_layer(k);

      if (k >= t) {
        // Beyond the budget mu_i = u_i; finish the remaining area in one piece.
        if (!res.trace.failure_point) res.trace.failure_point = x;
        double width = area / cap;
        GreedyPlacement p{i, x, x + width, cap, false};
        res.trace.placements.push_back(p);
        current_layer.push_back(p);
        x += width;
        area = 0.0;
        break;
      }

      double alpha = x - k;
      double h_below = below.value_at(alpha);
      double avg = (l - h_below) / static_cast<double>(t - k);
      double mu = std::min(cap, std::max(avg, 0.0));
      double next_alpha = std::min(below.next_breakpoint(alpha), 1.0);
      double span = next_alpha - alpha;

      if (mu <= snap) {
        x = k + next_alpha; // layer already full here, no area can be placed
        continue;
      }
      bool selects_average = avg <= cap + 1e-12;
      double capacity = mu * span;
      double width = (area <= capacity + snap) ? area / mu : span;
      GreedyPlacement p{i, x, x + width, mu, selects_average};
      res.trace.placements.push_back(p);
      current_layer.push_back(p);
      area -= mu * width;
      if (area < snap) area = 0.0;
      x += width;
    }
  }
  res.trace.final_x = x;

  if (std::abs(x - static_cast<double>(t)) <= 1e-9 * static_cast<double>(t)) {
    Layout layout;
    layout.columns = t;
    layout.letters = inst.letters;
    layout.instance_digest = inst.digest;
    for (const auto& p : res.trace.placements) {
      double end = std::min(p.end, static_cast<double>(t));
      if (end - p.start <= tol::kBreakpointMerge) continue;
      layout.segments.push_back({p.city, p.start, end, p.height});
    }
    // Cap audit over the breakpoint allocations: wrapped cities can stack
    // above u_i, which only Assumption 1 rules out a priori.
    LetterDistribution extracted = extract_distribution(layout, inst.n());
    for (const auto& e : extracted.entries)
      for (int i = 0; i < inst.n(); ++i)
        if (e.allocation.letters_per_city[static_cast<size_t>(i)] >
            inst.cities[static_cast<size_t>(i)].cap + 1e-6) {
          if (res.cap_violations.empty() || res.cap_violations.back() != i)
            res.cap_violations.push_back(i);
        }
    res.layout = std::move(layout);
    res.status = !res.cap_violations.empty() && !override_assumption
                     ? GreedyStatus::AssumptionViolated
                     : GreedyStatus::Success;
    res.trace.failure_point.reset();
  } else {
    res.status = GreedyStatus::BudgetExceeded;
    if (!res.trace.failure_point) res.trace.failure_point = std::min(x, static_cast<double>(t));
  }
  return res;
}

MinTResult min_t_greedy(const ProblemInstance& inst, int t_max, bool override_assumption) {
  MinTResult out;
  WidthProfile wp = width_profile(inst);
  for (int t = std::max(1, wp.lower_bound_t); t <= t_max; ++t) {
    out.tried.push_back(t);
    GreedyResult r = greedy_equal(inst, t, override_assumption);
    if (r.ok()) {
      out.t = t;
      return out;
    }
  }
  return out;
}

} // namespace sortition
