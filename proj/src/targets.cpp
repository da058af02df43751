#include "sortition/targets.hpp"

#include <algorithm>
#include <cmath>

namespace sortition {

TargetFunction target_function(const std::string& name) {
  if (name == "sqrt") return [](double p) { return std::sqrt(p); };
  if (name == "constant") return [](double) { return 1.0; };
  if (name == "proportional") return [](double p) { return p; };
  throw UnknownFunction(name);
}

TargetFunction tabulated_target_function(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw UnknownFunction("tabulated (needs >= 2 points)");
  std::sort(points.begin(), points.end());
  for (size_t i = 0; i + 1 < points.size(); ++i)
    if (points[i + 1].second < points[i].second) throw UnknownFunction("tabulated (not monotone)");
  return [points](double p) {
    if (p <= points.front().first) return points.front().second;
    if (p >= points.back().first) return points.back().second;
    auto it = std::upper_bound(points.begin(), points.end(), std::make_pair(p, 1e300));
    auto lo = *(it - 1);
    auto hi = *it;
    double w = (p - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
  };
}

namespace {

std::vector<double> scaled_targets(const ProblemInstance& inst, const TargetFunction& f, double kappa) {
  std::vector<double> tau(static_cast<size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) {
    double share = inst.fair_share(i);
    double cap = inst.cities[static_cast<size_t>(i)].cap;
    tau[static_cast<size_t>(i)] = std::max(share, std::min(cap, kappa * f(inst.pi[static_cast<size_t>(i)])));
  }
  return tau;
}

double width_sum(const ProblemInstance& inst, const std::vector<double>& tau) {
  double s = 0.0;
  for (int i = 0; i < inst.n(); ++i) s += inst.fair_share(i) / tau[static_cast<size_t>(i)];
  return s;
}

} // namespace

TargetProfile solve_kappa(const ProblemInstance& inst, const TargetFunction& f, int t,
                          const std::string& function_name) {
  WidthProfile wp = width_profile(inst);
  double lo_width = wp.total;          // kappa -> infinity
  double hi_width = inst.n();          // kappa = 0
  double asked = static_cast<double>(t);
  if (asked > hi_width + tol::kAbs || asked < lo_width - tol::kAbs)
    throw WidthOutOfRange(lo_width, hi_width, asked);

  // kappa_hi forces every target to its cap: kappa*f(pi_i) >= u_i for all i.
  double kappa_hi = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    double fi = f(inst.pi[static_cast<size_t>(i)]);
    if (fi <= 0.0) throw UnknownFunction(function_name + " (non-positive value)");
    kappa_hi = std::max(kappa_hi, inst.cities[static_cast<size_t>(i)].cap / fi);
  }

  // Smallest kappa whose width sum is <= t; on flat regions this picks the
  // left edge, keeping the result deterministic.
  double lo = 0.0, hi = kappa_hi;
  if (width_sum(inst, scaled_targets(inst, f, 0.0)) <= asked + tol::kAbs) {
    hi = 0.0;
  } else {
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (width_sum(inst, scaled_targets(inst, f, mid)) <= asked)
        hi = mid;
      else
        lo = mid;
    }
  }

  TargetProfile profile;
  profile.kappa = hi;
  profile.function_name = function_name;
  profile.tau = scaled_targets(inst, f, hi);
  profile.widths.resize(profile.tau.size());
  for (int i = 0; i < inst.n(); ++i)
    profile.widths[static_cast<size_t>(i)] = inst.fair_share(i) / profile.tau[static_cast<size_t>(i)];
  return profile;
}

TargetProfile solve_kappa(const ProblemInstance& inst, const std::string& function_name, int t) {
  return solve_kappa(inst, target_function(function_name), t, function_name);
}

TargetProfile point_profile(const ProblemInstance& inst) {
  TargetProfile profile;
  profile.function_name = "point";
  profile.kappa = 0.0;
  profile.tau.assign(static_cast<size_t>(inst.n()), static_cast<double>(inst.letters));
  profile.widths = inst.pi;
  return profile;
}

} // namespace sortition
