#include "sortition/buckets.hpp"

#include <cmath>

namespace sortition {

BucketsResult buckets(const ProblemInstance& inst, int t, const TargetProfile& targets) {
  BucketsResult res;
  WidthProfile wp = width_profile(inst);
  if (t < wp.lower_bound_t) {
    res.status = BucketsStatus::BelowWidthBound;
    return res;
  }

  const int n = inst.n();
  std::vector<double> tau_suffix(static_cast<size_t>(n) + 1, 0.0);
  for (int i = n - 1; i >= 0; --i)
    tau_suffix[static_cast<size_t>(i)] = tau_suffix[static_cast<size_t>(i) + 1] + targets.tau[static_cast<size_t>(i)];

  Layout layout;
  layout.letters = inst.letters;
  layout.instance_digest = inst.digest;

  int i = 0, j = 0;
  while (j < t && i < n) {
    // Grow the bucket while (ii) the height stays within the smallest
    // member's cap and (i) the rescaled target width stays within one bucket's
    // share of the remaining budget. The first city is always taken.
    double cap_i = inst.cities[static_cast<size_t>(i)].cap;
    double height = inst.fair_share(i);
    double tau_sum = targets.tau[static_cast<size_t>(i)];
    int last = i;
    while (last + 1 < n) {
      double nh = height + inst.fair_share(last + 1);
      double nt = tau_sum + targets.tau[static_cast<size_t>(last + 1)];
      if (nh > cap_i + tol::kAbs) break;
      if (static_cast<double>(t - j) * nt > tau_suffix[static_cast<size_t>(i)] + tol::kAbs) break;
      height = nh;
      tau_sum = nt;
      ++last;
    }
    res.buckets.push_back({i, last, height});
    double x = static_cast<double>(j);
    for (int k = i; k <= last; ++k) {
      double width = inst.fair_share(k) / height;
      layout.segments.push_back({k, x, x + width, height});
      x += width;
    }
    // Close the column exactly at the next integer.
    if (!layout.segments.empty()) layout.segments.back().end = static_cast<double>(j + 1);
    i = last + 1;
    ++j;
  }
  res.placed = i;

  if (i < n) {
    res.status = BucketsStatus::CitiesLeftOver;
    return res;
  }

  layout.columns = j; // trailing empty buckets permitted: fewer columns than t
  res.layout = std::move(layout);
  res.status = BucketsStatus::Success;
  return res;
}

Allocation bucket_sample(const ProblemInstance& inst, const BucketsResult& result, SeededRng& rng) {
  Allocation a;
  a.letters_per_city.assign(static_cast<size_t>(inst.n()), 0.0);
  for (const Bucket& b : result.buckets) {
    double total = 0.0;
    for (int k = b.first; k <= b.last; ++k) total += inst.pi[static_cast<size_t>(k)];
    double u = rng.uniform() * total;
    int chosen = b.last;
    double cum = 0.0;
    for (int k = b.first; k <= b.last; ++k) {
      cum += inst.pi[static_cast<size_t>(k)];
      if (u < cum) {
        chosen = k;
        break;
      }
    }
    a.letters_per_city[static_cast<size_t>(chosen)] = b.height;
  }
  return a;
}

} // namespace sortition
