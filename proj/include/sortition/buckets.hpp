#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sortition/layout.hpp"
#include "sortition/model.hpp"
#include "sortition/rng.hpp"
#include "sortition/targets.hpp"

namespace sortition {

struct Bucket {
  int first = 0; // contiguous member range [first, last], ascending city order
  int last = 0;
  double height = 0.0; // sum of members' fair shares
};

enum class BucketsStatus {
  Success,
  CitiesLeftOver,  // more than t buckets would be needed
  BelowWidthBound, // refused: t < ceil(sum of widths)
};

struct BucketsResult {
  BucketsStatus status = BucketsStatus::CitiesLeftOver;
  std::vector<Bucket> buckets;
  std::optional<Layout> layout;
  int placed = 0; // cities placed before failing

  bool ok() const { return status == BucketsStatus::Success; }
};

/// Partitions cities (ascending by size) into at most t contiguous buckets;
/// a bucket stops growing when its height would exceed the smallest member's
/// cap or its rescaled target width would exceed one. One city is sampled
/// per bucket, so every member either gets 0 letters or the bucket height.
BucketsResult buckets(const ProblemInstance& inst, int t, const TargetProfile& targets);

/// One independent draw per bucket, each city chosen with probability
/// proportional to its population within the bucket.
Allocation bucket_sample(const ProblemInstance& inst, const BucketsResult& result, SeededRng& rng);

} // namespace sortition
