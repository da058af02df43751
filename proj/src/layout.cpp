#include "sortition/layout.hpp"

#include <algorithm>
#include <cmath>

#include "sortition/rng.hpp"

namespace sortition {

namespace {

// Per-layer piece of a segment, in fractional coordinates.
struct Piece {
  int layer = 0;
  double from = 0.0; // in [0,1)
  double to = 0.0;   // in (0,1]
  int city = -1;
  double height = 0.0;
};

std::vector<Piece> split_by_layer(const Layout& layout) {
  std::vector<Piece> pieces;
  for (const Segment& s : layout.segments) {
    int m0 = static_cast<int>(std::floor(s.start + tol::kBreakpointMerge));
    int m1 = static_cast<int>(std::ceil(s.end - tol::kBreakpointMerge));
    for (int m = m0; m < m1; ++m) {
      double from = std::max(s.start - m, 0.0);
      double to = std::min(s.end - m, 1.0);
      if (to - from <= tol::kBreakpointMerge) continue;
      pieces.push_back({m, from, to, s.city, s.height});
    }
  }
  return pieces;
}

size_t snap_index(const std::vector<double>& reps, double value) {
  auto it = std::lower_bound(reps.begin(), reps.end(), value - 1e-11);
  if (it == reps.end()) return reps.size();
  return static_cast<size_t>(it - reps.begin());
}

} // namespace

std::vector<double> breakpoints(const Layout& layout) {
  std::vector<double> fracs{0.0};
  for (const Segment& s : layout.segments) {
    for (double x : {s.start, s.end}) {
      double f = x - std::floor(x);
      if (f > 1.0 - tol::kBreakpointMerge) f = 0.0;
      fracs.push_back(f);
    }
  }
  std::sort(fracs.begin(), fracs.end());
  std::vector<double> reps;
  for (double f : fracs) {
    if (reps.empty() || f - reps.back() > tol::kBreakpointMerge) reps.push_back(f);
  }
  return reps;
}

double Layout::height_below(int layer, double alpha) const {
  double h = 0.0;
  for (const Segment& s : segments) {
    for (int m = 0; m < layer; ++m) {
      double x = m + alpha;
      if (x >= s.start - 1e-11 && x < s.end - 1e-11) h += s.height;
    }
  }
  return h;
}

std::vector<double> Layout::allocation_at(double alpha) const {
  int max_city = -1;
  for (const Segment& s : segments) max_city = std::max(max_city, s.city);
  std::vector<double> a(static_cast<size_t>(max_city + 1), 0.0);
  for (const Segment& s : segments) {
    for (int m = 0; m < columns; ++m) {
      double x = m + alpha;
      if (x >= s.start - 1e-11 && x < s.end - 1e-11) a[static_cast<size_t>(s.city)] += s.height;
    }
  }
  return a;
}

namespace {

// Interval-wise allocations over the breakpoint grid; also validates that
// every (layer, interval) cell is covered by exactly one piece.
struct IntervalTable {
  std::vector<double> reps;              // K interval left edges
  std::vector<Allocation> allocations;   // per interval
  std::vector<double> widths;
};

IntervalTable build_intervals(const Layout& layout, int n_cities) {
  IntervalTable table;
  table.reps = breakpoints(layout);
  const size_t K = table.reps.size();
  std::vector<Piece> pieces = split_by_layer(layout);

  std::vector<std::vector<int>> cover(static_cast<size_t>(layout.columns), std::vector<int>(K, 0));
  table.allocations.assign(K, Allocation{std::vector<double>(static_cast<size_t>(n_cities), 0.0)});

  for (const Piece& p : pieces) {
    if (p.layer < 0 || p.layer >= layout.columns)
      throw CoverageGap("segment outside [0, columns)");
    size_t k0 = snap_index(table.reps, p.from);
    size_t k1 = p.to > 1.0 - tol::kBreakpointMerge ? K : snap_index(table.reps, p.to);
    for (size_t k = k0; k < k1; ++k) {
      cover[static_cast<size_t>(p.layer)][k] += 1;
      table.allocations[k].letters_per_city[static_cast<size_t>(p.city)] += p.height;
    }
  }

  for (int m = 0; m < layout.columns; ++m) {
    for (size_t k = 0; k < K; ++k) {
      if (cover[static_cast<size_t>(m)][k] == 0)
        throw CoverageGap("no active city in layer " + std::to_string(m) + " at interval " +
                          std::to_string(k));
      if (cover[static_cast<size_t>(m)][k] > 1)
        throw CoverageGap("overlapping segments in layer " + std::to_string(m));
    }
  }

  table.widths.resize(K);
  for (size_t k = 0; k < K; ++k) {
    double next = (k + 1 < K) ? table.reps[k + 1] : 1.0;
    table.widths[k] = next - table.reps[k];
  }
  return table;
}

bool same_allocation(const Allocation& a, const Allocation& b) {
  for (size_t i = 0; i < a.letters_per_city.size(); ++i)
    if (std::abs(a.letters_per_city[i] - b.letters_per_city[i]) > 1e-12) return false;
  return true;
}

} // namespace

LetterDistribution extract_distribution(const Layout& layout, int n_cities) {
  IntervalTable table = build_intervals(layout, n_cities);
  LetterDistribution dist;
  dist.mode = DistributionMode::Fractional;
  dist.instance_digest = layout.instance_digest;
  for (size_t k = 0; k < table.reps.size(); ++k) {
    if (table.widths[k] <= tol::kBreakpointMerge) continue;
    if (!dist.entries.empty() && same_allocation(dist.entries.back().allocation, table.allocations[k])) {
      dist.entries.back().probability += table.widths[k];
    } else {
      dist.entries.push_back({table.widths[k], table.allocations[k]});
    }
  }
  return dist;
}

Allocation sample(const Layout& layout, int n_cities, double rho) {
  IntervalTable table = build_intervals(layout, n_cities);
  size_t k = static_cast<size_t>(std::upper_bound(table.reps.begin(), table.reps.end(), rho) -
                                 table.reps.begin());
  if (k == 0) k = 1; // rho < first edge cannot happen for rho >= 0, but stay safe
  return table.allocations[k - 1];
}

Allocation sample(const LetterDistribution& dist, double rho) {
  double cum = 0.0;
  for (const auto& e : dist.entries) {
    cum += e.probability;
    if (rho < cum) return e.allocation;
  }
  return dist.entries.back().allocation;
}

Allocation dependent_round(const Allocation& fractional, long long letters, std::uint64_t seed) {
  const double sum = fractional.total();
  if (std::abs(sum - static_cast<double>(letters)) >
      tol::kAbs * std::max(1.0, static_cast<double>(letters)))
    throw MassMismatch("allocation sums to " + std::to_string(sum) + ", expected " +
                       std::to_string(letters));

  const size_t n = fractional.letters_per_city.size();
  std::vector<double> base(n), frac(n);
  for (size_t i = 0; i < n; ++i) {
    double v = fractional.letters_per_city[i];
    base[i] = std::floor(v + tol::kAbs);
    frac[i] = v - base[i];
    if (frac[i] < tol::kAbs) frac[i] = 0.0;
    if (frac[i] > 1.0 - tol::kAbs) {
      base[i] += 1.0;
      frac[i] = 0.0;
    }
  }

  SeededRng rng(seed);
  auto next_fractional = [&](size_t from) {
    for (size_t i = from; i < n; ++i)
      if (frac[i] > 0.0 && frac[i] < 1.0) return i;
    return n;
  };

  // Pairwise pipage on the two lowest-index fractional entries. Each step
  // drives at least one of the pair to an exact 0 or 1.
  while (true) {
    size_t i = next_fractional(0);
    if (i == n) break;
    size_t j = next_fractional(i + 1);
    if (j == n) {
      // Lone fractional remainder can only be rounding noise around 0 or 1.
      base[i] += std::round(frac[i]);
      frac[i] = 0.0;
      break;
    }
    double d_plus = std::min(1.0 - frac[i], frac[j]);  // shift mass j -> i
    double d_minus = std::min(frac[i], 1.0 - frac[j]); // shift mass i -> j
    double p_plus = d_minus / (d_plus + d_minus);
    if (rng.uniform() < p_plus) {
      if (d_plus == 1.0 - frac[i]) {
        frac[i] = 1.0;
        frac[j] -= d_plus;
      } else {
        frac[i] += d_plus;
        frac[j] = 0.0;
      }
    } else {
      if (d_minus == frac[i]) {
        frac[i] = 0.0;
        frac[j] += d_minus;
      } else {
        frac[i] -= d_minus;
        frac[j] = 1.0;
      }
    }
  }

  Allocation out;
  out.letters_per_city.resize(n);
  long long total = 0;
  for (size_t i = 0; i < n; ++i) {
    out.letters_per_city[i] = base[i] + frac[i];
    total += static_cast<long long>(std::llround(out.letters_per_city[i]));
  }
  // Exact-sum guarantee; drift here would mean the pipage above lost mass.
  if (total != letters) throw MassMismatch("rounding drifted to " + std::to_string(total));
  return out;
}

} // namespace sortition
