#include "sortition/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sortition {

double phi(const Allocation& a, const TargetProfile& targets) {
  return deviation_cost(a, targets, DeviationScope::SelectedOnly);
}

double expected_phi(const LetterDistribution& dist, const TargetProfile& targets) {
  if (std::abs(dist.mass() - 1.0) > tol::kAbs)
    throw ProbabilityMassError("probability mass sums to " + std::to_string(dist.mass()));
  double v = 0.0;
  for (const auto& e : dist.entries) v += e.probability * phi(e.allocation, targets);
  return v;
}

MonotonicityReport monotonicity_report(const LetterDistribution& dist, double slack) {
  MonotonicityReport rep;
  for (const auto& e : dist.entries) {
    int pairs = e.allocation.monotone_violations(slack + tol::kAbs);
    rep.violating_pairs += pairs;
    rep.worst_entry = std::max(rep.worst_entry, pairs);
    ++rep.entries;
  }
  rep.monotone = rep.violating_pairs == 0;
  return rep;
}

BinaryOutcomeReport binary_outcome_report(const LetterDistribution& dist, int n_cities) {
  BinaryOutcomeReport rep;
  rep.distinct_positive.assign(static_cast<size_t>(n_cities), 0);
  std::vector<std::vector<double>> seen(static_cast<size_t>(n_cities));
  for (const auto& e : dist.entries) {
    for (int i = 0; i < n_cities; ++i) {
      double v = e.allocation.letters_per_city[static_cast<size_t>(i)];
      if (v <= tol::kSupport) continue;
      auto& vals = seen[static_cast<size_t>(i)];
      bool known = false;
      for (double w : vals) known |= std::abs(w - v) <= tol::kAbs * std::max(1.0, w);
      if (!known) vals.push_back(v);
    }
  }
  rep.binary = true;
  for (int i = 0; i < n_cities; ++i) {
    rep.distinct_positive[static_cast<size_t>(i)] = static_cast<int>(seen[static_cast<size_t>(i)].size());
    if (rep.distinct_positive[static_cast<size_t>(i)] > 1) rep.binary = false;
  }
  return rep;
}

namespace {

std::string fmt(double v) {
  // 1e-4 quantization keeps the output byte-stable across runs.
  double q = std::round(v * 10000.0) / 10000.0;
  if (q == 0.0) q = 0.0; // normalize -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", q);
  return buf;
}

struct Rgb {
  int r = 0, g = 0, b = 0;
};

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb city_color(int index) {
  // Golden-angle hue walk; fixed saturation/value.
  double h = std::fmod(static_cast<double>(index) * 0.61803398875, 1.0) * 6.0;
  double s = 0.55, v = 0.85;
  int i = static_cast<int>(h);
  double f = h - i;
  double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (i % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    case 5: r = v; g = p; b = q; break;
  }
  return {static_cast<int>(std::lround(r * 255)), static_cast<int>(std::lround(g * 255)),
          static_cast<int>(std::lround(b * 255))};
}

// Diverging scale: ratio 1 neutral, 0.5/1.5 at the endpoints, clipped beyond.
Rgb deviation_color(double ratio) {
  double d = std::clamp(ratio - 1.0, -0.5, 0.5) / 0.5; // [-1, 1]
  Rgb low{59, 76, 192}, mid{221, 221, 221}, high{180, 4, 38};
  Rgb from = d < 0 ? low : high;
  double w = std::abs(d);
  auto mix = [&](int a, int b) { return static_cast<int>(std::lround(b + (a - b) * w)); };
  return {mix(from.r, mid.r), mix(from.g, mid.g), mix(from.b, mid.b)};
}

std::string digest_comment(std::uint64_t digest) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

struct Svg {
  std::ostringstream out;
  void comment(const std::string& text) { out << "<!-- " << text << " -->\n"; }
  Svg(double w, double h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
        << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill) {
    out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(h) << "\" fill=\"" << fill
        << "\" stroke=\"#333333\" stroke-width=\"0.3\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2) {
    out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
        << "\" y2=\"" << fmt(y2) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  }
  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

struct Cell {
  int layer;
  double from, to; // fractional coordinates
  int city;
  double height;
};

std::vector<Cell> layout_cells(const Layout& layout) {
  std::vector<Cell> cells;
  for (const Segment& s : layout.segments) {
    int m0 = static_cast<int>(std::floor(s.start + tol::kBreakpointMerge));
    int m1 = static_cast<int>(std::ceil(s.end - tol::kBreakpointMerge));
    for (int m = m0; m < m1; ++m) {
      double from = std::max(s.start - m, 0.0);
      double to = std::min(s.end - m, 1.0);
      if (to - from <= tol::kBreakpointMerge) continue;
      cells.push_back({m, from, to, s.city, s.height});
    }
  }
  return cells;
}

} // namespace

std::string render_layout(const Layout& layout, int n_cities, RenderStyle style) {
  (void)n_cities;
  const double W = 600, H = 400, margin = 20;
  Svg svg(W, H);
  svg.comment("instance " + digest_comment(layout.instance_digest));
  double total = static_cast<double>(layout.letters);

  if (style == RenderStyle::Flat) {
    double px = (W - 2 * margin) / std::max(1, layout.columns);
    double py = (H - 2 * margin) / total;
    for (const Segment& s : layout.segments) {
      double h = s.height * py;
      svg.rect(margin + s.start * px, H - margin - h, (s.end - s.start) * px, h,
               hex(city_color(s.city)));
    }
    return svg.finish();
  }

  // Stacked: one column, layers piled by breakpoint interval.
  std::vector<double> reps = breakpoints(layout);
  std::vector<Cell> cells = layout_cells(layout);
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.layer != b.layer) return a.layer < b.layer;
    return a.from < b.from;
  });
  double px = W - 2 * margin;
  double py = (H - 2 * margin) / total;
  for (size_t k = 0; k < reps.size(); ++k) {
    double from = reps[k];
    double to = k + 1 < reps.size() ? reps[k + 1] : 1.0;
    if (to - from <= tol::kBreakpointMerge) continue;
    double mid = 0.5 * (from + to);
    double base = 0.0;
    for (const Cell& c : cells) {
      if (mid < c.from || mid >= c.to) continue;
      double h = c.height * py;
      svg.rect(margin + from * px, H - margin - base - h, (to - from) * px, h,
               hex(city_color(c.city)));
      base += h;
    }
  }
  return svg.finish();
}

std::string render_proportionality(const LetterDistribution& dist, const ProblemInstance& inst,
                                   const TargetProfile& targets) {
  const double W = 800, H = 300, margin = 20;
  Svg svg(W, H);
  svg.comment("instance " + digest_comment(inst.digest));

  double total_width = 0.0;
  double max_letters = 1.0;
  for (int i = 0; i < inst.n(); ++i) {
    for (const auto& e : dist.entries) {
      double v = e.allocation.letters_per_city[static_cast<size_t>(i)];
      if (v > tol::kSupport) {
        total_width += e.probability;
        max_letters = std::max(max_letters, v);
      }
    }
    max_letters = std::max(max_letters, targets.tau[static_cast<size_t>(i)]);
  }
  if (total_width <= 0.0) total_width = 1.0;

  double px = (W - 2 * margin) / total_width;
  double py = (H - 2 * margin) / max_letters;

  double x = margin;
  for (int i = 0; i < inst.n(); ++i) {
    double span_start = x;
    for (const auto& e : dist.entries) {
      double v = e.allocation.letters_per_city[static_cast<size_t>(i)];
      if (v <= tol::kSupport) continue;
      double w = e.probability * px;
      double h = v * py;
      svg.rect(x, H - margin - h, w, h, hex(deviation_color(v / targets.tau[static_cast<size_t>(i)])));
      x += w;
    }
    if (x > span_start) {
      double ty = H - margin - targets.tau[static_cast<size_t>(i)] * py;
      svg.line(span_start, ty, x, ty);
    }
  }
  return svg.finish();
}

std::string metrics_csv(const ProblemInstance& inst, const LetterDistribution& dist,
                        const TargetProfile* targets) {
  std::ostringstream os;
  os << "metric,value\n";
  os << "instance_digest," << std::hex << inst.digest << std::dec << "\n";
  FairnessAudit audit = fairness_audit(inst, dist);
  os << "fairness_max_abs_error," << audit.max_abs_error << "\n";
  os << "fairness_ok," << (audit.fair ? 1 : 0) << "\n";
  double slack = dist.mode == DistributionMode::Integral ? 1.0 : 0.0;
  MonotonicityReport mono = monotonicity_report(dist, slack);
  os << "monotone_violating_pairs," << mono.violating_pairs << "\n";
  os << "monotone," << (mono.monotone ? 1 : 0) << "\n";
  BinaryOutcomeReport bin = binary_outcome_report(dist, inst.n());
  os << "binary_outcome," << (bin.binary ? 1 : 0) << "\n";
  SelectionProbabilityAudit sel = selection_probability_audit(inst, dist);
  os << "selection_prob_lb_ok," << (sel.ok ? 1 : 0) << "\n";
  int max_support = 0;
  for (const auto& e : dist.entries) max_support = std::max(max_support, e.allocation.support_size());
  os << "max_support," << max_support << "\n";
  os << "entries," << dist.entries.size() << "\n";
  if (targets) os << "expected_phi," << expected_phi(dist, *targets) << "\n";
  return os.str();
}

} // namespace sortition
