#include "sortition/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sortition {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
  return fnv1a(h, s.data(), s.size());
}

} // namespace

std::uint64_t instance_digest(const std::vector<City>& cities, long long letters, int budget) {
  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a(h, &letters, sizeof letters);
  h = fnv1a(h, &budget, sizeof budget);
  for (const City& c : cities) {
    h = fnv1a_str(h, c.id);
    h = fnv1a_str(h, c.state);
    h = fnv1a(h, &c.population, sizeof c.population);
    h = fnv1a(h, &c.cap, sizeof c.cap);
  }
  return h;
}

bool ProblemInstance::caps_integral() const {
  for (const City& c : cities) {
    if (std::abs(c.cap - std::round(c.cap)) > tol::kAbs) return false;
  }
  return true;
}

double Allocation::total() const {
  double s = 0.0;
  for (double v : letters_per_city) s += v;
  return s;
}

int Allocation::support_size(double eps) const {
  int k = 0;
  for (double v : letters_per_city)
    if (v > eps) ++k;
  return k;
}

bool Allocation::is_integral(double eps) const {
  for (double v : letters_per_city)
    if (std::abs(v - std::round(v)) > eps) return false;
  return true;
}

int Allocation::monotone_violations(double slack) const {
  int count = 0;
  double prev = -1.0;
  for (double v : letters_per_city) {
    if (v <= tol::kSupport) continue;
    if (prev >= 0.0 && v < prev - slack) ++count;
    prev = v;
  }
  return count;
}

double LetterDistribution::mass() const {
  double s = 0.0;
  for (const Entry& e : entries) s += e.probability;
  return s;
}

ProblemInstance validate(std::vector<City> raw, long long letters, int budget) {
  if (raw.empty()) throw EmptyRoster();
  if (letters < 1) throw NonPositiveInput("letters must be >= 1");
  if (budget < 1) throw NonPositiveInput("budget must be >= 1");
  for (const City& c : raw) {
    if (!(c.population > 0.0)) throw NonPositiveInput("city '" + c.id + "' has non-positive population");
    if (!(c.cap > 0.0)) throw NonPositiveInput("city '" + c.id + "' has non-positive cap");
  }

  ProblemInstance inst;
  inst.letters = letters;
  inst.budget = budget;

  for (City& c : raw) {
    c.cap_before_clamp = c.cap;
    if (c.cap > static_cast<double>(letters)) {
      c.cap = static_cast<double>(letters);
      inst.warnings.push_back("cap of city '" + c.id + "' clamped to " + std::to_string(letters));
    }
  }

  std::sort(raw.begin(), raw.end(), [](const City& a, const City& b) {
    if (a.population != b.population) return a.population < b.population;
    if (a.cap != b.cap) return a.cap < b.cap;
    return a.id < b.id;
  });

  double total_pop = 0.0;
  for (const City& c : raw) total_pop += c.population;

  inst.cities = std::move(raw);
  inst.pi.resize(inst.cities.size());
  for (size_t i = 0; i < inst.cities.size(); ++i) inst.pi[i] = inst.cities[i].population / total_pop;

  for (size_t i = 0; i < inst.cities.size(); ++i) {
    double share = inst.pi[i] * static_cast<double>(letters);
    if (share > inst.cities[i].cap + tol::kAbs) {
      std::ostringstream os;
      os << "city '" << inst.cities[i].id << "': fair share " << share << " exceeds cap " << inst.cities[i].cap;
      throw InfeasibleCap(os.str());
    }
  }

  // Caps can lose monotonicity after clamping or under odd cap rules; that is
  // a warning, not an error (solvers do not rely on it).
  for (size_t i = 0; i + 1 < inst.cities.size(); ++i) {
    if (inst.cities[i].cap > inst.cities[i + 1].cap + tol::kAbs) {
      inst.warnings.push_back("caps not monotone between '" + inst.cities[i].id + "' and '" +
                              inst.cities[i + 1].id + "'");
    }
  }

  for (int i = 0; i < inst.n(); ++i) {
    if (inst.pi[static_cast<size_t>(i)] > 1.0 / static_cast<double>(budget)) {
      inst.oversized.push_back(i);
      if (inst.cities[static_cast<size_t>(i)].cap_before_clamp < static_cast<double>(letters) - tol::kAbs)
        inst.assumption_violations.push_back(i);
    }
  }

  inst.digest = instance_digest(inst.cities, letters, budget);
  return inst;
}

WidthProfile width_profile(const ProblemInstance& inst) {
  WidthProfile wp;
  wp.widths.resize(static_cast<size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) {
    wp.widths[static_cast<size_t>(i)] = inst.fair_share(i) / inst.cities[static_cast<size_t>(i)].cap;
    wp.total += wp.widths[static_cast<size_t>(i)];
  }
  // ceil with a tolerance so e.g. a total of 3.0000000001 from rounding noise
  // still reports 3.
  wp.lower_bound_t = static_cast<int>(std::ceil(wp.total - tol::kAbs));
  return wp;
}

std::vector<double> expected_letters(const LetterDistribution& dist) {
  if (dist.entries.empty()) throw ProbabilityMassError("distribution has no entries");
  if (std::abs(dist.mass() - 1.0) > tol::kAbs)
    throw ProbabilityMassError("probability mass sums to " + std::to_string(dist.mass()));
  std::vector<double> exp(dist.entries.front().allocation.letters_per_city.size(), 0.0);
  for (const auto& e : dist.entries)
    for (size_t i = 0; i < exp.size(); ++i) exp[i] += e.probability * e.allocation.letters_per_city[i];
  return exp;
}

FairnessAudit fairness_audit(const ProblemInstance& inst, const LetterDistribution& dist) {
  FairnessAudit audit;
  audit.expected = expected_letters(dist);
  audit.error.resize(audit.expected.size());
  for (int i = 0; i < inst.n(); ++i) {
    audit.error[static_cast<size_t>(i)] = audit.expected[static_cast<size_t>(i)] - inst.fair_share(i);
    audit.max_abs_error = std::max(audit.max_abs_error, std::abs(audit.error[static_cast<size_t>(i)]));
  }
  audit.fair = audit.max_abs_error <= tol::kFairnessRel * static_cast<double>(inst.letters);
  return audit;
}

SelectionProbabilityAudit selection_probability_audit(const ProblemInstance& inst,
                                                      const LetterDistribution& dist) {
  SelectionProbabilityAudit audit;
  audit.probability.assign(static_cast<size_t>(inst.n()), 0.0);
  for (const auto& e : dist.entries)
    for (int i = 0; i < inst.n(); ++i)
      if (e.allocation.letters_per_city[static_cast<size_t>(i)] > tol::kSupport)
        audit.probability[static_cast<size_t>(i)] += e.probability;
  WidthProfile wp = width_profile(inst);
  audit.worst_margin = 1e300;
  for (int i = 0; i < inst.n(); ++i)
    audit.worst_margin = std::min(
        audit.worst_margin,
        audit.probability[static_cast<size_t>(i)] - wp.widths[static_cast<size_t>(i)]);
  audit.ok = audit.worst_margin >= -tol::kAbs;
  return audit;
}

bool allocation_valid(const ProblemInstance& inst, const Allocation& a, double eps) {
  if (static_cast<int>(a.letters_per_city.size()) != inst.n()) return false;
  double sum = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    double v = a.letters_per_city[static_cast<size_t>(i)];
    if (v < -eps) return false;
    if (v > inst.cities[static_cast<size_t>(i)].cap + eps) return false;
    sum += v;
  }
  return std::abs(sum - static_cast<double>(inst.letters)) <= std::max(eps, eps * static_cast<double>(inst.letters));
}

bool t_bounded(const Allocation& a, int t, double eps) {
  return a.support_size(eps) <= t;
}

} // namespace sortition
