#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sortition/tolerances.hpp"

namespace sortition {

/// A municipality as it enters the planner: raw inhabitant count and a cap on
/// the letters it may receive. Normalized shares live on the instance.
struct City {
  std::string id;
  std::string name;
  double population = 0.0;       // raw inhabitants
  double cap = 0.0;              // u_i, possibly clamped to l at validation
  double cap_before_clamp = 0.0; // as supplied, for the oversized-city audit
  std::string state;             // optional stratification key
};

class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};
class EmptyRoster : public ValidationError {
public:
  EmptyRoster() : ValidationError("empty roster") {}
};
class NonPositiveInput : public ValidationError {
public:
  explicit NonPositiveInput(const std::string& what) : ValidationError(what) {}
};
class InfeasibleCap : public ValidationError {
public:
  explicit InfeasibleCap(const std::string& what) : ValidationError(what) {}
};
class ProbabilityMassError : public std::runtime_error {
public:
  explicit ProbabilityMassError(const std::string& what) : std::runtime_error(what) {}
};

/// Validated, normalized, ascending-by-population instance.
struct ProblemInstance {
  std::vector<City> cities; // sorted by (population, cap, id)
  std::vector<double> pi;   // normalized shares, sum exactly 1
  long long letters = 0;    // l
  int budget = 0;           // t

  std::vector<int> oversized;              // pi_i > 1/t
  std::vector<int> assumption_violations;  // oversized with pre-clamp cap < l
  std::vector<std::string> warnings;
  std::uint64_t digest = 0;

  int n() const { return static_cast<int>(cities.size()); }
  // pi_i * l, the expected-letter mass city i is owed.
  double fair_share(int i) const { return pi[static_cast<size_t>(i)] * static_cast<double>(letters); }
  bool caps_integral() const;
};

struct Allocation {
  std::vector<double> letters_per_city;

  double total() const;
  int support_size(double eps = tol::kSupport) const;
  bool is_integral(double eps = tol::kAbs) const;
  // Pairs of consecutive *contacted* cities where the larger city receives
  // less (beyond slack); zeros are skipped, since monotonicity is a
  // statement about the cities that get letters at all.
  int monotone_violations(double slack) const;
};

struct WidthProfile {
  std::vector<double> widths; // w_i = pi_i*l/u_i
  double total = 0.0;
  int lower_bound_t = 0; // ceil(total)
};

enum class DistributionMode { Fractional, Integral };

struct LetterDistribution {
  struct Entry {
    double probability = 0.0;
    Allocation allocation;
  };
  std::vector<Entry> entries;
  DistributionMode mode = DistributionMode::Fractional;
  std::uint64_t instance_digest = 0;

  double mass() const;
};

ProblemInstance validate(std::vector<City> raw, long long letters, int budget);
WidthProfile width_profile(const ProblemInstance& inst);

struct FairnessAudit {
  std::vector<double> expected; // E[a_i]
  std::vector<double> error;    // E[a_i] - pi_i*l
  double max_abs_error = 0.0;
  bool fair = false; // max_abs_error <= kFairnessRel * l
};

std::vector<double> expected_letters(const LetterDistribution& dist);
FairnessAudit fairness_audit(const ProblemInstance& inst, const LetterDistribution& dist);

struct SelectionProbabilityAudit {
  std::vector<double> probability; // Pr[a_i > 0]
  double worst_margin = 0.0;       // min over i of Pr[a_i > 0] - w_i
  bool ok = false;                 // every probability >= w_i - 1e-9
};

// Every cap forces a minimum selection probability w_i = pi_i*l/u_i; any
// fair distribution must meet it.
SelectionProbabilityAudit selection_probability_audit(const ProblemInstance& inst,
                                                      const LetterDistribution& dist);

// Allocation-level checks shared by solvers and reports.
bool allocation_valid(const ProblemInstance& inst, const Allocation& a, double eps = tol::kAbs);
bool t_bounded(const Allocation& a, int t, double eps = tol::kSupport);

std::uint64_t instance_digest(const std::vector<City>& cities, long long letters, int budget);

} // namespace sortition
