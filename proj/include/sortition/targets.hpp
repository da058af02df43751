#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sortition/model.hpp"

namespace sortition {

class UnknownFunction : public std::runtime_error {
public:
  explicit UnknownFunction(const std::string& name)
      : std::runtime_error("unknown target function '" + name + "'") {}
};
class WidthOutOfRange : public std::runtime_error {
public:
  WidthOutOfRange(double lo, double hi, double asked)
      : std::runtime_error("requested width " + std::to_string(asked) + " outside attainable [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]"),
        attainable_low(lo), attainable_high(hi) {}
  double attainable_low;
  double attainable_high;
};

/// Monotone map from population share to an (unscaled) letter target.
using TargetFunction = std::function<double(double)>;

// Built-ins: "sqrt", "constant", "proportional".
TargetFunction target_function(const std::string& name);

// Tabulated monotone (pi, f(pi)) pairs with linear interpolation, for custom
// target shapes.
TargetFunction tabulated_target_function(std::vector<std::pair<double, double>> points);

struct TargetProfile {
  std::vector<double> tau;    // letters a city should receive if selected
  std::vector<double> widths; // pi_i*l / tau_i, the target selection probabilities
  double kappa = 0.0;
  std::string function_name;
};

/// Scales targets tau_i = max(pi_i*l, min(u_i, kappa*f(pi_i))) so that the
/// widths sum to exactly t. Bisection on kappa; the width sum is continuous
/// and non-increasing in kappa, ranging from n (kappa=0) down to sum w_i.
TargetProfile solve_kappa(const ProblemInstance& inst, const TargetFunction& f, int t,
                          const std::string& function_name = "custom");
TargetProfile solve_kappa(const ProblemInstance& inst, const std::string& function_name, int t);

// The profile forced by t = 1: every city receives the full letter volume
// when selected, independent of the target function.
TargetProfile point_profile(const ProblemInstance& inst);

} // namespace sortition
