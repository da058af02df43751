#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sortition {

enum class Relation { LessEqual, Equal, GreaterEqual };

/// min c'x subject to rows, x >= 0. Dense; sized for restricted masters
/// (thousands of variables, hundreds of rows), not general-purpose use.
struct LinearProgram {
  std::vector<double> objective;
  struct Row {
    std::vector<double> coeffs;
    Relation rel = Relation::Equal;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int add_variable(double cost);
  void add_row(std::vector<double> coeffs, Relation rel, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal; // structural variables only
  std::vector<double> duals;  // per row; sign convention: duals . rhs == objective
  double objective = 0.0;
  double duality_gap = 0.0;
  long iterations = 0;
  std::vector<int> basis;     // basic variable per row (solver numbering)
  int structural_count = 0;
};

// Text dump of the final basis for debugging degenerate masters.
std::string basis_dump(const LpSolution& sol);

class DimensionMismatch : public std::runtime_error {
public:
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
class CycleGuardTripped : public std::runtime_error {
public:
  CycleGuardTripped() : std::runtime_error("simplex iteration cap reached") {}
};

/// Two-phase revised simplex, Bland's rule, dense basis inverse refactored
/// every 50 pivots. Deterministic: no perturbation, fixed pivot order.
LpSolution solve(const LinearProgram& lp);

} // namespace sortition
