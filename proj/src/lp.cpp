#include "sortition/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sortition/tolerances.hpp"

namespace sortition {

int LinearProgram::add_variable(double cost) {
  objective.push_back(cost);
  for (Row& r : rows) r.coeffs.push_back(0.0);
  return static_cast<int>(objective.size()) - 1;
}

void LinearProgram::add_row(std::vector<double> coeffs, Relation rel, double rhs) {
  if (coeffs.size() != objective.size())
    throw DimensionMismatch("row has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                            std::to_string(objective.size()));
  rows.push_back({std::move(coeffs), rel, rhs});
}

namespace {

constexpr long kMaxIterations = 1000000;
constexpr int kRefactorEvery = 50;
constexpr double kPivotTol = 1e-9;

// Column-major constraint matrix over all variables (structural, slack,
// artificial), with per-row sign normalization already applied.
struct Tableau {
  int m = 0;
  int total_vars = 0;
  int n_structural = 0;
  int first_artificial = 0;
  std::vector<std::vector<double>> cols; // cols[j][r]
  std::vector<double> rhs;               // >= 0
  std::vector<bool> row_flipped;

  std::vector<int> basis;             // basis[r] = variable index
  std::vector<std::vector<double>> binv; // m x m
  std::vector<double> xb;             // basic values

  void refactor() {
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<std::vector<double>> a(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(2 * m), 0.0));
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) a[static_cast<size_t>(r)][static_cast<size_t>(c)] = cols[static_cast<size_t>(basis[static_cast<size_t>(c)])][static_cast<size_t>(r)];
      a[static_cast<size_t>(r)][static_cast<size_t>(m + r)] = 1.0;
    }
    for (int c = 0; c < m; ++c) {
      int piv = c;
      for (int r = c + 1; r < m; ++r)
        if (std::abs(a[static_cast<size_t>(r)][static_cast<size_t>(c)]) > std::abs(a[static_cast<size_t>(piv)][static_cast<size_t>(c)])) piv = r;
      std::swap(a[static_cast<size_t>(c)], a[static_cast<size_t>(piv)]);
      double d = a[static_cast<size_t>(c)][static_cast<size_t>(c)];
      for (int k = c; k < 2 * m; ++k) a[static_cast<size_t>(c)][static_cast<size_t>(k)] /= d;
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        double f = a[static_cast<size_t>(r)][static_cast<size_t>(c)];
        if (f == 0.0) continue;
        for (int k = c; k < 2 * m; ++k) a[static_cast<size_t>(r)][static_cast<size_t>(k)] -= f * a[static_cast<size_t>(c)][static_cast<size_t>(k)];
      }
    }
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) binv[static_cast<size_t>(r)][static_cast<size_t>(c)] = a[static_cast<size_t>(r)][static_cast<size_t>(m + c)];
    recompute_xb();
  }

  void recompute_xb() {
    for (int r = 0; r < m; ++r) {
      double s = 0.0;
      for (int c = 0; c < m; ++c) s += binv[static_cast<size_t>(r)][static_cast<size_t>(c)] * rhs[static_cast<size_t>(c)];
      xb[static_cast<size_t>(r)] = s;
    }
  }

  std::vector<double> multiply_binv(const std::vector<double>& col) const {
    std::vector<double> out(static_cast<size_t>(m), 0.0);
    for (int r = 0; r < m; ++r) {
      double s = 0.0;
      for (int c = 0; c < m; ++c) s += binv[static_cast<size_t>(r)][static_cast<size_t>(c)] * col[static_cast<size_t>(c)];
      out[static_cast<size_t>(r)] = s;
    }
    return out;
  }

  // y = c_B' * Binv for the supplied variable costs.
  std::vector<double> dual_prices(const std::vector<double>& cost) const {
    std::vector<double> y(static_cast<size_t>(m), 0.0);
    for (int c = 0; c < m; ++c) {
      double cb = cost[static_cast<size_t>(basis[static_cast<size_t>(c)])];
      if (cb == 0.0) continue;
      for (int r = 0; r < m; ++r) y[static_cast<size_t>(r)] += cb * binv[static_cast<size_t>(c)][static_cast<size_t>(r)];
    }
    return y;
  }

  void pivot(int entering, int leave_row, const std::vector<double>& w) {
    double piv = w[static_cast<size_t>(leave_row)];
    for (int c = 0; c < m; ++c) binv[static_cast<size_t>(leave_row)][static_cast<size_t>(c)] /= piv;
    xb[static_cast<size_t>(leave_row)] /= piv;
    if (xb[static_cast<size_t>(leave_row)] < 0.0 && xb[static_cast<size_t>(leave_row)] > -tol::kLpFeas)
      xb[static_cast<size_t>(leave_row)] = 0.0;
    for (int r = 0; r < m; ++r) {
      if (r == leave_row) continue;
      double f = w[static_cast<size_t>(r)];
      if (f == 0.0) continue;
      for (int c = 0; c < m; ++c)
        binv[static_cast<size_t>(r)][static_cast<size_t>(c)] -= f * binv[static_cast<size_t>(leave_row)][static_cast<size_t>(c)];
      xb[static_cast<size_t>(r)] -= f * xb[static_cast<size_t>(leave_row)];
      if (xb[static_cast<size_t>(r)] < 0.0 && xb[static_cast<size_t>(r)] > -tol::kLpFeas) xb[static_cast<size_t>(r)] = 0.0;
    }
    basis[static_cast<size_t>(leave_row)] = entering;
  }
};

// One simplex phase: minimize cost'x from the current basis with Bland's
// rule. With block_artificials set (phase 2), a basic artificial touched by
// the entering direction leaves immediately at ratio zero, so it can never
// re-enter or grow; each such pivot shrinks the artificial basis, so Bland's
// termination argument still applies between them.
enum class PhaseOutcome { Optimal, Unbounded };

PhaseOutcome run_phase(Tableau& t, const std::vector<double>& cost, const std::vector<bool>& allowed,
                       bool block_artificials, long& iterations) {
  int since_refactor = 0;
  while (true) {
    if (++iterations > kMaxIterations) throw CycleGuardTripped();
    if (++since_refactor >= kRefactorEvery) {
      t.refactor();
      since_refactor = 0;
    }
    std::vector<double> y = t.dual_prices(cost);

    int entering = -1;
    for (int j = 0; j < t.total_vars; ++j) {
      if (!allowed[static_cast<size_t>(j)]) continue;
      bool basic = false;
      for (int r = 0; r < t.m; ++r)
        if (t.basis[static_cast<size_t>(r)] == j) {
          basic = true;
          break;
        }
      if (basic) continue;
      double d = cost[static_cast<size_t>(j)];
      for (int r = 0; r < t.m; ++r) d -= y[static_cast<size_t>(r)] * t.cols[static_cast<size_t>(j)][static_cast<size_t>(r)];
      if (d < -tol::kLpOpt) {
        entering = j;
        break; // Bland: smallest improving index
      }
    }
    if (entering < 0) return PhaseOutcome::Optimal;

    std::vector<double> w = t.multiply_binv(t.cols[static_cast<size_t>(entering)]);

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t.m; ++r) {
      bool is_artificial = block_artificials && t.basis[static_cast<size_t>(r)] >= t.first_artificial;
      double wr = w[static_cast<size_t>(r)];
      if (is_artificial && std::abs(t.xb[static_cast<size_t>(r)]) <= tol::kLpFeas && std::abs(wr) > kPivotTol) {
        // Degenerate artificial: leaves immediately at ratio zero.
        leave = r;
        best_ratio = 0.0;
        break;
      }
      if (wr <= kPivotTol) continue;
      double ratio = t.xb[static_cast<size_t>(r)] / wr;
      if (ratio < best_ratio - tol::kLpFeas) {
        best_ratio = ratio;
        leave = r;
      } else if (ratio < best_ratio + tol::kLpFeas && leave >= 0 &&
                 t.basis[static_cast<size_t>(r)] < t.basis[static_cast<size_t>(leave)]) {
        // near-tie: Bland prefers the smaller basis variable; keep the
        // smaller ratio so ties cannot creep upwards across candidates
        best_ratio = std::min(best_ratio, ratio);
        leave = r;
      }
    }
    if (leave < 0) return PhaseOutcome::Unbounded;
    t.pivot(entering, leave, w);
  }
}

} // namespace

std::string basis_dump(const LpSolution& sol) {
  std::string out;
  for (size_t r = 0; r < sol.basis.size(); ++r) {
    int v = sol.basis[r];
    out += "row " + std::to_string(r) + ": var " + std::to_string(v) +
           (v < sol.structural_count ? " (structural)" : " (aux)") + "\n";
  }
  return out;
}

LpSolution solve(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.objective.size());
  const int m = static_cast<int>(lp.rows.size());
  for (const auto& row : lp.rows)
    if (static_cast<int>(row.coeffs.size()) != n)
      throw DimensionMismatch("row width " + std::to_string(row.coeffs.size()) + " != " + std::to_string(n));

  Tableau t;
  t.m = m;
  t.n_structural = n;
  t.rhs.resize(static_cast<size_t>(m));
  t.row_flipped.resize(static_cast<size_t>(m));

  std::vector<Relation> rel(static_cast<size_t>(m));
  for (int r = 0; r < m; ++r) {
    bool flip = lp.rows[static_cast<size_t>(r)].rhs < 0.0;
    t.row_flipped[static_cast<size_t>(r)] = flip;
    t.rhs[static_cast<size_t>(r)] = flip ? -lp.rows[static_cast<size_t>(r)].rhs : lp.rows[static_cast<size_t>(r)].rhs;
    Relation rr = lp.rows[static_cast<size_t>(r)].rel;
    if (flip) {
      if (rr == Relation::LessEqual) rr = Relation::GreaterEqual;
      else if (rr == Relation::GreaterEqual) rr = Relation::LessEqual;
    }
    rel[static_cast<size_t>(r)] = rr;
  }

  // Structural columns.
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r) {
      double v = lp.rows[static_cast<size_t>(r)].coeffs[static_cast<size_t>(j)];
      col[static_cast<size_t>(r)] = t.row_flipped[static_cast<size_t>(r)] ? -v : v;
    }
    t.cols.push_back(std::move(col));
  }
  // Slack / surplus columns.
  std::vector<int> slack_of_row(static_cast<size_t>(m), -1);
  for (int r = 0; r < m; ++r) {
    if (rel[static_cast<size_t>(r)] == Relation::Equal) continue;
    std::vector<double> col(static_cast<size_t>(m), 0.0);
    col[static_cast<size_t>(r)] = rel[static_cast<size_t>(r)] == Relation::LessEqual ? 1.0 : -1.0;
    slack_of_row[static_cast<size_t>(r)] = static_cast<int>(t.cols.size());
    t.cols.push_back(std::move(col));
  }
  t.first_artificial = static_cast<int>(t.cols.size());
  // Artificial columns where the slack cannot seed the basis.
  std::vector<int> artificial_of_row(static_cast<size_t>(m), -1);
  for (int r = 0; r < m; ++r) {
    if (rel[static_cast<size_t>(r)] == Relation::LessEqual) continue;
    std::vector<double> col(static_cast<size_t>(m), 0.0);
    col[static_cast<size_t>(r)] = 1.0;
    artificial_of_row[static_cast<size_t>(r)] = static_cast<int>(t.cols.size());
    t.cols.push_back(std::move(col));
  }
  t.total_vars = static_cast<int>(t.cols.size());

  t.basis.resize(static_cast<size_t>(m));
  for (int r = 0; r < m; ++r)
    t.basis[static_cast<size_t>(r)] =
        rel[static_cast<size_t>(r)] == Relation::LessEqual ? slack_of_row[static_cast<size_t>(r)] : artificial_of_row[static_cast<size_t>(r)];
  t.binv.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m), 0.0));
  for (int r = 0; r < m; ++r) t.binv[static_cast<size_t>(r)][static_cast<size_t>(r)] = 1.0;
  t.xb = t.rhs;

  LpSolution sol;

  // Phase 1.
  bool need_phase1 = false;
  for (int r = 0; r < m; ++r) need_phase1 |= artificial_of_row[static_cast<size_t>(r)] >= 0;
  std::vector<bool> allowed(static_cast<size_t>(t.total_vars), true);
  if (need_phase1) {
    std::vector<double> cost1(static_cast<size_t>(t.total_vars), 0.0);
    for (int j = t.first_artificial; j < t.total_vars; ++j) cost1[static_cast<size_t>(j)] = 1.0;
    PhaseOutcome out = run_phase(t, cost1, allowed, /*block_artificials=*/false, sol.iterations);
    (void)out; // phase 1 is bounded below by 0
    double art_sum = 0.0;
    for (int r = 0; r < m; ++r)
      if (t.basis[static_cast<size_t>(r)] >= t.first_artificial) art_sum += t.xb[static_cast<size_t>(r)];
    if (art_sum > tol::kLpFeas) {
      sol.status = LpStatus::Infeasible;
      sol.objective = art_sum;
      return sol;
    }
  }
  for (int j = t.first_artificial; j < t.total_vars; ++j) allowed[static_cast<size_t>(j)] = false;

  // Phase 2.
  std::vector<double> cost2(static_cast<size_t>(t.total_vars), 0.0);
  for (int j = 0; j < n; ++j) cost2[static_cast<size_t>(j)] = lp.objective[static_cast<size_t>(j)];
  PhaseOutcome out = run_phase(t, cost2, allowed, /*block_artificials=*/true, sol.iterations);
  if (out == PhaseOutcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  t.refactor(); // tighten the inverse before reading the solution

  sol.status = LpStatus::Optimal;
  sol.basis = t.basis;
  sol.structural_count = n;
  sol.primal.assign(static_cast<size_t>(n), 0.0);
  for (int r = 0; r < m; ++r) {
    int v = t.basis[static_cast<size_t>(r)];
    if (v < n) sol.primal[static_cast<size_t>(v)] = std::max(0.0, t.xb[static_cast<size_t>(r)]);
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += lp.objective[static_cast<size_t>(j)] * sol.primal[static_cast<size_t>(j)];

  std::vector<double> y = t.dual_prices(cost2);
  sol.duals.assign(static_cast<size_t>(m), 0.0);
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) {
    double yr = t.row_flipped[static_cast<size_t>(r)] ? -y[static_cast<size_t>(r)] : y[static_cast<size_t>(r)];
    sol.duals[static_cast<size_t>(r)] = yr;
    dual_obj += yr * lp.rows[static_cast<size_t>(r)].rhs;
  }
  sol.duality_gap = std::abs(sol.objective - dual_obj);
  return sol;
}

} // namespace sortition
