#pragma once

// Central numeric tolerances. Everything that compares floating point goes
// through one of these so the contract stays auditable in one place.
namespace sortition::tol {

// Absolute tolerance for fractional comparisons (masses, widths, areas).
inline constexpr double kAbs = 1e-9;

// Fairness audits are relative to the letter volume: |E[a_i] - pi_i*l| <= kFairnessRel * l.
inline constexpr double kFairnessRel = 1e-6;

// LP internals.
inline constexpr double kLpFeas = 1e-9;
inline constexpr double kLpOpt = 1e-9;
inline constexpr double kLpDuality = 1e-7;

// Column generation stopping rules.
inline constexpr double kPricingExact = 1e-9;       // feasibility masters
inline constexpr double kPricingProportional = 1e-6; // phi masters

// Branch-and-bound optimality gap for the proportional pricing oracle.
inline constexpr double kBnbGap = 1e-6;

// Breakpoints closer than this are merged when extracting distributions.
inline constexpr double kBreakpointMerge = 1e-12;

// Support membership: a_i > kSupport counts as a contacted city.
inline constexpr double kSupport = 1e-9;

} // namespace sortition::tol
