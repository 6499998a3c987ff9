#pragma once

#include <Eigen/Dense>

#include "parkhail/incentives.hpp"
#include "parkhail/queueing.hpp"

// Fixed point of the coupled market system: passenger arrivals against
// travel cost, driver supply against net wage, and garage-slot supply
// against slot earnings, all tied together through the matching queue.
namespace parkhail::equilibrium {

using incentives::MarketParams;
using incentives::PlatformDecision;

// A solved market point plus derived observables. Rates are per hour,
// waiting time in minutes, money in dollars.
struct EquilibriumState {
  PlatformDecision decision;
  double lambda = 0.0;           // passenger arrival rate, trips/hour
  double n_drivers = 0.0;
  double k_slots = 0.0;
  double utilization = 1.0;      // r, occupied fraction of offered slots
  double t_w = 0.0;              // passenger waiting time, minutes
  double travel_cost = 0.0;      // alpha * t_w + p_f
  double net_wage = 0.0;         // w_g + (l - p_g) k r / n
  double n_parked = 0.0;         // k * r
  double n_onroad = 0.0;         // n - k * r
  double parked_ratio = 0.0;     // k * r / (n - lambda/mu)
  double profit_per_hour = 0.0;  // lambda * p_f - w_g * n
  // Relative residuals of the three constraints (arrivals, drivers, garage),
  // each |x - F(x)| / max(1, |x|).
  Eigen::Vector3d residuals = Eigen::Vector3d::Zero();
  // Set when the garage fixed point reached different points from the
  // K = 0 and K = k0 starts.
  bool multiple_equilibria = false;

  double residual_max() const { return residuals.cwiseAbs().maxCoeff(); }
};

// Performance hint for repeated nearby solves (grid scans). Hints change
// the iteration path, not which equilibrium is acceptable: the returned
// state always satisfies the residual tolerance. single_start skips the
// two-sided start used to detect multiple garage fixed points.
struct SolveHint {
  double k_start = -1.0;  // initial garage supply iterate, < 0 for none
  double n_guess = -1.0;  // driver-count bracket hint, < 0 for none
  bool single_start = false;
};

// Full equilibrium: all three constraints at the given prices. The garage
// supply K is found by a damped fixed-point iteration (factor 0.5, budget
// 500) run from both K = 0 and K = k0, with a bisection safeguard on the
// monotone excess K - F_g(p_g r). Throws ConvergenceError when the budget
// is exhausted and InfeasibleError when no stable market exists.
EquilibriumState solve(const PlatformDecision& decision, const MarketParams& params,
                       double tol = 1e-8, const SolveHint& hint = {});

// Arrivals and drivers only; the slot count is exogenous and the garage
// constraint residual is reported but not enforced.
EquilibriumState solve_fixed_k(double ride_fare, double gross_wage, double k_slots,
                               double parking_rate, const MarketParams& params, double tol = 1e-8,
                               const SolveHint& hint = {});

// No parking service: K = 0, utilization recorded as 1 by convention, and
// the driver count is the closed-form supply at the gross wage.
EquilibriumState solve_no_parking(double ride_fare, double gross_wage, const MarketParams& params,
                                  double tol = 1e-8);

// Slot count exogenous with the parking rate derived from the garage
// constraint: p_g r equals the earning at which exactly k_slots slots are
// offered. This is the per-K subproblem of the parking-supply sweep.
EquilibriumState solve_pinned_earning(double ride_fare, double gross_wage, double k_slots,
                                      const MarketParams& params, double tol = 1e-8,
                                      const SolveHint& hint = {});

}  // namespace parkhail::equilibrium
