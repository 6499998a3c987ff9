#pragma once

#include <string>
#include <vector>

#include "parkhail/equilibrium.hpp"

// Platform profit maximization over the three prices, the parking-supply
// sweep, regime detection, and parameter calibration.
namespace parkhail::optimizer {

using equilibrium::EquilibriumState;
using incentives::MarketParams;
using incentives::PlatformDecision;

struct AxisSpec {
  double lo = 0.0;
  double hi = 1.0;
  int steps = 2;  // grid points on [lo, hi], endpoints included
};

// Price grid with shrink-around-incumbent refinement. Profit ties are broken
// toward the smallest ride fare, then gross wage, then parking rate.
struct GridSpec {
  AxisSpec ride_fare{5.0, 40.0, 25};
  AxisSpec gross_wage{10.0, 45.0, 25};
  AxisSpec parking_rate{0.0, 8.0, 25};
  int refinement_rounds = 3;
  double shrink_factor = 0.25;  // per-round width multiplier, in (0, 1)

  void validate() const;  // throws DomainError
};

// Default grid with the parking axis capped at the cruising cost (rates
// above it make parking strictly worse than cruising for drivers).
GridSpec default_grid(const MarketParams& params);

struct OptimumResult {
  PlatformDecision decision;
  EquilibriumState state;
};

// Best feasible grid point of lambda * p_f - w_g * n over (p_f, w_g, p_g)
// with the garage supply endogenous. Infeasible grid points are skipped;
// throws InfeasibleError only when every point fails. threads <= 0 uses all
// cores; results are identical for every thread count.
OptimumResult maximize_profit(const MarketParams& params, const GridSpec& grid, double tol = 1e-8,
                              int threads = 0);

// Same search over (p_f, w_g) only, with no parking service offered.
OptimumResult maximize_profit_no_parking(const MarketParams& params, const GridSpec& grid,
                                         double tol = 1e-8, int threads = 0);

struct SweepRow {
  double k_slots = 0.0;
  bool ok = false;
  std::string error;  // failure reason when !ok
  EquilibriumState state;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // ascending in k_slots
  double tol = 1e-8;
};

// Per-K profit maximization over (p_f, w_g): each row holds the optimal
// equilibrium with the slot count exogenous and the parking rate derived
// from the garage constraint. Row failures are recorded and the sweep
// continues. Rows are independent; worker count never changes the table.
SweepTable sweep_k(const MarketParams& params, const std::vector<double>& k_grid,
                   const GridSpec& grid, double tol = 1e-8, int threads = 0);

// Three-regime structure of a sweep:
//   k1     last K whose (lambda, n) still match the first row within
//          plateau_tol (relative) -- the full-occupancy plateau,
//   k2     first K from which every later row matches the final row within
//          plateau_tol -- the over-provision plateau,
//   k_star profit argmax (first row on ties).
struct RegimeReport {
  double k1 = 0.0;
  double k2 = 0.0;
  double k_star = 0.0;
  double plateau_tol = 0.0;

  struct Endpoint {
    double k_slots, lambda, n_drivers, n_onroad, travel_cost, net_wage, profit;
  };
  Endpoint baseline;  // first row (K = 0 in the usual sweep)
  Endpoint optimum;   // row at k_star

  // Strict improvements at k_star over the baseline row.
  struct Improvements {
    bool arrivals_up = false;
    bool cost_down = false;
    bool drivers_up = false;
    bool net_wage_up = false;
    bool profit_up = false;
    bool all() const { return arrivals_up && cost_down && drivers_up && net_wage_up && profit_up; }
  };
  Improvements improvements;

  struct Zone {
    double k_lo = 0.0, k_hi = 0.0;
    int rows = 0;
  };
  Zone regime1, regime2, regime3;  // K <= k1, k1 < K < k2, K >= k2
};

// Throws DomainError for tables with fewer than 10 rows and ConvergenceError
// when any row failed or carries residuals beyond the sweep tolerance.
RegimeReport detect_regimes(const SweepTable& table, double plateau_tol = 1e-3);

// Observations of the no-parking optimum used to back out (epsilon, eta, mu).
struct CalibrationAnchors {
  double lambda_obs;  // trips/hour
  double n_obs;       // drivers
  double c_obs;       // $, total travel cost
  double wn_obs;      // $/hour, net (= gross at K = 0) wage
  double tw_obs;      // minutes
};

// Closed-form inversion of the demand, supply and waiting-time relations:
//   epsilon = ln(lambda0/lambda_obs - 1) / (c_obs - c0)
//   eta     = ln(n0/n_obs - 1) / (w0 - wn_obs)
//   mu      = lambda_obs / (n_obs - (m_coeff/tw_obs)^2)
// Other fields pass through. Throws DomainError when an anchor is outside
// the invertible range or the result violates parameter invariants.
MarketParams calibrate(const MarketParams& params, const CalibrationAnchors& anchors);

}  // namespace parkhail::optimizer
