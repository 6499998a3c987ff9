#include "parkhail/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "parkhail/parallel.hpp"

namespace parkhail::optimizer {

namespace {

namespace eq = parkhail::equilibrium;

constexpr std::size_t kGridBlock = 64;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_axis(const AxisSpec& a, const char* name) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi))
    throw DomainError(std::string(name) + ": bounds must be finite with lo < hi");
  if (a.steps < 2) throw DomainError(std::string(name) + ": at least 2 grid steps required");
}

std::vector<double> linspace(const AxisSpec& a) {
  std::vector<double> pts(a.steps);
  const double step = (a.hi - a.lo) / (a.steps - 1);
  for (int i = 0; i < a.steps; ++i) pts[i] = a.lo + step * i;
  pts.back() = a.hi;
  return pts;
}

AxisSpec shrink_axis(const AxisSpec& cur, const AxisSpec& orig, double center, double factor) {
  const double half = std::max(0.5 * (cur.hi - cur.lo) * factor, 1e-9);
  return {std::max(orig.lo, center - half), std::min(orig.hi, center + half), cur.steps};
}

bool lexicographically_before(const PlatformDecision& a, const PlatformDecision& b) {
  return std::tie(a.ride_fare, a.gross_wage, a.parking_rate) <
         std::tie(b.ride_fare, b.gross_wage, b.parking_rate);
}

struct GridEval {
  double profit = kNegInf;
  bool ok = false;
  double k_slots = -1.0;
  double n_drivers = -1.0;
};

struct Incumbent {
  bool found = false;
  PlatformDecision decision{};
  double profit = kNegInf;

  // Returns true when dec displaces the incumbent.
  bool offer(const PlatformDecision& dec, double profit_value) {
    if (!found || profit_value > profit ||
        (profit_value == profit && lexicographically_before(dec, decision))) {
      found = true;
      decision = dec;
      profit = profit_value;
      return true;
    }
    return false;
  }
};

}  // namespace

void GridSpec::validate() const {
  validate_axis(ride_fare, "ride_fare");
  validate_axis(gross_wage, "gross_wage");
  validate_axis(parking_rate, "parking_rate");
  if (refinement_rounds < 0) throw DomainError("refinement_rounds must be >= 0");
  if (!(shrink_factor > 0.0) || !(shrink_factor < 1.0))
    throw DomainError("shrink_factor must be in (0, 1)");
}

GridSpec default_grid(const MarketParams& params) {
  GridSpec g;
  g.parking_rate.hi = params.l;
  return g;
}

OptimumResult maximize_profit(const MarketParams& params, const GridSpec& grid, double tol,
                              int threads) {
  params.validate();
  grid.validate();
  AxisSpec apf = grid.ride_fare, awg = grid.gross_wage, apg = grid.parking_rate;
  Incumbent best;

  for (int round = 0; round <= grid.refinement_rounds; ++round) {
    const auto pfs = linspace(apf), wgs = linspace(awg), pgs = linspace(apg);
    const std::size_t n_wg = wgs.size(), n_pg = pgs.size();
    const std::size_t total = pfs.size() * n_wg * n_pg;
    std::vector<GridEval> evals(total);

    detail::parallel_blocks(total, kGridBlock, threads, [&](std::size_t b, std::size_t e) {
      eq::SolveHint hint;
      hint.single_start = true;
      for (std::size_t idx = b; idx < e; ++idx) {
        const PlatformDecision dec{pfs[idx / (n_wg * n_pg)], wgs[(idx / n_pg) % n_wg],
                                   pgs[idx % n_pg]};
        try {
          const auto st = eq::solve(dec, params, tol, hint);
          evals[idx] = {st.profit_per_hour, true, st.k_slots, st.n_drivers};
          hint.k_start = st.k_slots;
          hint.n_guess = st.n_drivers;
        } catch (const std::exception&) {
          // infeasible or non-convergent point: skip, keep the last good hint
        }
      }
    });

    for (std::size_t idx = 0; idx < total; ++idx) {
      if (!evals[idx].ok) continue;
      best.offer({pfs[idx / (n_wg * n_pg)], wgs[(idx / n_pg) % n_wg], pgs[idx % n_pg]},
                 evals[idx].profit);
    }
    if (!best.found) continue;  // maybe a refined round still finds nothing

    apf = shrink_axis(apf, grid.ride_fare, best.decision.ride_fare, grid.shrink_factor);
    awg = shrink_axis(awg, grid.gross_wage, best.decision.gross_wage, grid.shrink_factor);
    apg = shrink_axis(apg, grid.parking_rate, best.decision.parking_rate, grid.shrink_factor);
  }
  if (!best.found) throw InfeasibleError("no feasible grid point");
  return {best.decision, eq::solve(best.decision, params, tol)};
}

OptimumResult maximize_profit_no_parking(const MarketParams& params, const GridSpec& grid,
                                         double tol, int threads) {
  params.validate();
  grid.validate();
  AxisSpec apf = grid.ride_fare, awg = grid.gross_wage;
  Incumbent best;

  for (int round = 0; round <= grid.refinement_rounds; ++round) {
    const auto pfs = linspace(apf), wgs = linspace(awg);
    const std::size_t n_wg = wgs.size();
    const std::size_t total = pfs.size() * n_wg;
    std::vector<GridEval> evals(total);

    detail::parallel_blocks(total, kGridBlock, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t idx = b; idx < e; ++idx) {
        try {
          const auto st =
              eq::solve_no_parking(pfs[idx / n_wg], wgs[idx % n_wg], params, tol);
          evals[idx] = {st.profit_per_hour, true, 0.0, st.n_drivers};
        } catch (const std::exception&) {
        }
      }
    });

    for (std::size_t idx = 0; idx < total; ++idx) {
      if (!evals[idx].ok) continue;
      best.offer({pfs[idx / n_wg], wgs[idx % n_wg], 0.0}, evals[idx].profit);
    }
    if (!best.found) continue;

    apf = shrink_axis(apf, grid.ride_fare, best.decision.ride_fare, grid.shrink_factor);
    awg = shrink_axis(awg, grid.gross_wage, best.decision.gross_wage, grid.shrink_factor);
  }
  if (!best.found) throw InfeasibleError("no feasible grid point");
  return {best.decision,
          eq::solve_no_parking(best.decision.ride_fare, best.decision.gross_wage, params, tol)};
}

namespace {

SweepRow optimize_sweep_row(const MarketParams& params, double k, const GridSpec& grid,
                            double tol) {
  SweepRow row;
  row.k_slots = k;
  AxisSpec apf = grid.ride_fare, awg = grid.gross_wage;
  Incumbent best;
  EquilibriumState best_state;
  eq::SolveHint hint;  // driver-count warm start along the row's own scan

  for (int round = 0; round <= grid.refinement_rounds; ++round) {
    const auto pfs = linspace(apf), wgs = linspace(awg);
    for (double pf : pfs) {
      for (double wg : wgs) {
        try {
          const auto st = eq::solve_pinned_earning(pf, wg, k, params, tol, hint);
          hint.n_guess = st.n_drivers;
          if (best.offer(st.decision, st.profit_per_hour)) best_state = st;
        } catch (const std::exception&) {
        }
      }
    }
    if (!best.found) continue;
    apf = shrink_axis(apf, grid.ride_fare, best.decision.ride_fare, grid.shrink_factor);
    awg = shrink_axis(awg, grid.gross_wage, best.decision.gross_wage, grid.shrink_factor);
  }

  if (!best.found) {
    row.ok = false;
    row.error = "no feasible grid point";
    return row;
  }
  row.ok = true;
  row.state = best_state;
  return row;
}

}  // namespace

SweepTable sweep_k(const MarketParams& params, const std::vector<double>& k_grid,
                   const GridSpec& grid, double tol, int threads) {
  params.validate();
  grid.validate();
  if (k_grid.empty()) throw DomainError("k_grid must not be empty");
  if (!std::is_sorted(k_grid.begin(), k_grid.end()))
    throw DomainError("k_grid must be ascending");
  if (k_grid.front() < 0.0 || k_grid.back() > params.k0)
    throw DomainError("k_grid values must lie in [0, k0]");

  SweepTable table;
  table.tol = tol;
  table.rows.resize(k_grid.size());
  detail::parallel_blocks(k_grid.size(), 1, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        table.rows[i] = optimize_sweep_row(params, k_grid[i], grid, tol);
      } catch (const std::exception& ex) {
        table.rows[i].k_slots = k_grid[i];
        table.rows[i].ok = false;
        table.rows[i].error = ex.what();
      }
    }
  });
  return table;
}

RegimeReport detect_regimes(const SweepTable& table, double plateau_tol) {
  if (table.rows.size() < 10) throw DomainError("regime detection needs at least 10 sweep rows");
  if (!(plateau_tol > 0.0)) throw DomainError("plateau_tol must be > 0");
  for (const auto& row : table.rows) {
    if (!row.ok)
      throw ConvergenceError("sweep row K=" + std::to_string(row.k_slots) +
                                 " failed: " + row.error,
                             {0, 0, 0});
    if (row.state.residual_max() > table.tol)
      throw ConvergenceError("sweep row K=" + std::to_string(row.k_slots) +
                                 " carries residuals beyond tolerance",
                             {row.state.residuals[0], row.state.residuals[1],
                              row.state.residuals[2]});
  }

  const auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(1e-300, std::abs(b));
  };
  const auto& rows = table.rows;
  const auto& first = rows.front().state;
  const auto& last = rows.back().state;

  RegimeReport rep;
  rep.plateau_tol = plateau_tol;

  for (const auto& row : rows) {
    if (rel(row.state.lambda, first.lambda) < plateau_tol &&
        rel(row.state.n_drivers, first.n_drivers) < plateau_tol)
      rep.k1 = row.k_slots;
  }
  rep.k2 = rows.back().k_slots;
  for (std::size_t i = rows.size(); i-- > 0;) {
    if (rel(rows[i].state.lambda, last.lambda) < plateau_tol &&
        rel(rows[i].state.n_drivers, last.n_drivers) < plateau_tol)
      rep.k2 = rows[i].k_slots;
    else
      break;
  }

  std::size_t star = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].state.profit_per_hour > rows[star].state.profit_per_hour) star = i;
  }
  rep.k_star = rows[star].k_slots;

  const auto endpoint = [](const SweepRow& row) {
    return RegimeReport::Endpoint{row.k_slots,
                                  row.state.lambda,
                                  row.state.n_drivers,
                                  row.state.n_onroad,
                                  row.state.travel_cost,
                                  row.state.net_wage,
                                  row.state.profit_per_hour};
  };
  rep.baseline = endpoint(rows.front());
  rep.optimum = endpoint(rows[star]);

  rep.improvements.arrivals_up = rep.optimum.lambda > rep.baseline.lambda;
  rep.improvements.cost_down = rep.optimum.travel_cost < rep.baseline.travel_cost;
  rep.improvements.drivers_up = rep.optimum.n_drivers > rep.baseline.n_drivers;
  rep.improvements.net_wage_up = rep.optimum.net_wage > rep.baseline.net_wage;
  rep.improvements.profit_up = rep.optimum.profit > rep.baseline.profit;

  for (const auto& row : rows) {
    RegimeReport::Zone* zone = row.k_slots <= rep.k1  ? &rep.regime1
                               : row.k_slots < rep.k2 ? &rep.regime2
                                                      : &rep.regime3;
    if (zone->rows == 0) zone->k_lo = row.k_slots;
    zone->k_hi = row.k_slots;
    zone->rows += 1;
  }
  return rep;
}

MarketParams calibrate(const MarketParams& params, const CalibrationAnchors& anchors) {
  params.validate();
  if (!(anchors.lambda_obs > 0.0) || !(anchors.n_obs > 0.0) || !(anchors.c_obs > 0.0) ||
      !(anchors.wn_obs > 0.0) || !(anchors.tw_obs > 0.0))
    throw DomainError("calibration anchors must be positive");
  if (!(anchors.lambda_obs < params.lambda0))
    throw DomainError("observed arrivals must be below lambda0");
  if (!(anchors.n_obs < params.n0)) throw DomainError("observed drivers must be below n0");
  if (std::abs(anchors.c_obs - params.c0) < 1e-12)
    throw DomainError("observed cost coincides with c0; demand slope not identified");
  if (std::abs(params.w0 - anchors.wn_obs) < 1e-12)
    throw DomainError("observed wage coincides with w0; supply slope not identified");
  const double idle = anchors.n_obs - std::pow(params.m_coeff / anchors.tw_obs, 2);
  if (!(idle > 0.0))
    throw DomainError("waiting-time anchor implies a non-positive idle fleet");

  MarketParams out = params;
  out.epsilon = std::log(params.lambda0 / anchors.lambda_obs - 1.0) / (anchors.c_obs - params.c0);
  out.eta = std::log(params.n0 / anchors.n_obs - 1.0) / (params.w0 - anchors.wn_obs);
  out.mu = anchors.lambda_obs / idle;
  out.validate();
  return out;
}

}  // namespace parkhail::optimizer
