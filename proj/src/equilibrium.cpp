#include "parkhail/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace parkhail::equilibrium {

namespace {

namespace inc = parkhail::incentives;
namespace que = parkhail::queueing;

constexpr int kMaxBisect = 200;
constexpr int kMaxOuter = 500;
constexpr double kOuterDamping = 0.5;

// Net wage decomposition: w_n = w_g + (a * r + b) / n. Fixed parking rate
// uses a = (l - p_g) k, b = 0; the earning-pinned variant uses a = l k,
// b = -e_k k so that p_g drops out through p_g r = e_k.
struct WageTerm {
  double a = 0.0;
  double b = 0.0;
};

struct Arrivals {
  double lambda = 0.0;
  bool capped = false;  // demand saturated the stable-capacity bracket
};

// Largest arrival rate probed for a given driver count. Stays strictly
// inside the stability region of both the real count (waiting time) and the
// floored count (idle distribution).
double arrival_cap(double n, const MarketParams& mp) {
  return std::min(0.999 * std::floor(n) * mp.mu, mp.lambda0);
}

// Root of g(lambda) = lambda - F_p(alpha t_w(n - lambda/mu) + p_f).
// g is increasing (higher lambda -> less idle capacity -> longer waits ->
// less demand), so bisection on [0, cap] is valid.
Arrivals solve_arrivals(double ride_fare, double n, const MarketParams& mp, double tol) {
  const double cap = arrival_cap(n, mp);
  if (!(cap > 0.0)) return {0.0, false};
  auto excess = [&](double lam) {
    const double t_w = mp.m_coeff / std::sqrt(n - lam / mp.mu);
    return lam - inc::passenger_demand(mp.alpha * t_w + ride_fare, mp);
  };
  if (excess(0.0) >= 0.0) return {0.0, false};
  if (excess(cap) <= 0.0) return {cap, true};
  double lo = 0.0, hi = cap;
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = excess(mid);
    if (std::abs(e) <= 0.25 * tol * std::max(1.0, mid)) return {mid, false};
    (e < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4e-16 * std::max(1.0, hi)) break;
  }
  return {0.5 * (lo + hi), false};
}

struct InnerPoint {
  double lambda = 0.0;
  double n = 0.0;
  double r = 1.0;
  double wn = 0.0;
  bool capped = false;
};

// Root of h(n) = n - F_d(w_g + (a r(n) + b)/n) on [1, n0] by bisection,
// optionally warm-started from a previous nearby solution.
InnerPoint solve_drivers(double ride_fare, double gross_wage, double k_slots, const WageTerm& wt,
                         const MarketParams& mp, double tol, double n_guess) {
  InnerPoint pt;
  auto excess = [&](double n) {
    const Arrivals arr = solve_arrivals(ride_fare, n, mp, tol);
    pt.lambda = arr.lambda;
    pt.capped = arr.capped;
    pt.n = n;
    pt.r = (k_slots > 0.0)
               ? que::parking_utilization_smooth(arr.lambda, mp.mu, n, k_slots)
               : 1.0;
    pt.wn = gross_wage + (wt.a * pt.r + wt.b) / n;
    return n - inc::driver_supply(pt.wn, mp);
  };

  double lo = 1.0, hi = mp.n0;
  bool bracketed = false;
  if (n_guess >= 1.0 && n_guess <= mp.n0) {
    double half = std::max(0.25, 0.02 * n_guess);
    double center = n_guess;
    for (int grow = 0; grow < 6 && !bracketed; ++grow) {
      const double wlo = std::clamp(center - half, 1.0, mp.n0);
      const double whi = std::clamp(center + half, 1.0, mp.n0);
      const double a = excess(wlo);
      const double b = excess(whi);
      if (a <= 0.0 && b >= 0.0) {
        lo = wlo;
        hi = whi;
        bracketed = true;
      } else if (a > 0.0) {
        center = wlo;
        half *= 4.0;  // root below the window
      } else {
        center = whi;
        half *= 4.0;  // root above the window
      }
    }
  }
  if (!bracketed) {
    if (excess(hi) <= 0.0) return pt;  // supply saturated at n0
    // The parking term can push h positive again at small n (a collapsed
    // market with huge per-driver parking charges), so [1, n0] need not
    // bracket. Scan down geometrically for the upper crossing, which is the
    // stable market equilibrium.
    double cur = hi;
    while (cur > 1.0 && !bracketed) {
      const double nxt = std::max(1.0, 0.5 * cur);
      if (excess(nxt) <= 0.0) {
        lo = nxt;
        hi = cur;
        bracketed = true;
      }
      cur = nxt;
    }
    if (!bracketed) throw InfeasibleError("driver supply falls below one driver");
  }

  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = excess(mid);
    if (std::abs(e) <= 0.5 * tol * std::max(1.0, mid)) return pt;
    (e < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4e-16 * std::max(1.0, hi)) break;
  }
  excess(0.5 * (lo + hi));
  return pt;
}

EquilibriumState assemble(const PlatformDecision& dec, const InnerPoint& pt, double k_slots,
                          const MarketParams& mp, double garage_residual) {
  EquilibriumState st;
  st.decision = dec;
  st.lambda = pt.lambda;
  st.n_drivers = pt.n;
  st.k_slots = k_slots;
  st.utilization = pt.r;
  const double idle = pt.n - pt.lambda / mp.mu;
  st.t_w = que::waiting_time(idle, mp.m_coeff);
  st.travel_cost = inc::travel_cost(st.t_w, dec.ride_fare, mp.alpha);
  st.net_wage = pt.wn;
  st.n_parked = k_slots * pt.r;
  st.n_onroad = pt.n - st.n_parked;
  st.parked_ratio = st.n_parked / idle;
  st.profit_per_hour = pt.lambda * dec.ride_fare - dec.gross_wage * pt.n;
  st.residuals[0] =
      std::abs(pt.lambda - inc::passenger_demand(st.travel_cost, mp)) / std::max(1.0, pt.lambda);
  st.residuals[1] = std::abs(pt.n - inc::driver_supply(pt.wn, mp)) / std::max(1.0, pt.n);
  st.residuals[2] = garage_residual;
  return st;
}

void check_certificate(const EquilibriumState& st, double tol, bool enforce_garage) {
  if (st.residuals[0] > tol || st.residuals[1] > tol ||
      (enforce_garage && st.residuals[2] > tol)) {
    throw ConvergenceError("equilibrium residuals exceed tolerance",
                           {st.residuals[0], st.residuals[1], st.residuals[2]});
  }
}

// One full garage fixed-point pass from a given start. The iteration is the
// damped map K <- K + 0.5 (F_g(p_g r(K)) - K); since r is nonincreasing in K
// the excess K - F_g(p_g r(K)) is increasing, and every evaluation tightens
// a bisection bracket that safeguards steps the damped map would overshoot.
InnerPoint garage_fixed_point(const PlatformDecision& dec, const MarketParams& mp, double tol,
                              double k_start, double n_guess, double& k_out) {
  double k = k_start;
  double k_lo = 0.0, k_hi = mp.k0;
  InnerPoint pt;
  pt.n = n_guess;
  for (int it = 0; it < kMaxOuter; ++it) {
    const WageTerm wt{(mp.l - dec.parking_rate) * k, 0.0};
    pt = solve_drivers(dec.ride_fare, dec.gross_wage, k, wt, mp, tol, pt.n);
    const double supplied = inc::garage_supply(dec.parking_rate * pt.r, mp);
    if (std::abs(k - supplied) <= 0.5 * tol * std::max(1.0, k)) {
      k_out = k;
      return pt;
    }
    (k < supplied ? k_lo : k_hi) = k;
    double next = k + kOuterDamping * (supplied - k);
    if (!(next > k_lo && next < k_hi)) next = 0.5 * (k_lo + k_hi);
    k = next;
  }
  const WageTerm wt{(mp.l - dec.parking_rate) * k, 0.0};
  pt = solve_drivers(dec.ride_fare, dec.gross_wage, k, wt, mp, tol, pt.n);
  const double supplied = inc::garage_supply(dec.parking_rate * pt.r, mp);
  throw ConvergenceError(
      "garage supply fixed point did not converge",
      {0.0, 0.0, std::abs(k - supplied) / std::max(1.0, k)});
}

}  // namespace

EquilibriumState solve(const PlatformDecision& decision, const MarketParams& params, double tol,
                       const SolveHint& hint) {
  params.validate();
  decision.validate();
  if (!(tol > 0.0)) throw DomainError("tolerance must be > 0");

  double k_a = 0.0;
  const double start_a = hint.k_start >= 0.0 ? hint.k_start : 0.0;
  InnerPoint pt = garage_fixed_point(decision, params, tol, start_a, hint.n_guess, k_a);

  bool multiple = false;
  if (!hint.single_start) {
    double k_b = 0.0;
    garage_fixed_point(decision, params, tol, params.k0, pt.n, k_b);
    multiple = std::abs(k_a - k_b) > 10.0 * tol * std::max(1.0, k_a);
  }

  if (pt.capped) throw InfeasibleError("passenger demand saturates stable queue capacity");
  const double supplied = inc::garage_supply(decision.parking_rate * pt.r, params);
  const double g_res = std::abs(k_a - supplied) / std::max(1.0, k_a);
  EquilibriumState st = assemble(decision, pt, k_a, params, g_res);
  st.multiple_equilibria = multiple;
  check_certificate(st, tol, true);
  return st;
}

EquilibriumState solve_fixed_k(double ride_fare, double gross_wage, double k_slots,
                               double parking_rate, const MarketParams& params, double tol,
                               const SolveHint& hint) {
  params.validate();
  if (!(tol > 0.0)) throw DomainError("tolerance must be > 0");
  if (!(k_slots >= 0.0) || !std::isfinite(k_slots)) throw DomainError("slot count must be >= 0");
  const PlatformDecision dec{ride_fare, gross_wage, parking_rate};
  dec.validate();
  if (k_slots == 0.0) {
    EquilibriumState st = solve_no_parking(ride_fare, gross_wage, params, tol);
    st.decision = dec;
    return st;
  }

  const WageTerm wt{(params.l - parking_rate) * k_slots, 0.0};
  const InnerPoint pt =
      solve_drivers(ride_fare, gross_wage, k_slots, wt, params, tol, hint.n_guess);
  if (pt.capped) throw InfeasibleError("passenger demand saturates stable queue capacity");
  const double supplied = inc::garage_supply(parking_rate * pt.r, params);
  const double g_res = std::abs(k_slots - supplied) / std::max(1.0, k_slots);
  EquilibriumState st = assemble(dec, pt, k_slots, params, g_res);
  check_certificate(st, tol, false);  // garage residual reported, not enforced
  return st;
}

EquilibriumState solve_no_parking(double ride_fare, double gross_wage, const MarketParams& params,
                                  double tol) {
  params.validate();
  if (!(tol > 0.0)) throw DomainError("tolerance must be > 0");
  const PlatformDecision dec{ride_fare, gross_wage, 0.0};
  dec.validate();

  const double n = inc::driver_supply(gross_wage, params);
  if (!(n >= 1.0)) throw InfeasibleError("driver supply falls below one driver");
  const Arrivals arr = solve_arrivals(ride_fare, n, params, tol);
  if (arr.capped) throw InfeasibleError("passenger demand saturates stable queue capacity");

  InnerPoint pt;
  pt.lambda = arr.lambda;
  pt.n = n;
  pt.r = 1.0;  // convention: utilization of zero slots is 1, so k*r = 0
  pt.wn = gross_wage;
  EquilibriumState st = assemble(dec, pt, 0.0, params, 0.0);
  st.n_parked = 0.0;
  st.n_onroad = n;
  st.parked_ratio = 0.0;
  check_certificate(st, tol, false);
  return st;
}

EquilibriumState solve_pinned_earning(double ride_fare, double gross_wage, double k_slots,
                                      const MarketParams& params, double tol,
                                      const SolveHint& hint) {
  params.validate();
  if (!(tol > 0.0)) throw DomainError("tolerance must be > 0");
  if (!(k_slots >= 0.0) || !std::isfinite(k_slots)) throw DomainError("slot count must be >= 0");
  if (k_slots == 0.0) return solve_no_parking(ride_fare, gross_wage, params, tol);

  const double earning = inc::garage_earning_for_supply(k_slots, params);
  const WageTerm wt{params.l * k_slots, -earning * k_slots};
  const InnerPoint pt =
      solve_drivers(ride_fare, gross_wage, k_slots, wt, params, tol, hint.n_guess);
  if (pt.capped) throw InfeasibleError("passenger demand saturates stable queue capacity");
  if (!(pt.r > 0.0)) throw InfeasibleError("offered slots are never occupied");

  const PlatformDecision dec{ride_fare, gross_wage, earning / pt.r};
  dec.validate();
  const double supplied = inc::garage_supply(dec.parking_rate * pt.r, params);
  const double g_res = std::abs(k_slots - supplied) / std::max(1.0, k_slots);
  EquilibriumState st = assemble(dec, pt, k_slots, params, g_res);
  check_certificate(st, tol, true);
  return st;
}

}  // namespace parkhail::equilibrium
