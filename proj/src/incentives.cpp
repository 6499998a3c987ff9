#include "parkhail/incentives.hpp"

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace parkhail::incentives {

namespace {

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void MarketParams::validate() const {
  if (!all_finite({lambda0, n0, k0, m_coeff, alpha, epsilon, c0, eta, w0, sigma, u0, l, mu}))
    throw DomainError("market parameters must be finite");
  if (!(lambda0 >= 0.0)) throw DomainError("lambda0 must be >= 0");
  if (!(n0 > 0.0)) throw DomainError("n0 must be > 0");
  if (!(k0 > 0.0)) throw DomainError("k0 must be > 0");
  if (!(m_coeff > 0.0)) throw DomainError("m_coeff must be > 0");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (!(eta > 0.0)) throw DomainError("eta must be > 0");
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (!(l > 0.0)) throw DomainError("cruising cost must be > 0");
  if (!(mu > 0.0)) throw DomainError("service rate must be > 0");
}

void PlatformDecision::validate() const {
  if (!all_finite({ride_fare, gross_wage, parking_rate}))
    throw DomainError("platform prices must be finite");
  if (ride_fare < 0.0 || gross_wage < 0.0 || parking_rate < 0.0)
    throw DomainError("platform prices must be >= 0");
}

double logistic(double x) {
  if (x > 700.0) x = 700.0;
  if (x < -700.0) x = -700.0;
  return 1.0 / (1.0 + std::exp(x));
}

double travel_cost(double t_w_minutes, double ride_fare, double alpha) {
  if (!(t_w_minutes >= 0.0)) throw DomainError("waiting time must be >= 0");
  return alpha * t_w_minutes + ride_fare;
}

double passenger_demand(double cost, const MarketParams& params) {
  if (!std::isfinite(cost)) throw DomainError("travel cost must be finite");
  return params.lambda0 * logistic(params.epsilon * (cost - params.c0));
}

double net_wage(const PlatformDecision& decision, double k_slots, double utilization,
                double n_drivers, double cruising_cost) {
  if (!(n_drivers > 0.0)) throw DomainError("driver count must be > 0");
  if (!(k_slots >= 0.0)) throw DomainError("slot count must be >= 0");
  return decision.gross_wage +
         (cruising_cost - decision.parking_rate) * k_slots * utilization / n_drivers;
}

double driver_supply(double net_wage, const MarketParams& params) {
  if (!std::isfinite(net_wage)) throw DomainError("net wage must be finite");
  return params.n0 * logistic(params.eta * (params.w0 - net_wage));
}

double garage_supply(double earning, const MarketParams& params) {
  if (!(earning >= 0.0)) throw DomainError("earning must be >= 0");
  if (earning == 0.0) return 0.0;
  const double z = (std::log(earning) - params.u0) / (std::numbers::sqrt2 * params.sigma);
  return params.k0 * (0.5 + 0.5 * std::erf(z));
}

double garage_earning_for_supply(double k_slots, const MarketParams& params) {
  if (!(k_slots >= 0.0) || !(k_slots < params.k0))
    throw DomainError("garage supply is invertible only on [0, k0)");
  if (k_slots == 0.0) return 0.0;
  // erf saturates to 1 ulp of +-1 near |z| = 6; +-9 brackets every attainable
  // supply level. Bisection on the log-earning keeps the result positive.
  const double span = 9.0 * std::numbers::sqrt2 * params.sigma;
  double lo = params.u0 - span, hi = params.u0 + span;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (garage_supply(std::exp(mid), params) < k_slots ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace parkhail::incentives
