#pragma once

#include "parkhail/errors.hpp"

// Behavioral curves of the three market sides: passenger demand against
// total travel cost, driver supply against net hourly wage, and garage-slot
// supply against per-slot hourly earnings. All pure functions of scalars.
namespace parkhail::incentives {

// Exogenous market parameters. Rates are stored per hour; waiting times are
// minutes and alpha is $/minute, matching how the case-study data is quoted
// (e.g. a potential arrival rate of 944/min is stored as 56640/hour).
struct MarketParams {
  double lambda0;  // potential passenger arrival rate, trips/hour
  double n0;       // potential driver count
  double k0;       // potential idle parking-slot count
  double m_coeff;  // waiting-time coefficient, minutes * sqrt(vehicles)
  double alpha;    // value of waiting time, $/minute
  double epsilon;  // demand sensitivity, 1/$
  double c0;       // outside-option travel cost, $
  double eta;      // supply sensitivity, hours/$
  double w0;       // reservation wage, $/hour
  double sigma;    // log spread of garage reservation earnings
  double u0;       // log location of garage reservation earnings
  double l;        // cruising cost, $/hour
  double mu;       // service rate, trips/hour per driver

  void validate() const;  // throws DomainError
};

// The three platform-controlled prices.
struct PlatformDecision {
  double ride_fare;     // p_f, $/trip
  double gross_wage;    // w_g, $/hour
  double parking_rate;  // p_g, $/hour

  void validate() const;  // throws DomainError
};

// Overflow-safe logistic 1/(1 + e^x); the exponent is clamped to +-700.
double logistic(double x);

// Total passenger cost of a ride: alpha * t_w + p_f ($).
double travel_cost(double t_w_minutes, double ride_fare, double alpha);

// Logit passenger demand: lambda0 / (1 + e^{epsilon (c - c0)}), trips/hour.
// Strictly decreasing in cost.
double passenger_demand(double cost, const MarketParams& params);

// Net hourly wage: gross wage plus the per-driver parking saving
// (l - p_g) * k * r / n. Reduces to the gross wage when k == 0 or p_g == l.
double net_wage(const PlatformDecision& decision, double k_slots, double utilization,
                double n_drivers, double cruising_cost);

// Logit driver supply: n0 / (1 + e^{eta (w0 - w_n)}). Strictly increasing.
double driver_supply(double net_wage, const MarketParams& params);

// Garage-slot supply at a per-slot hourly earning: the count of slots whose
// log-normally distributed reservation earning falls below the offer,
// k0 * (1/2 + 1/2 erf((ln e - u0) / (sqrt(2) sigma))). Zero at zero earning.
// Uses std::erf (correctly rounded to well below 1e-12 absolute error).
double garage_supply(double earning, const MarketParams& params);

// Inverse of garage_supply: the per-slot earning at which exactly k_slots
// slots are offered. Solved by monotone bisection on the log-earning. Throws
// DomainError outside [0, k0).
double garage_earning_for_supply(double k_slots, const MarketParams& params);

}  // namespace parkhail::incentives
