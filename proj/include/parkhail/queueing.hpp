#pragma once

#include <Eigen/Dense>

#include "parkhail/errors.hpp"

// Stationary analysis of the passenger/driver matching queue: M/M/N with
// Poisson passenger arrivals and exponential per-driver service. Drivers are
// the servers; the idle-driver count determines how many offered parking
// slots are occupied.
namespace parkhail::queueing {

// Arrival and service configuration. The driver count is real-valued because
// it comes out of a continuous supply curve; the stationary distribution is
// evaluated at round(n_drivers) while algebraic identities (expected idle
// count, waiting time) use the real value.
struct QueueConfig {
  double arrival_rate;  // trips/hour
  double service_rate;  // trips/hour per driver
  double n_drivers;     // >= 1, real-valued

  // Throws DomainError on non-finite or out-of-range inputs and
  // InstabilityError when occupancy() >= 1.
  QueueConfig(double arrival_rate, double service_rate, double n_drivers);

  double occupancy() const { return arrival_rate / (n_drivers * service_rate); }
  int rounded_drivers() const;
};

// Stationary distribution of the number of idle drivers, X_0..X_N for
// N = round(n_drivers).
struct IdleDistribution {
  Eigen::VectorXd probs;  // probs[i] = P(i drivers idle), sums to 1
  double rho;             // occupancy at the rounded driver count
  double log_pi0;         // log P(all drivers idle)

  int n() const { return static_cast<int>(probs.size()) - 1; }
  double mean() const;
};

// Stationary idle-driver distribution. All weights are assembled in the log
// domain and normalized with a max-shifted exponential sum, so the result is
// finite and normalized for driver counts well beyond the ~170 where the
// linear-domain factorials overflow. Weights more than 45 nats below the
// peak are dropped as numerically irrelevant.
IdleDistribution idle_distribution(const QueueConfig& cfg);

// Expected fraction of k_slots parking slots occupied by idle drivers:
// r = sum_i X_i * min(1, i/k). By convention r = 1 when k_slots == 0, so
// that the product k*r (the parked-vehicle count) is continuous at zero.
double parking_utilization(const QueueConfig& cfg, double k_slots);

// Same as parking_utilization but over an already-computed distribution.
double utilization(const IdleDistribution& dist, double k_slots);

// Continuous-in-n extension of parking_utilization used by the equilibrium
// solver: linear interpolation between the distributions at floor(n) and
// ceil(n). Rounding n to a single integer makes the coupled market maps
// stepwise in the driver count, which stalls root-finding; interpolation
// removes the steps and agrees with parking_utilization at integer n.
double parking_utilization_smooth(double arrival_rate, double service_rate, double n_drivers,
                                  double k_slots);

// Passenger waiting time in minutes: m_coeff / sqrt(n_idle). Throws
// DomainError when n_idle <= 0 (no idle capacity; the price point is
// infeasible for the caller).
double waiting_time(double n_idle, double m_coeff);

// Average idle-driver count n_drivers - arrival_rate/service_rate, using the
// real (unrounded) driver count.
double expected_idle(const QueueConfig& cfg);

}  // namespace parkhail::queueing
