#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parkhail/errors.hpp"

// Discrete-event simulation of the matching queue with parking slots,
// cross-validating the analytic idle-driver distribution and slot
// utilization. Passengers arrive Poisson, service is exponential per busy
// driver, waiting passengers queue FCFS; an idle driver occupies a free slot
// instantly and vacates instantly on dispatch, so the occupied-slot count is
// min(idle, k) along every path.
namespace parkhail::montecarlo {

struct SimConfig {
  double arrival_rate;    // trips/hour
  double service_rate;    // trips/hour per driver
  int n_drivers;
  int k_slots;
  double horizon_hours;   // per replication, statistics after warmup
  double warmup_hours;
  std::uint64_t seed;
  int replications;
  std::int64_t max_queue = 1'000'000;  // waiting-passenger cap; overflow aborts

  void validate() const;  // throws DomainError / InstabilityError
};

struct SimResult {
  double r_hat = 1.0;     // mean occupied fraction of slots (1 when k = 0)
  double r_stderr = 0.0;  // across-replication standard error
  Eigen::VectorXd idle_histogram;         // time-weighted, indices 0..n
  Eigen::VectorXd idle_histogram_stderr;  // per-bin across-replication stderr
  double mean_queue_delay_hours = 0.0;    // via Little's law from queue length
  double mean_busy = 0.0;                 // time-averaged busy drivers
  double mean_busy_stderr = 0.0;
};

// Runs `replications` independent replications with substream seeds derived
// from cfg.seed by iterating the splitmix64 mixer, and aggregates statistics
// in replication order. Identical configs give identical results regardless
// of how replications are scheduled.
SimResult simulate(const SimConfig& cfg);

struct StatCheck {
  std::string name;
  double simulated = 0.0;
  double expected = 0.0;
  double stderr_ = 0.0;
  double sigmas = 0.0;  // |simulated - expected| / stderr
  bool pass = false;
};

struct ValidationReport {
  std::vector<StatCheck> checks;
  bool pass = false;
};

// Compares a simulation result against explicit analytic values: slot
// occupancy (skipped when k = 0), every idle-histogram bin, and throughput
// (busy drivers times service rate against the arrival rate, Little's law).
// Each statistic must fall within tol_sigmas standard errors.
ValidationReport compare_with_analytic(const SimResult& result, const SimConfig& cfg,
                                       const Eigen::VectorXd& idle_probs, double utilization,
                                       double tol_sigmas);

// Runs simulate and compares against the analytic stationary distribution
// and utilization from the queueing module.
ValidationReport validate_against_analytic(const SimConfig& cfg, double tol_sigmas);

}  // namespace parkhail::montecarlo
