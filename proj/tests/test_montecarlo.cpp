#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "parkhail/montecarlo.hpp"
#include "parkhail/queueing.hpp"

using namespace parkhail;
namespace mc = parkhail::montecarlo;

TEST_CASE("simulated slot occupancy matches the analytic value") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 1.0;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 2;
  cfg.k_slots = 1;
  cfg.horizon_hours = 10000.0;
  cfg.warmup_hours = 1000.0;
  cfg.seed = 42;
  cfg.replications = 20;
  const auto res = mc::simulate(cfg);
  REQUIRE(res.r_stderr > 0.0);
  CHECK(std::abs(res.r_hat - 2.0 / 3.0) <= 3.0 * res.r_stderr);
}

TEST_CASE("zero arrivals: everyone idle, slots saturated") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 0.0;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 3;
  cfg.k_slots = 2;
  cfg.horizon_hours = 50.0;
  cfg.warmup_hours = 5.0;
  cfg.seed = 7;
  cfg.replications = 3;
  const auto res = mc::simulate(cfg);
  CHECK(res.idle_histogram[3] == doctest::Approx(1.0));
  CHECK(res.r_hat == doctest::Approx(1.0));  // min(1, n/k) with k <= n
  cfg.k_slots = 5;
  const auto res2 = mc::simulate(cfg);
  CHECK(res2.r_hat == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("idle histogram matches the three-driver distribution") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 2.0;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 3;
  cfg.k_slots = 2;
  cfg.horizon_hours = 4000.0;
  cfg.warmup_hours = 400.0;
  cfg.seed = 2024;
  cfg.replications = 16;
  const auto res = mc::simulate(cfg);
  const double expected[] = {4.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0};
  for (int i = 0; i <= 3; ++i) {
    CHECK(std::abs(res.idle_histogram[i] - expected[i]) <=
          3.0 * res.idle_histogram_stderr[i] + 1e-12);
  }
  CHECK(std::abs(res.idle_histogram.sum() - 1.0) < 1e-9);
}

TEST_CASE("simulation is reproducible for a fixed seed") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 3.0;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 5;
  cfg.k_slots = 3;
  cfg.horizon_hours = 200.0;
  cfg.warmup_hours = 20.0;
  cfg.seed = 99;
  cfg.replications = 4;
  const auto a = mc::simulate(cfg);
  const auto b = mc::simulate(cfg);
  CHECK(a.r_hat == b.r_hat);
  CHECK(a.r_stderr == b.r_stderr);
  CHECK((a.idle_histogram - b.idle_histogram).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.mean_queue_delay_hours == b.mean_queue_delay_hours);
  cfg.seed = 100;
  const auto c = mc::simulate(cfg);
  CHECK(a.r_hat != c.r_hat);
}

TEST_CASE("ten randomized configurations validate at three sigma") {
  std::mt19937_64 rng(515);
  for (int trial = 0; trial < 10; ++trial) {
    mc::SimConfig cfg{};
    cfg.n_drivers = 5 + static_cast<int>(rng() % 46);          // 5..50
    const double rho = 0.3 + 0.6 * (rng() % 1000) / 999.0;     // 0.3..0.9
    cfg.service_rate = 1.0;
    cfg.arrival_rate = rho * cfg.n_drivers;
    cfg.k_slots = static_cast<int>(rng() % (cfg.n_drivers + 1));
    cfg.horizon_hours = 400.0;
    cfg.warmup_hours = 40.0;
    cfg.seed = 7000 + trial;
    cfg.replications = 12;
    const auto report = mc::validate_against_analytic(cfg, 3.0);
    if (!report.pass) {
      for (const auto& chk : report.checks) {
        if (!chk.pass) {
          MESSAGE("trial ", trial, " n=", cfg.n_drivers, " rho=", rho, " k=", cfg.k_slots, " ",
                  chk.name, " sim=", chk.simulated, " exp=", chk.expected, " sigmas=", chk.sigmas);
        }
      }
    }
    CHECK(report.pass);
  }
}

TEST_CASE("k = 0 skips the occupancy comparison but keeps the histogram") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 2.0;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 4;
  cfg.k_slots = 0;
  cfg.horizon_hours = 500.0;
  cfg.warmup_hours = 50.0;
  cfg.seed = 11;
  cfg.replications = 8;
  const auto report = mc::validate_against_analytic(cfg, 3.0);
  for (const auto& chk : report.checks) CHECK(chk.name != "slot_occupancy");
  CHECK(report.checks.size() == std::size_t(cfg.n_drivers + 1) + 1);  // bins + throughput
  CHECK(report.pass);
}

TEST_CASE("negative control: a shifted analytic distribution fails validation") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 2.0;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 3;
  cfg.k_slots = 2;
  cfg.horizon_hours = 2000.0;
  cfg.warmup_hours = 200.0;
  cfg.seed = 5;
  cfg.replications = 12;
  const auto res = mc::simulate(cfg);
  const auto qc = queueing::QueueConfig(cfg.arrival_rate, cfg.service_rate, cfg.n_drivers);
  const auto dist = queueing::idle_distribution(qc);
  Eigen::VectorXd shifted(dist.probs.size());
  shifted[0] = dist.probs[dist.probs.size() - 1];
  for (int i = 1; i < shifted.size(); ++i) shifted[i] = dist.probs[i - 1];
  const double r = queueing::parking_utilization(qc, cfg.k_slots);
  const auto report = mc::compare_with_analytic(res, cfg, shifted, r, 3.0);
  CHECK_FALSE(report.pass);
}

TEST_CASE("little's law: mean busy times service rate equals throughput") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 6.0;
  cfg.service_rate = 2.0;
  cfg.n_drivers = 5;
  cfg.k_slots = 2;
  cfg.horizon_hours = 1500.0;
  cfg.warmup_hours = 150.0;
  cfg.seed = 3;
  cfg.replications = 10;
  const auto res = mc::simulate(cfg);
  CHECK(std::abs(res.mean_busy * cfg.service_rate - cfg.arrival_rate) <=
        3.0 * res.mean_busy_stderr * cfg.service_rate);
  // mean queueing delay agrees with the M/M/N expectation within noise
  CHECK(res.mean_queue_delay_hours >= 0.0);
}

TEST_CASE("queue overflow and config validation") {
  mc::SimConfig cfg{};
  cfg.arrival_rate = 0.98;
  cfg.service_rate = 1.0;
  cfg.n_drivers = 1;
  cfg.k_slots = 1;
  cfg.horizon_hours = 5000.0;
  cfg.warmup_hours = 0.0;
  cfg.seed = 1;
  cfg.replications = 1;
  cfg.max_queue = 3;  // tiny cap: the near-saturated queue must hit it
  CHECK_THROWS_AS(mc::simulate(cfg), InstabilityError);

  mc::SimConfig bad = cfg;
  bad.max_queue = 1000;
  bad.arrival_rate = 1.5;  // rho > 1
  CHECK_THROWS_AS(bad.validate(), InstabilityError);
  bad = cfg;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.warmup_hours = cfg.horizon_hours;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.n_drivers = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
