#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "parkhail/queueing.hpp"

using namespace parkhail;
using queueing::QueueConfig;

TEST_CASE("idle distribution: two drivers at half occupancy is uniform") {
  const auto dist = queueing::idle_distribution(QueueConfig(1.0, 1.0, 2.0));
  REQUIRE(dist.probs.size() == 3);
  CHECK(dist.probs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(dist.probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(dist.probs[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::exp(dist.log_pi0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("idle distribution: three drivers, occupancy 2/3") {
  const auto dist = queueing::idle_distribution(QueueConfig(2.0, 1.0, 3.0));
  const double expected[] = {4.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0};
  for (int i = 0; i <= 3; ++i)
    CHECK(dist.probs[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("idle distribution: empty-load limit concentrates on all idle") {
  const auto dist = queueing::idle_distribution(QueueConfig(1e-9, 1.0, 1.0));
  CHECK(dist.probs[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dist.probs[0] < 1e-8);
}

TEST_CASE("idle distribution matches the birth-death oracle for small fleets") {
  for (int n = 1; n <= 8; ++n) {
    for (int r10 = 1; r10 <= 9; ++r10) {
      const double rho = r10 / 10.0;
      const double lambda = rho * n;  // mu = 1
      const auto dist = queueing::idle_distribution(QueueConfig(lambda, 1.0, n));
      const auto ref = oracle::ctmc_idle_distribution(lambda, 1.0, n);
      REQUIRE(dist.probs.size() == ref.size());
      CHECK((dist.probs - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("idle distribution: normalization and mean identity") {
  struct Case {
    double lambda, mu, n;
  } cases[] = {{50.0, 1.0, 60.0}, {270.0, 3.0, 100.0}, {890.0, 1.0, 1000.0},
               {4500.0, 1.0, 5000.0}, {9037.579, 5.3824, 3053.135}};
  for (const auto& c : cases) {
    const QueueConfig cfg(c.lambda, c.mu, c.n);
    const auto dist = queueing::idle_distribution(cfg);
    CHECK(std::abs(dist.probs.sum() - 1.0) < 1e-9);
    // mean idle count approaches n - lambda/mu below saturation
    const double mean = dist.mean();
    const double expected = queueing::expected_idle(cfg);
    CHECK(std::abs(mean - expected) / expected < 0.01);
  }
}

TEST_CASE("idle distribution survives a large saturated fleet") {
  const double n = 5000.0;
  const double rho = 0.999;
  const auto dist = queueing::idle_distribution(QueueConfig(rho * n, 1.0, n));
  CHECK(std::isfinite(dist.probs.sum()));
  CHECK(std::abs(dist.probs.sum() - 1.0) < 1e-9);
  CHECK(dist.probs.minCoeff() >= 0.0);
  CHECK(std::isfinite(dist.log_pi0));
  CHECK(std::isfinite(queueing::parking_utilization(QueueConfig(rho * n, 1.0, n), 2500.0)));
}

TEST_CASE("parking utilization: two-driver examples") {
  const QueueConfig cfg(1.0, 1.0, 2.0);
  CHECK(queueing::parking_utilization(cfg, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(queueing::parking_utilization(cfg, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  const QueueConfig idle_cfg(1e-12, 1.0, 2.0);
  CHECK(queueing::parking_utilization(idle_cfg, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(queueing::parking_utilization(cfg, 0.0) == 1.0);  // k = 0 convention
}

TEST_CASE("parking utilization agrees with the distribution form") {
  const QueueConfig cfg(37.0, 1.5, 40.0);
  const auto dist = queueing::idle_distribution(cfg);
  for (double k : {0.5, 1.0, 3.0, 7.5, 20.0, 40.0, 55.0}) {
    CHECK(queueing::parking_utilization(cfg, k) ==
          doctest::Approx(queueing::utilization(dist, k)).epsilon(1e-12));
  }
}

TEST_CASE("parking utilization: monotone in k, k*r nondecreasing, bounded") {
  struct Case {
    double lambda, mu, n;
  } cases[] = {{1.0, 1.0, 2.0}, {12.0, 2.0, 10.0}, {140.0, 2.0, 90.0}, {700.0, 1.0, 1000.0}};
  for (const auto& c : cases) {
    const QueueConfig cfg(c.lambda, c.mu, c.n);
    double prev_r = 1.0, prev_kr = 0.0;
    for (double k = 0.0; k <= 1.25 * c.n; k += 0.25 * c.n / 8.0 + 0.125) {
      const double r = queueing::parking_utilization(cfg, k);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
      CHECK(r <= prev_r + 1e-12);
      CHECK(k * r >= prev_kr - 1e-12);
      prev_r = r;
      prev_kr = k * r;
    }
  }
}

TEST_CASE("smooth utilization interpolates between integer fleets") {
  const double lambda = 21.0, mu = 1.0;
  const double r30 = queueing::parking_utilization(QueueConfig(lambda, mu, 30.0), 6.0);
  const double r31 = queueing::parking_utilization(QueueConfig(lambda, mu, 31.0), 6.0);
  CHECK(queueing::parking_utilization_smooth(lambda, mu, 30.0, 6.0) ==
        doctest::Approx(r30).epsilon(1e-15));
  CHECK(queueing::parking_utilization_smooth(lambda, mu, 30.25, 6.0) ==
        doctest::Approx(0.75 * r30 + 0.25 * r31).epsilon(1e-12));
  // continuous across the half-integer where round() jumps
  const double left = queueing::parking_utilization_smooth(lambda, mu, 30.5 - 1e-9, 6.0);
  const double right = queueing::parking_utilization_smooth(lambda, mu, 30.5 + 1e-9, 6.0);
  CHECK(std::abs(left - right) < 1e-7);
}

TEST_CASE("waiting time follows the inverse square root") {
  CHECK(queueing::waiting_time(100.0, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(queueing::waiting_time(174.7 * 174.7, 174.7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(queueing::waiting_time(1374.28, 174.7) == doctest::Approx(4.7130).epsilon(2e-4));
  CHECK_THROWS_AS(queueing::waiting_time(0.0, 10.0), DomainError);
  CHECK_THROWS_AS(queueing::waiting_time(-2.0, 10.0), DomainError);
}

TEST_CASE("expected idle count") {
  CHECK(queueing::expected_idle(QueueConfig(1.0, 1.0, 2.0)) == doctest::Approx(1.0));
  CHECK(queueing::expected_idle(QueueConfig(0.0, 1.0, 7.0)) == doctest::Approx(7.0));
  CHECK(queueing::expected_idle(QueueConfig(9037.58, 5.383, 3053.13)) ==
        doctest::Approx(1374.3).epsilon(1e-3));
}

TEST_CASE("queue config rejects invalid inputs") {
  CHECK_THROWS_AS(QueueConfig(2.0, 1.0, 2.0), InstabilityError);   // rho = 1
  CHECK_THROWS_AS(QueueConfig(3.0, 1.0, 2.0), InstabilityError);   // rho > 1
  CHECK_THROWS_AS(QueueConfig(-1.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(QueueConfig(1.0, 0.0, 2.0), DomainError);
  CHECK_THROWS_AS(QueueConfig(1.0, 1.0, 0.5), DomainError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(QueueConfig(nan, 1.0, 2.0), DomainError);
}
