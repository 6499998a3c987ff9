#include "parkhail/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace parkhail::queueing {

namespace {

// Log-weights are dropped once they fall this far below the running maximum;
// exp(-45) is below double-precision relevance relative to the peak.
constexpr double kLogTailCutoff = 45.0;

const std::vector<double>& log_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(16385, 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = std::log(static_cast<double>(k));
    return t;
  }();
  return table;
}

inline double log_int(int k) {
  const auto& t = log_table();
  return static_cast<std::size_t>(k) < t.size() ? t[k] : std::log(static_cast<double>(k));
}

}  // namespace

QueueConfig::QueueConfig(double arrival_rate, double service_rate, double n_drivers)
    : arrival_rate(arrival_rate), service_rate(service_rate), n_drivers(n_drivers) {
  if (!std::isfinite(arrival_rate) || !std::isfinite(service_rate) || !std::isfinite(n_drivers))
    throw DomainError("queue config values must be finite");
  if (arrival_rate < 0.0) throw DomainError("arrival rate must be >= 0");
  if (!(service_rate > 0.0)) throw DomainError("service rate must be > 0");
  if (!(n_drivers >= 1.0)) throw DomainError("driver count must be >= 1");
  if (!(occupancy() < 1.0)) throw InstabilityError("queue occupancy >= 1, no stationary regime");
}

int QueueConfig::rounded_drivers() const {
  return static_cast<int>(std::llround(n_drivers));
}

double IdleDistribution::mean() const {
  double m = 0.0;
  for (int i = 1; i < probs.size(); ++i) m += i * probs[i];
  return m;
}

// Weights relative to pi0, indexed by idle count i:
//   w_N = 0
//   w_i = (N-i) log a - log (N-i)!          for 1 <= i <= N-1, a = lambda/mu
//   w_0 = N log a - log N! - log(1 - rho)
// built by downward recursion w_i = w_{i+1} + log a - log(N - i).
IdleDistribution idle_distribution(const QueueConfig& cfg) {
  const int n = cfg.rounded_drivers();
  const double a = cfg.arrival_rate / cfg.service_rate;
  const double rho = cfg.arrival_rate / (n * cfg.service_rate);
  if (!(rho < 1.0))
    throw InstabilityError("queue occupancy >= 1 at the rounded driver count");
  const double log_a = std::log(a);  // -inf when the queue is empty

  Eigen::VectorXd w(n + 1);
  w[n] = 0.0;
  for (int i = n - 1; i >= 1; --i) w[i] = w[i + 1] + log_a - log_int(n - i);
  w[0] = (n >= 2 ? w[1] + log_a - log_int(n) : log_a) - std::log1p(-rho);

  const double w_max = w.maxCoeff();
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (w[i] >= w_max - kLogTailCutoff) sum += std::exp(w[i] - w_max);
  }

  IdleDistribution dist;
  dist.probs.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    dist.probs[i] = (w[i] >= w_max - kLogTailCutoff) ? std::exp(w[i] - w_max) / sum : 0.0;
  }
  dist.rho = rho;
  dist.log_pi0 = -w_max - std::log(sum);
  return dist;
}

double parking_utilization(const QueueConfig& cfg, double k_slots) {
  if (!(k_slots >= 0.0) || !std::isfinite(k_slots))
    throw DomainError("slot count must be finite and >= 0");
  if (k_slots == 0.0) return 1.0;

  const int n = cfg.rounded_drivers();
  const double a = cfg.arrival_rate / cfg.service_rate;
  const double rho = cfg.arrival_rate / (n * cfg.service_rate);
  if (!(rho < 1.0))
    throw InstabilityError("queue occupancy >= 1 at the rounded driver count");
  const double log_a = std::log(a);

  // First pass: peak log-weight. Second pass: normalizer and the occupied
  // fraction in one sweep, skipping the truncated tail.
  double w = 0.0, w_max = 0.0;
  for (int i = n - 1; i >= 1; --i) {
    w += log_a - log_int(n - i);
    w_max = std::max(w_max, w);
  }
  const double w0 = (n >= 2 ? w + log_a - log_int(n) : log_a) - std::log1p(-rho);
  w_max = std::max(w_max, w0);

  // i = N term (weight exp(0)), then the rest of the idle counts.
  double sum = (0.0 >= w_max - kLogTailCutoff) ? std::exp(-w_max) : 0.0;
  double occupied = sum * std::min(1.0, n / k_slots);
  w = 0.0;
  for (int i = n - 1; i >= 1; --i) {
    w += log_a - log_int(n - i);
    if (w < w_max - kLogTailCutoff) continue;
    const double p = std::exp(w - w_max);
    sum += p;
    occupied += p * std::min(1.0, i / k_slots);
  }
  if (w0 >= w_max - kLogTailCutoff) sum += std::exp(w0 - w_max);

  return std::clamp(occupied / sum, 0.0, 1.0);
}

double parking_utilization_smooth(double arrival_rate, double service_rate, double n_drivers,
                                  double k_slots) {
  const double lo = std::floor(n_drivers);
  const double frac = n_drivers - lo;
  const double r_lo = parking_utilization(QueueConfig(arrival_rate, service_rate, lo), k_slots);
  if (frac == 0.0) return r_lo;
  const double r_hi =
      parking_utilization(QueueConfig(arrival_rate, service_rate, lo + 1.0), k_slots);
  return (1.0 - frac) * r_lo + frac * r_hi;
}

double utilization(const IdleDistribution& dist, double k_slots) {
  if (!(k_slots >= 0.0) || !std::isfinite(k_slots))
    throw DomainError("slot count must be finite and >= 0");
  if (k_slots == 0.0) return 1.0;
  double r = 0.0;
  for (int i = 1; i < dist.probs.size(); ++i) r += dist.probs[i] * std::min(1.0, i / k_slots);
  return std::clamp(r, 0.0, 1.0);
}

double waiting_time(double n_idle, double m_coeff) {
  if (!(n_idle > 0.0)) throw DomainError("waiting time undefined without idle capacity");
  return m_coeff / std::sqrt(n_idle);
}

double expected_idle(const QueueConfig& cfg) {
  return cfg.n_drivers - cfg.arrival_rate / cfg.service_rate;
}

}  // namespace parkhail::queueing
