#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace parkhail {

// Invalid argument values (non-finite inputs, parameters outside their domain).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Queue is at or beyond saturation (occupancy >= 1); no stationary regime exists.
class InstabilityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A solver exhausted its iteration budget. Carries the last relative residuals
// of the three market constraints (arrivals, drivers, garage supply).
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::array<double, 3> residuals)
      : std::runtime_error(what), residuals(residuals) {}
  std::array<double, 3> residuals{};
};

// No market equilibrium exists at the requested prices (demand saturates
// capacity, or driver supply falls below one driver).
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Scenario file or command-line input could not be parsed or validated.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace parkhail
