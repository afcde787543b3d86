#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace merton {

enum class ErrorKind {
  range,           // sigma <= 0, sigma_tilde <= 0, alpha outside (0,1), bad argument
  beta_too_small,  // discount rate admits a divergent value function
  drift_condition, // drift ordering required for a finite free boundary fails
  out_of_range,    // policy query beyond the tabulated ratio domain
  no_bracket,      // shooting endpoints do not straddle the free boundary
  step_failure,    // ODE step controller collapsed
  non_finite,      // simulated state left (0, inf)
  truncation,      // z_max doubling check moved the free boundary
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Process exit status used by the CLI for each error kind (0 is success).
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Parameter / argument domain violations.
class DomainError : public Error {
public:
  using Error::Error;
};

class OutOfRange : public Error {
public:
  explicit OutOfRange(const std::string& what) : Error(ErrorKind::out_of_range, what) {}
};

class NoBracket : public Error {
public:
  explicit NoBracket(const std::string& what) : Error(ErrorKind::no_bracket, what) {}
};

class StepFailure : public Error {
public:
  explicit StepFailure(const std::string& what) : Error(ErrorKind::step_failure, what) {}
};

class NonFinite : public Error {
public:
  explicit NonFinite(const std::string& what) : Error(ErrorKind::non_finite, what) {}
};

} // namespace merton
