#pragma once
#include <stdexcept>
#include <string>

namespace edsense {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical procedure (quadrature, root bracketing) did not meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partial-fraction coefficients are not representable (overflow / NaN).
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario or configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem too large for exact enumeration.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace edsense
