#pragma once

#include <stdexcept>
#include <string>

namespace kwising {

/// Raised when an exact enumeration or dense construction would exceed its size bound.
class SizeExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Raised when a numerical procedure fails to reach its tolerance or produces
/// a value that contradicts a proven bound (negative determinant, etc.).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature ran out of doublings. Carries the last two estimates.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double previous, double last)
      : NumericalError(what), previous_(previous), last_(last) {}

  double previous() const noexcept { return previous_; }
  double last() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

/// Derivative integrals requested inside the exclusion zone around a critical point.
class CriticalExclusion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kwising
