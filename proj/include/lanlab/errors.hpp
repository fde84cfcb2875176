#ifndef LANLAB_ERRORS_HPP
#define LANLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lanlab {

/// Base class for all lanlab failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad argument value or dimension mismatch.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Model specification violates a structural hypothesis (e.g. volatility
/// not bounded away from zero).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Requested computation exceeds a hard resource budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Closed-form value unavailable; a path-based estimate is required.
class NeedsPathEstimate : public Error {
 public:
  using Error::Error;
};

/// The information-derivative matrix is numerically singular.
class S7Violation : public Error {
 public:
  using Error::Error;
};

/// Normal equations of the profiled likelihood are ill-conditioned.
class SingularNormalEquations : public Error {
 public:
  using Error::Error;
};

/// Profiled likelihood maximized on the bracket boundary.
class BoundaryMaximum : public Error {
 public:
  using Error::Error;
};

}  // namespace lanlab

#endif  // LANLAB_ERRORS_HPP
