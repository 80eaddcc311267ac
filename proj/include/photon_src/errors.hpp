#pragma once

#include <stdexcept>
#include <string>

namespace photon_src {

/// Invalid or inconsistent physical parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid call arguments (time ordering, grids, ranges).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix or denominator that must be inverted is numerically singular.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ODE integrator could not continue (step underflow, non-finite state).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A threshold (e.g. the emission-time level) is not reached inside the pulse window.
class NotReachedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace photon_src
