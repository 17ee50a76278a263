#pragma once

#include <stdexcept>
#include <string>

namespace ibiq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Probe outside a sampled field, or FD stencil leaving it.
struct DomainError : Error { using Error::Error; };
// Tube half-width or offset beyond the reach bound.
struct ValidityError : Error { using Error::Error; };
// Kernel evaluated at coincident points, or on the singular line.
struct SingularityError : Error { using Error::Error; };
// Closest point not unique (medial axis).
struct AmbiguityError : Error { using Error::Error; };
struct DegenerateFrameError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct EmptyTubeError : Error { using Error::Error; };

struct ConvergenceError : Error {
  double residual;
  ConvergenceError(const std::string& what, double res) : Error(what), residual(res) {}
};

}  // namespace ibiq
