#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carbon {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user-supplied model, cap, terminal condition or configuration is ill-posed.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Query outside the sampled region of a grid. Callers must widen the grid.
class GridBoundsError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside a solve (CFL, non-finite values, quadrature).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::ptrdiff_t step = -1, int period = -1)
      : Error(what), step_(step), period_(period) {}

  std::ptrdiff_t step() const noexcept { return step_; }
  int period() const noexcept { return period_; }

 private:
  std::ptrdiff_t step_;
  int period_;
};

/// Malformed file or container.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace carbon
