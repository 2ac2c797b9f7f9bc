#pragma once

#include <stdexcept>
#include <string>

namespace gpstlab {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field and ring arithmetic failures (non-invertible element, missing root).
class arith_error : public error {
 public:
  using error::error;
};

/// Group-law failures: cross-curve operations, off-curve points, singular curves.
class curve_error : public error {
 public:
  using error::error;
};

/// Raised when a kernel generator does not have the required order.
class isogeny_error : public error {
 public:
  using error::error;
};

/// Secret keys that do not generate a cyclic subgroup of maximal order.
class key_error : public error {
 public:
  using error::error;
};

/// Malformed or inconsistent parameter sets.
class param_error : public error {
 public:
  using error::error;
};

/// Diagnostics requested outside the range where they are defined.
class analysis_error : public error {
 public:
  using error::error;
};

}  // namespace gpstlab
