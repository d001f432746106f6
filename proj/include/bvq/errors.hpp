#pragma once

#include <stdexcept>
#include <string>

namespace bvq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// Explicit Euler assembly was requested with a diffusion number above 1/2.
class StabilityError : public Error {
 public:
  explicit StabilityError(double ratio)
      : Error("CFL condition violated: alpha*dt/(l*dy)^2 = " + std::to_string(ratio) + " > 0.5"),
        ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Matrix dimension is not a power of two; pad before decomposing.
class PaddingRequired : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// The right-hand side does not have the block structure the hand-crafted
/// preparation circuit assumes.
class StructureMismatch : public Error {
 public:
  using Error::Error;
};

/// A maps the ansatz state to (numerically) zero.
class DegenerateOperator : public Error {
 public:
  using Error::Error;
};

/// <phi_n|psi> vanishes, so the observable ratio is undefined.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bvq
