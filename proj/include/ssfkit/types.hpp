#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ssfkit {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Mat2 = Matrix2<double>;
using Vec2 = Vector2<double>;
using Mat2c = Matrix2<Complex>;
using Vec2c = Vector2<Complex>;

inline constexpr double pi = std::numbers::pi;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive integrator could not meet its tolerance at the minimum step.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// z is (numerically) a Dirichlet eigenvalue of the interval operator.
class DirichletEigenvalueHit : public Error {
 public:
  using Error::Error;
};

/// det K vanishes, i.e. z is (numerically) an eigenvalue of the coupled operator.
class KreinSingular : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the validity region of a closed form.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The transmission phase could not be continued unambiguously on the k-grid.
class BranchAmbiguity : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue bracketing failed to separate roots at the finest resolution.
class ScanResolutionError : public Error {
 public:
  using Error::Error;
};

/// A spectral quantity was requested beyond the computed horizon.
class HorizonExceeded : public Error {
 public:
  using Error::Error;
};

/// An unweighted pairing was requested against a test function without compact support.
class UnboundedPairing : public Error {
 public:
  using Error::Error;
};

/// Invalid potential or boundary data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ssfkit
