#pragma once

#include <span>

#include <memory>

#include "ssfkit/potential.hpp"
#include "ssfkit/propagate.hpp"
#include "ssfkit/types.hpp"

namespace ssfkit {

/// Map (y(-l), y'(-l)) -> (y(l), y'(l)) stored as mantissa * e^{log_scale}.
struct TransferMatrix {
  Mat2 mantissa;
  double log_scale = 0;
  double z = 0;
  double ell = 0;
  double log_abs_det = 0;
  int det_sign = 1;
  /// unwrapped angle atan2(y, y') at +l of the solution with data (0, 1) at -l
  double prufer_dirichlet = 0;

  /// overflows to inf when log_scale exceeds ~709
  Mat2 entries() const { return mantissa * std::exp(log_scale); }
  double determinant() const { return det_sign * std::exp(log_abs_det); }
  /// T12 / |(T12, T22)|: the Dirichlet characteristic function, scale-free
  double dirichlet_direction() const { return mantissa(0, 1) / mantissa.col(1).norm(); }
};

TransferMatrix transfer_matrix(const Potential& potential, double z, double ell,
                               PropagationOptions options = {});

/// psi_1 has (psi(-l), psi(l)) = (0, 1), psi_2 has (1, 0).
struct BasisBoundaryValues {
  double dpsi1_left = 0, dpsi1_right = 0;
  double dpsi2_left = 0, dpsi2_right = 0;
  double norm1 = 0, norm2 = 0;
};

/// The two boundary-value solutions on [-l, l] together with the Dirichlet
/// Green kernel they generate, G_D(x, y) = T12 psi_1(min) psi_2(max).
class BoundaryValueBasis {
 public:
  virtual ~BoundaryValueBasis() = default;

  virtual double z() const = 0;
  virtual double ell() const = 0;
  /// (psi_m(x), psi_m'(x)) for m = 1, 2
  virtual Vec2 psi(int m, double x) const = 0;
  virtual double dirichlet(double x, double y) const = 0;
  /// d/dx of dirichlet(x, y); at x == y the left limit
  virtual double dirichlet_dx(double x, double y) const = 0;
  /// psi' at both ends; norms left at zero
  virtual BasisBoundaryValues boundary_derivatives() const = 0;
  virtual double norm_sq(int m) const = 0;
  /// dirichlet(x_i, x_j) for all node pairs
  virtual Eigen::MatrixXd dirichlet_matrix(std::span<const double> nodes) const;

  BasisBoundaryValues boundary_values() const;
};

/// Basis for a general potential, obtained from a forward sweep of the
/// solution vanishing at -l and a backward sweep of the one vanishing at +l.
class NumericBasis final : public BoundaryValueBasis {
 public:
  /// Throws DirichletEigenvalueHit when z is a Dirichlet eigenvalue to 1e-12.
  NumericBasis(const Potential& potential, double z, double ell, double tolerance = 1e-11);

  double z() const override { return z_; }
  double ell() const override { return ell_; }
  Vec2 psi(int m, double x) const override;
  double dirichlet(double x, double y) const override;
  double dirichlet_dx(double x, double y) const override;
  Eigen::MatrixXd dirichlet_matrix(std::span<const double> nodes) const override;
  BasisBoundaryValues boundary_derivatives() const override;
  /// composite Gauss-Legendre quadrature of psi_m^2, panels refined until two orders agree to 1e-14
  double norm_sq(int m) const override;

 private:
  double z_, ell_;
  double scale_;  // sqrt(max(1, |z| + sup|V|)), the inverse panel width
  std::vector<double> cuts_;
  SolutionPath left_;   // data (0, 1) at -l
  SolutionPath right_;  // data (0, 1) at +l, swept to -l
};

/// Closed-form basis of V = 0 at z = -k^2.
class FreeBasis final : public BoundaryValueBasis {
 public:
  FreeBasis(double k, double ell);

  double z() const override { return -k_ * k_; }
  double ell() const override { return ell_; }
  double k() const { return k_; }
  Vec2 psi(int m, double x) const override;
  double dirichlet(double x, double y) const override;
  double dirichlet_dx(double x, double y) const override;
  BasisBoundaryValues boundary_derivatives() const override;
  double norm_sq(int m) const override;

 private:
  double k_, ell_;
  double denom_;  // 1 - e^{-4kl}
};

/// (tanh(kl) + coth(kl)) / (4k) + (l/4) (sech^2(kl) - csch^2(kl))
double free_basis_norm_sq(double k, double ell);

BasisBoundaryValues basis_solutions(const Potential& potential, double z, double ell);

}  // namespace ssfkit
