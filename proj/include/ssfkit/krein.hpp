#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ssfkit/boundary.hpp"
#include "ssfkit/potential.hpp"
#include "ssfkit/transfer.hpp"
#include "ssfkit/types.hpp"

namespace ssfkit {

struct KreinMatrix {
  Mat2c entries;
  double z = 0;
  double ell = 0;
  Complex det;
};

/// Assembles the coefficient matrix from the boundary derivatives of the basis.
KreinMatrix krein_matrix(const BasisBoundaryValues& basis, const BoundaryData& bc, double z, double ell);
KreinMatrix krein_matrix(const Potential& potential, const BoundaryData& bc, double z, double ell);

struct FreeKreinMatrix {
  KreinMatrix matrix;
  /// p_R^(0)(k), the l -> infinity limit of det
  double limit_det = 0;
};

/// Closed form at V = 0, z = -k^2. Throws DomainError unless k > sqrt(1 + N_R).
FreeKreinMatrix krein_matrix_free(const BoundaryData& bc, double k, double ell);

/// Integral kernel of a resolvent on [-l, l]:
///   G(x, y) = G_D(x, y) + sum_{m,n} C_{mn} psi_m(x) psi_n(y),
/// with C = 0 for the Dirichlet operator.
class GreenKernel {
 public:
  enum class Kind { dirichlet, coupled };

  GreenKernel(std::shared_ptr<const BoundaryValueBasis> basis, Kind kind, Mat2c correction);

  Kind kind() const { return kind_; }
  double z() const { return basis_->z(); }
  double ell() const { return basis_->ell(); }
  const Mat2c& correction() const { return correction_; }
  const BoundaryValueBasis& basis() const { return *basis_; }

  Complex operator()(double x, double y) const;
  Complex dx(double x, double y) const;

 private:
  std::shared_ptr<const BoundaryValueBasis> basis_;
  Kind kind_;
  Mat2c correction_;
};

GreenKernel green_dirichlet(const Potential& potential, double z, double ell);

/// Dirichlet kernel plus the rank-two correction -K^{-1}. Throws KreinSingular
/// when |det K| is below 1e-12 of its scale.
GreenKernel green_coupled(const Potential& potential, const BoundaryData& bc, double z, double ell);
GreenKernel green_coupled(std::shared_ptr<const BoundaryValueBasis> basis, const BoundaryData& bc);

/// Coupled kernel by matching G_D + c_1 psi_1 + c_2 psi_2 to the boundary
/// condition directly, without the coefficient matrix.
GreenKernel green_coupled_direct(std::shared_ptr<const BoundaryValueBasis> basis, const BoundaryData& bc);

using Probe = std::function<double(double)>;

/// Default probe set on [-l, l].
std::vector<Probe> default_probes(double ell);

/// max over probes of ||(G_direct - G_D - P) f|| / ||f||, with P the rank-two
/// correction built from the coefficient matrix.
double krein_identity_residual(const Potential& potential, const BoundaryData& bc, double z, double ell,
                               const std::vector<Probe>& probes);

/// Same residual with the coefficient-matrix side taken from the V = 0 closed
/// forms at z = -k^2 and the direct side from numerical propagation.
double krein_identity_residual_free(const BoundaryData& bc, double k, double ell, const std::vector<Probe>& probes);

}  // namespace ssfkit
