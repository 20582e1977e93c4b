#pragma once

#include "ssfkit/potential.hpp"
#include "ssfkit/types.hpp"

namespace ssfkit {

/// Coupled boundary condition (y(l), y'(l)) = e^{i phi} R (y(-l), y'(-l)).
/// Construction validates phi in [0, pi), det R = 1 within 1e-12 and R(0,1) != 0.
class BoundaryData {
 public:
  BoundaryData(double phi, const Mat2& R);

  double phi() const { return phi_; }
  const Mat2& R() const { return R_; }
  Complex phase() const { return std::polar(1.0, phi_); }

  double r11() const { return R_(0, 0); }
  double r12() const { return R_(0, 1); }
  double r21() const { return R_(1, 0); }
  double r22() const { return R_(1, 1); }

 private:
  double phi_;
  Mat2 R_;
};

struct CouplingConstants {
  double m_v = 0;                   ///< integral of V_-
  double n_r = 0;                   ///< (|R11| + |R22| + 2) / |R12|
  double k_r0 = 0;                  ///< largest root of p_R^(0)
  double k_r_max = 0;               ///< max{k_r0, sqrt(1 + n_r)}
  double lower_bound_line = 0;      ///< -M_V (1 + M_V)
  double lower_bound_interval = 0;  ///< -(1 + M_V + N_R)
};

double coupling_norm(const BoundaryData& bc);

/// p_R^(0)(k) = k^2 - (R11 + R22)/R12 k + R21/R12
double free_limit_polynomial(const BoundaryData& bc, double k);

/// Largest root of free_limit_polynomial, in closed form.
double free_limit_root(const BoundaryData& bc);

CouplingConstants bc_constants(const Potential& potential, const BoundaryData& bc);

}  // namespace ssfkit
