#include "ssfkit/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssfkit {

BoundaryData::BoundaryData(double phi, const Mat2& R) : phi_(phi), R_(R) {
  if (!(phi >= 0.0 && phi < pi)) {
    std::ostringstream os;
    os << "boundary: phi = " << phi << " violates phi in [0, pi)";
    throw InvalidArgument(os.str());
  }
  if (!R.allFinite()) throw InvalidArgument("boundary: R has non-finite entries");
  const double det = R.determinant();
  if (std::abs(det - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "boundary: det R = " << det << " violates R in SL2(R)";
    throw InvalidArgument(os.str());
  }
  if (R(0, 1) == 0.0) throw InvalidArgument("boundary: R12 = 0 is excluded (R12 != 0 required)");
}

double coupling_norm(const BoundaryData& bc) {
  return (std::abs(bc.r11()) + std::abs(bc.r22()) + 2.0) / std::abs(bc.r12());
}

double free_limit_polynomial(const BoundaryData& bc, double k) {
  return k * k - (bc.r11() + bc.r22()) / bc.r12() * k + bc.r21() / bc.r12();
}

double free_limit_root(const BoundaryData& bc) {
  const double d = bc.r11() - bc.r22();
  return 0.5 * ((bc.r11() + bc.r22()) / bc.r12() + std::sqrt(d * d + 4.0) / std::abs(bc.r12()));
}

CouplingConstants bc_constants(const Potential& potential, const BoundaryData& bc) {
  CouplingConstants c;
  c.m_v = negative_part_mass(potential);
  c.n_r = coupling_norm(bc);
  c.k_r0 = free_limit_root(bc);
  c.k_r_max = std::max(c.k_r0, std::sqrt(1.0 + c.n_r));
  c.lower_bound_line = -c.m_v * (1.0 + c.m_v);
  c.lower_bound_interval = -(1.0 + c.m_v + c.n_r);
  return c;
}

}  // namespace ssfkit
