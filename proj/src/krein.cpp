#include "ssfkit/krein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssfkit/quadrature.hpp"

namespace ssfkit {

KreinMatrix krein_matrix(const BasisBoundaryValues& basis, const BoundaryData& bc, double z, double ell) {
  const Complex mu = bc.phase();
  KreinMatrix k;
  k.z = z;
  k.ell = ell;
  k.entries(0, 0) = bc.r22() / bc.r12() - basis.dpsi1_right;
  k.entries(0, 1) = -mu / bc.r12() - basis.dpsi2_right;
  k.entries(1, 0) = -std::conj(mu) / bc.r12() + basis.dpsi1_left;
  k.entries(1, 1) = bc.r11() / bc.r12() + basis.dpsi2_left;
  k.det = k.entries.determinant();
  return k;
}

KreinMatrix krein_matrix(const Potential& potential, const BoundaryData& bc, double z, double ell) {
  return krein_matrix(NumericBasis(potential, z, ell).boundary_derivatives(), bc, z, ell);
}

FreeKreinMatrix krein_matrix_free(const BoundaryData& bc, double k, double ell) {
  const double threshold = std::sqrt(1 + coupling_norm(bc));
  if (!(k > threshold)) {
    std::ostringstream os;
    os << "krein_matrix_free: k = " << k << " must exceed sqrt(1 + N_R) = " << threshold;
    throw DomainError(os.str());
  }
  const double t = std::tanh(k * ell);
  const double diag = 0.5 * (1 / t + t);                                   // coth(2kl)
  const double off = 2 * std::exp(-2 * k * ell) / -std::expm1(-4 * k * ell);  // csch(2kl)
  const Complex mu = bc.phase();
  FreeKreinMatrix out;
  KreinMatrix& m = out.matrix;
  m.z = -k * k;
  m.ell = ell;
  m.entries(0, 0) = bc.r22() / bc.r12() - k * diag;
  m.entries(0, 1) = -mu / bc.r12() + k * off;
  m.entries(1, 0) = -std::conj(mu) / bc.r12() + k * off;
  m.entries(1, 1) = bc.r11() / bc.r12() - k * diag;
  m.det = m.entries.determinant();
  out.limit_det = free_limit_polynomial(bc, k);
  return out;
}

GreenKernel::GreenKernel(std::shared_ptr<const BoundaryValueBasis> basis, Kind kind, Mat2c correction)
    : basis_(std::move(basis)), kind_(kind), correction_(correction) {}

Complex GreenKernel::operator()(double x, double y) const {
  Complex g = basis_->dirichlet(x, y);
  if (kind_ == Kind::dirichlet) return g;
  const Vec2 px(basis_->psi(1, x)(0), basis_->psi(2, x)(0));
  const Vec2 py(basis_->psi(1, y)(0), basis_->psi(2, y)(0));
  return g + (px.cast<Complex>().transpose() * correction_ * py.cast<Complex>())(0, 0);
}

Complex GreenKernel::dx(double x, double y) const {
  Complex g = basis_->dirichlet_dx(x, y);
  if (kind_ == Kind::dirichlet) return g;
  const Vec2 px(basis_->psi(1, x)(1), basis_->psi(2, x)(1));
  const Vec2 py(basis_->psi(1, y)(0), basis_->psi(2, y)(0));
  return g + (px.cast<Complex>().transpose() * correction_ * py.cast<Complex>())(0, 0);
}

GreenKernel green_dirichlet(const Potential& potential, double z, double ell) {
  return GreenKernel(std::make_shared<NumericBasis>(potential, z, ell), GreenKernel::Kind::dirichlet,
                     Mat2c::Zero());
}

namespace {

void require_invertible(const Mat2c& m, const char* what, double z) {
  const double scale = (std::abs(m(0, 0)) + std::abs(m(0, 1))) * (std::abs(m(1, 0)) + std::abs(m(1, 1)));
  if (std::abs(m.determinant()) <= 1e-12 * scale) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": matrix is singular at z = " << z << " (z is a coupled eigenvalue)";
    throw KreinSingular(os.str());
  }
}

}  // namespace

GreenKernel green_coupled(std::shared_ptr<const BoundaryValueBasis> basis, const BoundaryData& bc) {
  const KreinMatrix k = krein_matrix(basis->boundary_derivatives(), bc, basis->z(), basis->ell());
  require_invertible(k.entries, "green_coupled", k.z);
  const Mat2c correction = -k.entries.inverse();
  return GreenKernel(std::move(basis), GreenKernel::Kind::coupled, correction);
}

GreenKernel green_coupled(const Potential& potential, const BoundaryData& bc, double z, double ell) {
  return green_coupled(std::make_shared<NumericBasis>(potential, z, ell), bc);
}

GreenKernel green_coupled_direct(std::shared_ptr<const BoundaryValueBasis> basis, const BoundaryData& bc) {
  // g = G_D(., y) + c_1 psi_1 + c_2 psi_2 with dG_D/dx(l, y) = -psi_1(y), dG_D/dx(-l, y) = psi_2(y)
  const BasisBoundaryValues b = basis->boundary_derivatives();
  const Complex mu = bc.phase();
  const double a = b.dpsi1_left, c = b.dpsi2_left;
  Mat2c lhs;
  lhs(0, 0) = 1.0 - mu * bc.r12() * a;
  lhs(0, 1) = -mu * bc.r11() - mu * bc.r12() * c;
  lhs(1, 0) = b.dpsi1_right - mu * bc.r22() * a;
  lhs(1, 1) = b.dpsi2_right - mu * bc.r21() - mu * bc.r22() * c;
  Mat2c rhs;
  rhs << 0.0, mu * bc.r12(), 1.0, mu * bc.r22();
  require_invertible(lhs, "green_coupled_direct", basis->z());
  const Mat2c correction = lhs.inverse() * rhs;
  return GreenKernel(std::move(basis), GreenKernel::Kind::coupled, correction);
}

std::vector<Probe> default_probes(double ell) {
  return {
      [](double) { return 1.0; },
      [ell](double x) { return x / ell; },
      [ell](double x) { return std::cos(pi * x / ell); },
      [](double x) { return std::exp(-x * x); },
      [ell](double x) { return x > 0.3 * ell ? 1.0 : 0.0; },
  };
}

namespace {

NodeSet residual_nodes(const Potential& potential, double ell) {
  std::vector<double> cuts{-ell, ell};
  for (double p : potential.breakpoints())
    if (p > -ell && p < ell) cuts.push_back(p);
  const int panels = static_cast<int>(std::ceil(2 * ell));
  for (int i = 1; i < panels; ++i) cuts.push_back(-ell + 2 * ell * i / panels);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return composite_nodes(cuts, 12);
}

struct BasisSamples {
  Eigen::MatrixX2d psi;      // psi_1, psi_2 at the nodes
  Eigen::MatrixXd dirichlet;  // G_D at node pairs
};

BasisSamples sample(const BoundaryValueBasis& basis, const NodeSet& set) {
  const Eigen::Index n = static_cast<Eigen::Index>(set.nodes.size());
  BasisSamples s{Eigen::MatrixX2d(n, 2), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    s.psi(i, 0) = basis.psi(1, set.nodes[i])(0);
    s.psi(i, 1) = basis.psi(2, set.nodes[i])(0);
  }
  s.dirichlet = basis.dirichlet_matrix(set.nodes);
  return s;
}

double max_probe_norm(const Eigen::MatrixXcd& kernel, const NodeSet& set, const std::vector<Probe>& probes) {
  const Eigen::Index n = kernel.rows();
  const Eigen::Map<const Eigen::VectorXd> w(set.weights.data(), n);
  double worst = 0;
  for (const auto& f : probes) {
    Eigen::VectorXd fv(n);
    for (Eigen::Index j = 0; j < n; ++j) fv(j) = f(set.nodes[j]);
    const double fnorm = std::sqrt((w.array() * fv.array().square()).sum());
    if (fnorm == 0) continue;
    const Eigen::VectorXcd image = kernel * (w.array() * fv.array()).matrix().cast<Complex>();
    const double inorm = std::sqrt((w.array() * image.array().abs2()).sum());
    worst = std::max(worst, inorm / fnorm);
  }
  return worst;
}

Eigen::MatrixXcd rank_two(const Eigen::MatrixX2d& psi, const Mat2c& c) {
  return psi.cast<Complex>() * c * psi.transpose().cast<Complex>();
}

}  // namespace

double krein_identity_residual(const Potential& potential, const BoundaryData& bc, double z, double ell,
                               const std::vector<Probe>& probes) {
  auto basis = std::make_shared<NumericBasis>(potential, z, ell);
  const GreenKernel krein = green_coupled(basis, bc);
  const GreenKernel direct = green_coupled_direct(basis, bc);
  const NodeSet set = residual_nodes(potential, ell);
  const BasisSamples s = sample(*basis, set);
  const Eigen::MatrixXcd g_dirichlet = s.dirichlet.cast<Complex>();
  const Eigen::MatrixXcd g_direct = g_dirichlet + rank_two(s.psi, direct.correction());
  const Eigen::MatrixXcd p = rank_two(s.psi, krein.correction());
  return max_probe_norm(g_direct - g_dirichlet - p, set, probes);
}

double krein_identity_residual_free(const BoundaryData& bc, double k, double ell, const std::vector<Probe>& probes) {
  const Potential zero = Potential::zero();
  auto numeric = std::make_shared<NumericBasis>(zero, -k * k, ell);
  auto closed = std::make_shared<FreeBasis>(k, ell);
  const GreenKernel direct = green_coupled_direct(numeric, bc);
  const KreinMatrix k0 = krein_matrix_free(bc, k, ell).matrix;
  require_invertible(k0.entries, "krein_identity_residual_free", k0.z);
  const Mat2c correction = -k0.entries.inverse();

  const NodeSet set = residual_nodes(zero, ell);
  const BasisSamples sn = sample(*numeric, set);
  const BasisSamples sc = sample(*closed, set);
  const Eigen::MatrixXcd g_direct = sn.dirichlet.cast<Complex>() + rank_two(sn.psi, direct.correction());
  const Eigen::MatrixXcd p = rank_two(sc.psi, correction);
  return max_probe_norm(g_direct - sc.dirichlet.cast<Complex>() - p, set, probes);
}

}  // namespace ssfkit
