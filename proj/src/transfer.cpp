#include "ssfkit/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssfkit/quadrature.hpp"

namespace ssfkit {

TransferMatrix transfer_matrix(const Potential& potential, double z, double ell, PropagationOptions options) {
  if (!(ell > 0)) throw InvalidArgument("transfer_matrix: ell must be positive");
  const Propagator propagator(potential, z, options);
  Frame frame = make_frame(-ell, Vec2(0, 1), Vec2(1, 0));
  propagator.advance(frame, ell);
  TransferMatrix t;
  t.mantissa.col(0) = frame.second();
  t.mantissa.col(1) = frame.first();
  t.log_scale = frame.log_growth;
  t.z = z;
  t.ell = ell;
  t.log_abs_det = frame.log_abs_det();
  t.det_sign = -frame.det_sign();
  t.prufer_dirichlet = frame.prufer;
  return t;
}

namespace {

std::vector<double> quadrature_cuts(const Potential& potential, double z, double ell) {
  std::vector<double> cuts;
  for (double p : potential.breakpoints())
    if (p > -ell && p < ell) cuts.push_back(p);
  const int panels = static_cast<int>(std::ceil(4 * ell));
  for (int i = 1; i < panels; ++i) cuts.push_back(-ell + 2 * ell * i / panels);
  if (z < 0) {
    // boundary layers of width 1/kappa at both ends
    const double kappa = std::sqrt(-z);
    for (double d = 0.25 / kappa; d < ell; d *= 2) {
      cuts.push_back(ell - d);
      cuts.push_back(-ell + d);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

SolutionPath sweep(const Potential& potential, double z, double from, double to, double tolerance) {
  return SolutionPath(Propagator(potential, z, PropagationOptions{tolerance, false}), from, to, Vec2(0, 1));
}

}  // namespace

NumericBasis::NumericBasis(const Potential& potential, double z, double ell, double tolerance)
    : z_(z),
      ell_(ell),
      scale_(std::sqrt(std::max(1.0, std::abs(z) + potential.sup_abs()))),
      cuts_(quadrature_cuts(potential, z, ell)),
      left_(sweep(potential, z, -ell, ell, tolerance)),
      right_(sweep(potential, z, ell, -ell, tolerance)) {
  const double d_left = left_.end().first()(0);
  const double d_right = right_.end().first()(0);
  if (std::abs(d_left) < 1e-12 || std::abs(d_right) < 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "basis: z = " << z << " is a Dirichlet eigenvalue on [-" << ell << ", " << ell
       << "] (characteristic function " << d_left << ")";
    throw DirichletEigenvalueHit(os.str());
  }
}

Vec2 NumericBasis::psi(int m, double x) const {
  const SolutionPath& path = (m == 1) ? left_ : right_;
  const auto sample = path.at(x);
  const Frame& end = path.end();
  return std::exp(sample.log_scale - end.log_growth) * sample.state / end.first()(0);
}

double NumericBasis::dirichlet(double x, double y) const {
  const double a = std::min(x, y), b = std::max(x, y);
  const auto sa = left_.at(a);
  const auto sb = right_.at(b);
  const Frame& end = right_.end();
  return std::exp(sa.log_scale + sb.log_scale - end.log_growth) * sa.state(0) * sb.state(0) / end.first()(0);
}

Eigen::MatrixXd NumericBasis::dirichlet_matrix(std::span<const double> nodes) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<SolutionPath::Sample> left(nodes.size()), right(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    left[i] = left_.at(nodes[i]);
    right[i] = right_.at(nodes[i]);
  }
  const Frame& end = right_.end();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool ordered = nodes[i] <= nodes[j];
      const auto& a = left[ordered ? i : j];
      const auto& b = right[ordered ? j : i];
      g(i, j) = std::exp(a.log_scale + b.log_scale - end.log_growth) * a.state(0) * b.state(0) / end.first()(0);
    }
  return g;
}

double NumericBasis::dirichlet_dx(double x, double y) const {
  const Frame& end = right_.end();
  if (x <= y) {
    const auto sa = left_.at(x);
    const auto sb = right_.at(y);
    return std::exp(sa.log_scale + sb.log_scale - end.log_growth) * sa.state(1) * sb.state(0) / end.first()(0);
  }
  const auto sa = left_.at(y);
  const auto sb = right_.at(x);
  return std::exp(sa.log_scale + sb.log_scale - end.log_growth) * sa.state(0) * sb.state(1) / end.first()(0);
}

double NumericBasis::norm_sq(int m) const {
  auto square = [&](double x) {
    const double v = psi(m, x)(0);
    return v * v;
  };
  // fixed rules, since an adaptive one chases the roundoff steps between checkpoints
  std::vector<double> edges{-ell_};
  edges.insert(edges.end(), cuts_.begin(), cuts_.end());
  edges.push_back(ell_);
  double width = 1 / scale_;
  double result = 0;
  for (int attempt = 0; attempt < 4; ++attempt, width /= 2) {
    std::vector<double> panels{edges.front()};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const int parts = std::max(1, static_cast<int>(std::ceil((edges[i + 1] - edges[i]) / width)));
      for (int j = 1; j <= parts; ++j) panels.push_back(edges[i] + (edges[i + 1] - edges[i]) * j / parts);
    }
    double fine = 0, coarse = 0;
    for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
      fine += gauss_legendre(24).integrate(square, panels[i], panels[i + 1]);
      coarse += gauss_legendre(16).integrate(square, panels[i], panels[i + 1]);
    }
    result = fine;
    if (std::abs(fine - coarse) <= 1e-14 * fine) break;
  }
  return result;
}

Eigen::MatrixXd BoundaryValueBasis::dirichlet_matrix(std::span<const double> nodes) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = g(j, i) = dirichlet(nodes[i], nodes[j]);
  return g;
}

BasisBoundaryValues BoundaryValueBasis::boundary_values() const {
  BasisBoundaryValues b = boundary_derivatives();
  b.norm1 = std::sqrt(norm_sq(1));
  b.norm2 = std::sqrt(norm_sq(2));
  return b;
}

BasisBoundaryValues NumericBasis::boundary_derivatives() const {
  const Frame& l = left_.end();
  const Frame& r = right_.end();
  BasisBoundaryValues b;
  b.dpsi1_left = std::exp(-l.log_growth) / l.first()(0);
  b.dpsi1_right = l.first()(1) / l.first()(0);
  b.dpsi2_right = std::exp(-r.log_growth) / r.first()(0);
  b.dpsi2_left = r.first()(1) / r.first()(0);
  return b;
}

FreeBasis::FreeBasis(double k, double ell) : k_(k), ell_(ell), denom_(-std::expm1(-4 * k * ell)) {
  if (!(k > 0) || !(ell > 0)) throw InvalidArgument("FreeBasis: k and ell must be positive");
}

Vec2 FreeBasis::psi(int m, double x) const {
  const double s = (m == 1) ? x : -x;
  const double decay = std::exp(-k_ * (ell_ - s));
  const double e = std::exp(-2 * k_ * (s + ell_));
  const double value = decay * (-std::expm1(-2 * k_ * (s + ell_))) / denom_;
  const double slope = k_ * decay * (1 + e) / denom_;
  return Vec2(value, m == 1 ? slope : -slope);
}

double FreeBasis::dirichlet(double x, double y) const {
  const double a = std::min(x, y), b = std::max(x, y);
  return std::exp(-k_ * (b - a)) * (-std::expm1(-2 * k_ * (ell_ + a))) * (-std::expm1(-2 * k_ * (ell_ - b))) /
         (2 * k_ * denom_);
}

double FreeBasis::dirichlet_dx(double x, double y) const {
  if (x <= y)
    return std::exp(-k_ * (y - x)) * (1 + std::exp(-2 * k_ * (ell_ + x))) * (-std::expm1(-2 * k_ * (ell_ - y))) /
           (2 * denom_);
  return -std::exp(-k_ * (x - y)) * (-std::expm1(-2 * k_ * (ell_ + y))) * (1 + std::exp(-2 * k_ * (ell_ - x))) /
         (2 * denom_);
}

BasisBoundaryValues FreeBasis::boundary_derivatives() const {
  const double coth2 = (1 + std::exp(-4 * k_ * ell_)) / denom_;
  const double csch2 = 2 * std::exp(-2 * k_ * ell_) / denom_;
  BasisBoundaryValues b;
  b.dpsi1_right = k_ * coth2;
  b.dpsi1_left = k_ * csch2;
  b.dpsi2_left = -k_ * coth2;
  b.dpsi2_right = -k_ * csch2;
  return b;
}

double FreeBasis::norm_sq(int) const { return free_basis_norm_sq(k_, ell_); }

double free_basis_norm_sq(double k, double ell) {
  const double t = std::tanh(k * ell);
  const double sech = 1 / std::cosh(k * ell);
  const double csch = 1 / std::sinh(k * ell);
  return (t + 1 / t) / (4 * k) + (ell / 4) * (sech * sech - csch * csch);
}

BasisBoundaryValues basis_solutions(const Potential& potential, double z, double ell) {
  return NumericBasis(potential, z, ell).boundary_values();
}

}  // namespace ssfkit
