#include "ssfkit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ssfkit/krein.hpp"
#include "ssfkit/roots.hpp"
#include "ssfkit/transfer.hpp"

namespace ssfkit {

int EigenvalueList::total() const {
  int n = 0;
  for (int m : multiplicity) n += m;
  return n;
}

double EigenvalueList::lowest() const {
  if (values.empty()) throw InvalidArgument("EigenvalueList: empty");
  return values.front();
}

int counting(const EigenvalueList& eigs, double lambda) {
  if (lambda > eigs.lambda_max) {
    std::ostringstream os;
    os << "counting: lambda = " << lambda << " exceeds the horizon " << eigs.lambda_max;
    throw HorizonExceeded(os.str());
  }
  const auto end = std::upper_bound(eigs.values.begin(), eigs.values.end(), lambda);
  int n = 0;
  for (auto it = eigs.values.begin(); it != end; ++it) n += eigs.multiplicity[it - eigs.values.begin()];
  return n;
}

namespace {

int floor_count(double angle) { return static_cast<int>(std::floor(angle / pi)); }

// Splits [lo, hi] until every piece holds one eigenvalue, then refines it.
struct Isolator {
  std::function<int(double)> count;
  std::function<double(double, int)> residual;  // sign change across eigenvalue number n (1-based)
  int max_multiplicity = 1;
  EigenvalueList* out = nullptr;

  void run(double lo, double hi, int n_lo, int n_hi) {
    if (n_hi == n_lo) return;
    const double width = hi - lo;
    if (n_hi - n_lo == 1) {
      const int target = n_hi;
      auto f = [&](double x) { return residual(x, target); };
      const double root = brent_root(f, lo, hi, 1e-15 * std::max(1.0, std::abs(hi)));
      out->values.push_back(root);
      out->multiplicity.push_back(1);
      return;
    }
    if (width <= 1e-11 * std::max(1.0, std::abs(hi))) {
      if (n_hi - n_lo > max_multiplicity) {
        std::ostringstream os;
        os.precision(17);
        os << "spectrum: " << n_hi - n_lo << " eigenvalues inside [" << lo << ", " << hi
           << "] could not be separated";
        throw ScanResolutionError(os.str());
      }
      out->values.push_back(0.5 * (lo + hi));
      out->multiplicity.push_back(n_hi - n_lo);
      return;
    }
    const double mid = 0.5 * (lo + hi);
    const int n_mid = count(mid);
    if (n_mid < n_lo || n_mid > n_hi) {
      std::ostringstream os;
      os.precision(17);
      os << "spectrum: counting function not monotone near lambda = " << mid;
      throw NonConvergence(os.str());
    }
    run(lo, mid, n_lo, n_mid);
    run(mid, hi, n_mid, n_hi);
  }
};

double find_empty_floor(const std::function<int(double)>& count, double guess) {
  double lo = guess;
  for (int i = 0; i < 60 && count(lo) > 0; ++i) lo = 2 * lo - 1;
  if (count(lo) > 0) throw NonConvergence("spectrum: no eigenvalue-free lower bracket found");
  return lo;
}

EigenvalueList collect(const std::function<int(double)>& count, const std::function<double(double, int)>& residual,
                       double floor_guess, double lambda_max, int max_multiplicity) {
  EigenvalueList list;
  list.lambda_max = lambda_max;
  list.tolerance = 1e-9;
  const double lo = find_empty_floor(count, std::min(floor_guess, lambda_max - 1));
  const int n_top = count(lambda_max);
  Isolator iso{count, residual, max_multiplicity, &list};
  iso.run(lo, lambda_max, 0, n_top);
  return list;
}

// Krein matrix from the forward transfer matrix alone.
Mat2c krein_from_transfer(const TransferMatrix& t, const BoundaryData& bc) {
  const Mat2& m = t.mantissa;
  const double inv12 = std::exp(-t.log_scale) / m(0, 1);
  BasisBoundaryValues b;
  b.dpsi1_left = inv12;
  b.dpsi1_right = m(1, 1) / m(0, 1);
  b.dpsi2_left = -m(0, 0) / m(0, 1);
  b.dpsi2_right = -inv12;
  return krein_matrix(b, bc, t.z, t.ell).entries;
}

}  // namespace

int dirichlet_count(const Potential& potential, double ell, double lambda) {
  return floor_count(transfer_matrix(potential, lambda, ell).prufer_dirichlet);
}

int coupled_count(const Potential& potential, const BoundaryData& bc, double ell, double lambda) {
  TransferMatrix t = transfer_matrix(potential, lambda, ell);
  for (int i = 0; i < 8 && std::abs(t.dirichlet_direction()) < 1e-13; ++i) {
    // a Dirichlet eigenvalue is never a coupled one; step off it
    lambda += 1e-12 * std::max(1.0, std::abs(lambda));
    t = transfer_matrix(potential, lambda, ell);
  }
  const Mat2c k = krein_from_transfer(t, bc);
  const double det = k.determinant().real();
  const double trace = (k(0, 0) + k(1, 1)).real();
  int negative;
  if (det < 0)
    negative = 1;
  else if (det == 0)
    negative = trace < 0 ? 1 : 0;
  else
    negative = trace < 0 ? 2 : 0;
  return floor_count(t.prufer_dirichlet) + 2 - negative;
}

double coupled_characteristic(const Potential& potential, const BoundaryData& bc, double ell, double lambda) {
  const TransferMatrix t = transfer_matrix(potential, lambda, ell, PropagationOptions{1e-11, false});
  const Mat2& m = t.mantissa;
  const double trace = m(1, 1) * bc.r11() - m(0, 1) * bc.r21() - m(1, 0) * bc.r12() + m(0, 0) * bc.r22();
  return trace - 2 * std::cos(bc.phi()) * std::exp(-t.log_scale);
}

EigenvalueList eigenvalues_dirichlet(const Potential& potential, double ell, double lambda_max) {
  auto count = [&](double l) { return dirichlet_count(potential, ell, l); };
  auto residual = [&](double l, int n) { return transfer_matrix(potential, l, ell).prufer_dirichlet - n * pi; };
  return collect(count, residual, -potential.sup_abs() - 1, lambda_max, 1);
}

EigenvalueList eigenvalues_coupled(const Potential& potential, const BoundaryData& bc, double ell,
                                   double lambda_max) {
  auto count = [&](double l) { return coupled_count(potential, bc, ell, l); };
  auto residual = [&](double l, int) { return coupled_characteristic(potential, bc, ell, l); };
  const double floor_guess = bc_constants(potential, bc).lower_bound_interval - 1;
  return collect(count, residual, floor_guess, lambda_max, 2);
}

namespace {

struct LineSupport {
  double left, right;
};

LineSupport line_support(const Potential& potential) {
  const auto pieces = potential.pieces();
  return {pieces.front().lo, pieces.back().hi};
}

// frame of the solution decaying like e^{kappa x} on the left, moved across the support
Frame left_decaying(const Potential& potential, double lambda, bool track) {
  const auto [c, d] = line_support(potential);
  const double kappa = std::sqrt(std::max(-lambda, 0.0));
  const Propagator propagator(potential, lambda, PropagationOptions{1e-11, track});
  Frame frame = make_frame(c, Vec2(1, kappa), Vec2(0, 1));
  propagator.advance(frame, d);
  return frame;
}

constexpr double threshold_gap = 1e-12;

}  // namespace

int line_count(const Potential& potential, double lambda) {
  if (!(lambda < 0)) throw DomainError("line_count: lambda must be negative");
  if (potential.is_zero()) return 0;
  const Frame frame = left_decaying(potential, lambda, true);
  const double kappa = std::sqrt(-lambda);
  const double angle = frame.prufer + prufer_rescale(frame.first(), kappa);
  return static_cast<int>(std::floor((angle + pi / 4) / pi));
}

EigenvalueList bound_states_line(const Potential& potential) {
  EigenvalueList list;
  list.lambda_max = 0;
  list.tolerance = 1e-9;
  if (potential.is_zero() || potential.nonnegative()) return list;
  const double m_v = negative_part_mass(potential);
  const double top = -threshold_gap;
  auto count = [&](double l) { return line_count(potential, l); };
  auto residual = [&](double l, int) {
    const Frame frame = left_decaying(potential, l, false);
    const Vec2 s = frame.first();
    return s(1) + std::sqrt(-l) * s(0);
  };
  const double lo = find_empty_floor(count, -m_v * (1 + m_v) - 1);
  Isolator iso{count, residual, 1, &list};
  iso.run(lo, top, 0, count(top));
  return list;
}

bool threshold_resonance(const Potential& potential, double tolerance) {
  if (potential.is_zero()) return true;
  const Frame frame = left_decaying(potential, 0.0, false);
  return std::abs(frame.first()(1)) < tolerance;
}

}  // namespace ssfkit
