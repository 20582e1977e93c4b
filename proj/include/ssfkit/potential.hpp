#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssfkit/types.hpp"

namespace ssfkit {

/// One smooth piece of a potential on [lo, hi]. Evaluation is the piece's own
/// formula at every x in the closed interval, so one-sided limits at
/// discontinuities come from the piece that owns the side.
struct PotentialPiece {
  enum class Shape { constant, gaussian, poschl_teller };
  double lo = 0, hi = 0;
  Shape shape = Shape::constant;
  double a = 0, b = 0;  // constant: value=a; gaussian: amplitude a, sigma b; poschl_teller: -a/b^2 sech^2(x/b)

  double value(double x) const;
};

/// Real, bounded, compactly supported potential. V vanishes outside the union of its pieces.
class Potential {
 public:
  enum class Kind { zero, square_well, gaussian, poschl_teller, piecewise_constant };

  Potential() = default;

  static Potential zero();
  /// V = -depth on [-halfwidth, halfwidth].
  static Potential square_well(double depth, double halfwidth);
  /// V = amplitude * exp(-x^2 / (2 sigma^2)) on [-cutoff, cutoff].
  static Potential gaussian(double amplitude, double sigma, double cutoff);
  /// V = -strength (strength + 1) / scale^2 * sech^2(x / scale) on [-cutoff, cutoff].
  static Potential poschl_teller(double strength, double scale, double cutoff);
  /// values[i] on [breakpoints[i], breakpoints[i+1]].
  static Potential piecewise_constant(std::vector<double> breakpoints, std::vector<double> values);

  Kind kind() const { return kind_; }
  std::string describe() const;

  double operator()(double x) const;

  /// smallest a with V = 0 outside [-a, a]
  double support_halfwidth() const { return support_; }
  /// the pieces, sorted, non-overlapping; empty for V = 0
  std::span<const PotentialPiece> pieces() const { return pieces_; }
  /// piece boundaries, sorted and unique
  std::vector<double> breakpoints() const;
  double sup_abs() const { return sup_abs_; }
  bool is_zero() const { return pieces_.empty(); }
  bool nonpositive() const;
  bool nonnegative() const;

  /// V restricted to (-ell, ell).
  Potential truncated(double ell) const;

 private:
  void finalize();

  Kind kind_ = Kind::zero;
  std::vector<PotentialPiece> pieces_;
  double support_ = 0;
  double sup_abs_ = 0;
};

/// M_V, the integral of the negative part of V.
double negative_part_mass(const Potential& potential);

/// u = sgn(V)|V|^{1/2}, v = |V|^{1/2}.
std::pair<double, double> factorize(const Potential& potential, double x);

}  // namespace ssfkit
