#include "ssfkit/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssfkit/quadrature.hpp"

namespace ssfkit {

double PotentialPiece::value(double x) const {
  switch (shape) {
    case Shape::constant:
      return a;
    case Shape::gaussian:
      return a * std::exp(-x * x / (2 * b * b));
    case Shape::poschl_teller: {
      const double c = 1.0 / std::cosh(x / b);
      return -a / (b * b) * c * c;
    }
  }
  return 0;
}

Potential Potential::zero() { return Potential{}; }

Potential Potential::square_well(double depth, double halfwidth) {
  if (!(halfwidth > 0) || !std::isfinite(depth))
    throw InvalidArgument("square_well: halfwidth must be positive and depth finite");
  Potential p;
  p.kind_ = Kind::square_well;
  if (depth != 0) p.pieces_.push_back({-halfwidth, halfwidth, PotentialPiece::Shape::constant, -depth, 0});
  p.finalize();
  return p;
}

Potential Potential::gaussian(double amplitude, double sigma, double cutoff) {
  if (!(sigma > 0) || !(cutoff > 0) || !std::isfinite(amplitude))
    throw InvalidArgument("gaussian: sigma and cutoff must be positive");
  Potential p;
  p.kind_ = Kind::gaussian;
  if (amplitude != 0)
    p.pieces_.push_back({-cutoff, cutoff, PotentialPiece::Shape::gaussian, amplitude, sigma});
  p.finalize();
  return p;
}

Potential Potential::poschl_teller(double strength, double scale, double cutoff) {
  if (!(scale > 0) || !(cutoff > 0) || !std::isfinite(strength))
    throw InvalidArgument("poschl_teller: scale and cutoff must be positive");
  Potential p;
  p.kind_ = Kind::poschl_teller;
  const double coupling = strength * (strength + 1);
  if (coupling != 0)
    p.pieces_.push_back({-cutoff, cutoff, PotentialPiece::Shape::poschl_teller, coupling, scale});
  p.finalize();
  return p;
}

Potential Potential::piecewise_constant(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() + 1 || values.empty())
    throw InvalidArgument("piecewise_constant: need one more breakpoint than values");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw InvalidArgument("piecewise_constant: breakpoints must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("piecewise_constant: values must be finite");
  Potential p;
  p.kind_ = Kind::piecewise_constant;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0)
      p.pieces_.push_back({breakpoints[i], breakpoints[i + 1], PotentialPiece::Shape::constant, values[i], 0});
  p.finalize();
  return p;
}

void Potential::finalize() {
  support_ = 0;
  sup_abs_ = 0;
  for (const auto& piece : pieces_) {
    support_ = std::max({support_, std::abs(piece.lo), std::abs(piece.hi)});
    switch (piece.shape) {
      case PotentialPiece::Shape::constant:
        sup_abs_ = std::max(sup_abs_, std::abs(piece.a));
        break;
      case PotentialPiece::Shape::gaussian:
        sup_abs_ = std::max(sup_abs_, std::abs(piece.value(std::clamp(0.0, piece.lo, piece.hi))));
        break;
      case PotentialPiece::Shape::poschl_teller:
        sup_abs_ = std::max(sup_abs_, std::abs(piece.value(std::clamp(0.0, piece.lo, piece.hi))));
        break;
    }
  }
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::zero: os << "zero"; break;
    case Kind::square_well: os << "square_well"; break;
    case Kind::gaussian: os << "gaussian"; break;
    case Kind::poschl_teller: os << "poschl_teller"; break;
    case Kind::piecewise_constant: os << "piecewise_constant"; break;
  }
  os << "(support=" << support_ << ")";
  return os.str();
}

double Potential::operator()(double x) const {
  // interior points belong to exactly one piece; at a shared boundary the left piece wins
  for (const auto& piece : pieces_)
    if (x >= piece.lo && x <= piece.hi) return piece.value(x);
  return 0;
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> pts;
  for (const auto& piece : pieces_) {
    pts.push_back(piece.lo);
    pts.push_back(piece.hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

bool Potential::nonpositive() const {
  for (const auto& piece : pieces_)
    if (piece.value(0.5 * (piece.lo + piece.hi)) > 0) return false;
  return true;
}

bool Potential::nonnegative() const {
  for (const auto& piece : pieces_)
    if (piece.value(0.5 * (piece.lo + piece.hi)) < 0) return false;
  return true;
}

Potential Potential::truncated(double ell) const {
  Potential p;
  p.kind_ = kind_;
  for (auto piece : pieces_) {
    piece.lo = std::max(piece.lo, -ell);
    piece.hi = std::min(piece.hi, ell);
    if (piece.hi > piece.lo) p.pieces_.push_back(piece);
  }
  p.finalize();
  return p;
}

double negative_part_mass(const Potential& potential) {
  double mass = 0;
  for (const auto& piece : potential.pieces()) {
    auto negative = [&](double x) { return std::max(-piece.value(x), 0.0); };
    mass += integrate(negative, piece.lo, piece.hi, 1e-12).value;
  }
  return mass;
}

std::pair<double, double> factorize(const Potential& potential, double x) {
  const double value = potential(x);
  const double v = std::sqrt(std::abs(value));
  return {value < 0 ? -v : v, v};
}

}  // namespace ssfkit
