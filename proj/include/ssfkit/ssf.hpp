#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssfkit/boundary.hpp"
#include "ssfkit/potential.hpp"
#include "ssfkit/scattering.hpp"
#include "ssfkit/spectrum.hpp"

namespace ssfkit {

/// Closed registry of test functions f(lambda).
struct TestFunction {
  enum class Kind { bump, gaussian, indicator, one };
  Kind kind = Kind::one;
  /// bump(a, b); gaussian(center a, sigma b, halfwidth c); indicator(a, b)
  double a = 0, b = 0, c = 0;

  static TestFunction bump(double lo, double hi);
  static TestFunction gaussian(double center, double sigma, double halfwidth);
  static TestFunction indicator(double lo, double hi);
  static TestFunction one();
  /// "bump(-1,9)", "gaussian(5,1,3)", "indicator(0,10)", "one"
  static TestFunction parse(std::string_view text);

  std::string name() const;
  double operator()(double lambda) const;
  bool compact() const { return kind != Kind::one; }
  double support_lo() const;
  double support_hi() const;
  /// points where f or a derivative jumps
  std::vector<double> breakpoints() const;
  double sup_abs() const { return 1.0; }
};

/// xi_l = N(free) - N(perturbed) for a pair of interval operators with the same
/// boundary condition; Dirichlet when no boundary data is given.
class SsfFinite {
 public:
  SsfFinite(const Potential& potential, std::optional<BoundaryData> bc, double ell, double lambda_max);

  int operator()(double lambda) const;
  const EigenvalueList& perturbed() const { return perturbed_; }
  const EigenvalueList& free() const { return free_; }
  double ell() const { return ell_; }
  double lambda_max() const { return perturbed_.lambda_max; }
  /// sorted union of both spectra
  const std::vector<double>& jumps() const { return jumps_; }
  /// max |xi_l| up to the horizon
  int sup_abs() const { return sup_abs_; }

 private:
  EigenvalueList perturbed_, free_;
  double ell_;
  std::vector<double> jumps_;
  int sup_abs_ = 0;
};

SsfFinite ssf_finite(const Potential& potential, const BoundaryData& bc, double ell, double lambda_max);

/// xi on the line: minus the bound-state count below 0, -arg t(sqrt(lambda))/pi above.
class SsfLine {
 public:
  explicit SsfLine(const Potential& potential, double k_min = 1e-4, double step = 0.05);

  double operator()(double lambda) const;
  const EigenvalueList& bound_states() const { return bound_states_; }
  const PhaseGrid& phase_grid() const { return grid_; }
  bool threshold_resonance() const { return resonance_; }
  /// xi(0+) - xi(0-), the first from the lowest grid point
  double levinson_jump() const;
  /// true unless the jump lies strictly between 0.01 and 0.49 or exceeds 0.51
  bool levinson_consistent() const;
  double sup_abs() const { return sup_abs_; }

 private:
  EigenvalueList bound_states_;
  PhaseGrid grid_;
  bool resonance_;
  double sup_abs_ = 0;
};

struct PairingResult {
  double value = 0;
  double quadrature_error = 0;
  double tail_bound = 0;
  double lambda_cutoff = 0;
};

/// Integral of xi f, divided by (1 + lambda^2) when weighted. f without compact
/// support is integrated up to lambda_max with an explicit tail bound.
PairingResult pairing(const SsfFinite& ssf, const TestFunction& f, bool weighted);
PairingResult pairing(const SsfLine& ssf, const TestFunction& f, bool weighted, double lambda_max);

struct TraceFormulaCheck {
  double lhs = 0;        ///< eigenvalue sums up to the horizon plus xi(L)/(L - z)
  double rhs = 0;        ///< -integral of xi/(lambda - z)^2 up to the horizon
  double residual = 0;   ///< |lhs - rhs| / |rhs|, 0 when both vanish
  double boundary_term = 0;
};

/// Requires z below -(1 + M_V + N_R).
TraceFormulaCheck trace_formula_residual(const Potential& potential, const BoundaryData& bc, double ell, double z,
                                         double lambda_max = 400);

}  // namespace ssfkit
