#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssfkit/boundary.hpp"
#include "ssfkit/potential.hpp"

namespace ssfkit {

/// Nyström matrix sqrt(w_i) a(x_i) G(x_i, y_j) b(y_j) sqrt(w_j) of a kernel
/// operator; singular values approximate those of the operator.
struct DiscretizedOperator {
  enum class Meaning { bs_line, bs_dirichlet, bs_coupled, half_left, half_right, difference };

  Eigen::MatrixXcd matrix;
  std::vector<double> row_nodes, row_weights;
  std::vector<double> col_nodes, col_weights;
  Meaning meaning = Meaning::bs_line;
  /// squared Hilbert-Schmidt norm of the part of the kernel outside the grid
  double hs_tail_sq = 0;
};

/// Free resolvent (H0 - z)^{-1} on the line or on [-l, l] with Dirichlet or coupled conditions.
struct ResolventKind {
  enum class Kind { line, dirichlet, coupled };
  Kind kind = Kind::line;
  std::optional<BoundaryData> bc;

  static ResolventKind line() { return {Kind::line, std::nullopt}; }
  static ResolventKind dirichlet() { return {Kind::dirichlet, std::nullopt}; }
  static ResolventKind coupled(const BoundaryData& bc) { return {Kind::coupled, bc}; }
  std::string name() const;
};

/// u (H0 - z)^{-1} v with Gauss-Legendre nodes on the support of V (truncated to
/// (-l, l) for interval kinds); about n nodes in total. Requires z < 0, n >= 16.
DiscretizedOperator discretize_bs(const Potential& potential, const ResolventKind& kind, double z, double ell, int n);

/// [u_l G_l v_l (+) 0] - u G_line v on the nodes of the full support.
DiscretizedOperator discretize_bs_difference(const Potential& potential, const ResolventKind& kind, double z,
                                             double ell, int n);

/// u_l G_l - u G_line (left) or G_l v_l - G_line v (right) as operators on L2(R);
/// the part of the kernel with |y| > l enters through hs_tail_sq.
DiscretizedOperator discretize_half_difference(const Potential& potential, const ResolventKind& kind, double z,
                                               double ell, int n, bool left);

/// p = 1 from singular values, p = 2 from the Frobenius norm plus the tail. With a
/// kink on the diagonal the Frobenius sum converges only at second order in the panel width.
double schatten_norm(const DiscretizedOperator& op, int p);

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m);

struct DiagnosticConfig {
  Potential potential;
  BoundaryData bc;
  /// interval half-length for the z -> -infinity series
  double ell = 2;
  /// spectral parameter for the l -> infinity series
  double z = -16;
  std::vector<double> k_list{2, 4, 8, 16, 32, 64};
  std::vector<double> ell_list{2, 4, 8, 16, 32};
  int n_start = 64;
  int n_max = 1024;
  double stability = 1e-8;
};

struct DiagnosticRow {
  std::string mode;
  std::string kind;     ///< resolvent kind, with a "half_left"/"half_right" suffix for factor norms
  double parameter = 0;  ///< k or l
  int p = 1;
  double norm = 0;
  int n_nodes = 0;
  double error_bound = 0;  ///< change of the norm under the last doubling of n
};

enum class DiagnosticMode { z_to_minus_infinity, ell_to_infinity };

std::vector<DiagnosticRow> diagnostic_series(const DiagnosticConfig& config, DiagnosticMode mode);

/// u_l (G_coupled - G_dirichlet) v_l, with the kernel difference evaluated directly
/// rather than by subtracting the two discretizations.
DiscretizedOperator discretize_bs_coupling(const Potential& potential, const BoundaryData& bc, double z, double ell,
                                           int n);

/// sigma_3 / sigma_1 of discretize_bs_coupling.
double rank_two_ratio(const Potential& potential, const BoundaryData& bc, double z, double ell, int n);

}  // namespace ssfkit
