#pragma once

#include <vector>

#include "ssfkit/boundary.hpp"
#include "ssfkit/potential.hpp"
#include "ssfkit/types.hpp"

namespace ssfkit {

/// Eigenvalues up to a completeness horizon, each with its multiplicity.
struct EigenvalueList {
  std::vector<double> values;
  std::vector<int> multiplicity;
  double lambda_max = 0;
  /// absolute accuracy of every value
  double tolerance = 0;

  std::size_t size() const { return values.size(); }
  int total() const;
  double lowest() const;
};

/// Number of Dirichlet eigenvalues <= lambda, from the Prüfer angle.
int dirichlet_count(const Potential& potential, double ell, double lambda);

/// Number of coupled eigenvalues <= lambda: N_D(lambda) + 2 - n_-(K(lambda)),
/// where n_- counts negative eigenvalues of the (Hermitian) coefficient matrix.
int coupled_count(const Potential& potential, const BoundaryData& bc, double ell, double lambda);

/// tr(adj(T) R) - 2 cos(phi), divided by the positive growth factor of T.
double coupled_characteristic(const Potential& potential, const BoundaryData& bc, double ell, double lambda);

EigenvalueList eigenvalues_dirichlet(const Potential& potential, double ell, double lambda_max);
EigenvalueList eigenvalues_coupled(const Potential& potential, const BoundaryData& bc, double ell,
                                   double lambda_max);

/// Eigenvalues <= lambda, with multiplicity. Throws HorizonExceeded past lambda_max.
int counting(const EigenvalueList& eigs, double lambda);

/// Number of negative eigenvalues <= lambda < 0 of the operator on the line.
int line_count(const Potential& potential, double lambda);

/// Negative eigenvalues of the operator on the line; lambda_max is 0.
EigenvalueList bound_states_line(const Potential& potential);

/// True when the zero-energy solution decaying on the left is bounded on the right.
bool threshold_resonance(const Potential& potential, double tolerance = 1e-8);

}  // namespace ssfkit
