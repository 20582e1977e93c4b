#pragma once

#include <vector>

#include "ssfkit/potential.hpp"
#include "ssfkit/types.hpp"

namespace ssfkit {

struct ScatteringDatum {
  double k = 0;
  Complex t{1, 0};
  Complex r{0, 0};
  /// arg t on the branch continued from the high-energy end; principal value
  /// when the datum stands alone
  double phase = 0;
};

/// Transmission and reflection for a wave incident from the left at energy k^2.
ScatteringDatum jost_transmission(const Potential& potential, double k);

/// Continuous branch of arg t on a grid descending from k_max with spacing
/// step * max(1, k/2), refined wherever
/// neighbouring phases differ by more than pi/8. Throws BranchAmbiguity if a jump
/// above pi/2 survives refinement.
class PhaseGrid {
 public:
  PhaseGrid(const Potential& potential, double k_min, double k_max, double step = 0.05);

  /// data sorted by k ascending
  const std::vector<ScatteringDatum>& data() const { return data_; }
  double k_min() const { return data_.front().k; }
  double k_max() const { return data_.back().k; }

  /// arg t at k on the grid's branch (exact t, branch from the interpolated grid phase)
  double phase(double k) const;

 private:
  Potential potential_;
  std::vector<ScatteringDatum> data_;
};

/// 50 (1 + sqrt(M_V)), where the Born regime makes the phase small.
double phase_reference_k(const Potential& potential);

}  // namespace ssfkit
