#include "ssfkit/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssfkit/propagate.hpp"

namespace ssfkit {

ScatteringDatum jost_transmission(const Potential& potential, double k) {
  if (!(k > 0)) throw DomainError("jost_transmission: k must be positive");
  ScatteringDatum datum;
  datum.k = k;
  if (potential.is_zero()) return datum;
  const auto pieces = potential.pieces();
  const double c = pieces.front().lo, d = pieces.back().hi;

  const Propagator propagator(potential, k * k, PropagationOptions{1e-11, false});
  Frame frame = make_frame(c, Vec2(1, 0), Vec2(0, 1));
  propagator.advance(frame, d);
  const Mat2 transfer = frame.mantissa() * std::exp(frame.log_growth);

  // outgoing wave e^{ikx} on the right, carried back to x = c
  const Complex ik(0, k);
  const Complex right = std::exp(ik * d);
  const Vec2c at_c = transfer.inverse().cast<Complex>() * Vec2c(right, ik * right);
  const Complex a = (at_c(0) + at_c(1) / ik) * std::exp(-ik * c) / 2.0;
  const Complex b = (at_c(0) - at_c(1) / ik) * std::exp(ik * c) / 2.0;
  datum.t = 1.0 / a;
  datum.r = b / a;
  datum.phase = std::arg(datum.t);
  return datum;
}

double phase_reference_k(const Potential& potential) {
  return 50 * (1 + std::sqrt(negative_part_mass(potential)));
}

namespace {

constexpr double refine_jump = pi / 8;
constexpr double ambiguous_jump = pi / 2;

double continue_branch(double reference, const Complex& t) {
  return reference + std::remainder(std::arg(t) - reference, 2 * pi);
}

// Appends data strictly below `upper.k` down to and including k_lo.
void descend(const Potential& potential, const ScatteringDatum& upper, double k_lo,
             std::vector<ScatteringDatum>& out) {
  ScatteringDatum lower = jost_transmission(potential, k_lo);
  lower.phase = continue_branch(upper.phase, lower.t);
  const double jump = std::abs(lower.phase - upper.phase);
  if (jump > refine_jump) {
    const double width = upper.k - k_lo;
    if (width < 1e-10 * upper.k) {
      if (jump > ambiguous_jump) {
        std::ostringstream os;
        os.precision(17);
        os << "phase grid: jump " << jump << " near k = " << k_lo << " survives refinement";
        throw BranchAmbiguity(os.str());
      }
    } else {
      const double mid = 0.5 * (upper.k + k_lo);
      descend(potential, upper, mid, out);
      const ScatteringDatum middle = out.back();
      descend(potential, middle, k_lo, out);
      return;
    }
  }
  out.push_back(lower);
}

}  // namespace

PhaseGrid::PhaseGrid(const Potential& potential, double k_min, double k_max, double step)
    : potential_(potential) {
  if (!(k_min > 0) || !(k_max > k_min) || !(step > 0)) throw InvalidArgument("PhaseGrid: need 0 < k_min < k_max");
  ScatteringDatum top = jost_transmission(potential, k_max);
  std::vector<ScatteringDatum> descending{top};
  // the phase varies on the scale 1/k at high energy, so the spacing grows with k
  double k = k_max;
  while (k > k_min) {
    k = std::max(k_min, k - step * std::max(1.0, 0.5 * k));
    const ScatteringDatum upper = descending.back();
    descend(potential, upper, k, descending);
  }
  data_.assign(descending.rbegin(), descending.rend());
}

double PhaseGrid::phase(double k) const {
  const Complex t = jost_transmission(potential_, k).t;
  if (k >= k_max()) return continue_branch(data_.back().phase, t);
  if (k <= k_min()) return continue_branch(data_.front().phase, t);
  auto it = std::lower_bound(data_.begin(), data_.end(), k,
                             [](const ScatteringDatum& d, double v) { return d.k < v; });
  const ScatteringDatum& hi = *it;
  const ScatteringDatum& lo = *std::prev(it);
  const double s = (k - lo.k) / (hi.k - lo.k);
  return continue_branch(lo.phase + s * (hi.phase - lo.phase), t);
}

}  // namespace ssfkit
