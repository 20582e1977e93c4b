#pragma once

#include <vector>

#include "ssfkit/potential.hpp"
#include "ssfkit/types.hpp"

namespace ssfkit {

/// Fundamental matrix of -y'' + V y = z y in growth-compensated form:
///
///   Y(x) = q * e^{log_growth} * [[1, rho], [0, e^{log_tau}]]
///
/// with q orthogonal. Column 0 of Y is "solution 0"; its direction is q.col(0),
/// its magnitude e^{log_growth}. Column 1 is carried relative to column 0, so
/// a recessive solution is never swamped by a dominant one.
struct Frame {
  double x = 0;
  Mat2 q = Mat2::Identity();
  double log_growth = 0;
  double rho = 0;
  double log_tau = 0;
  /// unwrapped angle atan2(y, y') of solution 0
  double prufer = 0;

  /// (y, y') of solution 0 divided by e^{log_growth}
  Vec2 first() const { return q.col(0); }
  /// (y, y') of solution 1 divided by e^{log_growth}
  Vec2 second() const { return q.col(0) * rho + q.col(1) * std::exp(log_tau); }
  /// Y(x) divided by e^{log_growth}
  Mat2 mantissa() const {
    Mat2 m;
    m.col(0) = first();
    m.col(1) = second();
    return m;
  }
  double log_abs_det() const { return 2 * log_growth + log_tau; }
  int det_sign() const { return q.determinant() > 0 ? 1 : -1; }
};

/// Frame at x whose two solutions have Cauchy data `data0` and `data1`.
Frame make_frame(double x, const Vec2& data0, const Vec2& data1);

struct PropagationOptions {
  /// local error tolerance per step on the normalized state
  double tolerance = 1e-11;
  /// keep steps short enough for the Prüfer angle to be unwrapped exactly
  bool track_prufer = true;
};

/// Integrates the Schrödinger equation at fixed real z through a potential.
///
/// Zero regions use the exact constant-coefficient propagator; pieces of the
/// potential are integrated by an adaptive Dormand-Prince 5(4) scheme whose
/// steps never cross a piece boundary. After every step the frame is
/// re-orthogonalized, which keeps magnitudes in `log_growth`.
class Propagator {
 public:
  Propagator(Potential potential, double z, PropagationOptions options = {});

  double z() const { return z_; }
  const Potential& potential() const { return potential_; }
  const PropagationOptions& options() const { return options_; }

  /// Moves `frame` to `x_end` (either direction). Every accepted step is
  /// appended to `checkpoints` when given.
  void advance(Frame& frame, double x_end, std::vector<Frame>* checkpoints = nullptr) const;

 private:
  void advance_free(Frame& frame, double x_end, std::vector<Frame>* checkpoints) const;
  void advance_piece(Frame& frame, const PotentialPiece& piece, double x_end,
                     std::vector<Frame>* checkpoints) const;

  Potential potential_;
  double z_;
  PropagationOptions options_;
};

/// Replaces frame.q by the QR factor of `propagated` (the image of frame.q
/// under a step propagator) and folds the triangular factor into the frame.
void absorb_step(Frame& frame, const Mat2& propagated);

/// Exact propagator of -y'' = z y over a signed length h.
Mat2 free_propagator(double z, double h);

/// Prüfer angle atan2(s y, y') minus atan2(y, y'); lies in (-pi/2, pi/2).
double prufer_rescale(const Vec2& state, double s);

/// Single solution sampled along a path: stores checkpoints from one sweep and
/// evaluates anywhere by a short propagation from the nearest checkpoint.
class SolutionPath {
 public:
  /// Propagates the solution with Cauchy data `data` at `x_start` to `x_end`.
  SolutionPath(const Propagator& propagator, double x_start, double x_end, const Vec2& data);

  struct Sample {
    Vec2 state;        ///< (y, y') divided by e^{log_scale}
    double log_scale;  ///< log magnitude
  };

  Sample at(double x) const;
  const Frame& start() const { return checkpoints_.front(); }
  const Frame& end() const { return end_; }
  double x_start() const { return x_start_; }
  double x_end() const { return x_end_; }

 private:
  Propagator propagator_;
  double x_start_, x_end_;
  std::vector<Frame> checkpoints_;  // sorted by x ascending
  Frame end_;
};

}  // namespace ssfkit
