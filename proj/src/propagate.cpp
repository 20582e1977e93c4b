#include "ssfkit/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssfkit {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, 2 * pi);
  return a;
}

double raw_angle(const Vec2& s) { return std::atan2(s(0), s(1)); }

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Frame make_frame(double x, const Vec2& data0, const Vec2& data1) {
  Frame f;
  f.x = x;
  Mat2 b;
  b.col(0) = data0;
  b.col(1) = data1;
  if (std::abs(b.determinant()) == 0.0) throw InvalidArgument("make_frame: dependent initial data");
  absorb_step(f, b);
  f.prufer = raw_angle(data0);
  return f;
}

void absorb_step(Frame& frame, const Mat2& propagated) {
  const double a0 = propagated.col(0).norm();
  const Vec2 q0 = propagated.col(0) / a0;
  const double a01 = q0.dot(propagated.col(1));
  const Vec2 w = propagated.col(1) - a01 * q0;
  const double a11 = w.norm();
  frame.q.col(0) = q0;
  frame.q.col(1) = w / a11;
  frame.rho += a01 / a0 * std::exp(frame.log_tau);
  const double log_a0 = std::log(a0);
  frame.log_growth += log_a0;
  frame.log_tau += std::log(a11) - log_a0;
}

Mat2 free_propagator(double z, double h) {
  Mat2 m;
  if (z < 0) {
    const double kappa = std::sqrt(-z);
    const double c = std::cosh(kappa * h), s = std::sinh(kappa * h);
    m << c, s / kappa, kappa * s, c;
  } else if (z > 0) {
    const double k = std::sqrt(z);
    const double c = std::cos(k * h), s = std::sin(k * h);
    m << c, s / k, -k * s, c;
  } else {
    m << 1, h, 0, 1;
  }
  return m;
}

double prufer_rescale(const Vec2& state, double s) {
  return std::atan2(s * state(0), state(1)) - std::atan2(state(0), state(1));
}

Propagator::Propagator(Potential potential, double z, PropagationOptions options)
    : potential_(std::move(potential)), z_(z), options_(options) {}

void Propagator::advance(Frame& frame, double x_end, std::vector<Frame>* checkpoints) const {
  const auto pieces = potential_.pieces();
  while (frame.x != x_end) {
    const double x = frame.x;
    const bool forward = x_end > x;
    const PotentialPiece* active = nullptr;
    double target = x_end;
    if (forward) {
      for (const auto& p : pieces) {
        if (x >= p.lo && x < p.hi) {
          active = &p;
          target = std::min(p.hi, x_end);
          break;
        }
        if (p.lo > x) {
          target = std::min(p.lo, x_end);
          break;
        }
      }
    } else {
      for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
        const auto& p = *it;
        if (x > p.lo && x <= p.hi) {
          active = &p;
          target = std::max(p.lo, x_end);
          break;
        }
        if (p.hi < x) {
          target = std::max(p.hi, x_end);
          break;
        }
      }
    }
    if (active)
      advance_piece(frame, *active, target, checkpoints);
    else
      advance_free(frame, target, checkpoints);
    frame.x = target;
  }
}

void Propagator::advance_free(Frame& frame, double x_end, std::vector<Frame>* checkpoints) const {
  const double total = x_end - frame.x;
  if (z_ > 0) {
    const double k = std::sqrt(z_);
    const double before = prufer_rescale(frame.first(), k);
    absorb_step(frame, free_propagator(z_, total) * frame.q);
    const double after = prufer_rescale(frame.first(), k);
    frame.prufer += before + k * total - after;
    frame.x = x_end;
    if (checkpoints) checkpoints->push_back(frame);
    return;
  }
  const double kappa = std::sqrt(-z_);
  const int steps = std::max(1, static_cast<int>(std::ceil(kappa * std::abs(total))));
  const double h = total / steps;
  const Mat2 step = free_propagator(z_, h);
  const double x0 = frame.x;
  for (int i = 0; i < steps; ++i) {
    const double before = raw_angle(frame.first());
    absorb_step(frame, step * frame.q);
    // at most one zero in a non-oscillatory region: the angle moves by less than pi
    frame.prufer += wrap_angle(raw_angle(frame.first()) - before);
    frame.x = (i + 1 == steps) ? x_end : x0 + (i + 1) * h;
    if (checkpoints) checkpoints->push_back(frame);
  }
}

void Propagator::advance_piece(Frame& frame, const PotentialPiece& piece, double x_end,
                               std::vector<Frame>* checkpoints) const {
  const double direction = x_end > frame.x ? 1.0 : -1.0;
  const double rate = std::max(1.0, std::abs(z_) + potential_.sup_abs());
  // the angle derivative is bounded by max(1, |V - z|)
  const double h_limit = options_.track_prufer ? (pi / 4) / rate : std::abs(x_end - frame.x);
  double h_abs = std::min(0.05 / std::sqrt(rate), h_limit);
  const double tol = options_.tolerance;

  auto rhs = [&](double x, const Mat2& y) {
    Mat2 d;
    const double c = piece.value(x) - z_;
    d.row(0) = y.row(1);
    d.row(1) = c * y.row(0);
    return d;
  };

  while (frame.x != x_end) {
    const double remaining = std::abs(x_end - frame.x);
    bool last = false;
    if (h_abs >= remaining * (1 - 1e-12)) {
      h_abs = remaining;
      last = true;
    }
    const double h = direction * h_abs;
    const double x = frame.x;
    const Mat2& y = frame.q;
    const Mat2 k1 = rhs(x, y);
    const Mat2 k2 = rhs(x + c2 * h, y + h * (a21 * k1));
    const Mat2 k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Mat2 k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Mat2 k5 = rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Mat2 k6 = rhs(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Mat2 y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Mat2 k7 = rhs(x + h, y_new);
    const Mat2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double ratio = err.cwiseAbs().maxCoeff() / tol;

    if (ratio <= 1.0) {
      const double before = raw_angle(frame.first());
      const Vec2 first_new = y_new.col(0);
      frame.prufer += wrap_angle(raw_angle(first_new) - before);
      absorb_step(frame, y_new);
      frame.x = last ? x_end : x + h;
      if (checkpoints) checkpoints->push_back(frame);
      const double grow = ratio > 0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
      h_abs = std::min(h_abs * std::clamp(grow, 0.2, 5.0), h_limit);
    } else {
      h_abs *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.9);
      if (h_abs < 1e-14 * (1.0 + std::abs(x))) {
        std::ostringstream os;
        os << "propagator: tolerance " << tol << " not met at minimum step near x = " << x
           << " (z = " << z_ << ")";
        throw NonConvergence(os.str());
      }
    }
  }
}

SolutionPath::SolutionPath(const Propagator& propagator, double x_start, double x_end, const Vec2& data)
    : propagator_(propagator.potential(), propagator.z(),
                  PropagationOptions{propagator.options().tolerance, false}),
      x_start_(x_start),
      x_end_(x_end) {
  Frame frame = make_frame(x_start, data, Vec2(-data(1), data(0)));
  checkpoints_.push_back(frame);
  propagator_.advance(frame, x_end, &checkpoints_);
  end_ = frame;
  std::sort(checkpoints_.begin(), checkpoints_.end(),
            [](const Frame& a, const Frame& b) { return a.x < b.x; });
}

SolutionPath::Sample SolutionPath::at(double x) const {
  auto it = std::lower_bound(checkpoints_.begin(), checkpoints_.end(), x,
                             [](const Frame& f, double v) { return f.x < v; });
  const Frame* nearest;
  if (it == checkpoints_.end())
    nearest = &checkpoints_.back();
  else if (it == checkpoints_.begin())
    nearest = &*it;
  else
    nearest = (std::abs(it->x - x) < std::abs(std::prev(it)->x - x)) ? &*it : &*std::prev(it);
  Frame frame = *nearest;
  if (frame.x != x) propagator_.advance(frame, x);
  return {frame.first(), frame.log_growth};
}

}  // namespace ssfkit
