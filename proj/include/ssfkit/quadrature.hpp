#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "ssfkit/types.hpp"

namespace ssfkit {

/// Gauss-Legendre rule on [-1, 1], nodes found by Newton iteration on P_n.
template <typename Scalar>
class GaussLegendre {
 public:
  explicit GaussLegendre(int n) : nodes_(n), weights_(n) {
    if (n < 1) throw InvalidArgument("GaussLegendre: n must be positive");
    using std::abs;
    using std::cos;
    const int half = (n + 1) / 2;
    // P_n(x) and P_n'(x) by the three-term recurrence
    auto legendre = [n](Scalar x) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      return std::pair{p1, Scalar(n) * (x * p1 - p0) / (x * x - 1)};
    };
    for (int i = 0; i < half; ++i) {
      Scalar x = cos(Scalar(pi) * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
      for (int iter = 0; iter < 100; ++iter) {
        const auto [p, dp] = legendre(x);
        const Scalar dx = p / dp;
        x -= dx;
        if (abs(dx) < Scalar(1e-16)) break;
      }
      const Scalar dp = legendre(x).second;
      const Scalar w = 2 / ((1 - x * x) * dp * dp);
      nodes_[i] = -x;
      nodes_[n - 1 - i] = x;
      weights_[i] = w;
      weights_[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes_[n / 2] = 0;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  std::span<const Scalar> nodes() const { return nodes_; }
  std::span<const Scalar> weights() const { return weights_; }

  /// Maps the rule to [a, b] and sums f.
  template <typename F>
  auto integrate(F&& f, Scalar a, Scalar b) const {
    const Scalar mid = (a + b) / 2, half = (b - a) / 2;
    decltype(f(mid)) sum{};
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return sum * half;
  }

 private:
  std::vector<Scalar> nodes_;
  std::vector<Scalar> weights_;
};

/// Cached double-precision rule of order n.
inline const GaussLegendre<double>& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, GaussLegendre<double>(n)).first;
  return it->second;
}

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0;
};

namespace detail {

template <typename F, typename T>
void adapt(F& f, double a, double b, T whole, double tol, int depth, QuadratureResult<T>& out) {
  const auto& rule = gauss_legendre(15);
  const double mid = 0.5 * (a + b);
  const T left = rule.integrate(f, a, mid);
  const T right = rule.integrate(f, mid, b);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth <= 0 || (b - a) < 1e-13 * (1 + std::abs(a))) {
    out.value += left + right;
    out.error += diff;
    return;
  }
  adapt(f, a, mid, left, 0.5 * tol, depth - 1, out);
  adapt(f, mid, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Composite adaptive Gauss-Legendre quadrature of f on [a, b].
/// Breakpoints inside (a, b) become panel boundaries; the absolute tolerance is
/// distributed over panels in proportion to their length.
template <typename F>
auto integrate(F&& f, double a, double b, double abs_tol = 1e-10,
               std::span<const double> breakpoints = {}, int max_depth = 30) {
  using T = decltype(f(a));
  QuadratureResult<T> out;
  if (!(b > a)) return out;
  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto& rule = gauss_legendre(15);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double tol = abs_tol * (hi - lo) / (b - a);
    detail::adapt(f, lo, hi, rule.integrate(f, lo, hi), tol, max_depth, out);
  }
  return out;
}

/// Composite Gauss-Legendre nodes and weights: `per_panel` nodes on each panel
/// between consecutive cut points.
struct NodeSet {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline NodeSet composite_nodes(std::span<const double> cuts, int per_panel) {
  NodeSet set;
  const auto& rule = gauss_legendre(per_panel);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]), half = 0.5 * (cuts[i + 1] - cuts[i]);
    for (int j = 0; j < rule.size(); ++j) {
      set.nodes.push_back(mid + half * rule.nodes()[j]);
      set.weights.push_back(half * rule.weights()[j]);
    }
  }
  return set;
}

}  // namespace ssfkit
