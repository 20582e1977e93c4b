#include "ssfkit/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cctype>
#include <limits>
#include <sstream>

#include "ssfkit/quadrature.hpp"

namespace ssfkit {

TestFunction TestFunction::bump(double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("bump: need lo < hi");
  return {Kind::bump, lo, hi, 0};
}

TestFunction TestFunction::gaussian(double center, double sigma, double halfwidth) {
  if (!(sigma > 0) || !(halfwidth > 0)) throw InvalidArgument("gaussian: sigma and halfwidth must be positive");
  return {Kind::gaussian, center, sigma, halfwidth};
}

TestFunction TestFunction::indicator(double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("indicator: need lo < hi");
  return {Kind::indicator, lo, hi, 0};
}

TestFunction TestFunction::one() { return {Kind::one, 0, 0, 0}; }

TestFunction TestFunction::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  const auto open = text.find('(');
  const std::string name(trim(text.substr(0, open)));
  std::vector<double> args;
  if (open != std::string_view::npos) {
    const auto close = text.rfind(')');
    if (close == std::string_view::npos || close < open)
      throw InvalidArgument("test function '" + std::string(text) + "': missing ')'");
    std::string inner(text.substr(open + 1, close - open - 1));
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string token(trim(item));
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (token.empty() || *end != '\0')
        throw InvalidArgument("test function '" + std::string(text) + "': bad number '" + token + "'");
      args.push_back(v);
    }
  }
  auto need = [&](std::size_t n) {
    if (args.size() != n) {
      std::ostringstream os;
      os << "test function '" << text << "': expected " << n << " arguments, got " << args.size();
      throw InvalidArgument(os.str());
    }
  };
  if (name == "bump") {
    need(2);
    return bump(args[0], args[1]);
  }
  if (name == "gaussian") {
    need(3);
    return gaussian(args[0], args[1], args[2]);
  }
  if (name == "indicator") {
    need(2);
    return indicator(args[0], args[1]);
  }
  if (name == "one") {
    need(0);
    return one();
  }
  throw InvalidArgument("unknown test function '" + name + "' (bump, gaussian, indicator, one)");
}

std::string TestFunction::name() const {
  char buf[160];
  switch (kind) {
    case Kind::bump: std::snprintf(buf, sizeof buf, "bump(%.17g,%.17g)", a, b); break;
    case Kind::gaussian: std::snprintf(buf, sizeof buf, "gaussian(%.17g,%.17g,%.17g)", a, b, c); break;
    case Kind::indicator: std::snprintf(buf, sizeof buf, "indicator(%.17g,%.17g)", a, b); break;
    case Kind::one: return "one";
  }
  return buf;
}

double TestFunction::operator()(double lambda) const {
  switch (kind) {
    case Kind::bump: {
      if (!(lambda > a && lambda < b)) return 0;
      const double t = (2 * lambda - a - b) / (b - a);
      return std::exp(1 - 1 / (1 - t * t));
    }
    case Kind::gaussian: {
      const double d = lambda - a;
      return std::abs(d) <= c ? std::exp(-d * d / (2 * b * b)) : 0;
    }
    case Kind::indicator: return (lambda >= a && lambda <= b) ? 1 : 0;
    case Kind::one: return 1;
  }
  return 0;
}

double TestFunction::support_lo() const {
  switch (kind) {
    case Kind::gaussian: return a - c;
    case Kind::one: return -std::numeric_limits<double>::infinity();
    default: return a;
  }
}

double TestFunction::support_hi() const {
  switch (kind) {
    case Kind::gaussian: return a + c;
    case Kind::one: return std::numeric_limits<double>::infinity();
    default: return b;
  }
}

std::vector<double> TestFunction::breakpoints() const {
  if (kind == Kind::one) return {};
  return {support_lo(), support_hi()};
}

SsfFinite::SsfFinite(const Potential& potential, std::optional<BoundaryData> bc, double ell, double lambda_max)
    : ell_(ell) {
  const Potential zero = Potential::zero();
  const Potential local = potential.truncated(ell);
  if (bc) {
    perturbed_ = eigenvalues_coupled(local, *bc, ell, lambda_max);
    free_ = eigenvalues_coupled(zero, *bc, ell, lambda_max);
  } else {
    perturbed_ = eigenvalues_dirichlet(local, ell, lambda_max);
    free_ = eigenvalues_dirichlet(zero, ell, lambda_max);
  }
  std::merge(perturbed_.values.begin(), perturbed_.values.end(), free_.values.begin(), free_.values.end(),
             std::back_inserter(jumps_));
  jumps_.erase(std::unique(jumps_.begin(), jumps_.end()), jumps_.end());
  for (double j : jumps_) sup_abs_ = std::max(sup_abs_, std::abs((*this)(j)));
}

int SsfFinite::operator()(double lambda) const { return counting(free_, lambda) - counting(perturbed_, lambda); }

SsfFinite ssf_finite(const Potential& potential, const BoundaryData& bc, double ell, double lambda_max) {
  return SsfFinite(potential, bc, ell, lambda_max);
}

SsfLine::SsfLine(const Potential& potential, double k_min, double step)
    : bound_states_(bound_states_line(potential)),
      grid_(potential, k_min, phase_reference_k(potential), step),
      resonance_(ssfkit::threshold_resonance(potential)) {
  sup_abs_ = bound_states_.total();
  for (const auto& d : grid_.data()) sup_abs_ = std::max(sup_abs_, std::abs(d.phase) / pi);
}

double SsfLine::operator()(double lambda) const {
  if (lambda <= 0) return -counting(bound_states_, std::min(lambda, 0.0));
  return -grid_.phase(std::sqrt(lambda)) / pi;
}

double SsfLine::levinson_jump() const { return std::abs(-grid_.data().front().phase / pi + bound_states_.total()); }

bool SsfLine::levinson_consistent() const {
  const double j = levinson_jump();
  return j <= 0.51 && !(j > 0.01 && j < 0.49);
}

namespace {

double weight(double lambda, bool weighted) { return weighted ? 1 / (1 + lambda * lambda) : 1.0; }

// integral of a step function with the given jump points against g
template <typename Step, typename G>
QuadratureResult<double> step_integral(const Step& step, std::vector<double> cuts, double lo, double hi, const G& g) {
  QuadratureResult<double> out;
  if (!(hi > lo)) return out;
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (a < lo || b > hi || !(b > a)) continue;
    const double v = step(0.5 * (a + b));
    if (v == 0) continue;
    const auto r = integrate(g, a, b, 1e-14 * std::max(1.0, b - a));
    out.value += v * r.value;
    out.error += std::abs(v) * r.error;
  }
  return out;
}

double tail_weight(double lambda_max) { return pi / 2 - std::atan(lambda_max); }

void check_pairing(const TestFunction& f, bool weighted, double lambda_max) {
  if (!f.compact() && !weighted)
    throw UnboundedPairing("pairing: '" + f.name() + "' has no compact support; use the weighted pairing");
  if (f.compact() && f.support_hi() > lambda_max) {
    std::ostringstream os;
    os << "pairing: support of '" << f.name() << "' exceeds the horizon " << lambda_max;
    throw HorizonExceeded(os.str());
  }
}

}  // namespace

PairingResult pairing(const SsfFinite& ssf, const TestFunction& f, bool weighted) {
  const double horizon = ssf.lambda_max();
  check_pairing(f, weighted, horizon);
  PairingResult result;
  result.lambda_cutoff = horizon;
  if (ssf.jumps().empty()) return result;
  const double lo = std::max(ssf.jumps().front(), f.support_lo());
  const double hi = std::min(horizon, f.support_hi());
  std::vector<double> cuts = ssf.jumps();
  for (double p : f.breakpoints()) cuts.push_back(p);
  auto g = [&](double l) { return f(l) * weight(l, weighted); };
  auto xi = [&](double l) { return static_cast<double>(ssf(l)); };
  const auto r = step_integral(xi, cuts, lo, hi, g);
  result.value = r.value;
  result.quadrature_error = r.error;
  if (!f.compact()) result.tail_bound = ssf.sup_abs() * f.sup_abs() * tail_weight(horizon);
  return result;
}

PairingResult pairing(const SsfLine& ssf, const TestFunction& f, bool weighted, double lambda_max) {
  check_pairing(f, weighted, lambda_max);
  PairingResult result;
  result.lambda_cutoff = lambda_max;
  auto g = [&](double l) { return f(l) * weight(l, weighted); };

  const auto& bound = ssf.bound_states().values;
  if (!bound.empty()) {
    std::vector<double> cuts = bound;
    for (double p : f.breakpoints()) cuts.push_back(p);
    const double lo = std::max(bound.front(), f.support_lo());
    const double hi = std::min(0.0, f.support_hi());
    const auto r = step_integral(ssf, cuts, lo, hi, g);
    result.value += r.value;
    result.quadrature_error += r.error;
  }

  const double lo = std::max(0.0, f.support_lo());
  const double hi = std::min(lambda_max, f.support_hi());
  if (hi > lo) {
    // lambda = k^2 removes the square-root behaviour at threshold
    std::vector<double> cuts;
    for (double p : f.breakpoints())
      if (p > lo && p < hi) cuts.push_back(std::sqrt(p));
    auto h = [&](double k) {
      const double l = k * k;
      return -ssf.phase_grid().phase(k) / pi * g(l) * 2 * k;
    };
    const auto r = integrate(h, std::sqrt(lo), std::sqrt(hi), 1e-10, cuts);
    result.value += r.value;
    result.quadrature_error += r.error;
  }
  if (!f.compact()) result.tail_bound = ssf.sup_abs() * f.sup_abs() * tail_weight(lambda_max);
  return result;
}

TraceFormulaCheck trace_formula_residual(const Potential& potential, const BoundaryData& bc, double ell, double z,
                                         double lambda_max) {
  const CouplingConstants c = bc_constants(potential, bc);
  if (!(z < c.lower_bound_interval)) {
    std::ostringstream os;
    os << "trace_formula_residual: z = " << z << " must lie below " << c.lower_bound_interval;
    throw DomainError(os.str());
  }
  const SsfFinite ssf(potential, bc, ell, lambda_max);
  auto resolvent_sum = [&](const EigenvalueList& eigs) {
    double s = 0;
    for (std::size_t i = 0; i < eigs.size(); ++i) s += eigs.multiplicity[i] / (eigs.values[i] - z);
    return s;
  };
  TraceFormulaCheck check;
  check.boundary_term = ssf(lambda_max) / (lambda_max - z);
  check.lhs = resolvent_sum(ssf.perturbed()) - resolvent_sum(ssf.free()) + check.boundary_term;
  if (!ssf.jumps().empty()) {
    auto xi = [&](double l) { return static_cast<double>(ssf(l)); };
    auto g = [&](double l) { return 1 / ((l - z) * (l - z)); };
    check.rhs = -step_integral(xi, ssf.jumps(), ssf.jumps().front(), lambda_max, g).value;
  }
  const double diff = std::abs(check.lhs - check.rhs);
  check.residual = (check.rhs == 0) ? diff : diff / std::abs(check.rhs);
  return check;
}

}  // namespace ssfkit
