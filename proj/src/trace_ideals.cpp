#include "ssfkit/trace_ideals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "ssfkit/krein.hpp"
#include "ssfkit/quadrature.hpp"
#include "ssfkit/transfer.hpp"

namespace ssfkit {

std::string ResolventKind::name() const {
  switch (kind) {
    case Kind::line: return "line";
    case Kind::dirichlet: return "dirichlet";
    case Kind::coupled: return "coupled";
  }
  return "";
}

namespace {

using Kernel = std::function<Complex(double, double)>;

double wavenumber(double z, const char* where) {
  if (!(z < 0)) {
    std::ostringstream os;
    os << where << ": z = " << z << " must be negative";
    throw DomainError(os.str());
  }
  return std::sqrt(-z);
}

Kernel line_kernel(double k) {
  return [k](double x, double y) { return Complex(std::exp(-k * std::abs(x - y)) / (2 * k), 0); };
}

// kernels of an interval resolvent, with the differences to the line kernel
// and to the Dirichlet kernel evaluated without cancellation
struct IntervalKernels {
  Kernel full;
  Kernel minus_line;
  Kernel minus_dirichlet;
};

IntervalKernels interval_kernels(const ResolventKind& kind, double k, double ell) {
  auto basis = std::make_shared<FreeBasis>(k, ell);
  const double denom = 2 * k * -std::expm1(-4 * k * ell);
  auto dirichlet_minus_line = [k, ell, denom](double x, double y) {
    const double d = std::abs(x - y);
    return (std::exp(-k * (d + 4 * ell)) + std::exp(-k * (4 * ell - d)) - std::exp(-k * (2 * ell - x - y)) -
            std::exp(-k * (2 * ell + x + y))) /
           denom;
  };
  IntervalKernels out;
  if (kind.kind == ResolventKind::Kind::dirichlet) {
    out.full = [basis](double x, double y) { return Complex(basis->dirichlet(x, y), 0); };
    out.minus_line = [=](double x, double y) { return Complex(dirichlet_minus_line(x, y), 0); };
    out.minus_dirichlet = [](double, double) { return Complex(0, 0); };
    return out;
  }
  if (!kind.bc) throw InvalidArgument("coupled resolvent needs boundary data");
  auto green = std::make_shared<GreenKernel>(green_coupled(basis, *kind.bc));
  auto correction = [basis, green](double x, double y) {
    const Vec2 px(basis->psi(1, x)(0), basis->psi(2, x)(0));
    const Vec2 py(basis->psi(1, y)(0), basis->psi(2, y)(0));
    return Complex((px.cast<Complex>().transpose() * green->correction() * py.cast<Complex>())(0, 0));
  };
  out.full = [green](double x, double y) { return (*green)(x, y); };
  out.minus_line = [=](double x, double y) { return dirichlet_minus_line(x, y) + correction(x, y); };
  out.minus_dirichlet = correction;
  return out;
}

Kernel free_kernel(const ResolventKind& kind, double k, double ell) {
  if (kind.kind == ResolventKind::Kind::line) return line_kernel(k);
  return interval_kernels(kind, k, ell).full;
}

// Gauss-Legendre nodes on the pieces of V, about n in total, panels no longer than 1
NodeSet support_nodes(const Potential& potential, int n) {
  NodeSet set;
  const auto pieces = potential.pieces();
  double total = 0;
  for (const auto& p : pieces) total += p.hi - p.lo;
  for (const auto& p : pieces) {
    const double len = p.hi - p.lo;
    if (!(len > 0)) continue;
    const int count = std::max(8, static_cast<int>(std::lround(n * len / total)));
    const int panels = std::max(static_cast<int>(std::ceil(len)), (count + 63) / 64);
    const int per_panel = std::max(4, (count + panels - 1) / panels);
    std::vector<double> cuts(panels + 1);
    for (int i = 0; i <= panels; ++i) cuts[i] = p.lo + len * i / panels;
    const NodeSet part = composite_nodes(cuts, per_panel);
    set.nodes.insert(set.nodes.end(), part.nodes.begin(), part.nodes.end());
    set.weights.insert(set.weights.end(), part.weights.begin(), part.weights.end());
  }
  return set;
}

void check_nodes(int n) {
  if (n < 16) throw InvalidArgument("discretization needs n >= 16");
}

// |V| or sgn(V)|V| at x, zero outside (-l, l) when truncate is set
std::pair<double, double> factors(const Potential& potential, double x, double ell, bool truncate) {
  if (truncate && !(std::abs(x) < ell)) return {0, 0};
  return factorize(potential, x);
}

// integral over |y| > l of (e^{-k|x-y|} / 2k)^2
double line_tail_sq(double x, double k, double ell) {
  const double scale = 1 / (8 * k * k * k);
  if (std::abs(x) <= ell) return scale * (std::exp(-2 * k * (ell - x)) + std::exp(-2 * k * (ell + x)));
  const double inside = std::exp(-2 * k * (std::abs(x) - ell)) * -std::expm1(-4 * k * ell);
  return scale * (2 - inside);
}

DiscretizedOperator::Meaning meaning_of(const ResolventKind& kind) {
  switch (kind.kind) {
    case ResolventKind::Kind::line: return DiscretizedOperator::Meaning::bs_line;
    case ResolventKind::Kind::dirichlet: return DiscretizedOperator::Meaning::bs_dirichlet;
    case ResolventKind::Kind::coupled: return DiscretizedOperator::Meaning::bs_coupled;
  }
  return DiscretizedOperator::Meaning::bs_line;
}

}  // namespace

DiscretizedOperator discretize_bs(const Potential& potential, const ResolventKind& kind, double z, double ell,
                                  int n) {
  check_nodes(n);
  const double k = wavenumber(z, "discretize_bs");
  const bool interval = kind.kind != ResolventKind::Kind::line;
  const Potential local = interval ? potential.truncated(ell) : potential;
  DiscretizedOperator op;
  op.meaning = meaning_of(kind);
  const NodeSet set = support_nodes(local, n);
  op.row_nodes = op.col_nodes = set.nodes;
  op.row_weights = op.col_weights = set.weights;
  const auto m = static_cast<Eigen::Index>(set.nodes.size());
  op.matrix = Eigen::MatrixXcd::Zero(m, m);
  if (m == 0) return op;
  const Kernel green = free_kernel(kind, k, ell);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double xi = set.nodes[i];
    const double ui = factorize(local, xi).first * std::sqrt(set.weights[i]);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double yj = set.nodes[j];
      const double vj = factorize(local, yj).second * std::sqrt(set.weights[j]);
      op.matrix(i, j) = ui * green(xi, yj) * vj;
    }
  }
  return op;
}

DiscretizedOperator discretize_bs_difference(const Potential& potential, const ResolventKind& kind, double z,
                                             double ell, int n) {
  check_nodes(n);
  if (kind.kind == ResolventKind::Kind::line) throw InvalidArgument("difference needs an interval resolvent");
  const double k = wavenumber(z, "discretize_bs_difference");
  DiscretizedOperator op;
  op.meaning = DiscretizedOperator::Meaning::difference;
  const NodeSet set = support_nodes(potential, n);
  op.row_nodes = op.col_nodes = set.nodes;
  op.row_weights = op.col_weights = set.weights;
  const auto m = static_cast<Eigen::Index>(set.nodes.size());
  op.matrix = Eigen::MatrixXcd::Zero(m, m);
  if (m == 0) return op;
  const IntervalKernels interval = interval_kernels(kind, k, ell);
  const Kernel line = line_kernel(k);
  // u_l G_l v_l - u G v = u_l v_l (G_l - G) + (u_l v_l - u v) G
  for (Eigen::Index i = 0; i < m; ++i) {
    const double xi = set.nodes[i], wi = std::sqrt(set.weights[i]);
    const double u = factorize(potential, xi).first;
    const double u_local = factors(potential, xi, ell, true).first;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double yj = set.nodes[j], wj = std::sqrt(set.weights[j]);
      const double v = factorize(potential, yj).second;
      const double v_local = factors(potential, yj, ell, true).second;
      const double local = u_local * v_local, full = u * v;
      Complex value = 0;
      if (local != 0) value += local * interval.minus_line(xi, yj);
      if (local != full) value += (local - full) * line(xi, yj);
      op.matrix(i, j) = wi * value * wj;
    }
  }
  return op;
}

DiscretizedOperator discretize_half_difference(const Potential& potential, const ResolventKind& kind, double z,
                                               double ell, int n, bool left) {
  check_nodes(n);
  if (kind.kind == ResolventKind::Kind::line) throw InvalidArgument("difference needs an interval resolvent");
  const double k = wavenumber(z, "discretize_half_difference");
  DiscretizedOperator op;
  op.meaning = left ? DiscretizedOperator::Meaning::half_left : DiscretizedOperator::Meaning::half_right;
  const NodeSet support = support_nodes(potential, n);

  // G_l - G_line is smooth on [-l, l] but varies on the scale 1/k near the ends
  std::vector<double> cuts;
  const double width = std::min(1.0, 2 / k);
  const int panels = static_cast<int>(std::ceil(2 * ell / width));
  for (int i = 0; i <= panels; ++i) cuts.push_back(-ell + 2 * ell * i / panels);
  for (double b : potential.breakpoints())
    if (b > -ell && b < ell) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const NodeSet free_nodes = composite_nodes(cuts, 16);

  const IntervalKernels interval = interval_kernels(kind, k, ell);
  const Kernel line = line_kernel(k);
  const auto ms = static_cast<Eigen::Index>(support.nodes.size());
  const auto mf = static_cast<Eigen::Index>(free_nodes.nodes.size());
  Eigen::MatrixXcd block(ms, mf);
  for (Eigen::Index i = 0; i < ms; ++i) {
    const double x = support.nodes[i];
    // the factor on the support side; |u| = |v|, so only the sign differs
    const auto [u, v] = factorize(potential, x);
    const auto [u_local, v_local] = factors(potential, x, ell, true);
    const double a = left ? u : v, a_local = left ? u_local : v_local;
    const double wx = std::sqrt(support.weights[i]);
    for (Eigen::Index j = 0; j < mf; ++j) {
      const double y = free_nodes.nodes[j];
      // right factor G v: kernel G(y, x) v(x) with y on the free side
      const Complex difference = left ? interval.minus_line(x, y) : interval.minus_line(y, x);
      Complex value = a_local * difference;
      if (a_local != a) value += (a_local - a) * (left ? line(x, y) : line(y, x));
      block(i, j) = wx * value * std::sqrt(free_nodes.weights[j]);
    }
    op.hs_tail_sq += support.weights[i] * a * a * line_tail_sq(x, k, ell);
  }
  if (left) {
    op.matrix = block;
    op.row_nodes = support.nodes;
    op.row_weights = support.weights;
    op.col_nodes = free_nodes.nodes;
    op.col_weights = free_nodes.weights;
  } else {
    op.matrix = block.transpose();
    op.row_nodes = free_nodes.nodes;
    op.row_weights = free_nodes.weights;
    op.col_nodes = support.nodes;
    op.col_weights = support.weights;
  }
  return op;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
}

double schatten_norm(const DiscretizedOperator& op, int p) {
  if (p == 2) return std::sqrt(op.matrix.squaredNorm() + op.hs_tail_sq);
  if (p == 1) {
    if (op.hs_tail_sq > 0) throw InvalidArgument("schatten_norm: p = 1 is not available with a kernel tail");
    return singular_values(op.matrix).sum();
  }
  throw InvalidArgument("schatten_norm: p must be 1 or 2");
}

namespace {

struct Stable {
  double norm = 0;
  int n_nodes = 0;
  double error_bound = 0;
};

// doubles n until the norm changes by less than the stability threshold
Stable stabilize(const DiagnosticConfig& config, const std::function<DiscretizedOperator(int)>& build, int p) {
  int n = config.n_start;
  DiscretizedOperator op = build(n);
  double previous = schatten_norm(op, p);
  auto support_size = [](const DiscretizedOperator& d) {
    return static_cast<int>(std::min(d.matrix.rows(), d.matrix.cols()));
  };
  Stable out{previous, support_size(op), 0};
  while (true) {
    if (2 * n > config.n_max) return out;
    n *= 2;
    op = build(n);
    const double current = schatten_norm(op, p);
    out.error_bound = std::abs(current - previous);
    out.norm = current;
    out.n_nodes = support_size(op);
    if (out.error_bound <= config.stability * std::max(1.0, current)) return out;
    previous = current;
  }
}

}  // namespace

std::vector<DiagnosticRow> diagnostic_series(const DiagnosticConfig& config, DiagnosticMode mode) {
  std::vector<DiagnosticRow> rows;
  const ResolventKind kinds[] = {ResolventKind::dirichlet(), ResolventKind::coupled(config.bc)};
  if (mode == DiagnosticMode::z_to_minus_infinity) {
    for (const auto& kind : kinds)
      for (double k : config.k_list) {
        const double z = -k * k;
        const Stable s = stabilize(
            config, [&](int n) { return discretize_bs(config.potential, kind, z, config.ell, n); }, 1);
        rows.push_back({"z_to_minus_infinity", kind.name(), k, 1, s.norm, s.n_nodes, s.error_bound});
      }
    return rows;
  }
  for (const auto& kind : kinds)
    for (double ell : config.ell_list) {
      const Stable s = stabilize(
          config, [&](int n) { return discretize_bs_difference(config.potential, kind, config.z, ell, n); }, 1);
      rows.push_back({"ell_to_infinity", kind.name(), ell, 1, s.norm, s.n_nodes, s.error_bound});
      for (bool left : {true, false}) {
        const Stable h = stabilize(
            config,
            [&](int n) { return discretize_half_difference(config.potential, kind, config.z, ell, n, left); }, 2);
        rows.push_back({"ell_to_infinity", kind.name() + (left ? "_half_left" : "_half_right"), ell, 2, h.norm,
                        h.n_nodes, h.error_bound});
      }
    }
  return rows;
}

DiscretizedOperator discretize_bs_coupling(const Potential& potential, const BoundaryData& bc, double z, double ell,
                                           int n) {
  check_nodes(n);
  const double k = wavenumber(z, "discretize_bs_coupling");
  const Potential local = potential.truncated(ell);
  DiscretizedOperator op;
  op.meaning = DiscretizedOperator::Meaning::difference;
  const NodeSet set = support_nodes(local, n);
  op.row_nodes = op.col_nodes = set.nodes;
  op.row_weights = op.col_weights = set.weights;
  const auto m = static_cast<Eigen::Index>(set.nodes.size());
  op.matrix = Eigen::MatrixXcd::Zero(m, m);
  const Kernel correction = interval_kernels(ResolventKind::coupled(bc), k, ell).minus_dirichlet;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double ui = factorize(local, set.nodes[i]).first * std::sqrt(set.weights[i]);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double vj = factorize(local, set.nodes[j]).second * std::sqrt(set.weights[j]);
      op.matrix(i, j) = ui * correction(set.nodes[i], set.nodes[j]) * vj;
    }
  }
  return op;
}

double rank_two_ratio(const Potential& potential, const BoundaryData& bc, double z, double ell, int n) {
  const Eigen::VectorXd s = singular_values(discretize_bs_coupling(potential, bc, z, ell, n).matrix);
  if (s.size() < 3 || s(0) == 0) return 0;
  return s(2) / s(0);
}

}  // namespace ssfkit
