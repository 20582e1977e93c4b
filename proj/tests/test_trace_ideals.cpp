#include <doctest.h>

#include <cmath>
#include <vector>

#include "fd.hpp"
#include "ssfkit/quadrature.hpp"
#include "ssfkit/trace_ideals.hpp"

using namespace ssfkit;

namespace {

Mat2 matrix(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

const BoundaryData shear(pi / 3, matrix(1, 1, 0, 1));

std::vector<ResolventKind> kinds() {
  return {ResolventKind::line(), ResolventKind::dirichlet(), ResolventKind::coupled(shear)};
}

}  // namespace

TEST_CASE("zero potential discretizes to nothing") {
  for (const auto& kind : kinds()) {
    const auto op = discretize_bs(Potential::zero(), kind, -9, 4, 64);
    CHECK(op.matrix.size() == 0);
    CHECK(schatten_norm(op, 1) == 0);
    CHECK(schatten_norm(op, 2) == 0);
  }
  DiscretizedOperator zero;
  zero.matrix = Eigen::MatrixXcd::Zero(5, 5);
  CHECK(schatten_norm(zero, 1) == 0);
  CHECK(schatten_norm(zero, 2) == 0);
}

TEST_CASE("line trace equals the diagonal integral") {
  const auto well = discretize_bs(Potential::square_well(1, 1), ResolventKind::line(), -4, 0, 64);
  CHECK(std::abs(well.matrix.trace() - Complex(-0.5, 0)) <= 1e-8);

  const double k = 3;
  struct Case {
    Potential potential;
    double integral;  // of V
  };
  const std::vector<Case> cases{
      {Potential::square_well(2, 0.5), -2.0},
      {Potential::gaussian(-1, 1, 5), -oracle::gaussian_mass(1, 5)},
      {Potential::poschl_teller(1, 1, 6), -2 * 2 * std::tanh(6.0)},
      {Potential::piecewise_constant({-2, -0.5, 1, 3}, {0.5, -2, 1.5}), 0.75 - 3 + 3},
  };
  for (const auto& c : cases) {
    const auto op = discretize_bs(c.potential, ResolventKind::line(), -k * k, 0, 128);
    CHECK(std::abs(op.matrix.trace() - Complex(c.integral / (2 * k), 0)) <= 1e-8);
  }
}

TEST_CASE("doubling the nodes leaves the trace norm unchanged") {
  for (const auto& V : {Potential::square_well(1, 1), Potential::gaussian(-1, 1, 5)}) {
    for (const auto& kind : kinds()) {
      for (double z : {-16.0, -100.0}) {
        const double a = schatten_norm(discretize_bs(V, kind, z, 6, 64), 1);
        const double b = schatten_norm(discretize_bs(V, kind, z, 6, 128), 1);
        CHECK(std::abs(a - b) < 1e-8);
      }
    }
  }
}

TEST_CASE("Hilbert-Schmidt norms by direct double integration") {
  const double k = 1, ell = 2;
  auto dirichlet = [&](double x, double y) {
    const double lo = std::min(x, y), hi = std::max(x, y);
    return std::sinh(k * (ell + lo)) * std::sinh(k * (ell - hi)) / (k * std::sinh(2 * k * ell));
  };
  auto line = [&](double x, double y) { return std::exp(-k * std::abs(x - y)) / (2 * k); };
  // V = -1 on [-1, 1], so |u K v|^2 = K^2; inner integrals split at the diagonal
  auto hs = [&](auto&& kernel) {
    const auto& rule = gauss_legendre(40);
    double sum = 0;
    for (int i = 0; i < rule.size(); ++i) {
      const double x = rule.nodes()[i];
      auto row = [&](double y) { return kernel(x, y) * kernel(x, y); };
      sum += rule.weights()[i] * (rule.integrate(row, -1, x) + rule.integrate(row, x, 1));
    }
    return std::sqrt(sum);
  };
  const auto V = Potential::square_well(1, 1);
  // the difference kernel is smooth, so the node sum is spectrally accurate
  const auto diff = discretize_bs_difference(V, ResolventKind::dirichlet(), -k * k, ell, 64);
  const double expected_diff = hs([&](double x, double y) { return dirichlet(x, y) - line(x, y); });
  CHECK(schatten_norm(diff, 2) == doctest::Approx(expected_diff).epsilon(1e-10));
  // the full kernel has a kink on the diagonal and converges at second order in the panel width
  const double expected = hs(dirichlet);
  const double coarse = schatten_norm(discretize_bs(V, ResolventKind::dirichlet(), -k * k, ell, 256), 2);
  const double fine = schatten_norm(discretize_bs(V, ResolventKind::dirichlet(), -k * k, ell, 512), 2);
  CHECK(std::abs(fine - expected) < std::abs(coarse - expected));
  CHECK(fine == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("rank-one operators have equal trace and Hilbert-Schmidt norms") {
  const NodeSet set = composite_nodes(std::vector<double>{0, 0.5, 1}, 10);
  const int n = static_cast<int>(set.nodes.size());
  DiscretizedOperator op;
  op.matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = set.nodes[i], y = set.nodes[j];
      op.matrix(i, j) = std::sqrt(set.weights[i] * set.weights[j]) * (1 + x * x) * Complex(y, 0.5 * y);
    }
  const double psi = std::sqrt(1.25 / 3), phi = std::sqrt(1 + 2.0 / 3 + 0.2);
  CHECK(schatten_norm(op, 1) == doctest::Approx(psi * phi).epsilon(1e-12));
  CHECK(schatten_norm(op, 2) == doctest::Approx(psi * phi).epsilon(1e-12));
}

TEST_CASE("Hilbert-Schmidt norm never exceeds the trace norm") {
  for (const auto& kind : kinds()) {
    for (double z : {-5.0, -50.0}) {
      const auto op = discretize_bs(Potential::poschl_teller(1, 1, 6), kind, z, 4, 64);
      CHECK(schatten_norm(op, 2) <= schatten_norm(op, 1) * (1 + 1e-14));
    }
  }
  DiscretizedOperator random;
  random.matrix = Eigen::MatrixXcd::Random(30, 20);
  CHECK(schatten_norm(random, 2) <= schatten_norm(random, 1));
}

TEST_CASE("trace norm is unavailable with a kernel tail") {
  const auto op =
      discretize_half_difference(Potential::square_well(1, 1), ResolventKind::dirichlet(), -16, 2, 64, true);
  CHECK(op.hs_tail_sq > 0);
  CHECK_THROWS_AS(schatten_norm(op, 1), InvalidArgument);
  CHECK(schatten_norm(op, 2) > 0);
}

TEST_CASE("interval kinds truncate the potential") {
  const auto V = Potential::gaussian(-1, 1, 5);
  const auto op = discretize_bs(V, ResolventKind::dirichlet(), -9, 2, 64);
  for (double x : op.row_nodes) CHECK(std::abs(x) < 2);
  const auto line = discretize_bs(V, ResolventKind::line(), -9, 2, 64);
  CHECK(line.row_nodes.front() < -4.5);
}

TEST_CASE("trace norms decay as z goes to minus infinity") {
  DiagnosticConfig config{Potential::square_well(1, 1), shear};
  const auto rows = diagnostic_series(config, DiagnosticMode::z_to_minus_infinity);
  for (const char* kind : {"dirichlet", "coupled"}) {
    std::vector<double> norms;
    for (const auto& r : rows)
      if (r.kind == kind && r.p == 1) norms.push_back(r.norm);
    REQUIRE(norms.size() == config.k_list.size());
    for (std::size_t i = 1; i < norms.size(); ++i) CHECK(norms[i] < norms[i - 1]);
    CHECK(norms.back() < 0.05 * norms.front());
  }
  for (const auto& r : rows) CHECK(r.error_bound <= 1e-8 * std::max(1.0, r.norm));
}

TEST_CASE("interval operators converge to the line operator") {
  DiagnosticConfig config{Potential::square_well(1, 1), shear};
  const auto rows = diagnostic_series(config, DiagnosticMode::ell_to_infinity);
  for (const char* kind : {"dirichlet", "coupled", "dirichlet_half_left", "dirichlet_half_right",
                           "coupled_half_left", "coupled_half_right"}) {
    std::vector<double> norms;
    for (const auto& r : rows)
      if (r.kind == kind) norms.push_back(r.norm);
    REQUIRE(norms.size() == config.ell_list.size());
    for (std::size_t i = 1; i < norms.size(); ++i) CHECK(norms[i] < norms[i - 1]);
    CHECK(norms.back() < 0.1 * norms.front());
  }
}

TEST_CASE("zero potential gives identically zero diagnostics") {
  DiagnosticConfig config{Potential::zero(), shear};
  for (auto mode : {DiagnosticMode::z_to_minus_infinity, DiagnosticMode::ell_to_infinity})
    for (const auto& r : diagnostic_series(config, mode)) CHECK(r.norm == 0);
}

TEST_CASE("coupled minus Dirichlet operator has rank two") {
  for (double z : {-4.0, -16.0, -100.0}) {
    for (double ell : {2.0, 4.0}) {
      CHECK(rank_two_ratio(Potential::square_well(1, 1), shear, z, ell, 128) < 1e-8);
      CHECK(rank_two_ratio(Potential::gaussian(-1, 1, 5), shear, z, ell, 128) < 1e-8);
    }
  }
}

TEST_CASE("direct coupling kernel equals the difference of the two discretizations") {
  const auto V = Potential::square_well(1, 1);
  const double z = -9, ell = 2;
  const auto coupled = discretize_bs(V, ResolventKind::coupled(shear), z, ell, 128);
  const auto dirichlet = discretize_bs(V, ResolventKind::dirichlet(), z, ell, 128);
  const auto direct = discretize_bs_coupling(V, shear, z, ell, 128);
  const Eigen::MatrixXcd diff = coupled.matrix - dirichlet.matrix;
  CHECK((direct.matrix - diff).norm() <= 1e-12 * direct.matrix.norm() + 1e-15);
}
