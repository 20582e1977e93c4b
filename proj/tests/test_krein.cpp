#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "fd.hpp"
#include "ssfkit/krein.hpp"
#include "ssfkit/quadrature.hpp"
#include "ssfkit/roots.hpp"
#include "ssfkit/spectrum.hpp"
#include "ssfkit/trace_ideals.hpp"

using namespace ssfkit;

namespace {

Mat2 matrix(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

const BoundaryData shear(pi / 3, matrix(1, 1, 0, 1));
const BoundaryData rotation(0.7, matrix(0, 2, -0.5, 0));

// the coefficient matrix written out from the closed-form boundary derivatives
Mat2c free_coefficients(const BoundaryData& bc, double k, double ell) {
  const double th = std::tanh(k * ell), cth = 1 / th;
  const double d1_right = k / 2 * (th + cth), d1_left = k / 2 * (cth - th);
  const double d2_right = k / 2 * (th - cth), d2_left = -k / 2 * (th + cth);
  const Complex mu = bc.phase();
  Mat2c m;
  m(0, 0) = bc.r22() / bc.r12() - d1_right;
  m(0, 1) = -mu / bc.r12() - d2_right;
  m(1, 0) = -std::conj(mu) / bc.r12() + d1_left;
  m(1, 1) = bc.r11() / bc.r12() + d2_left;
  return m;
}

double max_abs(const Mat2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("free coefficient matrix: numerical assembly equals the closed form") {
  for (const auto* bc : {&shear, &rotation}) {
    for (double k : {2.0, 5.0, 10.0}) {
      if (k <= std::sqrt(1 + coupling_norm(*bc))) continue;
      for (double ell : {1.0, 2.0, 4.0, 8.0}) {
        const Mat2c numeric = krein_matrix(Potential::zero(), *bc, -k * k, ell).entries;
        const Mat2c closed = krein_matrix_free(*bc, k, ell).matrix.entries;
        CHECK(max_abs(numeric - closed) <= 1e-10);
        CHECK(max_abs(closed - free_coefficients(*bc, k, ell)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("free coefficient matrix is real for zero phase") {
  const BoundaryData bc(0, matrix(1, 1, 0, 1));
  const auto m = krein_matrix(Potential::zero(), bc, -9, 2).entries;
  CHECK(m.imag().cwiseAbs().maxCoeff() == 0);
  CHECK(krein_matrix_free(bc, 3, 2).matrix.entries.imag().cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("coefficient matrix is Hermitian at real z") {
  for (double z : {-12.0, -3.3, 0.4}) {
    const auto m = krein_matrix(Potential::square_well(1, 1), shear, z, 3).entries;
    CHECK(max_abs(m - m.adjoint()) <= 1e-10 * max_abs(m));
  }
}

TEST_CASE("free determinant approaches the limit polynomial monotonically") {
  const double k = 3;
  double previous = INFINITY;
  for (int i = 1; i <= 14; ++i) {
    const double ell = i / k;
    const auto free = krein_matrix_free(shear, k, ell);
    const double gap = std::abs(free.matrix.det - free.limit_det);
    CHECK(gap < previous);
    if (k * ell >= 10) CHECK(gap < 1e-6);
    previous = gap;
  }
  CHECK(krein_matrix_free(shear, 3, 8).limit_det == doctest::Approx(9 - 2 * 3).epsilon(1e-15));
}

TEST_CASE("free determinant grows like k squared") {
  for (double ell : {1.0, 2.0}) {
    for (double k : {1e3, 1e4}) {
      const double ratio = krein_matrix_free(shear, k, ell).matrix.det.real() / (k * k);
      CHECK(ratio >= 0.99);
      CHECK(ratio <= 1.01);
    }
  }
}

TEST_CASE("free inverse coefficients decay like 1/k") {
  for (double ell : {1.0, 2.0}) {
    std::vector<double> scaled;
    for (double k : {1e2, 1e3, 1e4})
      scaled.push_back(max_abs(krein_matrix_free(shear, k, ell).matrix.entries.inverse()) * k);
    for (double s : scaled) CHECK(s < 1.1);
    CHECK(scaled.back() == doctest::Approx(scaled.front()).epsilon(0.05));
  }
}

TEST_CASE("free closed form is rejected below its threshold") {
  CHECK_THROWS_AS(krein_matrix_free(shear, 2, 1), DomainError);
  CHECK_NOTHROW(krein_matrix_free(shear, 2.3, 1));
}

TEST_CASE("square well determinant agrees with finite differences") {
  const auto V = Potential::square_well(1, 1);
  const double z = -9, ell = 2;
  const Complex expected = krein_matrix(V, shear, z, ell).det;
  auto fd_det = [&](int n) {
    const oracle::Grid g{ell, n};
    const auto v = oracle::nodal_potential([&](double x) { return V(x); }, g);
    const auto psi1 = oracle::boundary_value_solution(v, g, z, 0, 1);
    const auto psi2 = oracle::boundary_value_solution(v, g, z, 1, 0);
    const auto [d1_left, d1_right] = oracle::end_derivatives(psi1, v, g, z);
    const auto [d2_left, d2_right] = oracle::end_derivatives(psi2, v, g, z);
    const Complex mu = shear.phase();
    Eigen::Matrix2cd m;
    m << shear.r22() / shear.r12() - d1_right, -mu / shear.r12() - d2_right,
        -std::conj(mu) / shear.r12() + d1_left, shear.r11() / shear.r12() + d2_left;
    return m.determinant();
  };
  const Complex coarse = fd_det(4000), fine = fd_det(8000);
  const Complex extrapolated = (4.0 * fine - coarse) / 3.0;
  CHECK(std::abs(extrapolated - expected) <= 1e-6 * std::abs(expected));
  CHECK(std::abs(expected.imag()) <= 1e-12 * std::abs(expected));
}

TEST_CASE("free Dirichlet kernel matches the two-point formula") {
  for (double k : {0.7, 3.0}) {
    const double ell = 2;
    const auto g = green_dirichlet(Potential::zero(), -k * k, ell);
    for (double x : {-1.9, -0.4, 0.0, 1.2}) {
      for (double y : {-1.5, 0.1, 1.99}) {
        const double lo = std::min(x, y), hi = std::max(x, y);
        const double expected = std::sinh(k * (ell + lo)) * std::sinh(k * (ell - hi)) / (k * std::sinh(2 * k * ell));
        CHECK(std::abs(g(x, y) - expected) <= 1e-10);
      }
    }
  }
}

TEST_CASE("free Dirichlet kernel solves the equation with a unit jump") {
  const double k = 1.3, ell = 2, h = 1e-3;
  auto closed = [&](double x, double y) {
    const double lo = std::min(x, y), hi = std::max(x, y);
    return std::sinh(k * (ell + lo)) * std::sinh(k * (ell - hi)) / (k * std::sinh(2 * k * ell));
  };
  for (double y : {-1.0, 0.5}) {
    for (double x : {-1.7, 0.0, 1.4}) {
      const double second = (closed(x + h, y) - 2 * closed(x, y) + closed(x - h, y)) / (h * h);
      CHECK(std::abs(-second + k * k * closed(x, y)) <= 1e-6);
    }
    const double jump = (closed(y + h, y) - closed(y, y)) / h - (closed(y, y) - closed(y - h, y)) / h;
    CHECK(jump == doctest::Approx(-1).epsilon(1e-2));
  }
}

TEST_CASE("Dirichlet kernel vanishes at the ends and is symmetric") {
  const auto g = green_dirichlet(Potential::square_well(1, 1), -2.5, 3);
  for (int i = 0; i < 20; ++i) {
    const double y = -3 + 6 * (i + 0.5) / 20;
    CHECK(std::abs(g(-3, y)) <= 1e-12);
    CHECK(std::abs(g(3, y)) <= 1e-12);
    for (int j = 0; j < 20; ++j) {
      const double x = -3 + 6 * (j + 0.5) / 20;
      CHECK(std::abs(g(x, y) - g(y, x)) <= 1e-9);
    }
  }
}

TEST_CASE("coupled kernel satisfies the boundary condition") {
  for (const auto& V : {Potential::square_well(1, 1), Potential::gaussian(-1, 1, 5)}) {
    const auto g = green_coupled(V, shear, -10.47213595499958, 4);
    const Complex mu = shear.phase();
    for (double y : {-3.1, -0.5, 0.0, 2.2}) {
      const Vec2c left(g(-4, y), g.dx(-4, y));
      const Vec2c right(g(4, y), g.dx(4, y));
      const Vec2c expected = mu * shear.R().cast<Complex>() * left;
      CHECK((right - expected).norm() <= 1e-8 * std::max(1.0, left.norm()));
    }
  }
}

TEST_CASE("coupled kernel is conjugate symmetric and real for zero phase") {
  const auto g = green_coupled(Potential::square_well(1, 1), shear, -9, 2);
  const BoundaryData real_bc(0, matrix(1, 1, 0, 1));
  const auto g0 = green_coupled(Potential::square_well(1, 1), real_bc, -9, 2);
  for (double x : {-1.8, -0.3, 0.9}) {
    for (double y : {-1.1, 0.2, 1.95}) {
      CHECK(std::abs(g(x, y) - std::conj(g(y, x))) <= 1e-10);
      CHECK(std::abs(g0(x, y) - g0(y, x)) <= 1e-10);
      CHECK(std::abs(g0(x, y).imag()) <= 1e-14);
    }
  }
}

TEST_CASE("coupled kernel inverts the differential operator on the constant function") {
  const auto V = Potential::square_well(1, 1);
  const double z = -30, ell = 2, h = 1e-3;
  const auto g = green_coupled(V, shear, z, ell);
  auto apply = [&](double x) {
    const double cuts[] = {-1, x, 1};
    auto f = [&](double y) { return g(x, y); };
    return integrate(f, -ell, ell, 1e-13, cuts).value;
  };
  for (double x : {-1.6, -0.5, 0.2, 0.7, 1.5}) {
    const Complex second = (apply(x + h) - 2.0 * apply(x) + apply(x - h)) / (h * h);
    const Complex result = -second + (V(x) - z) * apply(x);
    CHECK(std::abs(result - 1.0) <= 1e-6);
  }
}

TEST_CASE("free coupled kernel agrees with a dense finite-difference inverse") {
  const BoundaryData bc(0, matrix(0, 1, -1, 0));
  const double z = -10, ell = 2;
  const auto g = green_coupled(Potential::zero(), bc, z, ell);
  auto dense = [&](int n) {
    const oracle::Grid grid{ell, n};
    const std::vector<double> v(n + 1, 0.0);
    return oracle::coupled_green(v, grid, bc.phi(), bc.R(), z);
  };
  // nodes shared by both grids: x = -2 + 0.5 i
  const int n = 800;
  const auto coarse = dense(n), fine = dense(2 * n);
  double worst = 0, scale = 0;
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const int a = i * n / 8, b = j * n / 8;
      const Complex extrapolated = (4.0 * fine(2 * a, 2 * b) - coarse(a, b)) / 3.0;
      const Complex exact = g(-ell + 0.5 * i, -ell + 0.5 * j);
      worst = std::max(worst, std::abs(extrapolated - exact));
      scale = std::max(scale, std::abs(exact));
    }
  }
  CHECK(worst <= 1e-5 * scale);
}

TEST_CASE("coupled minus Dirichlet kernel has rank two") {
  for (double z : {-12.0, -2.0}) {
    const auto V = Potential::square_well(1, 1);
    const auto gc = green_coupled(V, shear, z, 3);
    const auto gd = green_dirichlet(V, z, 3);
    Eigen::MatrixXcd diff(20, 20);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double x = -3 + 6 * (i + 0.5) / 20, y = -3 + 6 * (j + 0.37) / 20;
        diff(i, j) = gc(x, y) - gd(x, y);
      }
    const Eigen::VectorXd s = singular_values(diff);
    CHECK(s(2) < 1e-8 * s(0));
    CHECK(s(1) > 1e-6 * s(0));
  }
}

TEST_CASE("direct matching and the coefficient-matrix correction agree") {
  const auto basis = std::make_shared<NumericBasis>(Potential::gaussian(-1, 1, 5), -6.1, 3);
  const auto krein = green_coupled(basis, shear);
  const auto direct = green_coupled_direct(basis, shear);
  CHECK(max_abs(krein.correction() - direct.correction()) <= 1e-10 * max_abs(krein.correction()));
}

TEST_CASE("identity residual is small and independent of the probes") {
  const std::vector<Probe> other{
      [](double x) { return std::sin(3 * x); },
      [](double x) { return x * x; },
      [](double x) { return std::exp(0.5 * x); },
      [](double x) { return x < -0.5 ? 1.0 : -2.0; },
  };
  for (const auto& V : {Potential::square_well(1, 1), Potential::poschl_teller(1, 1, 6)}) {
    for (double ell : {2.0, 6.0}) {
      for (double z : {-10.47213595499958, -0.8}) {
        const double a = krein_identity_residual(V, shear, z, ell, default_probes(ell));
        const double b = krein_identity_residual(V, shear, z, ell, other);
        CHECK(a <= 1e-8);
        CHECK(b <= 1e-8);
        CHECK(std::abs(a - b) <= 1e-8);
      }
    }
  }
}

TEST_CASE("free identity residual against the closed forms") {
  for (double k : {2.3, 3.236, 6.0}) {
    for (double ell : {1.0, 4.0}) CHECK(krein_identity_residual_free(shear, k, ell, default_probes(ell)) <= 1e-10);
  }
}

TEST_CASE("coefficient matrix is singular at coupled eigenvalues") {
  const auto V = Potential::square_well(1, 1);
  const double ell = 2;
  const auto eigs = eigenvalues_coupled(V, shear, ell, 5);
  REQUIRE(eigs.size() >= 3);
  auto scale = [](const Mat2c& m) {
    return (std::abs(m(0, 0)) + std::abs(m(0, 1))) * (std::abs(m(1, 0)) + std::abs(m(1, 1)));
  };
  for (double lambda : eigs.values) {
    const auto k = krein_matrix(V, shear, lambda, ell);
    CHECK(std::abs(k.det) < 1e-8 * scale(k.entries));
    auto det = [&](double x) { return krein_matrix(V, shear, x, ell).det.real(); };
    const double root = brent_root(det, lambda - 1e-6, lambda + 1e-6, 1e-15);
    CHECK(std::abs(root - lambda) <= 1e-8);
    CHECK_THROWS_AS(green_coupled(V, shear, root, ell), KreinSingular);
  }
}

TEST_CASE("Dirichlet eigenvalue propagates from the coefficient matrix") {
  const double lambda = std::pow(pi / 4, 2);
  CHECK_THROWS_AS(krein_matrix(Potential::zero(), shear, lambda, 2), DirichletEigenvalueHit);
}
