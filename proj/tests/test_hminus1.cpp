#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "modad/hminus1.hpp"

using namespace modad;

TEST_CASE("dual norm of Fourier modes matches the closed form, 1D") {
  // || sin(kx) ||_{H^{-1}}^2 = pi / (1 + k^2) on [-pi, pi] periodic
  Mesh1D m = build_mesh_1d(-M_PI, M_PI, 64, true);
  DualNorm1D dn(m, 3);
  for (int k : {1, 2, 4}) {
    auto b = dn.zero_load();
    dn.add_volume_load(
        b,
        [&](int cell, double xi) {
          double x = m.cell_mid(cell) + 0.5 * m.h() * xi;
          return std::sin(k * x);
        },
        8);
    double exact = M_PI / (1.0 + k * k);
    CHECK(std::abs(dn.norm_squared(b) - exact) < 0.005 * exact);
  }
}

TEST_CASE("gradient loads agree with integrated-by-parts volume loads") {
  // <R,chi> = int g chi'  equals  -int g' chi for smooth periodic g
  Mesh1D m = build_mesh_1d(-M_PI, M_PI, 48, true);
  DualNorm1D dn(m, 3);
  auto g = [&](int cell, double xi) {
    double x = m.cell_mid(cell) + 0.5 * m.h() * xi;
    return std::cos(2.0 * x);
  };
  auto dg = [&](int cell, double xi) {
    double x = m.cell_mid(cell) + 0.5 * m.h() * xi;
    return -2.0 * std::sin(2.0 * x);
  };
  auto b1 = dn.zero_load();
  dn.add_gradient_load(b1, g, 8);
  auto b2 = dn.zero_load();
  dn.add_volume_load(b2, [&](int c, double xi) { return -dg(c, xi); }, 8);
  CHECK((b1 - b2).cwiseAbs().maxCoeff() < 2e-4);
  CHECK(std::abs(dn.norm_squared(b1) - dn.norm_squared(b2)) < 1e-4);
}

TEST_CASE("localized energies sum to the norm, 1D") {
  Mesh1D m = build_mesh_1d(-M_PI, M_PI, 32, true);
  DualNorm1D dn(m, 3);
  auto b = dn.zero_load();
  dn.add_volume_load(
      b,
      [&](int cell, double xi) {
        double x = m.cell_mid(cell) + 0.5 * m.h() * xi;
        return std::exp(-2.0 * x * x);
      },
      8);
  std::vector<double> cell_e;
  double n2 = dn.norm_squared(b, cell_e);
  double s = 0.0;
  for (double e : cell_e) s += e;
  CHECK(std::abs(s - n2) < 1e-12 * (1.0 + n2));
  // the load is centered: energy should concentrate near x = 0
  int kmax = 0;
  for (int k = 1; k < m.n_cells(); ++k)
    if (cell_e[k] > cell_e[kmax]) kmax = k;
  CHECK(std::abs(m.cell_mid(kmax)) < 0.5);
}

TEST_CASE("dual norm of Fourier modes matches the closed form, 2D") {
  // || sin(kx) sin(ly) ||_{H^{-1}}^2 = pi^2 / (1 + k^2 + l^2), periodic box
  Mesh2D m = build_mesh_2d(-M_PI, M_PI, -M_PI, M_PI, 16, 16, true);
  DualNorm2D dn(m, 3);
  for (auto [k, l] : {std::pair{1, 1}, std::pair{2, 1}}) {
    auto b = dn.zero_load();
    dn.add_volume_load(
        b,
        [&](int cell, double xi, double eta) {
          double x = m.cell_xmid(cell) + 0.5 * m.hx() * xi;
          double y = m.cell_ymid(cell) + 0.5 * m.hy() * eta;
          return std::sin(k * x) * std::sin(l * y);
        },
        6);
    double exact = M_PI * M_PI / (1.0 + k * k + l * l);
    CHECK(std::abs(dn.norm_squared(b) - exact) < 0.01 * exact);
  }
}

TEST_CASE("localized energies sum to the norm, 2D") {
  Mesh2D m = build_mesh_2d(-1.0, 1.0, -1.0, 1.0, 8, 8, true);
  DualNorm2D dn(m, 3);
  auto b = dn.zero_load();
  dn.add_volume_load(
      b,
      [&](int cell, double xi, double eta) {
        double x = m.cell_xmid(cell) + 0.5 * m.hx() * xi;
        double y = m.cell_ymid(cell) + 0.5 * m.hy() * eta;
        return std::exp(-4.0 * (x * x + y * y));
      },
      5);
  std::vector<double> cell_e;
  double n2 = dn.norm_squared(b, cell_e);
  double s = 0.0;
  for (double e : cell_e) s += e;
  CHECK(std::abs(s - n2) < 1e-12 * (1.0 + n2));
}

TEST_CASE("invalid conforming degree is rejected") {
  Mesh1D m = build_mesh_1d(0.0, 1.0, 4, true);
  CHECK_THROWS_AS(DualNorm1D(m, 0), std::invalid_argument);
}
