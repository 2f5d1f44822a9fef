#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "modad/field.hpp"

using namespace modad;

TEST_CASE("L2 projection reproduces polynomials of matching degree") {
  Mesh1D m = build_mesh_1d(-1.0, 2.0, 7, false);
  auto f = [](double x) { return 1.0 - 2.0 * x + 0.3 * x * x; };
  DGField1D u = l2_project(f, m, 2);
  for (double x : {-0.9, 0.0, 0.4, 1.2, 1.99}) CHECK(std::abs(u.eval(x) - f(x)) < 1e-12);
}

TEST_CASE("projection is idempotent") {
  Mesh1D m = build_mesh_1d(0.0, 1.0, 5, true);
  DGField1D u = l2_project([](double x) { return std::sin(6.0 * x); }, m, 3);
  DGField1D u2 = l2_project([&](double x) { return u.eval(x); }, m, 3);
  for (size_t i = 0; i < u.data().size(); ++i)
    CHECK(std::abs(u.data()[i] - u2.data()[i]) < 1e-11);
}

TEST_CASE("L2 norm of sine") {
  Mesh1D m = build_mesh_1d(-M_PI, M_PI, 64, true);
  DGField1D u = l2_project([](double x) { return std::sin(x); }, m, 3);
  CHECK(std::abs(l2_norm(u) - std::sqrt(M_PI)) < 1e-8);
}

TEST_CASE("integral and derivative evaluation") {
  Mesh1D m = build_mesh_1d(0.0, 2.0, 6, false);
  DGField1D u = l2_project([](double x) { return x * x; }, m, 2);
  CHECK(std::abs(integral(u) - 8.0 / 3.0) < 1e-12);
  CHECK(std::abs(u.eval_dx_ref(2, 0.3, 0) -
                 2.0 * (m.cell_mid(2) + 0.15 * m.h())) < 1e-11);
}

TEST_CASE("non-finite data is rejected") {
  Mesh1D m = build_mesh_1d(0.0, 1.0, 4, true);
  CHECK_THROWS_AS(l2_project([](double x) { return x > 0.5 ? std::nan("") : 1.0; }, m, 1),
                  std::runtime_error);
}

TEST_CASE("2D projection reproduces tensor polynomials") {
  Mesh2D m = build_mesh_2d(-1.0, 1.0, 0.0, 2.0, 4, 5, false);
  auto f = [](double x, double y) { return (1.0 + x) * (2.0 - 0.5 * y) + x * y; };
  DGField2D u = l2_project(f, m, 1);
  for (double x : {-0.7, 0.1, 0.9})
    for (double y : {0.1, 1.0, 1.9}) CHECK(std::abs(u.eval(x, y) - f(x, y)) < 1e-12);
}

TEST_CASE("2D norms and integrals") {
  Mesh2D m = build_mesh_2d(-M_PI, M_PI, -M_PI, M_PI, 24, 24, true);
  DGField2D u = l2_project([](double x, double y) { return std::sin(x) * std::sin(y); }, m, 2);
  CHECK(std::abs(l2_norm(u) - M_PI) < 1e-6);
  CHECK(std::abs(integral(u)) < 1e-10);
}

TEST_CASE("model field basics") {
  ModelField e(5);
  CHECK(e.all_zero());
  e[2] = 0.01;
  CHECK_FALSE(e.all_zero());
  CHECK(e.max_value() == 0.01);
  ModelField f(5);
  f[2] = 0.01;
  CHECK(e == f);
}
