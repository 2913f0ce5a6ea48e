#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "micropolar/errors.hpp"
#include "micropolar/operators.hpp"
#include "support.hpp"

using namespace micropolar;
using testing::max_abs_diff;
using testing::stencil_eps;

namespace {

const double kPi = std::numbers::pi;

// Faces whose both end nodes lie strictly inside the domain.
template <class Fn>
void for_inner_xfaces(const Grid& g, Fn&& fn) {
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx(); ++i) fn(i, j);
}
template <class Fn>
void for_inner_yfaces(const Grid& g, Fn&& fn) {
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 1; i < g.nx() - 1; ++i) fn(i, j);
}
template <class Fn>
void for_inner_cells(const Grid& g, Fn&& fn) {
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) fn(i, j);
}

}  // namespace

TEST_CASE("gradient of a constant vanishes") {
  const Grid g(8, 6, 1.0, 0.75);
  const VectorField v = gradient(ScalarField(g, 3.25));
  CHECK(v.max_abs() == 0.0);
}

TEST_CASE("gradient reproduces linear fields on every face") {
  const Grid g(10, 7, 2.0, 1.0);
  const double a = 0.7, b = -1.3;
  const VectorField v =
      gradient(ScalarField::sample(g, [&](double x, double y) { return a * x + b * y; }));
  for (double x : v.x_values()) CHECK(x == doctest::Approx(a).epsilon(1e-12));
  for (double y : v.y_values()) CHECK(y == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("gradient matches the dense stencil oracle") {
  const Grid g(16, 16, 1.0, 1.0);
  const ScalarField s =
      ScalarField::sample(g, [](double x, double) { return std::sin(kPi * x); });
  const Eigen::VectorXd want = oracle::gradient_matrix(g) * oracle::cells(s);
  CHECK(max_abs_diff(oracle::faces(gradient(s)), want) <= stencil_eps(1.0, 16.0));
}

TEST_CASE("gradient_interior zeroes boundary faces only") {
  const Grid g(6, 5, 1.0, 1.0);
  const ScalarField s = ScalarField::sample(g, [](double x, double y) { return x * x + y; });
  const VectorField full = gradient(s);
  const VectorField inner = gradient_interior(s);
  CHECK(inner.max_abs_boundary() == 0.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) CHECK(inner.x(i, j) == full.x(i, j));
}

TEST_CASE("divergence") {
  const Grid g(8, 8, 1.0, 1.0);
  SUBCASE("constant field") {
    CHECK(divergence(VectorField(g, 2.5)).max_abs() == 0.0);
  }
  SUBCASE("gradient of a linear field") {
    const VectorField v =
        gradient(ScalarField::sample(g, [](double x, double y) { return 2 * x - y; }));
    CHECK(divergence(v).max_abs() <= 1e-12);
  }
  SUBCASE("random field against the dense oracle") {
    std::mt19937_64 rng(7);
    const VectorField v = oracle::random_faces(g, rng, -1.0, 1.0);
    const Eigen::VectorXd want = oracle::divergence_matrix(g) * oracle::faces(v);
    CHECK(max_abs_diff(oracle::cells(divergence(v)), want) <= stencil_eps(1.0, 8.0));
  }
}

TEST_CASE("curl_of_scalar") {
  const Grid g(8, 8, 1.0, 1.0);
  SUBCASE("constant w away from the walls") {
    const VectorField v = curl_of_scalar(ScalarField(g, 1.5));
    for_inner_xfaces(g, [&](int i, int j) { CHECK(v.x(i, j) == 0.0); });
    for_inner_yfaces(g, [&](int i, int j) { CHECK(v.y(i, j) == 0.0); });
  }
  SUBCASE("w = x y gives (x, -y)") {
    const VectorField v =
        curl_of_scalar(ScalarField::sample(g, [](double x, double y) { return x * y; }));
    for_inner_xfaces(g, [&](int i, int j) {
      CHECK(v.x(i, j) == doctest::Approx(g.xn(i)).epsilon(1e-12));
    });
    for_inner_yfaces(g, [&](int i, int j) {
      CHECK(v.y(i, j) == doctest::Approx(-g.yn(j)).epsilon(1e-12));
    });
  }
}

TEST_CASE("curl_of_vector") {
  const Grid g(8, 8, 1.0, 1.0);
  SUBCASE("constant field away from the walls") {
    const ScalarField c = curl_of_vector(VectorField(g, 0.4));
    for_inner_cells(g, [&](int i, int j) { CHECK(c(i, j) == 0.0); });
  }
  SUBCASE("curl of a gradient") {
    const ScalarField c = curl_of_vector(
        gradient(ScalarField::sample(g, [](double x, double y) { return x * x + y * y; })));
    for_inner_cells(g, [&](int i, int j) { CHECK(std::abs(c(i, j)) <= 1e-12); });
  }
  SUBCASE("rigid rotation has curl 2") {
    const VectorField v = VectorField::sample(
        g, [](double, double y) { return -y; }, [](double x, double) { return x; });
    const ScalarField c = curl_of_vector(v);
    for_inner_cells(g, [&](int i, int j) {
      CHECK(c(i, j) == doctest::Approx(2.0).epsilon(1e-12));
    });
  }
  SUBCASE("random field against the dense oracle") {
    std::mt19937_64 rng(11);
    const VectorField v = oracle::random_faces(g, rng, -1.0, 1.0);
    const Eigen::VectorXd want = oracle::curl_of_vector_matrix(g) * oracle::faces(v);
    CHECK(max_abs_diff(oracle::cells(curl_of_vector(v)), want) <= stencil_eps(1.0, 16.0));
  }
}

TEST_CASE("laplacian") {
  const Grid g(8, 8, 1.0, 1.0);
  SUBCASE("linear field vanishes inside") {
    const ScalarField l =
        laplacian(ScalarField::sample(g, [](double x, double y) { return 3 * x - y; }));
    for_inner_cells(g, [&](int i, int j) { CHECK(std::abs(l(i, j)) <= 1e-11); });
  }
  SUBCASE("x^2 gives 2 inside") {
    const ScalarField l =
        laplacian(ScalarField::sample(g, [](double x, double) { return x * x; }));
    for_inner_cells(g, [&](int i, int j) {
      CHECK(l(i, j) == doctest::Approx(2.0).epsilon(1e-11));
    });
  }
  SUBCASE("random field against the dense oracle, both ghost rules") {
    std::mt19937_64 rng(3);
    const ScalarField s = oracle::random_cells(g, rng, -1.0, 1.0);
    const double tol = stencil_eps(1.0, 4.0 * 64.0);
    CHECK(max_abs_diff(oracle::cells(laplacian(s, Ghost::Dirichlet)),
                       oracle::laplacian_matrix(g, -1.0) * oracle::cells(s)) <= tol);
    CHECK(max_abs_diff(oracle::cells(laplacian(s, Ghost::Neumann)),
                       oracle::laplacian_matrix(g, 1.0) * oracle::cells(s)) <= tol);
  }
}

TEST_CASE("dirichlet forms are the negative Laplacian pairings") {
  const Grid g(9, 7, 1.0, 0.8);
  std::mt19937_64 rng(5);
  const ScalarField a = oracle::random_cells(g, rng, -1.0, 1.0);
  const ScalarField b = oracle::random_cells(g, rng, -1.0, 1.0);
  const double form = dirichlet_form(a, b);
  CHECK(form == doctest::Approx(-inner_product(laplacian(a), b)).epsilon(1e-12));
  CHECK(form == doctest::Approx(dirichlet_form(b, a)).epsilon(1e-14));

  VectorField u = oracle::random_faces(g, rng, -1.0, 1.0);
  VectorField v = oracle::random_faces(g, rng, -1.0, 1.0);
  u.zero_boundary();
  v.zero_boundary();
  CHECK(dirichlet_form(u, v) ==
        doctest::Approx(-inner_product(laplacian_vec(u), v)).epsilon(1e-12));
  CHECK(dirichlet_form(u, u) > 0.0);
}

TEST_CASE("quadrature orthogonality of sin(2 pi x) and sin(4 pi x)") {
  const Grid g(64, 64, 1.0, 1.0);
  const ScalarField a =
      ScalarField::sample(g, [](double x, double) { return std::sin(2 * kPi * x); });
  const ScalarField b =
      ScalarField::sample(g, [](double x, double) { return std::sin(4 * kPi * x); });
  CHECK(std::abs(inner_product(a, b)) <= 1e-12 * g.area());
}

TEST_CASE("face quadrature integrates constants exactly") {
  const Grid g(12, 5, 1.5, 0.5);
  const VectorField one(g, 1.0);
  CHECK(inner_product(one, VectorField(g, 2.0)) == doctest::Approx(2.0 * 2.0 * g.area()));
}

TEST_CASE("structural identities on random fields") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const Grid g(8 + trial, 12 - trial / 2, 1.0 + 0.1 * trial, 1.0);
    const ScalarField w = oracle::random_cells(g, rng, -1.0, 1.0);
    const ScalarField s = oracle::random_cells(g, rng, -1.0, 1.0);
    const double scale = 1.0 / (g.dx() * g.dy());
    CHECK(divergence(curl_of_scalar(w)).max_abs() <= testing::stencil_eps(1.0, scale));
    const ScalarField c = curl_of_vector(gradient(s));
    for_inner_cells(g, [&](int i, int j) {
      CHECK(std::abs(c(i, j)) <= testing::stencil_eps(1.0, scale));
    });
  }
}

TEST_CASE("mismatched grids are rejected") {
  const ScalarField a(Grid(4, 4, 1.0, 1.0));
  const ScalarField b(Grid(4, 5, 1.0, 1.0));
  CHECK_THROWS_AS(inner_product(a, b), GridMismatch);
  CHECK_THROWS_AS(ScalarField(a) += b, GridMismatch);
}
