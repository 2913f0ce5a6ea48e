#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "micropolar/errors.hpp"
#include "micropolar/operators.hpp"
#include "micropolar/transport.hpp"
#include "oracles.hpp"

using namespace micropolar;

namespace {

// Divergence-free velocity vanishing on the walls, from a random node stream
// function that is zero on the boundary nodes.
VectorField random_solenoidal(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NodeField psi(g);
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) psi(i, j) = u(rng) * g.dx();
  return curl_of_stream(psi);
}

VectorField scaled_to_courant(VectorField u, double dt, double target) {
  const double c = inflow_courant(u, dt).value;
  u *= target / c;
  return u;
}

}  // namespace

TEST_CASE("zero velocity leaves the density untouched") {
  const Grid g(12, 9, 1.0, 1.0);
  std::mt19937_64 rng(1);
  const DensityField rho(oracle::random_cells(g, rng, 0.5, 2.0));
  const DensityField next = advect_density(rho, VectorField(g), 0.1);
  for (std::size_t k = 0; k < next.field().size(); ++k)
    CHECK(next.field()[k] == rho.field()[k]);
}

TEST_CASE("constant density is preserved exactly") {
  const Grid g(12, 12, 1.0, 1.0);
  std::mt19937_64 rng(2);
  const DensityField rho(ScalarField(g, 1.7));
  const VectorField u = scaled_to_courant(random_solenoidal(g, rng), 0.01, 0.95);
  const DensityField next = advect_density(rho, u, 0.01);
  for (double v : next.field().values()) CHECK(v == 1.7);
  CHECK(upwind_transport(ScalarField(g, 1.7), u).max_abs() == 0.0);
}

TEST_CASE("discrete maximum principle on random data") {
  const Grid g(16, 16, 1.0, 1.0);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    DensityField rho(oracle::random_cells(g, rng, 0.3, 3.0));
    const double lo = rho.alpha(), hi = rho.beta();
    const VectorField u = scaled_to_courant(random_solenoidal(g, rng), 0.02, 0.999);
    for (int n = 0; n < 10; ++n) rho = advect_density(rho, u, 0.02);
    CHECK(rho.field().min() >= lo);
    CHECK(rho.field().max() <= hi);
    CHECK(rho.alpha() == lo);
    CHECK(rho.beta() == hi);
  }
}

TEST_CASE("CFL violation names the offending cell") {
  const Grid g(8, 8, 1.0, 1.0);
  VectorField u(g);
  u.x(3, 5) = 100.0;
  const DensityField rho(ScalarField(g, 1.0));
  try {
    advect_density(rho, u, 0.1);
    FAIL("expected CflViolation");
  } catch (const CflViolation& e) {
    CHECK(e.i() == 3);
    CHECK(e.j() == 5);
    CHECK(e.courant() > 1.0);
  }
}

TEST_CASE("non-finite inputs are rejected") {
  const Grid g(8, 8, 1.0, 1.0);
  const DensityField rho(ScalarField(g, 1.0));
  VectorField u(g);
  u.y(2, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(advect_density(rho, u, 0.01), NonFiniteInput);
  CHECK_THROWS_AS(DensityField(ScalarField(g, -1.0)), ValidationError);
}

TEST_CASE("one revolution of a blob against the characteristic oracle") {
  // Solid-body rotation about the center out to r = 0.3, tapering to rest
  // at r = 0.45, from a node stream function.
  const Grid g(64, 64, 1.0, 1.0);
  const double pi = std::numbers::pi;
  const double omega = 2.0 * pi;
  const double r0 = 0.3, r1 = 0.45;
  auto speed = [&](double r) {  // angular velocity times r
    if (r <= r0) return omega * r;
    if (r >= r1) return 0.0;
    const double s = (r - r0) / (r1 - r0);
    return omega * r0 * (1 - s) * (1 - s) * (1 + 2 * s);
  };
  // psi(r) = integral of speed, by fine trapezoid steps.
  auto stream = [&](double r) {
    const int n = 2000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a = r * k / n, b = r * (k + 1) / n;
      sum += 0.5 * (speed(a) + speed(b)) * (b - a);
    }
    return sum;
  };
  const NodeField psi = NodeField::sample(g, [&](double x, double y) {
    return -stream(std::hypot(x - 0.5, y - 0.5));
  });
  const VectorField u = curl_of_stream(psi);
  const oracle::Velocity vel = [&](double x, double y) {
    const double r = std::hypot(x - 0.5, y - 0.5);
    if (r == 0.0) return std::array<double, 2>{0.0, 0.0};
    const double s = speed(r) / r;
    return std::array<double, 2>{-s * (y - 0.5), s * (x - 0.5)};
  };

  const double sigma = 0.06;
  auto blob = [&](double x, double y) {
    const double r2 = (x - 0.7) * (x - 0.7) + (y - 0.5) * (y - 0.5);
    return 1.0 + std::exp(-r2 / (2 * sigma * sigma));
  };
  const ScalarField rho0 = ScalarField::sample(g, blob);
  const double umax = u.max_abs();
  const int steps = static_cast<int>(std::ceil(1.0 / (0.5 * g.dx() / umax)));
  const double dt = 1.0 / steps;

  DensityField rho{ScalarField(rho0)};
  for (int n = 0; n < steps; ++n) rho = advect_density(rho, u, dt);
  const ScalarField sl = oracle::back_trace(g, vel, blob, 1.0, 400);

  // First-order upwinding behaves like diffusion with D ~ |u| h / 2. Over one
  // period a Gaussian of width sigma spreads to sqrt(sigma^2 + 2 D T).
  const double r_blob = 0.2;
  const double diff = omega * r_blob * g.dx() / 2.0;
  const double sigma_t = std::sqrt(sigma * sigma + 2.0 * diff * 1.0);
  const ScalarField spread = ScalarField::sample(g, [&](double x, double y) {
    const double r2 = (x - 0.7) * (x - 0.7) + (y - 0.5) * (y - 0.5);
    return 1.0 + sigma * sigma / (sigma_t * sigma_t) *
                     std::exp(-r2 / (2 * sigma_t * sigma_t));
  });
  const double estimate = l2_norm(spread - rho0);
  const double sl_error = l2_norm(sl - rho0);
  const double discrepancy = l2_norm(rho.field() - sl);
  MESSAGE("upwind vs characteristics: " << discrepancy << ", diffusion estimate "
                                        << estimate << ", oracle error " << sl_error);
  CHECK(sl_error < 0.5 * estimate);
  CHECK(discrepancy <= 1.5 * estimate + sl_error);
  CHECK(rho.field().min() >= rho.alpha());
  CHECK(rho.field().max() <= rho.beta());
}
