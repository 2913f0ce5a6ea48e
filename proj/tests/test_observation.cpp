#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "micropolar/errors.hpp"
#include "micropolar/observation.hpp"
#include "micropolar/operators.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace micropolar;

namespace {

FlowState plain_state(const Grid& g, ScalarField rho, VectorField u, ScalarField w) {
  return FlowState{0.0, DensityField(std::move(rho)), std::move(u), std::move(w),
                   ScalarField(g), ScalarField(g)};
}

Observations series(std::vector<double> t, std::vector<double> u, std::vector<double> w) {
  Observations o;
  o.times = std::move(t);
  o.phi_u = std::move(u);
  o.phi_w = std::move(w);
  return o;
}

}  // namespace

TEST_CASE("observe") {
  const Grid g(16, 16, 1.0, 1.0);
  const ProbeSet probes = build_probe("default", g);
  SUBCASE("zero state") {
    const auto [pu, pw] = observe(plain_state(g, ScalarField(g, 2.0), VectorField(g), ScalarField(g)), probes);
    CHECK(pu == 0.0);
    CHECK(pw == 0.0);
  }
  SUBCASE("unit density and u = psi_u") {
    const auto [pu, pw] = observe(
        plain_state(g, ScalarField(g, 1.0), probes.psi_u, probes.psi_w), probes);
    const CenterVector c = center_average(probes.psi_u);
    CHECK(pu == doctest::Approx(inner_product(c.x, c.x) + inner_product(c.y, c.y)).epsilon(1e-14));
    CHECK(pw == doctest::Approx(inner_product(probes.psi_w, probes.psi_w)).epsilon(1e-14));
  }
  SUBCASE("random state against the quadrature oracle") {
    std::mt19937_64 rng(21);
    const ScalarField rho = oracle::random_cells(g, rng, 0.5, 2.0);
    const VectorField u = oracle::random_faces(g, rng, -1.0, 1.0);
    const ScalarField w = oracle::random_cells(g, rng, -1.0, 1.0);
    const auto [pu, pw] = observe(plain_state(g, rho, u, w), probes);
    CHECK(pu == doctest::Approx(oracle::center_quadrature(rho, u, probes.psi_u)).epsilon(1e-12));
    double want_w = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) want_w += rho[k] * w[k] * probes.psi_w[k];
    CHECK(pw == doctest::Approx(want_w * g.cell_volume()).epsilon(1e-12));
  }
}

TEST_CASE("probe hypotheses") {
  const Grid g(12, 12, 1.0, 1.0);
  CHECK_NOTHROW(build_probe("offset", g));
  CHECK_THROWS_AS(build_probe("nonsense", g), ValidationError);
  ProbeSet p = build_probe("default", g);
  SUBCASE("divergent psi_u") {
    p.psi_u.x(5, 5) += 1.0;
  }
  SUBCASE("psi_w on the boundary") {
    p.psi_w(0, 4) = 0.1;
  }
  SUBCASE("vanishing probe") {
    p.psi_w = ScalarField(g);
  }
  try {
    p.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.hypothesis() == "H5");
  }
}

TEST_CASE("differentiate_series") {
  SUBCASE("constant") {
    const Observations d = differentiate_series(series({0, 0.1, 0.2, 0.3}, {2, 2, 2, 2}, {-1, -1, -1, -1}));
    for (double v : d.phi_u) CHECK(std::abs(v) <= 1e-12);
    for (double v : d.phi_w) CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("linear") {
    std::vector<double> t, u, w;
    for (int k = 0; k <= 10; ++k) {
      t.push_back(0.05 * k);
      u.push_back(3.0 * t.back());
      w.push_back(1.0 - 0.5 * t.back());
    }
    const Observations d = differentiate_series(series(t, u, w));
    for (double v : d.phi_u) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
    for (double v : d.phi_w) CHECK(v == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("sin t at dt = 1e-2") {
    std::vector<double> t, u;
    for (int k = 0; k <= 200; ++k) {
      t.push_back(0.01 * k);
      u.push_back(std::sin(t.back()));
    }
    const Observations d = differentiate_series(series(t, u, u));
    double err = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) err = std::max(err, std::abs(d.phi_u[k] - std::cos(t[k])));
    CHECK(err <= 1e-4);
  }
  SUBCASE("non-uniform grid matches Lagrange differentiation") {
    std::vector<double> t{0.0, 0.07, 0.1, 0.18, 0.3, 0.33};
    std::vector<double> u;
    for (double x : t) u.push_back(std::exp(x) * std::cos(3 * x));
    const Observations d = differentiate_series(series(t, u, u));
    const std::vector<double> want = oracle::lagrange_derivative(t, u);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(d.phi_u[k] == doctest::Approx(want[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(differentiate_series(series({0, 1}, {0, 1}, {0, 1})), ValidationError);
}

TEST_CASE("synthetic observations") {
  testing::SetupOptions o;
  o.velocity = {"vortex", 0.3};
  o.microrotation = {"bump", 0.2};
  const ForwardSetup s = testing::make_setup(o);
  const Trajectory tr = solve_forward(testing::harmonic(s), s);
  const ProbeSet probes = build_probe("default", s.grid);

  const Observations clean = generate_synthetic_observations(tr, probes);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const auto [pu, pw] = observe(tr.states[k], probes);
    CHECK(clean.phi_u[k] == pu);
    CHECK(clean.phi_w[k] == pw);
    CHECK(clean.times[k] == tr.states[k].t);
  }
  CHECK_FALSE(clean.noise.has_value());

  const Observations n1 = generate_synthetic_observations(tr, probes, {1e-3, 42});
  const Observations n2 = generate_synthetic_observations(tr, probes, {1e-3, 42});
  const Observations n3 = generate_synthetic_observations(tr, probes, {1e-3, 43});
  CHECK(n1.phi_u == n2.phi_u);
  CHECK(n1.phi_w == n2.phi_w);
  CHECK(n1.phi_u != n3.phi_u);
  CHECK(n1.phi_u != clean.phi_u);
  REQUIRE(n1.noise.has_value());
  CHECK(n1.noise->seed == 42);

  const std::vector<double> sub{s.times()[0], s.times()[4], s.times()[8]};
  CHECK(generate_synthetic_observations(tr, probes, {}, &sub).size() == 3);
  const std::vector<double> off{0.0123};
  CHECK_THROWS_AS(generate_synthetic_observations(tr, probes, {}, &off), AlignmentError);

  const ForwardSetup rest = testing::make_setup();
  const Observations zero = generate_synthetic_observations(
      solve_forward(testing::zero_sources(rest), rest), probes);
  for (std::size_t k = 0; k < zero.size(); ++k) {
    CHECK(zero.phi_u[k] == 0.0);
    CHECK(zero.phi_w[k] == 0.0);
  }
}

TEST_CASE("observation CSV") {
  Observations o = series({0.0, 0.1, 0.2}, {1.0 / 3.0, -2e-17, 5.5}, {0.1, 0.2, 1e300});
  o.noise = NoiseSpec{1e-3, 9};
  std::stringstream ss;
  write_observations_csv(ss, o);
  const Observations back = read_observations_csv(ss);
  CHECK(back.times == o.times);
  CHECK(back.phi_u == o.phi_u);
  CHECK(back.phi_w == o.phi_w);
  REQUIRE(back.noise.has_value());
  CHECK(back.noise->amplitude == 1e-3);
  CHECK(back.noise->seed == 9);

  auto parse_line = [](const std::string& text) {
    std::istringstream is(text);
    try {
      read_observations_csv(is);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(parse_line("t,phi_u,phi_w\n0,1,2\n0.1,1\n") == 3);
  CHECK(parse_line("t,phi_u,phi_w\n0,1,2\n0.1,x,2\n") == 3);
  CHECK(parse_line("time,a,b\n0,1,2\n") == 1);
  CHECK(parse_line("t,phi_u,phi_w\n0.1,1,2\n0.1,1,2\n") == 3);
  CHECK(parse_line("t,phi_u,phi_w\n0,nan,2\n") == 2);
  CHECK(parse_line("") != -1);
}

TEST_CASE("file loaders keep the line number and name the file") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "micropolar_bad_obs.csv").string();
  {
    std::ofstream os(path);
    os << "t,phi_u,phi_w\n0,0,0\n0.1,0.5\n";
  }
  try {
    load_observations(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find(path + ":3:") == 0);
  }
  std::filesystem::remove(path);
}
