#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "micropolar/errors.hpp"
#include "micropolar/inverse.hpp"
#include "micropolar/operators.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace micropolar;

namespace {

GammaSeries gamma_series(std::vector<double> g1) {
  GammaSeries g;
  for (std::size_t k = 0; k < g1.size(); ++k) g.times.push_back(0.1 * static_cast<double>(k));
  g.gamma_2.assign(g1.size(), 1.0);
  g.gamma_1 = std::move(g1);
  return g;
}

FlowState initial_of(const ForwardSetup& s) {
  DirectSolver solver(s.grid, s.params, s.shapes, s.dt(), s.tolerances);
  return solver.initial_state(s.initial);
}

}  // namespace

TEST_CASE("gamma") {
  const Grid g(16, 16, 1.0, 1.0);
  const ProbeSet probes = build_probe("default", g);
  SUBCASE("m = grad h gives gamma_1 = 0") {
    testing::SetupOptions o;
    o.m.kind = "gradient";
    const ForwardSetup s = testing::make_setup(o);
    const auto [g1, g2] = eval_gamma(initial_of(s), s.shapes, probes);
    CHECK(std::abs(g1) <= 1e-10);
    CHECK(g2 != 0.0);
  }
  SUBCASE("unit density and q = psi_w") {
    const ShapeForcing shapes = ShapeForcing::steady(VectorField(g), probes.psi_w);
    const FlowState st{0.0, DensityField(ScalarField(g, 1.0)), VectorField(g), ScalarField(g),
                       ScalarField(g), ScalarField(g)};
    const auto [g1, g2] = eval_gamma(st, shapes, probes);
    CHECK(g1 == 0.0);
    CHECK(g2 == doctest::Approx(inner_product(probes.psi_w, probes.psi_w)).epsilon(1e-14));
  }
  SUBCASE("random inputs against the face quadrature oracle") {
    std::mt19937_64 rng(31);
    const ScalarField rho = oracle::random_cells(g, rng, 0.5, 2.0);
    const VectorField m = oracle::random_faces(g, rng, -1.0, 1.0);
    const ScalarField q = oracle::random_cells(g, rng, -1.0, 1.0);
    ScalarField h = oracle::random_cells(g, rng, -1.0, 1.0);
    const double mean = integrate(h) / g.area();
    for (double& v : h.values()) v -= mean;
    const FlowState st{0.0, DensityField(rho), VectorField(g), ScalarField(g), ScalarField(g), h};
    const auto [g1, g2] = eval_gamma(st, ShapeForcing::steady(m, q), probes);
    const Eigen::VectorXd integrand =
        (oracle::face_density(rho).array() *
         (oracle::gradient_matrix(g) * oracle::cells(h) - oracle::faces(m)).array())
            .matrix();
    CHECK(g1 == doctest::Approx(oracle::face_quadrature(g, integrand, oracle::faces(probes.psi_u)))
                    .epsilon(1e-12));
    double want2 = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) want2 += rho[k] * q[k] * probes.psi_w[k];
    CHECK(g2 == doctest::Approx(want2 * g.cell_volume()).epsilon(1e-12));
  }
}

TEST_CASE("degeneracy guard") {
  CHECK_NOTHROW(check_degeneracy(gamma_series({1, 1, 1, 1}), 0.5, 0.5));
  try {
    check_degeneracy(gamma_series({1.0, 0.6, 0.1, -0.4}), 0.5, 0.5);
    FAIL("expected DegeneracyError");
  } catch (const DegeneracyError& e) {
    CHECK(e.component() == 1);
    CHECK(e.index() == 2);
    CHECK(e.time() == doctest::Approx(0.2));
    CHECK(e.threshold() == 0.5);
  }
}

TEST_CASE("N on the rest trajectory") {
  const ForwardSetup s = testing::make_setup();
  const Trajectory tr = solve_forward(testing::zero_sources(s), s);
  const ProbeSet probes = build_probe("default", s.grid);
  Observations obs;
  obs.times = tr.times();
  obs.phi_u.assign(obs.times.size(), 0.0);
  obs.phi_w.assign(obs.times.size(), 0.0);
  auto [n1, n2] = eval_N(tr, obs, probes, s.params);
  for (std::size_t k = 0; k < n1.size(); ++k) {
    CHECK(n1[k] == 0.0);
    CHECK(n2[k] == 0.0);
  }
  obs.phi_u = obs.times;
  std::tie(n1, n2) = eval_N(tr, obs, probes, s.params);
  for (double v : n1) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  obs.times.pop_back();
  obs.phi_u.pop_back();
  obs.phi_w.pop_back();
  CHECK_THROWS_AS(eval_N(tr, obs, probes, s.params), AlignmentError);
}

TEST_CASE("compatibility at t = 0") {
  testing::SetupOptions o;
  o.velocity = {"vortex", 0.4};
  o.microrotation = {"bump", 0.3};
  const ForwardSetup s = testing::make_setup(o);
  const ProbeSet probes = build_probe("default", s.grid);
  const Trajectory tr = solve_forward(testing::harmonic(s), s);
  const FlowState init = initial_of(s);

  Observations obs = generate_synthetic_observations(tr, probes);
  const CompatibilityResult r = check_compatibility(obs, init, probes, 1e-12);
  CHECK(r.residual_u <= 1e-12);
  CHECK(r.residual_w <= 1e-12);

  Observations shifted = obs;
  shifted.phi_u[0] += 1.0;
  try {
    check_compatibility(shifted, init, probes, 1e-9);
    FAIL("expected CompatibilityError");
  } catch (const CompatibilityError& e) {
    CHECK(e.residual_u() == doctest::Approx(1.0));
  }

  const Observations noisy = generate_synthetic_observations(tr, probes, {1e-3, 5});
  CHECK_NOTHROW(check_compatibility(noisy, init, probes, 1e-2));
  CHECK_THROWS_AS(check_compatibility(noisy, init, probes, 1e-6), CompatibilityError);
}

TEST_CASE("R at the ground truth reproduces it") {
  testing::SetupOptions o;
  o.n = 32;
  o.steps = 50;
  o.final_time = 0.25;
  const ForwardSetup s = testing::make_setup(o);
  const SourcePair truth = testing::harmonic(s);
  const ProbeSet probes = build_probe("default", s.grid);
  const Observations obs = generate_synthetic_observations(solve_forward(truth, s), probes);
  const REvaluation r = eval_R_detailed(truth, obs, probes, s, 1e-6, 1e-6);
  const double rel = l2_distance(r.value, truth) / l2_norm(truth);
  MESSAGE("relative consistency residual " << rel);
  CHECK(rel <= 0.01);
  for (std::size_t k = 0; k < truth.size(); ++k)
    CHECK(r.n_1[k] / r.gamma.gamma_1[k] == doctest::Approx(r.value.f()[k]).epsilon(1e-14));
}

TEST_CASE("rest data") {
  const ForwardSetup s = testing::make_setup();
  const ProbeSet probes = build_probe("default", s.grid);
  const Observations obs =
      generate_synthetic_observations(solve_forward(testing::zero_sources(s), s), probes);

  const SourcePair small = SourcePair::constant(s.times(), 0.1, 0.1);
  InverseConfig cfg;
  const SourcePair image = eval_R(small, obs, probes, s, cfg);
  CHECK(l2_norm(image) < l2_norm(small));

  const ReconstructionReport rep = reconstruct(obs, probes, s, cfg);
  CHECK(rep.status == "converged");
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(l2_norm(rep.recovered) == 0.0);
}

TEST_CASE("two initial guesses converge to the same pair") {
  const ForwardSetup s = testing::make_setup();
  const SourcePair truth = testing::harmonic(s);
  const ProbeSet probes = build_probe("default", s.grid);
  const Observations obs = generate_synthetic_observations(solve_forward(truth, s), probes);
  InverseConfig a;
  InverseConfig b;
  b.initial_guess = SourcePair::constant(s.times(), 2.0, 2.0);
  const ReconstructionReport ra = reconstruct(obs, probes, s, a);
  const ReconstructionReport rb = reconstruct(obs, probes, s, b);
  REQUIRE(ra.converged);
  REQUIRE(rb.converged);
  CHECK(l2_distance(ra.recovered, rb.recovered) <= 2.0 * a.tolerance);
  for (std::size_t k = 1; k < ra.increments.size(); ++k)
    CHECK(ra.increments[k] < ra.increments[k - 1]);
  CHECK(l2_distance(ra.recovered, truth) / l2_norm(truth) <= 0.05);
}

TEST_CASE("failure modes are reported, not thrown") {
  const ForwardSetup s = testing::make_setup();
  const SourcePair truth = testing::harmonic(s);
  const ProbeSet probes = build_probe("default", s.grid);
  const Observations obs = generate_synthetic_observations(solve_forward(truth, s), probes);

  InverseConfig tight;
  tight.max_iterations = 2;
  const ReconstructionReport r1 = reconstruct(obs, probes, s, tight);
  CHECK(r1.status == "max_iterations");
  CHECK_FALSE(r1.converged);
  CHECK(r1.increments.size() == 2);

  InverseConfig guarded;
  guarded.h_eps = 1e6;
  const ReconstructionReport r2 = reconstruct(obs, probes, s, guarded);
  CHECK(r2.status == "degenerate");

  Observations bad = obs;
  bad.phi_w[0] += 1.0;
  CHECK_THROWS_AS(reconstruct(bad, probes, s, InverseConfig{}), CompatibilityError);

  InverseConfig invalid;
  invalid.relaxation = 1.5;
  CHECK_THROWS_AS(invalid.validate(), ValidationError);

  const auto j = nlohmann::json::parse(report_to_json(r1));
  CHECK(j["status"] == "max_iterations");
  CHECK(j["recovered"]["f"].size() == truth.size());
  CHECK(j["guards"].contains("margin_1"));
}

TEST_CASE("relaxation still converges") {
  const ForwardSetup s = testing::make_setup();
  const ProbeSet probes = build_probe("default", s.grid);
  const SourcePair truth = testing::harmonic(s);
  const Observations obs = generate_synthetic_observations(solve_forward(truth, s), probes);
  InverseConfig cfg;
  cfg.relaxation = 0.7;
  const ReconstructionReport r = reconstruct(obs, probes, s, cfg);
  CHECK(r.converged);
  CHECK(r.relaxation == 0.7);
}
