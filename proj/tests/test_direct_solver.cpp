#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "micropolar/errors.hpp"
#include "micropolar/operators.hpp"
#include "scenarios.hpp"

using namespace micropolar;
using testing::make_setup;
using testing::SetupOptions;

namespace {

FlowState state_with_h(const Grid& g, const ScalarField& rho, const ScalarField& h) {
  return FlowState{0.0, DensityField(rho), VectorField(g), ScalarField(g), ScalarField(g), h};
}

ScalarField centered(ScalarField s) {
  const double mean = integrate(s) / s.grid().area();
  for (double& v : s.values()) v -= mean;
  return s;
}

bool same_state(const FlowState& a, const FlowState& b) {
  auto eq = [](auto x, auto y) { return std::equal(x.begin(), x.end(), y.begin(), y.end()); };
  return a.t == b.t && eq(a.rho.field().values(), b.rho.field().values()) &&
         eq(a.u.x_values(), b.u.x_values()) && eq(a.u.y_values(), b.u.y_values()) &&
         eq(a.w.values(), b.w.values()) && eq(a.p.values(), b.p.values()) &&
         eq(a.h.values(), b.h.values());
}

}  // namespace

TEST_CASE("forces vanish for zero coefficients") {
  const ForwardSetup s = make_setup();
  DirectSolver solver(s.grid, s.params, s.shapes, s.dt());
  const FlowState st = solver.initial_state(s.initial);
  const auto [fu, fw] = compute_forces(st, 0.0, 0.0, s.shapes);
  CHECK(fu.max_abs() == 0.0);
  CHECK(fw.max_abs() == 0.0);
}

TEST_CASE("Helmholtz cancellation: m = grad phi and h = phi - mean") {
  const Grid g(12, 12, 1.0, 1.0);
  const ScalarField phi =
      ScalarField::sample(g, [](double x, double y) { return std::sin(3 * x) * y; });
  const ShapeForcing shapes = ShapeForcing::steady(gradient(phi), ScalarField(g));
  const FlowState st = state_with_h(g, ScalarField(g, 1.3), centered(phi));
  const auto [fu, fw] = compute_forces(st, 3.0, 0.0, shapes);
  CHECK(fu.max_abs() <= 1e-12);
}

TEST_CASE("unit density, grad h = (1, 0), m = 0, f = 2 gives force (2, 0)") {
  const Grid g(10, 10, 1.0, 1.0);
  const ShapeForcing shapes = ShapeForcing::steady(VectorField(g), ScalarField(g));
  const FlowState st = state_with_h(
      g, ScalarField(g, 1.0), centered(ScalarField::sample(g, [](double x, double) { return x; })));
  const auto [fu, fw] = compute_forces(st, 2.0, 0.0, shapes);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) CHECK(fu.x(i, j) == doctest::Approx(2.0).epsilon(1e-12));
  for (double v : fu.y_values()) CHECK(std::abs(v) <= 1e-12);
  CHECK(fu.max_abs_boundary() == 0.0);
}

TEST_CASE("stale potential is rejected") {
  const Grid g(8, 8, 1.0, 1.0);
  const ShapeForcing shapes = ShapeForcing::steady(VectorField(g), ScalarField(g));
  const FlowState st = state_with_h(g, ScalarField(g, 1.0), ScalarField(g, 0.5));
  CHECK_THROWS_AS(compute_forces(st, 1.0, 1.0, shapes), InvariantBreach);
}

TEST_CASE("rest state stays at rest") {
  const ForwardSetup s = make_setup();
  const Trajectory tr = solve_forward(testing::zero_sources(s), s);
  REQUIRE(tr.states.size() == 21);
  for (const FlowState& st : tr.states) {
    CHECK(st.u.max_abs() == 0.0);
    CHECK(st.w.max_abs() == 0.0);
    CHECK(st.p.max_abs() == 0.0);
    CHECK(st.rho.field().min() == s.initial.rho.field().min());
  }
  CHECK(tr.diagnostics.size() == 20);
}

TEST_CASE("zero steps yields only the initial state") {
  SetupOptions o;
  o.steps = 0;
  const ForwardSetup s = make_setup(o);
  const Trajectory tr = solve_forward(testing::zero_sources(s), s);
  CHECK(tr.states.size() == 1);
  CHECK(tr.diagnostics.empty());
}

TEST_CASE("gradient-only m with constant f matches the unforced run") {
  SetupOptions o;
  o.m.kind = "gradient";
  o.q.kind = "zero";
  const ForwardSetup s = make_setup(o);
  const Trajectory forced = solve_forward(SourcePair::constant(s.times(), 2.0, 0.0), s);
  const Trajectory rest = solve_forward(testing::zero_sources(s), s);
  for (std::size_t k = 0; k < forced.states.size(); ++k) {
    CHECK((forced.states[k].u - rest.states[k].u).max_abs() <= 1e-9);
    CHECK((forced.states[k].w - rest.states[k].w).max_abs() <= 1e-9);
  }
}

TEST_CASE("forward solve is bitwise deterministic and keeps its invariants") {
  SetupOptions o;
  o.velocity = {"vortex", 0.5};
  o.microrotation = {"bump", 0.3};
  const ForwardSetup s = make_setup(o);
  const SourcePair src = testing::harmonic(s);
  int observed = 0;
  const Trajectory a = solve_forward(src, s, [&](const FlowState&, const StepDiagnostics* d) {
    CHECK((observed == 0) == (d == nullptr));
    ++observed;
  });
  const Trajectory b = solve_forward(src, s);
  CHECK(observed == 21);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(same_state(a.states[k], b.states[k]));
    const FlowState& st = a.states[k];
    CHECK(st.t == s.times()[k]);
    CHECK(divergence(st.u).max_abs() <= 1e-8 * (1 + st.u.max_abs()));
    CHECK(st.u.max_abs_boundary() == 0.0);
    CHECK(std::abs(integrate(st.h)) <= 1e-10 * s.grid.area() * st.h.max_abs());
    CHECK(st.rho.field().min() >= st.rho.alpha() - 1e-12);
    CHECK(st.rho.field().max() <= st.rho.beta() + 1e-12);
  }
  for (const StepDiagnostics& d : a.diagnostics) {
    CHECK(d.courant <= 1.0);
    CHECK(d.potential.iterations <= 20);
  }
}

TEST_CASE("initial data hypotheses") {
  const ForwardSetup s = make_setup();
  const Grid& g = s.grid;
  SUBCASE("wall velocity") {
    VectorField u(g);
    u.x(0, 3) = 1.0;
    InitialData d{s.initial.rho, u, ScalarField(g)};
    try {
      validate_initial_data(d);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.hypothesis() == "H2");
    }
  }
  SUBCASE("divergent velocity") {
    VectorField u(g);
    u.x(4, 4) = 1.0;
    InitialData d{s.initial.rho, u, ScalarField(g)};
    CHECK_THROWS_AS(validate_initial_data(d), ValidationError);
  }
  SUBCASE("non-finite microrotation") {
    ScalarField w(g);
    w(2, 2) = std::numeric_limits<double>::infinity();
    InitialData d{s.initial.rho, VectorField(g), w};
    try {
      validate_initial_data(d);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.hypothesis() == "H3");
    }
  }
}

TEST_CASE("misaligned sources and excessive velocity are reported") {
  ForwardSetup s = make_setup();
  CHECK_THROWS_AS(solve_forward(SourcePair::constant(uniform_time_grid(0.2, 20), 1, 1), s),
                  AlignmentError);

  SetupOptions o;
  o.velocity = {"vortex", 50.0};
  o.steps = 2;
  const ForwardSetup fast = make_setup(o);
  try {
    solve_forward(testing::zero_sources(fast), fast);
    FAIL("expected CflViolation");
  } catch (const CflViolation& e) {
    CHECK(e.time() == doctest::Approx(fast.dt()));
  }
}

TEST_CASE("trajectory export round-trips exactly") {
  SetupOptions o;
  o.steps = 5;
  o.velocity = {"vortex", 0.2};
  const ForwardSetup s = make_setup(o);
  const Trajectory tr = solve_forward(testing::harmonic(s), s);
  const auto dir = std::filesystem::temp_directory_path() / "micropolar_traj_test";
  std::filesystem::remove_all(dir);
  export_trajectory(tr, dir.string(), 2, "[time]\nsteps = 5\n");
  const StoredTrajectory back = load_trajectory(dir.string());
  CHECK(back.steps == std::vector<int>{0, 2, 4, 5});
  CHECK(back.config_text == "[time]\nsteps = 5\n");
  for (std::size_t k = 0; k < back.steps.size(); ++k) {
    const FlowState& want = tr.states[static_cast<std::size_t>(back.steps[k])];
    CHECK(same_state(back.trajectory.states[k], want));
    CHECK(back.trajectory.states[k].rho.alpha() == want.rho.alpha());
  }
  std::filesystem::remove_all(dir);
}
