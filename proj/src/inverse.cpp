#include "micropolar/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "micropolar/errors.hpp"
#include "micropolar/field_io.hpp"
#include "micropolar/operators.hpp"

namespace micropolar {

void InverseConfig::validate() const {
  if (h_eps && !(*h_eps > 0.0))
    throw ValidationError("H7", "degeneracy threshold h_eps must be positive");
  if (r_eps && !(*r_eps > 0.0))
    throw ValidationError("H7", "degeneracy threshold r_eps must be positive");
  if (!(tolerance > 0.0))
    throw ValidationError("tolerance", "fixed-point tolerance must be positive");
  if (max_iterations < 1)
    throw ValidationError("max_iterations", "need at least one iteration");
  if (!(relaxation > 0.0 && relaxation <= 1.0))
    throw ValidationError("relaxation", "relaxation must lie in (0, 1]");
  if (!(compatibility_tolerance >= 0.0))
    throw ValidationError("compatibility", "tolerance must be non-negative");
}

std::pair<double, double> eval_gamma(const FlowState& state,
                                     const ShapeForcing& shapes,
                                     const ProbeSet& probes) {
  const Grid& g = state.rho.grid();
  require_same_grid(g, probes.psi_u.grid(), "eval_gamma");
  VectorField dir = gradient(state.h) - shapes.m(state.t);
  const VectorField rho_f = face_average(state.rho.field());
  auto dx = dir.x_values();
  auto dy = dir.y_values();
  const auto rx = rho_f.x_values();
  const auto ry = rho_f.y_values();
  for (std::size_t k = 0; k < dx.size(); ++k) dx[k] *= rx[k];
  for (std::size_t k = 0; k < dy.size(); ++k) dy[k] *= ry[k];
  const double g1 = inner_product(dir, probes.psi_u);
  const double g2 =
      inner_product(hadamard(state.rho.field(), shapes.q(state.t)), probes.psi_w);
  return {g1, g2};
}

GammaSeries eval_gamma_series(const Trajectory& trajectory,
                              const ShapeForcing& shapes,
                              const ProbeSet& probes) {
  GammaSeries out;
  for (const FlowState& s : trajectory.states) {
    const auto [g1, g2] = eval_gamma(s, shapes, probes);
    out.times.push_back(s.t);
    out.gamma_1.push_back(g1);
    out.gamma_2.push_back(g2);
  }
  return out;
}

void check_degeneracy(const GammaSeries& gamma, double h_eps, double r_eps) {
  for (std::size_t k = 0; k < gamma.times.size(); ++k) {
    const double g1 = gamma.gamma_1[k];
    const double g2 = gamma.gamma_2[k];
    if (!std::isfinite(g1) || !std::isfinite(g2))
      throw NonFiniteInput("check_degeneracy: non-finite gamma at sample " +
                           std::to_string(k));
    if (std::abs(g1) < h_eps)
      throw DegeneracyError("|gamma_1| = " + format_double(std::abs(g1)) +
                                " < h_eps = " + format_double(h_eps) +
                                " at t = " + format_double(gamma.times[k]),
                            1, static_cast<int>(k), gamma.times[k], g1, h_eps);
    if (std::abs(g2) < r_eps)
      throw DegeneracyError("|gamma_2| = " + format_double(std::abs(g2)) +
                                " < r_eps = " + format_double(r_eps) +
                                " at t = " + format_double(gamma.times[k]),
                            2, static_cast<int>(k), gamma.times[k], g2, r_eps);
  }
}

namespace {

// Centered difference of a cell field with Dirichlet reflection ghosts.
double ddx(const ScalarField& s, int i, int j) {
  const Grid& g = s.grid();
  const double e = i + 1 < g.nx() ? s(i + 1, j) : -s(i, j);
  const double w = i > 0 ? s(i - 1, j) : -s(i, j);
  return (e - w) / (2.0 * g.dx());
}

double ddy(const ScalarField& s, int i, int j) {
  const Grid& g = s.grid();
  const double n = j + 1 < g.ny() ? s(i, j + 1) : -s(i, j);
  const double so = j > 0 ? s(i, j - 1) : -s(i, j);
  return (n - so) / (2.0 * g.dy());
}

// int rho (u (x) u) : grad psi_u with cell-centered u.
double convective_u(const FlowState& s, const VectorField& psi) {
  const Grid& g = s.rho.grid();
  const CenterVector u = center_average(s.u);
  const CenterVector p = center_average(psi);
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double pxx = (psi.x(i + 1, j) - psi.x(i, j)) / g.dx();
      const double pyy = (psi.y(i, j + 1) - psi.y(i, j)) / g.dy();
      const double pxy = ddy(p.x, i, j);  // d psi_x / dy
      const double pyx = ddx(p.y, i, j);  // d psi_y / dx
      const double ux = u.x(i, j);
      const double uy = u.y(i, j);
      sum += s.rho.field()(i, j) *
             (ux * ux * pxx + ux * uy * (pxy + pyx) + uy * uy * pyy);
    }
  return sum * g.cell_volume();
}

// int rho w u . grad psi_w with cell-centered u.
double convective_w(const FlowState& s, const ScalarField& psi) {
  const Grid& g = s.rho.grid();
  const CenterVector u = center_average(s.u);
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      sum += s.rho.field()(i, j) * s.w(i, j) *
             (u.x(i, j) * ddx(psi, i, j) + u.y(i, j) * ddy(psi, i, j));
  return sum * g.cell_volume();
}

void require_aligned(const std::vector<double>& a, std::span<const double> b,
                     const char* what) {
  if (a.size() != b.size())
    throw AlignmentError(std::string(what) + ": " + std::to_string(a.size()) +
                         " samples against " + std::to_string(b.size()) +
                         " time levels");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > 1e-9 * (1.0 + std::abs(b[k])))
      throw AlignmentError(std::string(what) + ": time grids differ at sample " +
                           std::to_string(k));
}

double auto_threshold(double gamma0) { return 1e-3 * std::abs(gamma0); }

}  // namespace

std::pair<std::vector<double>, std::vector<double>> eval_N(
    const Trajectory& trajectory, const Observations& obs,
    const ProbeSet& probes, const PhysicalParams& params) {
  const std::vector<double> times = trajectory.times();
  require_aligned(obs.times, times, "eval_N");
  const Observations rate = differentiate_series(obs);
  const double nu = params.mu + params.mu_r;
  const double kappa = params.c_a + params.c_d;
  std::vector<double> n1(times.size()), n2(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const FlowState& s = trajectory.states[k];
    n1[k] = rate.phi_u[k] - convective_u(s, probes.psi_u) +
            nu * dirichlet_form(s.u, probes.psi_u) -
            2.0 * params.mu_r * inner_product(curl_of_scalar(s.w), probes.psi_u);
    n2[k] = rate.phi_w[k] - convective_w(s, probes.psi_w) +
            kappa * dirichlet_form(s.w, probes.psi_w) +
            4.0 * params.mu_r * inner_product(s.w, probes.psi_w) -
            2.0 * params.mu_r * inner_product(curl_of_vector(s.u), probes.psi_w);
  }
  return {std::move(n1), std::move(n2)};
}

CompatibilityResult check_compatibility(const Observations& obs,
                                        const FlowState& initial,
                                        const ProbeSet& probes,
                                        double tolerance) {
  obs.validate();
  if (obs.times.empty())
    throw AlignmentError("check_compatibility: empty observations");
  const auto [pu, pw] = observe(initial, probes);
  CompatibilityResult r{std::abs(pu - obs.phi_u.front()),
                        std::abs(pw - obs.phi_w.front())};
  if (!(r.residual_u <= tolerance) || !(r.residual_w <= tolerance))
    throw CompatibilityError(
        "initial state does not reproduce phi(0): residuals " +
            format_double(r.residual_u) + ", " + format_double(r.residual_w) +
            " exceed " + format_double(tolerance),
        r.residual_u, r.residual_w);
  return r;
}

REvaluation eval_R_detailed(const SourcePair& fg, const Observations& obs,
                            const ProbeSet& probes, const ForwardSetup& setup,
                            double h_eps, double r_eps) {
  const Trajectory traj = solve_forward(fg, setup);
  GammaSeries gamma = eval_gamma_series(traj, setup.shapes, probes);
  check_degeneracy(gamma, h_eps, r_eps);
  auto [n1, n2] = eval_N(traj, obs, probes, setup.params);
  std::vector<double> f(n1.size()), g(n2.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = n1[k] / gamma.gamma_1[k];
    g[k] = n2[k] / gamma.gamma_2[k];
  }
  SourcePair value(gamma.times, std::move(f), std::move(g));
  return {std::move(value), std::move(gamma), std::move(n1), std::move(n2)};
}

namespace {

std::pair<double, double> thresholds(const InverseConfig& config,
                                     const ForwardSetup& setup,
                                     const ProbeSet& probes,
                                     const FlowState* initial) {
  if (config.h_eps && config.r_eps) return {*config.h_eps, *config.r_eps};
  FlowState start = initial ? *initial : [&] {
    DirectSolver solver(setup.grid, setup.params, setup.shapes,
                        setup.steps > 0 ? setup.dt() : 1.0, setup.tolerances);
    return solver.initial_state(setup.initial, 0.0);
  }();
  const auto [g1, g2] = eval_gamma(start, setup.shapes, probes);
  return {config.h_eps.value_or(auto_threshold(g1)),
          config.r_eps.value_or(auto_threshold(g2))};
}

}  // namespace

SourcePair eval_R(const SourcePair& fg, const Observations& obs,
                  const ProbeSet& probes, const ForwardSetup& setup,
                  const InverseConfig& config) {
  config.validate();
  const auto [h_eps, r_eps] = thresholds(config, setup, probes, nullptr);
  return eval_R_detailed(fg, obs, probes, setup, h_eps, r_eps).value;
}

ReconstructionReport reconstruct(const Observations& obs, const ProbeSet& probes,
                                 const ForwardSetup& setup,
                                 const InverseConfig& config) {
  config.validate();
  obs.validate();
  probes.validate();
  const std::vector<double> times = setup.times();
  require_aligned(obs.times, times, "reconstruct");

  DirectSolver solver(setup.grid, setup.params, setup.shapes,
                      setup.steps > 0 ? setup.dt() : 1.0, setup.tolerances);
  const FlowState initial = solver.initial_state(setup.initial, times.front());

  ReconstructionReport report{
      .status = "max_iterations",
      .recovered = config.initial_guess
                       ? *config.initial_guess
                       : SourcePair::constant(obs.times, 0.0, 0.0),
  };
  report.relaxation = config.relaxation;
  report.tolerance = config.tolerance;
  report.compatibility = check_compatibility(obs, initial, probes,
                                             config.compatibility_tolerance);
  std::tie(report.h_eps, report.r_eps) =
      thresholds(config, setup, probes, &initial);
  require_aligned(std::vector<double>(report.recovered.times().begin(),
                                      report.recovered.times().end()),
                  times, "reconstruct: initial guess");

  for (int it = 0; it < config.max_iterations; ++it) {
    std::optional<REvaluation> r;
    try {
      r = eval_R_detailed(report.recovered, obs, probes, setup, report.h_eps,
                          report.r_eps);
    } catch (const DegeneracyError& e) {
      report.status = "degenerate";
      report.message = e.what();
    } catch (const StepError& e) {
      report.status = "forward_failure";
      report.message = e.what();
    } catch (const NonFiniteInput& e) {
      report.status = "diverged";
      report.message = e.what();
    }
    if (!r) break;

    auto abs_min = [](const std::vector<double>& v) {
      double m = std::numeric_limits<double>::infinity();
      for (double x : v) m = std::min(m, std::abs(x));
      return m;
    };
    report.gamma_1_min = abs_min(r->gamma.gamma_1);
    report.gamma_2_min = abs_min(r->gamma.gamma_2);
    report.iterations = it + 1;

    SourcePair next = report.recovered.blend(r->value, config.relaxation);
    const double inc = l2_distance(next, report.recovered);
    report.increments.push_back(inc);
    if (!std::isfinite(inc)) {
      report.status = "diverged";
      report.message = "non-finite Picard increment at iteration " +
                       std::to_string(it + 1);
      break;
    }
    report.recovered = std::move(next);
    if (inc <= config.tolerance) {
      report.status = "converged";
      report.converged = true;
      report.message = "increment " + format_double(inc) + " <= tolerance";
      break;
    }
  }
  if (report.status == "max_iterations")
    report.message = "no convergence within " +
                     std::to_string(config.max_iterations) + " iterations";
  return report;
}

std::string report_to_json(const ReconstructionReport& r) {
  using nlohmann::json;
  auto series = [](std::span<const double> v) {
    return json(std::vector<double>(v.begin(), v.end()));
  };
  json j;
  j["status"] = r.status;
  j["message"] = r.message;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["tolerance"] = r.tolerance;
  j["relaxation"] = r.relaxation;
  j["increments"] = r.increments;
  j["guards"] = {
      {"h_eps", r.h_eps},
      {"r_eps", r.r_eps},
      {"gamma_1_min", r.gamma_1_min},
      {"gamma_2_min", r.gamma_2_min},
      {"margin_1", r.h_eps > 0.0 ? r.gamma_1_min / r.h_eps : 0.0},
      {"margin_2", r.r_eps > 0.0 ? r.gamma_2_min / r.r_eps : 0.0},
  };
  j["compatibility"] = {{"residual_u", r.compatibility.residual_u},
                        {"residual_w", r.compatibility.residual_w}};
  j["recovered"] = {{"t", series(r.recovered.times())},
                    {"f", series(r.recovered.f())},
                    {"g", series(r.recovered.g())}};
  return j.dump(2);
}

}  // namespace micropolar
