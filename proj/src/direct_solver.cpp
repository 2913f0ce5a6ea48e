#include "micropolar/direct_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "micropolar/errors.hpp"
#include "micropolar/field_io.hpp"
#include "micropolar/operators.hpp"

namespace micropolar {

namespace {

bool mean_is_zero(const ScalarField& h) {
  const Grid& g = h.grid();
  return std::abs(integrate(h)) <=
         1e-10 * g.area() * h.max_abs() + 1e-300;
}

double max_divergence(const VectorField& u) {
  return divergence(u).max_abs();
}

VectorField face_product(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  auto ox = out.x_values();
  auto oy = out.y_values();
  const auto bx = b.x_values();
  const auto by = b.y_values();
  for (std::size_t k = 0; k < ox.size(); ++k) ox[k] *= bx[k];
  for (std::size_t k = 0; k < oy.size(); ++k) oy[k] *= by[k];
  return out;
}

template <class Fn>
auto with_time(double t, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConvergenceError& e) {
    throw LinearSolverFailure(e.what(), t, e.residual());
  } catch (const CflViolation& e) {
    if (std::isnan(e.time()))
      throw CflViolation(e.what(), e.i(), e.j(), e.courant(), t);
    throw;
  }
}

}  // namespace

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(states.size());
  for (const auto& s : states) t.push_back(s.t);
  return t;
}

std::pair<VectorField, ScalarField> compute_forces(const FlowState& state,
                                                   double f_t, double g_t,
                                                   const ShapeForcing& shapes) {
  const Grid& g = state.rho.grid();
  require_same_grid(g, shapes.grid(), "compute_forces");
  if (!mean_is_zero(state.h))
    throw InvariantBreach("compute_forces: potential h has nonzero mean "
                          "(stale potential for this state)",
                          state.t);
  VectorField dir = gradient(state.h) - shapes.m(state.t);
  VectorField force = face_product(face_average(state.rho.field()), dir);
  force *= f_t;
  force.zero_boundary();
  ScalarField torque = hadamard(state.rho.field(), shapes.q(state.t));
  torque *= g_t;
  return {std::move(force), std::move(torque)};
}

void validate_initial_data(const InitialData& data) {
  const Grid& g = data.rho.grid();
  require_same_grid(g, data.u.grid(), "initial data");
  require_same_grid(g, data.w.grid(), "initial data");
  const ScalarField& rho = data.rho.field();
  if (!rho.all_finite() || !(rho.min() > 0.0))
    throw ValidationError("H1", "initial density must be finite and positive");
  if (rho.min() < data.rho.alpha() || rho.max() > data.rho.beta())
    throw ValidationError("H1", "initial density outside [alpha, beta]");
  if (!data.u.all_finite())
    throw ValidationError("H2", "initial velocity is not finite");
  const double scale = 1.0 + data.u.max_abs();
  if (data.u.max_abs_boundary() > 1e-12 * scale)
    throw ValidationError("H2", "initial velocity does not vanish on the walls");
  const double div = max_divergence(data.u);
  if (div > 1e-8 * scale)
    throw ValidationError("H2", "initial velocity is not divergence free (max "
                                "|div u| = " + format_double(div) + ")");
  if (!data.w.all_finite())
    throw ValidationError("H3", "initial microrotation is not finite");
}

// ---------------------------------------------------------------- DirectSolver

DirectSolver::DirectSolver(Grid grid, PhysicalParams params,
                           ShapeForcing shapes, double dt, Tolerances tol)
    : grid_(grid),
      params_(params),
      shapes_(std::move(shapes)),
      dt_(dt),
      tol_(tol),
      potential_(tol.potential, tol.max_iterations),
      pressure_(PcgSolver::Nullspace::Constant, tol.pressure, tol.max_iterations),
      momentum_x_(PcgSolver::Nullspace::None, tol.momentum, tol.max_iterations),
      momentum_y_(PcgSolver::Nullspace::None, tol.momentum, tol.max_iterations),
      angular_(PcgSolver::Nullspace::None, tol.momentum, tol.max_iterations) {
  params_.validate();
  require_same_grid(grid_, shapes_.grid(), "DirectSolver");
  if (!(dt_ > 0.0) || !std::isfinite(dt_))
    throw ValidationError("dt", "time step must be positive");
}

VectorField DirectSolver::project(const VectorField& u_star,
                                  const VectorField& rho_face,
                                  const ScalarField& p_guess,
                                  ScalarField& p_out, SolveStats& stats) {
  VectorField inv = rho_face;
  for (double& v : inv.x_values()) v = 1.0 / v;
  for (double& v : inv.y_values()) v = 1.0 / v;
  const SparseMatrix k = weighted_neumann_matrix(inv);
  ScalarField rhs = divergence(u_star);
  rhs *= -1.0;
  Eigen::VectorXd phi = to_eigen(p_guess) * dt_;
  stats = pressure_.solve(k, to_eigen(rhs), phi);
  const ScalarField phi_field = from_eigen(grid_, phi);
  VectorField u = u_star - face_product(inv, gradient_interior(phi_field));
  u.zero_boundary();
  p_out = phi_field;
  p_out *= 1.0 / dt_;
  return u;
}

FlowState DirectSolver::initial_state(const InitialData& data, double t0) {
  require_same_grid(grid_, data.rho.grid(), "initial_state");
  validate_initial_data(data);
  return with_time(t0, [&] {
    ScalarField h = potential_.solve(data.rho, shapes_.m(t0));
    ScalarField p(grid_);
    SolveStats stats;
    // The projected velocity differs from u0 only by solver rounding; u0 is
    // kept as given and only the pressure is taken from the projection.
    project(data.u, face_average(data.rho.field()), ScalarField(grid_), p,
            stats);
    return FlowState{t0, data.rho, data.u, data.w, std::move(p), std::move(h)};
  });
}

FlowState DirectSolver::step(const FlowState& state, const SourcePair& sources,
                             StepDiagnostics* diagnostics) {
  require_same_grid(grid_, state.rho.grid(), "DirectSolver::step");
  StepDiagnostics diag;
  const double t1 = state.t + dt_;
  FlowState next = with_time(t1, [&] { return step_impl(state, sources, diag); });
  if (diagnostics) *diagnostics = diag;
  return next;
}

FlowState DirectSolver::step_impl(const FlowState& s, const SourcePair& sources,
                                  StepDiagnostics& diag) {
  const double t1 = s.t + dt_;
  const double nu = params_.mu + params_.mu_r;
  const double kappa = params_.c_a + params_.c_d;
  diag.t = t1;

  if (!s.u.all_finite() || !s.w.all_finite())
    throw InvariantBreach("step: non-finite velocity or microrotation", t1);

  // (i) density
  DensityField rho1 = advect_density(s.rho, s.u, dt_);

  // (ii) potential at the new density and m(t1)
  const VectorField m1 = shapes_.m(t1);
  ScalarField h1 = potential_.solve(rho1, m1, &s.h);
  diag.potential = potential_.last_stats();

  // (iii) momentum
  const CourantReport mc = momentum_courant(s.u, dt_);
  if (mc.value > 1.0)
    throw CflViolation("step: momentum Courant number " +
                           format_double(mc.value) + " > 1 near cell (" +
                           std::to_string(mc.i) + ", " + std::to_string(mc.j) +
                           ")",
                       mc.i, mc.j, mc.value, t1);
  const VectorField rho_f = face_average(rho1.field());
  const FlowState forced{t1, rho1, s.u, s.w, s.p, h1};
  auto [force, torque] =
      compute_forces(forced, sources.f_at(t1), sources.g_at(t1), shapes_);

  VectorField rhs = upwind_momentum_transport(s.u);
  rhs.axpy(1.0 / dt_, s.u);
  rhs = face_product(rho_f, rhs);
  rhs.axpy(2.0 * params_.mu_r, curl_of_scalar(s.w));
  rhs += force;

  VectorField u_star(grid_);
  {
    const SparseMatrix ax = xface_helmholtz_matrix(rho_f, dt_, nu);
    Eigen::VectorXd x = gather_interior_x(s.u);
    diag.momentum_x = momentum_x_.solve(ax, gather_interior_x(rhs), x);
    scatter_interior_x(x, u_star);
    const SparseMatrix ay = yface_helmholtz_matrix(rho_f, dt_, nu);
    Eigen::VectorXd y = gather_interior_y(s.u);
    diag.momentum_y = momentum_y_.solve(ay, gather_interior_y(rhs), y);
    scatter_interior_y(y, u_star);
  }
  ScalarField p1(grid_);
  VectorField u1 = project(u_star, rho_f, s.p, p1, diag.pressure);

  // (iv) microrotation
  const CourantReport wc = inflow_courant(u1, dt_);
  if (wc.value > 1.0)
    throw CflViolation("step: microrotation Courant number " +
                           format_double(wc.value) + " > 1 at cell (" +
                           std::to_string(wc.i) + ", " + std::to_string(wc.j) +
                           ")",
                       wc.i, wc.j, wc.value, t1);
  const ScalarField& rc = rho1.field();
  ScalarField rhs_w = upwind_transport(s.w, u1);
  rhs_w.axpy(1.0 / dt_, s.w);
  rhs_w = hadamard(rc, rhs_w);
  rhs_w.axpy(2.0 * params_.mu_r, curl_of_vector(u1));
  rhs_w += torque;
  const SparseMatrix aw =
      cell_helmholtz_matrix(rc, dt_, kappa, 4.0 * params_.mu_r);
  Eigen::VectorXd wv = to_eigen(s.w);
  diag.angular = angular_.solve(aw, to_eigen(rhs_w), wv);
  ScalarField w1 = from_eigen(grid_, wv);

  diag.courant = std::max(mc.value, wc.value);
  diag.max_divergence = max_divergence(u1);

  FlowState next{t1, std::move(rho1), std::move(u1), std::move(w1),
                 std::move(p1), std::move(h1)};
  check_invariants(next);
  return next;
}

void DirectSolver::check_invariants(const FlowState& s) const {
  if (!s.u.all_finite() || !s.w.all_finite() || !s.p.all_finite() ||
      !s.h.all_finite())
    throw InvariantBreach("step: non-finite field after update", s.t);
  const double div = max_divergence(s.u);
  if (div > tol_.divergence * (1.0 + s.u.max_abs()))
    throw InvariantBreach("step: max |div u| = " + format_double(div) +
                              " exceeds the projection tolerance",
                          s.t);
  const ScalarField& r = s.rho.field();
  if (r.min() < s.rho.alpha() || r.max() > s.rho.beta())
    throw InvariantBreach("step: density left [alpha, beta]", s.t);
  if (!mean_is_zero(s.h))
    throw InvariantBreach("step: potential h lost its zero mean", s.t);
}

FlowState step(const FlowState& state, const SourcePair& sources, double dt,
               const PhysicalParams& params, const ShapeForcing& shapes) {
  DirectSolver solver(state.rho.grid(), params, shapes, dt);
  return solver.step(state, sources);
}

Trajectory solve_forward(const SourcePair& sources, const ForwardSetup& setup,
                         const StepObserver& observer) {
  if (setup.steps < 0)
    throw ValidationError("steps", "step count must be non-negative");
  const std::vector<double> times = setup.times();
  if (sources.size() != times.size())
    throw AlignmentError("solve_forward: source samples (" +
                         std::to_string(sources.size()) +
                         ") do not match the time grid (" +
                         std::to_string(times.size()) + ")");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(sources.times()[k] - times[k]) > 1e-12 * (1.0 + setup.final_time))
      throw AlignmentError("solve_forward: source time grid differs at sample " +
                           std::to_string(k));

  const double dt = setup.steps > 0 ? setup.dt() : 1.0;
  DirectSolver solver(setup.grid, setup.params, setup.shapes, dt,
                      setup.tolerances);
  Trajectory traj;
  traj.states.reserve(times.size());
  traj.diagnostics.reserve(static_cast<std::size_t>(setup.steps));
  traj.states.push_back(solver.initial_state(setup.initial, times.front()));
  if (observer) observer(traj.states.back(), nullptr);
  for (int n = 0; n < setup.steps; ++n) {
    StepDiagnostics diag;
    FlowState next = solver.step(traj.states.back(), sources, &diag);
    // Pin the clock to the grid so rounding in t + dt does not accumulate.
    next.t = times[static_cast<std::size_t>(n) + 1];
    diag.step = n + 1;
    diag.t = next.t;
    traj.states.push_back(std::move(next));
    traj.diagnostics.push_back(diag);
    if (observer) observer(traj.states.back(), &traj.diagnostics.back());
  }
  return traj;
}

// ----------------------------------------------------------------- export

namespace {

std::string state_file_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%06d.txt", step);
  return buf;
}

}  // namespace

void export_trajectory(const Trajectory& trajectory,
                       const std::string& directory, int save_every,
                       const std::string& config_text) {
  namespace fs = std::filesystem;
  if (trajectory.states.empty())
    throw ValidationError("trajectory", "cannot export an empty trajectory");
  if (save_every < 1)
    throw ValidationError("save_every", "save cadence must be at least 1");
  fs::create_directories(directory);
  const FlowState& first = trajectory.states.front();
  const Grid& g = first.rho.grid();

  nlohmann::json index;
  index["format"] = "micropolar-trajectory";
  index["version"] = 1;
  index["grid"] = {{"nx", g.nx()}, {"ny", g.ny()}, {"lx", g.lx()}, {"ly", g.ly()}};
  index["alpha"] = first.rho.alpha();
  index["beta"] = first.rho.beta();
  index["save_every"] = save_every;
  index["config"] = config_text;
  nlohmann::json entries = nlohmann::json::array();

  const int last = static_cast<int>(trajectory.states.size()) - 1;
  for (int k = 0; k <= last; ++k) {
    if (k % save_every != 0 && k != last) continue;
    const FlowState& s = trajectory.states[static_cast<std::size_t>(k)];
    const std::string name = state_file_name(k);
    std::ofstream os(fs::path(directory) / name);
    if (!os) throw Error("cannot write " + (fs::path(directory) / name).string());
    os << "# t " << format_double(s.t) << "\n";
    write_field(os, s.rho.field());
    write_field(os, s.u);
    write_field(os, s.w);
    write_field(os, s.p);
    write_field(os, s.h);
    if (!os) throw Error("write failed for " + name);
    entries.push_back({{"step", k}, {"t", s.t}, {"file", name}});
  }
  index["states"] = std::move(entries);
  std::ofstream os(fs::path(directory) / "index.json");
  os << index.dump(2) << "\n";
  if (!os) throw Error("cannot write index.json in " + directory);
}

StoredTrajectory load_trajectory(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path index_path = fs::path(directory) / "index.json";
  std::ifstream is(index_path);
  if (!is) throw Error("cannot open " + index_path.string());
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, index_path.string());
  }
  if (index.value("format", "") != "micropolar-trajectory")
    throw ParseError("not a trajectory index", 0, index_path.string());

  StoredTrajectory out;
  out.config_text = index.value("config", "");
  const double alpha = index.at("alpha").get<double>();
  const double beta = index.at("beta").get<double>();
  for (const auto& e : index.at("states")) {
    const fs::path path = fs::path(directory) / e.at("file").get<std::string>();
    std::ifstream fs_in(path);
    if (!fs_in) throw Error("cannot open " + path.string());
    std::string header;
    std::getline(fs_in, header);
    int line = 1;
    try {
      ScalarField rho = read_scalar_field(fs_in, line);
      VectorField u = read_vector_field(fs_in, line);
      ScalarField w = read_scalar_field(fs_in, line);
      ScalarField p = read_scalar_field(fs_in, line);
      ScalarField h = read_scalar_field(fs_in, line);
      out.trajectory.states.push_back(
          FlowState{e.at("t").get<double>(), DensityField(std::move(rho), alpha, beta),
                    std::move(u), std::move(w), std::move(p), std::move(h)});
    } catch (const ParseError& err) {
      throw err.in_file(path.string());
    }
    out.steps.push_back(e.at("step").get<int>());
  }
  return out;
}

}  // namespace micropolar
