/**
 * @file direct_solver.hpp
 * @brief Time integration of the 2D micropolar system with variable density.
 *
 * Each step performs, in order:
 *   1. upwind transport of rho with the old velocity;
 *   2. the potential solve for h at the new density and m(t + dt);
 *   3. a semi-implicit momentum update (explicit upwind transport and
 *      2 mu_r curl w, implicit (mu + mu_r) Laplacian) followed by the
 *      variable-density projection div((1/rho) grad p) = div(u*) / dt;
 *   4. a semi-implicit microrotation update (explicit transport and
 *      2 mu_r curl u, implicit (c_a + c_d) Laplacian and 4 mu_r w).
 *
 * In 2D the microrotation is a scalar, curl w is the rotated gradient and the
 * grad div w term of the 3D model vanishes.
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "micropolar/forcing.hpp"
#include "micropolar/grid.hpp"
#include "micropolar/linear_solver.hpp"
#include "micropolar/potential.hpp"
#include "micropolar/transport.hpp"

namespace micropolar {

struct FlowState {
  double t = 0.0;
  DensityField rho;
  VectorField u;  ///< velocity
  ScalarField w;  ///< microrotation
  ScalarField p;  ///< pressure, zero mean
  ScalarField h;  ///< Helmholtz potential, zero mean
};

struct InitialData {
  DensityField rho;
  VectorField u;
  ScalarField w;
};

struct Tolerances {
  double potential = 1e-10;
  double pressure = 1e-12;
  double momentum = 1e-12;
  int max_iterations = 500;
  /// max |div u| <= divergence * (1 + max |u|) after each projection
  double divergence = 1e-8;
};

struct ForwardSetup {
  Grid grid;
  PhysicalParams params;
  InitialData initial;
  ShapeForcing shapes;
  double final_time = 0.5;
  int steps = 200;
  Tolerances tolerances;

  double dt() const { return steps > 0 ? final_time / steps : 0.0; }
  std::vector<double> times() const { return uniform_time_grid(final_time, steps); }
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  SolveStats potential;
  SolveStats momentum_x;
  SolveStats momentum_y;
  SolveStats pressure;
  SolveStats angular;
  double courant = 0.0;
  double max_divergence = 0.0;
};

struct Trajectory {
  std::vector<FlowState> states;
  std::vector<StepDiagnostics> diagnostics;  ///< one per step (not for t0)

  std::vector<double> times() const;
};

/// Body forces (rho F, rho G) = (rho_f f_t (grad h - m), rho g_t q) at
/// state.t. The vector force is zero on boundary faces. Throws
/// InvariantBreach if state.h does not have zero mean (stale potential).
std::pair<VectorField, ScalarField> compute_forces(const FlowState& state,
                                                   double f_t, double g_t,
                                                   const ShapeForcing& shapes);

/// Checks the initial-data surrogates: rho0 in [alpha, beta] with alpha > 0
/// (H1), u0 discretely divergence free and zero on the walls (H2), w0 finite
/// (H3). Throws ValidationError naming the hypothesis.
void validate_initial_data(const InitialData& data);

/// Stepper with cached preconditioners. Not thread safe; use one per thread.
class DirectSolver {
 public:
  DirectSolver(Grid grid, PhysicalParams params, ShapeForcing shapes, double dt,
               Tolerances tolerances = {});

  /// Builds the t0 state: h from the potential solve and p from one
  /// projection of u0.
  FlowState initial_state(const InitialData& data, double t0 = 0.0);

  /// Advances one step using f, g at t + dt. Errors derive from StepError
  /// and carry the target time.
  FlowState step(const FlowState& state, const SourcePair& sources,
                 StepDiagnostics* diagnostics = nullptr);

  double dt() const noexcept { return dt_; }

 private:
  FlowState step_impl(const FlowState& state, const SourcePair& sources,
                      StepDiagnostics& diag);
  VectorField project(const VectorField& u_star, const VectorField& rho_face,
                      const ScalarField& p_guess, ScalarField& p_out,
                      SolveStats& stats);
  void check_invariants(const FlowState& s) const;

  Grid grid_;
  PhysicalParams params_;
  ShapeForcing shapes_;
  double dt_;
  Tolerances tol_;
  PotentialSolver potential_;
  PcgSolver pressure_;
  PcgSolver momentum_x_;
  PcgSolver momentum_y_;
  PcgSolver angular_;
};

/// One step with a throwaway DirectSolver.
FlowState step(const FlowState& state, const SourcePair& sources, double dt,
               const PhysicalParams& params, const ShapeForcing& shapes);

/// Called after every state is produced (including t0, with diagnostics ==
/// nullptr). Observers cannot modify the solve.
using StepObserver =
    std::function<void(const FlowState&, const StepDiagnostics*)>;

Trajectory solve_forward(const SourcePair& sources, const ForwardSetup& setup,
                         const StepObserver& observer = {});

/// Writes one state file per saved step (every `save_every` steps plus the
/// last) and an index.json manifest into `directory`. `config_text` is
/// stored verbatim in the manifest so the run can be replayed.
void export_trajectory(const Trajectory& trajectory,
                       const std::string& directory, int save_every = 1,
                       const std::string& config_text = {});

struct StoredTrajectory {
  Trajectory trajectory;  ///< states only, no step diagnostics
  std::vector<int> steps;  ///< step index of every stored state
  std::string config_text;
};

/// Reads a trajectory written by export_trajectory.
StoredTrajectory load_trajectory(const std::string& directory);

}  // namespace micropolar
