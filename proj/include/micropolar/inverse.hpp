/**
 * @file inverse.hpp
 * @brief The operator R(f, g) = (N_1 / gamma_1, N_2 / gamma_2) and its
 *        Picard iteration.
 *
 * With probes psi_u (divergence free, zero on the walls) and psi_w, testing
 * the momentum and microrotation equations gives, for every t,
 *
 *   f(t) gamma_1(t) = dphi_u/dt - int rho u (x) u : grad psi_u
 *                     + (mu + mu_r) (grad u, grad psi_u) - 2 mu_r (curl w, psi_u)
 *   g(t) gamma_2(t) = dphi_w/dt - int rho w u . grad psi_w
 *                     + (c_a + c_d) (grad w, grad psi_w) + 4 mu_r (w, psi_w)
 *                     - 2 mu_r (curl u, psi_w)
 *
 * with gamma_1 = int rho (grad h - m) . psi_u and gamma_2 = int rho q psi_w.
 * The right-hand sides are N_1, N_2. The pressure drops out because psi_u
 * is discretely divergence free.
 */
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "micropolar/direct_solver.hpp"
#include "micropolar/forcing.hpp"
#include "micropolar/observation.hpp"

namespace micropolar {

struct InverseConfig {
  /// Degeneracy thresholds; unset means 1e-3 * |gamma(0)|.
  std::optional<double> h_eps;
  std::optional<double> r_eps;
  double tolerance = 1e-6;  ///< on the L2(0, T) Picard increment
  int max_iterations = 50;
  double relaxation = 1.0;  ///< omega in (0, 1]
  /// Absolute tolerance of the t = 0 compatibility check, per slot.
  double compatibility_tolerance = 1e-9;
  /// Initial guess; unset means f = g = 0 on the observation grid.
  std::optional<SourcePair> initial_guess;

  void validate() const;
};

/// (gamma_1, gamma_2) at one state. gamma_1 uses face quadrature and the
/// state's own h and rho at time state.t.
std::pair<double, double> eval_gamma(const FlowState& state,
                                     const ShapeForcing& shapes,
                                     const ProbeSet& probes);

struct GammaSeries {
  std::vector<double> times;
  std::vector<double> gamma_1;
  std::vector<double> gamma_2;
};

GammaSeries eval_gamma_series(const Trajectory& trajectory,
                              const ShapeForcing& shapes,
                              const ProbeSet& probes);

/// Throws DegeneracyError at the first sample with |gamma_1| < h_eps
/// (component 1) or |gamma_2| < r_eps (component 2).
void check_degeneracy(const GammaSeries& gamma, double h_eps, double r_eps);

/// N_1, N_2 at every trajectory time. The observations must share the
/// trajectory's time grid (AlignmentError otherwise).
std::pair<std::vector<double>, std::vector<double>> eval_N(
    const Trajectory& trajectory, const Observations& obs,
    const ProbeSet& probes, const PhysicalParams& params);

/// Residuals |observe(initial) - phi(0)| per slot.
struct CompatibilityResult {
  double residual_u = 0.0;
  double residual_w = 0.0;
};

/// Throws CompatibilityError when either residual exceeds `tolerance`.
CompatibilityResult check_compatibility(const Observations& obs,
                                        const FlowState& initial,
                                        const ProbeSet& probes,
                                        double tolerance);

/// Everything computed during one application of R.
struct REvaluation {
  SourcePair value;
  GammaSeries gamma;
  std::vector<double> n_1;
  std::vector<double> n_2;
};

/// One application of R. The forward run uses `setup` with `fg` as the
/// source coefficients. Degeneracy is checked before any quotient is taken.
REvaluation eval_R_detailed(const SourcePair& fg, const Observations& obs,
                            const ProbeSet& probes, const ForwardSetup& setup,
                            double h_eps, double r_eps);

SourcePair eval_R(const SourcePair& fg, const Observations& obs,
                  const ProbeSet& probes, const ForwardSetup& setup,
                  const InverseConfig& config);

struct ReconstructionReport {
  /// "converged", "max_iterations", "degenerate", "forward_failure" or
  /// "diverged".
  std::string status;
  std::string message;
  bool converged = false;
  int iterations = 0;
  SourcePair recovered;
  std::vector<double> increments;
  double h_eps = 0.0;
  double r_eps = 0.0;
  double gamma_1_min = 0.0;  ///< min |gamma_1| over time, last evaluation
  double gamma_2_min = 0.0;
  CompatibilityResult compatibility;
  double relaxation = 1.0;
  double tolerance = 0.0;
};

/// Picard iteration (f, g)_{k+1} = (1 - w)(f, g)_k + w R((f, g)_k).
/// Compatibility failures throw CompatibilityError. Degeneracy, forward
/// failures and non-convergence are reported through `status`.
ReconstructionReport reconstruct(const Observations& obs, const ProbeSet& probes,
                                 const ForwardSetup& setup,
                                 const InverseConfig& config);

/// JSON document with keys: status, message, converged, iterations,
/// tolerance, relaxation, increments, guards {h_eps, r_eps, gamma_1_min,
/// gamma_2_min, margin_1, margin_2}, compatibility {residual_u,
/// residual_w}, recovered {t, f, g}.
std::string report_to_json(const ReconstructionReport& report);

}  // namespace micropolar
