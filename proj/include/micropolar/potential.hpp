/**
 * @file potential.hpp
 * @brief Weighted Neumann problem for the Helmholtz potential h.
 *
 * Solves
 *
 *     div(rho grad h) = div(rho m)   in the domain,
 *     dh/dn = m . n                  on the walls,
 *     integral of h = 0,
 *
 * on the MAC grid. Substituting the wall condition into the flux form leaves
 * only interior faces: K h = -div(rho_f m0), where K is the weighted
 * Neumann matrix and m0 is m with its boundary faces removed. The discrete
 * field rho_f (grad h - m) is then divergence free with zero wall flux.
 */
#pragma once

#include <optional>

#include "micropolar/grid.hpp"
#include "micropolar/linear_solver.hpp"
#include "micropolar/transport.hpp"

namespace micropolar {

struct PotentialProblem {
  DensityField rho;
  VectorField m;
  double tolerance = 1e-10;
  int max_iterations = 500;
};

/// One-shot solve. Stats (iterations, residual) are written to `stats` when
/// given. Throws CoercivityError if rho is not strictly positive and
/// ConvergenceError when the iteration budget is exhausted.
ScalarField solve_potential(const PotentialProblem& problem,
                            SolveStats* stats = nullptr);

/// grad h on faces, identical to gradient().
VectorField potential_gradient(const ScalarField& h);

/// Reusable solver that keeps its preconditioner (factorized at the first
/// density it sees) across calls, for use inside a time loop.
class PotentialSolver {
 public:
  explicit PotentialSolver(double tolerance = 1e-10, int max_iterations = 500);

  ScalarField solve(const DensityField& rho, const VectorField& m,
                    const ScalarField* warm_start = nullptr);

  /// Solves K h = rhs directly, after projecting rhs onto mean zero.
  ScalarField solve_rhs(const DensityField& rho, const ScalarField& rhs,
                        const ScalarField* warm_start = nullptr);

  const SolveStats& last_stats() const noexcept { return stats_; }

 private:
  PcgSolver pcg_;
  SolveStats stats_;
};

/// The right-hand side -div(rho_f m0) of the discrete potential system.
ScalarField potential_rhs(const ScalarField& rho, const VectorField& m);

}  // namespace micropolar
