#include "micropolar/potential.hpp"

#include "micropolar/errors.hpp"
#include "micropolar/operators.hpp"

namespace micropolar {

namespace {

void require_coercive(const DensityField& rho) {
  const double lo = rho.field().min();
  if (!(lo > 0.0) || !rho.field().all_finite())
    throw CoercivityError("potential solve: density must be positive and "
                          "finite (min = " + std::to_string(lo) + ")");
}

}  // namespace

ScalarField potential_rhs(const ScalarField& rho, const VectorField& m) {
  require_same_grid(rho.grid(), m.grid(), "potential_rhs");
  VectorField flux = face_average(rho);
  const auto mx = m.x_values();
  const auto my = m.y_values();
  auto fx = flux.x_values();
  auto fy = flux.y_values();
  for (std::size_t k = 0; k < fx.size(); ++k) fx[k] *= mx[k];
  for (std::size_t k = 0; k < fy.size(); ++k) fy[k] *= my[k];
  flux.zero_boundary();
  ScalarField rhs = divergence(flux);
  rhs *= -1.0;
  return rhs;
}

PotentialSolver::PotentialSolver(double tolerance, int max_iterations)
    : pcg_(PcgSolver::Nullspace::Constant, tolerance, max_iterations) {}

ScalarField PotentialSolver::solve_rhs(const DensityField& rho,
                                       const ScalarField& rhs,
                                       const ScalarField* warm_start) {
  require_coercive(rho);
  require_same_grid(rho.grid(), rhs.grid(), "PotentialSolver::solve_rhs");
  const Grid& g = rho.grid();
  const SparseMatrix k = weighted_neumann_matrix(face_average(rho.field()));
  Eigen::VectorXd x = warm_start ? to_eigen(*warm_start)
                                 : Eigen::VectorXd::Zero(
                                       static_cast<Eigen::Index>(g.cell_count()));
  stats_ = pcg_.solve(k, to_eigen(rhs), x);
  return from_eigen(g, x);
}

ScalarField PotentialSolver::solve(const DensityField& rho, const VectorField& m,
                                   const ScalarField* warm_start) {
  if (!m.all_finite()) throw NonFiniteInput("potential solve: m is not finite");
  return solve_rhs(rho, potential_rhs(rho.field(), m), warm_start);
}

ScalarField solve_potential(const PotentialProblem& problem, SolveStats* stats) {
  PotentialSolver solver(problem.tolerance, problem.max_iterations);
  ScalarField h = solver.solve(problem.rho, problem.m);
  if (stats) *stats = solver.last_stats();
  return h;
}

VectorField potential_gradient(const ScalarField& h) { return gradient(h); }

}  // namespace micropolar
