/**
 * @file linear_solver.hpp
 * @brief Preconditioned conjugate gradients and the sparse systems assembled
 *        by the implicit parts of the solver.
 *
 * Every implicit operator in this project is symmetric positive
 * (semi-)definite on the MAC layout. The preconditioner is an exact sparse
 * LDL^T factorization of a *reference* operator, typically the same operator
 * at the initial density. Because density stays within [alpha, beta], the
 * current operator is spectrally equivalent to the reference and PCG
 * converges in a handful of iterations.
 */
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "micropolar/grid.hpp"

namespace micropolar {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool refactored = false;
};

class PcgSolver {
 public:
  enum class Nullspace { None, Constant };

  PcgSolver(Nullspace nullspace, double relative_tolerance, int max_iterations,
            int refresh_threshold = 20);
  PcgSolver(PcgSolver&&) noexcept;
  PcgSolver& operator=(PcgSolver&&) noexcept;
  ~PcgSolver();

  /// Solves a x = b starting from the incoming x. With a constant nullspace
  /// the right-hand side is projected onto mean zero first and the returned x
  /// has mean zero. Throws ConvergenceError when the budget is spent.
  ///
  /// The first call (or a call after a slow solve) factorizes `a` as the new
  /// reference preconditioner.
  SolveStats solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                   Eigen::VectorXd& x);

  /// Makes `a` the reference operator.
  void set_reference(const SparseMatrix& a);

  double tolerance() const noexcept { return tolerance_; }

 private:
  void apply_preconditioner(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;

  Nullspace nullspace_;
  double tolerance_;
  int max_iterations_;
  int refresh_threshold_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

// ------------------------------------------------------------- assembly

/// Number of interior x-faces / y-faces (the unknowns of the momentum solves).
std::size_t interior_xface_count(const Grid& g);
std::size_t interior_yface_count(const Grid& g);

/// K h = -div(c * gradient_interior(h)) on cells, where c lives on faces.
/// Symmetric positive semidefinite with the constants as nullspace.
SparseMatrix weighted_neumann_matrix(const VectorField& coefficient);

/// (rho_f / dt) - nu * Laplacian on interior x-faces, no-slip walls.
SparseMatrix xface_helmholtz_matrix(const VectorField& rho_face, double dt,
                                    double nu);
/// Same for interior y-faces.
SparseMatrix yface_helmholtz_matrix(const VectorField& rho_face, double dt,
                                    double nu);
/// (rho / dt) + reaction - kappa * Laplacian on cells, Dirichlet walls.
SparseMatrix cell_helmholtz_matrix(const ScalarField& rho, double dt,
                                   double kappa, double reaction);

Eigen::VectorXd gather_interior_x(const VectorField& v);
Eigen::VectorXd gather_interior_y(const VectorField& v);
void scatter_interior_x(const Eigen::VectorXd& x, VectorField& v);
void scatter_interior_y(const Eigen::VectorXd& y, VectorField& v);

Eigen::VectorXd to_eigen(const ScalarField& s);
ScalarField from_eigen(const Grid& g, const Eigen::VectorXd& v);

}  // namespace micropolar
