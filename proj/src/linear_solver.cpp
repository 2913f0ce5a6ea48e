#include "micropolar/linear_solver.hpp"

#include <cmath>
#include <vector>

#include "micropolar/errors.hpp"

namespace micropolar {

PcgSolver::PcgSolver(Nullspace nullspace, double relative_tolerance,
                     int max_iterations, int refresh_threshold)
    : nullspace_(nullspace),
      tolerance_(relative_tolerance),
      max_iterations_(max_iterations),
      refresh_threshold_(refresh_threshold) {}

PcgSolver::PcgSolver(PcgSolver&&) noexcept = default;
PcgSolver& PcgSolver::operator=(PcgSolver&&) noexcept = default;
PcgSolver::~PcgSolver() = default;

void PcgSolver::set_reference(const SparseMatrix& a) {
  auto factor = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>();
  if (nullspace_ == Nullspace::Constant) {
    // Pin one unknown so the singular Neumann operator factorizes; the
    // preconditioner is only applied to mean-zero vectors.
    SparseMatrix pinned = a;
    pinned.coeffRef(0, 0) += a.coeff(0, 0);
    factor->compute(pinned);
  } else {
    factor->compute(a);
  }
  if (factor->info() != Eigen::Success)
    throw ConvergenceError("PCG: reference factorization failed", 0,
                           std::numeric_limits<double>::infinity());
  factor_ = std::move(factor);
}

void PcgSolver::apply_preconditioner(const Eigen::VectorXd& r,
                                     Eigen::VectorXd& z) const {
  z = factor_->solve(r);
  if (nullspace_ == Nullspace::Constant) z.array() -= z.mean();
}

SolveStats PcgSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                            Eigen::VectorXd& x) {
  SolveStats stats;
  const bool deflate = nullspace_ == Nullspace::Constant;
  Eigen::VectorXd rhs = b;
  if (deflate) {
    rhs.array() -= rhs.mean();
    x.array() -= x.mean();
  }
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return stats;
  }
  if (!factor_) {
    set_reference(a);
    stats.refactored = true;
  }

  Eigen::VectorXd r = rhs - a * x;
  if (deflate) r.array() -= r.mean();
  double rel = r.norm() / bnorm;
  if (rel <= tolerance_) {
    stats.relative_residual = rel;
    return stats;
  }

  Eigen::VectorXd z(r.size());
  apply_preconditioner(r, z);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(r.size());
  double rz = r.dot(z);
  int k = 0;
  bool converged = false;
  while (k < max_iterations_) {
    ++k;
    q.noalias() = a * p;
    const double alpha = rz / p.dot(q);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    if (deflate) r.array() -= r.mean();
    rel = r.norm() / bnorm;
    if (!std::isfinite(rel)) break;
    if (rel <= tolerance_) {
      converged = true;
      break;
    }
    apply_preconditioner(r, z);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  stats.iterations = k;
  stats.relative_residual = rel;
  if (!converged)
    throw ConvergenceError("PCG did not reach relative residual " +
                               std::to_string(tolerance_) + " in " +
                               std::to_string(k) + " iterations (residual " +
                               std::to_string(rel) + ")",
                           k, rel);
  if (deflate) x.array() -= x.mean();
  if (k > refresh_threshold_) {
    set_reference(a);
    stats.refactored = true;
  }
  return stats;
}

// ------------------------------------------------------------- assembly

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix build(std::size_t n, std::vector<Triplet>& entries) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

}  // namespace

std::size_t interior_xface_count(const Grid& g) {
  return static_cast<std::size_t>(g.nx() - 1) * g.ny();
}
std::size_t interior_yface_count(const Grid& g) {
  return static_cast<std::size_t>(g.nx()) * (g.ny() - 1);
}

SparseMatrix weighted_neumann_matrix(const VectorField& c) {
  const Grid& g = c.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());
  std::vector<Triplet> t;
  t.reserve(5 * g.cell_count());
  auto couple = [&](std::size_t p, std::size_t q, double w) {
    t.emplace_back(p, p, w);
    t.emplace_back(q, q, w);
    t.emplace_back(p, q, -w);
    t.emplace_back(q, p, -w);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      couple(g.cell(i - 1, j), g.cell(i, j), c.x(i, j) * idx2);
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      couple(g.cell(i, j - 1), g.cell(i, j), c.y(i, j) * idy2);
  return build(g.cell_count(), t);
}

SparseMatrix xface_helmholtz_matrix(const VectorField& rho_face, double dt,
                                    double nu) {
  const Grid& g = rho_face.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const int m = nx - 1;
  const double ax = nu / (g.dx() * g.dx());
  const double ay = nu / (g.dy() * g.dy());
  std::vector<Triplet> t;
  t.reserve(5 * interior_xface_count(g));
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const std::size_t row = static_cast<std::size_t>(j) * m + (i - 1);
      double diag = rho_face.x(i, j) / dt + 2.0 * ax + 2.0 * ay;
      if (i > 1) t.emplace_back(row, row - 1, -ax);
      if (i < nx - 1) t.emplace_back(row, row + 1, -ax);
      if (j > 0)
        t.emplace_back(row, row - m, -ay);
      else
        diag += ay;  // ghost reflection at the south wall
      if (j < ny - 1)
        t.emplace_back(row, row + m, -ay);
      else
        diag += ay;
      t.emplace_back(row, row, diag);
    }
  return build(interior_xface_count(g), t);
}

SparseMatrix yface_helmholtz_matrix(const VectorField& rho_face, double dt,
                                    double nu) {
  const Grid& g = rho_face.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double ax = nu / (g.dx() * g.dx());
  const double ay = nu / (g.dy() * g.dy());
  std::vector<Triplet> t;
  t.reserve(5 * interior_yface_count(g));
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t row = static_cast<std::size_t>(j - 1) * nx + i;
      double diag = rho_face.y(i, j) / dt + 2.0 * ax + 2.0 * ay;
      if (j > 1) t.emplace_back(row, row - nx, -ay);
      if (j < ny - 1) t.emplace_back(row, row + nx, -ay);
      if (i > 0)
        t.emplace_back(row, row - 1, -ax);
      else
        diag += ax;
      if (i < nx - 1)
        t.emplace_back(row, row + 1, -ax);
      else
        diag += ax;
      t.emplace_back(row, row, diag);
    }
  return build(interior_yface_count(g), t);
}

SparseMatrix cell_helmholtz_matrix(const ScalarField& rho, double dt,
                                   double kappa, double reaction) {
  const Grid& g = rho.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double ax = kappa / (g.dx() * g.dx());
  const double ay = kappa / (g.dy() * g.dy());
  std::vector<Triplet> t;
  t.reserve(5 * g.cell_count());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t row = g.cell(i, j);
      double diag = rho(i, j) / dt + reaction + 2.0 * ax + 2.0 * ay;
      if (i > 0) t.emplace_back(row, row - 1, -ax); else diag += ax;
      if (i < nx - 1) t.emplace_back(row, row + 1, -ax); else diag += ax;
      if (j > 0) t.emplace_back(row, row - nx, -ay); else diag += ay;
      if (j < ny - 1) t.emplace_back(row, row + nx, -ay); else diag += ay;
      t.emplace_back(row, row, diag);
    }
  return build(g.cell_count(), t);
}

Eigen::VectorXd gather_interior_x(const VectorField& v) {
  const Grid& g = v.grid();
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior_xface_count(g)));
  Eigen::Index k = 0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) out[k++] = v.x(i, j);
  return out;
}

Eigen::VectorXd gather_interior_y(const VectorField& v) {
  const Grid& g = v.grid();
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior_yface_count(g)));
  Eigen::Index k = 0;
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out[k++] = v.y(i, j);
  return out;
}

void scatter_interior_x(const Eigen::VectorXd& x, VectorField& v) {
  const Grid& g = v.grid();
  Eigen::Index k = 0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) v.x(i, j) = x[k++];
}

void scatter_interior_y(const Eigen::VectorXd& y, VectorField& v) {
  const Grid& g = v.grid();
  Eigen::Index k = 0;
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) v.y(i, j) = y[k++];
}

Eigen::VectorXd to_eigen(const ScalarField& s) {
  auto vals = s.values();
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

ScalarField from_eigen(const Grid& g, const Eigen::VectorXd& v) {
  return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace micropolar
