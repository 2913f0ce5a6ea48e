/**
 * @file operators.hpp
 * @brief Discrete differential and integral operators on the MAC grid.
 *
 * The operators are built so that the discrete identities
 * divergence(curl_of_scalar(w)) = 0 and curl_of_vector(gradient(s)) = 0 hold
 * up to rounding at interior cells, and gradient / divergence are adjoint up
 * to boundary flux terms under inner_product.
 */
#pragma once

#include "micropolar/grid.hpp"

namespace micropolar {

/// Ghost-cell convention for scalar stencils that reach past a wall.
enum class Ghost {
  Dirichlet,  ///< reflection s_ghost = -s, wall value zero
  Neumann,    ///< reflection s_ghost = s, zero normal derivative
};

/// Centered differences onto faces; boundary faces copy the nearest interior
/// difference (one-sided), so linear fields are reproduced everywhere.
VectorField gradient(const ScalarField& s);

/// Like gradient(), but boundary faces are set to zero. This is the gradient
/// seen by the Neumann and projection operators.
VectorField gradient_interior(const ScalarField& s);

/// Per-cell flux difference d(vx)/dx + d(vy)/dy.
ScalarField divergence(const VectorField& v);

/// Averages cell values to the corners, using the given ghost convention
/// outside the domain.
NodeField cell_to_node(const ScalarField& s, Ghost ghost);

/// Rotated gradient (d psi/dy, -d psi/dx) of a corner-valued stream function.
/// Its divergence vanishes identically.
VectorField curl_of_stream(const NodeField& psi);

/// 2D curl of a scalar, (dw/dy, -dw/dx), with w extended by Dirichlet ghosts.
VectorField curl_of_scalar(const ScalarField& w);

/// Scalar curl dvy/dx - dvx/dy, evaluated at corners (no-slip ghosts for the
/// tangential components) and averaged to cell centers.
ScalarField curl_of_vector(const VectorField& v);

/// 5-point Laplacian at cell centers.
ScalarField laplacian(const ScalarField& s, Ghost ghost = Ghost::Dirichlet);

/// Componentwise 5-point Laplacian at interior faces with no-slip ghosts for
/// tangential neighbours. Boundary-face entries are zero.
VectorField laplacian_vec(const VectorField& v);

/// Density (or any cell field) interpolated to faces: the mean of the two
/// adjacent cells, or the single adjacent cell on a boundary face.
VectorField face_average(const ScalarField& s);

struct CenterVector {
  ScalarField x;
  ScalarField y;
};

/// Face components averaged to cell centers.
CenterVector center_average(const VectorField& v);

/// Midpoint quadrature of a*b over the domain.
double inner_product(const ScalarField& a, const ScalarField& b);

/// Face quadrature of a.b. Each face carries the weight dx*dy, halved on
/// boundary faces, so a constant component integrates to c*lx*ly exactly.
double inner_product(const VectorField& a, const VectorField& b);

double integrate(const ScalarField& s);

double l2_norm(const ScalarField& s);
double l2_norm(const VectorField& v);

/// L2 norm restricted to interior faces.
double l2_norm_interior(const VectorField& v);

/// Discrete (grad a, grad b) for cell fields vanishing on the walls
/// (Dirichlet ghosts). Equals -inner_product(laplacian(a), b).
double dirichlet_form(const ScalarField& a, const ScalarField& b);

/// Discrete (grad a, grad b) for face fields with no-slip walls. When both
/// fields vanish on boundary faces this equals
/// -inner_product(laplacian_vec(a), b).
double dirichlet_form(const VectorField& a, const VectorField& b);

}  // namespace micropolar
