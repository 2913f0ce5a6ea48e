/**
 * @file transport.hpp
 * @brief Mass density and first-order upwind transport.
 *
 * The upwind update is written in non-conservative form,
 *
 *   s'_P = s_P + dt * sum_{inflow faces} |U_f| / h (s_nb - s_P),
 *
 * so every new value is a convex combination of old neighbour values as long
 * as the inflow Courant sum dt * sum |U_f| / h stays at or below one. That
 * makes the discrete maximum principle exact.
 */
#pragma once

#include "micropolar/grid.hpp"

namespace micropolar {

/// A density field plus the bounds [alpha, beta] recorded from the initial
/// density. alpha > 0 always.
class DensityField {
 public:
  /// Records alpha = min, beta = max. Throws ValidationError("H1") unless
  /// the field is finite and strictly positive.
  explicit DensityField(ScalarField rho);
  /// Carries previously recorded bounds forward.
  DensityField(ScalarField rho, double alpha, double beta);

  const ScalarField& field() const noexcept { return rho_; }
  const Grid& grid() const noexcept { return rho_.grid(); }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  ScalarField rho_;
  double alpha_;
  double beta_;
};

struct CourantReport {
  double value = 0.0;
  int i = -1;
  int j = -1;
};

/// Largest inflow Courant sum over cells for transport of cell quantities.
CourantReport inflow_courant(const VectorField& u, double dt);

/// Largest inflow Courant sum over the face-centered control volumes used
/// for momentum transport.
CourantReport momentum_courant(const VectorField& u, double dt);

/// -(u . grad) s with upwinded neighbour values, at cell centers.
ScalarField upwind_transport(const ScalarField& s, const VectorField& u);

/// -(u . grad) u with upwinded neighbour values, at interior faces. Boundary
/// faces are zero.
VectorField upwind_momentum_transport(const VectorField& u);

/// One upwind step of rho_t + u . grad rho = 0. Throws CflViolation naming
/// the offending cell when the inflow Courant sum exceeds one, and
/// NonFiniteInput on NaN/Inf input.
DensityField advect_density(const DensityField& rho, const VectorField& u,
                            double dt);

}  // namespace micropolar
