#include "micropolar/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micropolar/errors.hpp"

namespace micropolar {

DensityField::DensityField(ScalarField rho)
    : rho_(std::move(rho)), alpha_(0.0), beta_(0.0) {
  if (!rho_.all_finite())
    throw ValidationError("H1", "initial density is not finite");
  alpha_ = rho_.min();
  beta_ = rho_.max();
  if (!(alpha_ > 0.0))
    throw ValidationError("H1", "initial density must be strictly positive, "
                                "min = " + std::to_string(alpha_));
}

DensityField::DensityField(ScalarField rho, double alpha, double beta)
    : rho_(std::move(rho)), alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta >= alpha))
    throw ValidationError("H1", "density bounds must satisfy 0 < alpha <= beta");
}

namespace {

inline double inflow_pos(double v) { return v > 0.0 ? v : 0.0; }
inline double inflow_neg(double v) { return v < 0.0 ? -v : 0.0; }

}  // namespace

CourantReport inflow_courant(const VectorField& u, double dt) {
  const Grid& g = u.grid();
  CourantReport worst;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double c =
          dt * ((inflow_pos(u.x(i, j)) + inflow_neg(u.x(i + 1, j))) / g.dx() +
                (inflow_pos(u.y(i, j)) + inflow_neg(u.y(i, j + 1))) / g.dy());
      if (c > worst.value) worst = {c, i, j};
    }
  return worst;
}

CourantReport momentum_courant(const VectorField& u, double dt) {
  const Grid& g = u.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  CourantReport worst;
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double ue = 0.5 * (u.x(i, j) + u.x(i + 1, j));
      const double uw = 0.5 * (u.x(i - 1, j) + u.x(i, j));
      const double vn = 0.5 * (u.y(i - 1, j + 1) + u.y(i, j + 1));
      const double vs = 0.5 * (u.y(i - 1, j) + u.y(i, j));
      const double c = dt * ((inflow_neg(ue) + inflow_pos(uw)) / g.dx() +
                             (inflow_neg(vn) + inflow_pos(vs)) / g.dy());
      if (c > worst.value) worst = {c, i, j};
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double vn = 0.5 * (u.y(i, j) + u.y(i, j + 1));
      const double vs = 0.5 * (u.y(i, j - 1) + u.y(i, j));
      const double ue = 0.5 * (u.x(i + 1, j - 1) + u.x(i + 1, j));
      const double uw = 0.5 * (u.x(i, j - 1) + u.x(i, j));
      const double c = dt * ((inflow_neg(ue) + inflow_pos(uw)) / g.dx() +
                             (inflow_neg(vn) + inflow_pos(vs)) / g.dy());
      if (c > worst.value) worst = {c, i, j};
    }
  return worst;
}

ScalarField upwind_transport(const ScalarField& s, const VectorField& u) {
  require_same_grid(s.grid(), u.grid(), "upwind_transport");
  const Grid& g = s.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  ScalarField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double c = s(i, j);
      double acc = 0.0;
      if (i > 0) acc += inflow_pos(u.x(i, j)) * (s(i - 1, j) - c) / g.dx();
      if (i + 1 < nx) acc += inflow_neg(u.x(i + 1, j)) * (s(i + 1, j) - c) / g.dx();
      if (j > 0) acc += inflow_pos(u.y(i, j)) * (s(i, j - 1) - c) / g.dy();
      if (j + 1 < ny) acc += inflow_neg(u.y(i, j + 1)) * (s(i, j + 1) - c) / g.dy();
      out(i, j) = acc;
    }
  return out;
}

VectorField upwind_momentum_transport(const VectorField& u) {
  const Grid& g = u.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  VectorField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double c = u.x(i, j);
      const double ue = 0.5 * (c + u.x(i + 1, j));
      const double uw = 0.5 * (u.x(i - 1, j) + c);
      const double vn = 0.5 * (u.y(i - 1, j + 1) + u.y(i, j + 1));
      const double vs = 0.5 * (u.y(i - 1, j) + u.y(i, j));
      const double north = j + 1 < ny ? u.x(i, j + 1) : -c;
      const double south = j > 0 ? u.x(i, j - 1) : -c;
      out.x(i, j) = (inflow_neg(ue) * (u.x(i + 1, j) - c) +
                     inflow_pos(uw) * (u.x(i - 1, j) - c)) /
                        g.dx() +
                    (inflow_neg(vn) * (north - c) + inflow_pos(vs) * (south - c)) /
                        g.dy();
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double c = u.y(i, j);
      const double vn = 0.5 * (c + u.y(i, j + 1));
      const double vs = 0.5 * (u.y(i, j - 1) + c);
      const double ue = 0.5 * (u.x(i + 1, j - 1) + u.x(i + 1, j));
      const double uw = 0.5 * (u.x(i, j - 1) + u.x(i, j));
      const double east = i + 1 < nx ? u.y(i + 1, j) : -c;
      const double west = i > 0 ? u.y(i - 1, j) : -c;
      out.y(i, j) = (inflow_neg(vn) * (u.y(i, j + 1) - c) +
                     inflow_pos(vs) * (u.y(i, j - 1) - c)) /
                        g.dy() +
                    (inflow_neg(ue) * (east - c) + inflow_pos(uw) * (west - c)) /
                        g.dx();
    }
  return out;
}

DensityField advect_density(const DensityField& rho, const VectorField& u,
                            double dt) {
  const ScalarField& r = rho.field();
  require_same_grid(r.grid(), u.grid(), "advect_density");
  if (!r.all_finite() || !u.all_finite() || !std::isfinite(dt))
    throw NonFiniteInput("advect_density: non-finite input");
  const CourantReport courant = inflow_courant(u, dt);
  if (courant.value > 1.0)
    throw CflViolation("advect_density: inflow Courant number " +
                           std::to_string(courant.value) + " > 1 at cell (" +
                           std::to_string(courant.i) + ", " +
                           std::to_string(courant.j) + ")",
                       courant.i, courant.j, courant.value);

  const Grid& g = r.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  ScalarField next = r;
  next.axpy(dt, upwind_transport(r, u));
  // The exact update is a convex combination of the stencil values; clamp
  // away rounding so the bounds hold bit-exactly.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double lo = r(i, j), hi = r(i, j);
      if (i > 0) lo = std::min(lo, r(i - 1, j)), hi = std::max(hi, r(i - 1, j));
      if (i + 1 < nx) lo = std::min(lo, r(i + 1, j)), hi = std::max(hi, r(i + 1, j));
      if (j > 0) lo = std::min(lo, r(i, j - 1)), hi = std::max(hi, r(i, j - 1));
      if (j + 1 < ny) lo = std::min(lo, r(i, j + 1)), hi = std::max(hi, r(i, j + 1));
      next(i, j) = std::clamp(next(i, j), lo, hi);
    }
  return DensityField(std::move(next), rho.alpha(), rho.beta());
}

}  // namespace micropolar
