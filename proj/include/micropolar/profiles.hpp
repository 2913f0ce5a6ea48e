/**
 * @file profiles.hpp
 * @brief Named analytic profiles for initial data, force shapes and
 *        ground-truth source coefficients.
 *
 * Coordinates are scaled by the domain extents, so "center (0.4, 0.55)"
 * means (0.4 lx, 0.55 ly).
 */
#pragma once

#include <string>
#include <vector>

#include "micropolar/forcing.hpp"
#include "micropolar/grid.hpp"
#include "micropolar/transport.hpp"

namespace micropolar {

struct DensityProfile {
  std::string kind = "gaussian";  ///< "uniform" or "gaussian"
  double base = 1.0;
  double amplitude = 0.3;
  double cx = 0.4;
  double cy = 0.55;
  double sigma = 0.12;
};

/// base + amplitude * exp(-|x - c|^2 / (2 sigma^2)), or base when uniform.
DensityField make_density(const DensityProfile& p, const Grid& grid);

struct VelocityProfile {
  std::string kind = "rest";  ///< "rest" or "vortex"
  double amplitude = 0.0;
};

/// "vortex": curl of amplitude * sin^2(pi x / lx) sin^2(pi y / ly), sampled
/// at the nodes, so the field is discretely divergence free and vanishes on
/// the walls.
VectorField make_velocity(const VelocityProfile& p, const Grid& grid);

struct MicrorotationProfile {
  std::string kind = "rest";  ///< "rest" or "bump"
  double amplitude = 0.0;
};

/// "bump": amplitude * sin(pi x / lx) sin(pi y / ly).
ScalarField make_microrotation(const MicrorotationProfile& p, const Grid& grid);

struct MShapeProfile {
  /// "default": m = -curl_coef * curl(S) + grad_coef * grad(C) with
  ///            S = sin(pi x/lx) sin(pi y/ly), C = cos(pi x/lx) cos(pi y/ly)
  /// "gradient": grad_coef * grad(C) only, so grad h = m and F = 0
  /// "zero"
  std::string kind = "default";
  double curl_coef = 0.1;
  double grad_coef = 0.05;
  /// m(x, t) = (1 + modulation * sin(2 pi t)) m(x)
  double modulation = 0.0;
};

struct QShapeProfile {
  std::string kind = "bump";  ///< "bump", "uniform" or "zero"
  double amplitude = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  double radius = 0.3;  ///< fraction of min(lx, ly)
};

/// The potential C used by "gradient" shapes, sampled at cell centers.
ScalarField m_potential(const MShapeProfile& p, const Grid& grid);

ShapeForcing make_shapes(const MShapeProfile& m, const QShapeProfile& q,
                         const Grid& grid);

struct SourceProfile {
  /// "harmonic": f = f_mean + f_amplitude sin(2 pi t / period),
  ///             g = g_mean + g_amplitude cos(2 pi t / period)
  /// "constant": f = f_mean, g = g_mean
  /// "zero"
  std::string kind = "harmonic";
  double f_mean = 1.0;
  double f_amplitude = 0.3;
  double g_mean = 1.0;
  double g_amplitude = -0.2;
  double period = 1.0;
};

SourcePair make_sources(const SourceProfile& p, std::vector<double> times);

}  // namespace micropolar
