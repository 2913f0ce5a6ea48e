#include "micropolar/profiles.hpp"

#include <cmath>

#include "micropolar/errors.hpp"
#include "micropolar/operators.hpp"

namespace micropolar {

namespace {

const double kPi = std::acos(-1.0);

[[noreturn]] void unknown(const char* what, const std::string& kind) {
  throw ValidationError(what, "unknown profile '" + kind + "'");
}

}  // namespace

DensityField make_density(const DensityProfile& p, const Grid& grid) {
  if (p.kind == "uniform") return DensityField(ScalarField(grid, p.base));
  if (p.kind != "gaussian") unknown("density", p.kind);
  if (!(p.sigma > 0.0)) throw ValidationError("density", "sigma must be positive");
  const double cx = p.cx * grid.lx();
  const double cy = p.cy * grid.ly();
  const double s2 = 2.0 * p.sigma * p.sigma * grid.lx() * grid.ly();
  return DensityField(ScalarField::sample(grid, [&](double x, double y) {
    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    return p.base + p.amplitude * std::exp(-r2 / s2);
  }));
}

VectorField make_velocity(const VelocityProfile& p, const Grid& grid) {
  if (p.kind == "rest") return VectorField(grid);
  if (p.kind != "vortex") unknown("velocity", p.kind);
  const NodeField stream = NodeField::sample(grid, [&](double x, double y) {
    const double sx = std::sin(kPi * x / grid.lx());
    const double sy = std::sin(kPi * y / grid.ly());
    return p.amplitude * sx * sx * sy * sy;
  });
  VectorField u = curl_of_stream(stream);
  u.zero_boundary();
  return u;
}

ScalarField make_microrotation(const MicrorotationProfile& p, const Grid& grid) {
  if (p.kind == "rest") return ScalarField(grid);
  if (p.kind != "bump") unknown("microrotation", p.kind);
  return ScalarField::sample(grid, [&](double x, double y) {
    return p.amplitude * std::sin(kPi * x / grid.lx()) *
           std::sin(kPi * y / grid.ly());
  });
}

ScalarField m_potential(const MShapeProfile& p, const Grid& grid) {
  return ScalarField::sample(grid, [&](double x, double y) {
    return p.grad_coef * std::cos(kPi * x / grid.lx()) *
           std::cos(kPi * y / grid.ly());
  });
}

namespace {

VectorField m_field(const MShapeProfile& p, const Grid& grid) {
  if (p.kind == "zero") return VectorField(grid);
  if (p.kind != "default" && p.kind != "gradient") unknown("m", p.kind);
  VectorField m = gradient(m_potential(p, grid));
  if (p.kind == "default") {
    const NodeField stream = NodeField::sample(grid, [&](double x, double y) {
      return std::sin(kPi * x / grid.lx()) * std::sin(kPi * y / grid.ly());
    });
    m.axpy(-p.curl_coef, curl_of_stream(stream));
  }
  return m;
}

ScalarField q_field(const QShapeProfile& p, const Grid& grid) {
  if (p.kind == "zero") return ScalarField(grid);
  if (p.kind == "uniform") return ScalarField(grid, p.amplitude);
  if (p.kind != "bump") unknown("q", p.kind);
  const double r0 = p.radius * std::min(grid.lx(), grid.ly());
  return ScalarField::sample(grid, [&](double x, double y) {
    const double dx = x - p.cx * grid.lx();
    const double dy = y - p.cy * grid.ly();
    const double s = 1.0 - (dx * dx + dy * dy) / (r0 * r0);
    return s > 0.0 ? p.amplitude * s * s : 0.0;
  });
}

}  // namespace

ShapeForcing make_shapes(const MShapeProfile& mp, const QShapeProfile& qp,
                         const Grid& grid) {
  VectorField m = m_field(mp, grid);
  ScalarField q = q_field(qp, grid);
  if (mp.modulation == 0.0) return ShapeForcing::steady(std::move(m), std::move(q));
  const double mod = mp.modulation;
  return ShapeForcing(
      grid,
      [m = std::move(m), mod](double t) {
        VectorField v = m;
        v *= 1.0 + mod * std::sin(2.0 * kPi * t);
        return v;
      },
      [q = std::move(q)](double) { return q; });
}

SourcePair make_sources(const SourceProfile& p, std::vector<double> times) {
  if (p.kind == "zero") return SourcePair::constant(std::move(times), 0.0, 0.0);
  if (p.kind == "constant")
    return SourcePair::constant(std::move(times), p.f_mean, p.g_mean);
  if (p.kind != "harmonic") unknown("sources", p.kind);
  if (!(p.period > 0.0)) throw ValidationError("sources", "period must be positive");
  const double w = 2.0 * kPi / p.period;
  return SourcePair::sample(
      std::move(times),
      [&](double t) { return p.f_mean + p.f_amplitude * std::sin(w * t); },
      [&](double t) { return p.g_mean + p.g_amplitude * std::cos(w * t); });
}

}  // namespace micropolar
