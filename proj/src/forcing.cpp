#include "micropolar/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micropolar/errors.hpp"

namespace micropolar {

void PhysicalParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(mu)) throw ValidationError("mu>0", "Newtonian viscosity must be positive");
  if (!positive(mu_r)) throw ValidationError("mu_r>0", "microrotation viscosity must be positive");
  if (!positive(c_a) || !positive(c_d) || !positive(c_0))
    throw ValidationError("c_a,c_d,c_0>0", "angular viscosities must be positive");
  if (!(c_0 + c_d > c_a))
    throw ValidationError("c_0+c_d>c_a",
                          "angular viscosities violate c_0 + c_d > c_a (c_0 = " +
                              std::to_string(c_0) + ", c_d = " +
                              std::to_string(c_d) + ", c_a = " +
                              std::to_string(c_a) + ")");
}

std::vector<double> uniform_time_grid(double final_time, int steps) {
  if (steps < 0 || !(final_time >= 0.0))
    throw ValidationError("time", "need steps >= 0 and final time >= 0");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k)
    t[k] = steps == 0 ? 0.0 : final_time * k / steps;
  return t;
}

// ----------------------------------------------------------------- SourcePair

SourcePair::SourcePair(std::vector<double> times, std::vector<double> f,
                       std::vector<double> g)
    : times_(std::move(times)), f_(std::move(f)), g_(std::move(g)) {
  if (times_.empty() || f_.size() != times_.size() || g_.size() != times_.size())
    throw AlignmentError("SourcePair: sample counts must match the time grid");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1]))
      throw AlignmentError("SourcePair: time grid must be strictly increasing");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(times_) || !finite(f_) || !finite(g_))
    throw NonFiniteInput("SourcePair: non-finite sample");
}

SourcePair SourcePair::constant(std::vector<double> times, double f, double g) {
  const std::size_t n = times.size();
  return SourcePair(std::move(times), std::vector<double>(n, f),
                    std::vector<double>(n, g));
}

namespace {

double interpolate(std::span<const double> t, std::span<const double> v,
                   double at) {
  if (at <= t.front()) return v.front();
  if (at >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  const double w = (at - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - w) * v[k - 1] + w * v[k];
}

}  // namespace

double SourcePair::f_at(double t) const { return interpolate(times_, f_, t); }
double SourcePair::g_at(double t) const { return interpolate(times_, g_, t); }

SourcePair SourcePair::blend(const SourcePair& other, double w) const {
  if (other.times_ != times_)
    throw AlignmentError("SourcePair::blend: time grids differ");
  std::vector<double> f(f_.size()), g(g_.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = (1.0 - w) * f_[k] + w * other.f_[k];
    g[k] = (1.0 - w) * g_[k] + w * other.g_[k];
  }
  return SourcePair(times_, std::move(f), std::move(g));
}

double l2_time_norm(std::span<const double> times, std::span<const double> v) {
  if (times.size() != v.size())
    throw AlignmentError("l2_time_norm: series length differs from time grid");
  double sum = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k)
    sum += 0.5 * (times[k] - times[k - 1]) * (v[k] * v[k] + v[k - 1] * v[k - 1]);
  return std::sqrt(sum);
}

double l2_norm(const SourcePair& s) {
  const double nf = l2_time_norm(s.times(), s.f());
  const double ng = l2_time_norm(s.times(), s.g());
  return std::sqrt(nf * nf + ng * ng);
}

double l2_distance(const SourcePair& a, const SourcePair& b) {
  if (a.size() != b.size())
    throw AlignmentError("l2_distance: time grids differ");
  std::vector<double> df(a.size()), dg(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    df[k] = a.f()[k] - b.f()[k];
    dg[k] = a.g()[k] - b.g()[k];
  }
  const double nf = l2_time_norm(a.times(), df);
  const double ng = l2_time_norm(a.times(), dg);
  return std::sqrt(nf * nf + ng * ng);
}

// --------------------------------------------------------------- ShapeForcing

ShapeForcing::ShapeForcing(Grid grid, MFunction m, QFunction q)
    : grid_(grid), m_(std::move(m)), q_(std::move(q)) {}

ShapeForcing ShapeForcing::steady(VectorField m, ScalarField q) {
  require_same_grid(m.grid(), q.grid(), "ShapeForcing::steady");
  Grid g = m.grid();
  return ShapeForcing(
      g, [m = std::move(m)](double) { return m; },
      [q = std::move(q)](double) { return q; });
}

VectorField ShapeForcing::m(double t) const {
  VectorField v = m_(t);
  require_same_grid(grid_, v.grid(), "ShapeForcing::m");
  if (!v.all_finite())
    throw NonFiniteInput("ShapeForcing: m is not finite at t = " + std::to_string(t));
  return v;
}

ScalarField ShapeForcing::q(double t) const {
  ScalarField s = q_(t);
  require_same_grid(grid_, s.grid(), "ShapeForcing::q");
  if (!s.all_finite())
    throw NonFiniteInput("ShapeForcing: q is not finite at t = " + std::to_string(t));
  return s;
}

}  // namespace micropolar
