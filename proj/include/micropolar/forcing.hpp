/**
 * @file forcing.hpp
 * @brief Physical parameters, source coefficients and force shapes.
 */
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "micropolar/grid.hpp"

namespace micropolar {

/// Viscosities of the micropolar model. In the 2D reduction c_0 only enters
/// through the side condition c_0 + c_d > c_a.
struct PhysicalParams {
  double mu = 0.05;    ///< Newtonian viscosity
  double mu_r = 0.02;  ///< microrotation viscosity
  double c_a = 0.02;
  double c_d = 0.03;
  double c_0 = 0.03;

  /// Throws ValidationError naming the violated condition.
  void validate() const;
};

/// Evenly spaced times t_k = k * final_time / steps, k = 0..steps.
std::vector<double> uniform_time_grid(double final_time, int steps);

/// Source coefficients f(t), g(t) sampled on a time grid, with
/// piecewise-linear evaluation in between (constant extrapolation outside).
class SourcePair {
 public:
  SourcePair(std::vector<double> times, std::vector<double> f,
             std::vector<double> g);

  static SourcePair constant(std::vector<double> times, double f, double g);

  template <class F, class G>
  static SourcePair sample(std::vector<double> times, F&& f, G&& g) {
    std::vector<double> fv, gv;
    fv.reserve(times.size());
    gv.reserve(times.size());
    for (double t : times) {
      fv.push_back(f(t));
      gv.push_back(g(t));
    }
    return SourcePair(std::move(times), std::move(fv), std::move(gv));
  }

  double f_at(double t) const;
  double g_at(double t) const;

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> f() const noexcept { return f_; }
  std::span<const double> g() const noexcept { return g_; }
  std::size_t size() const noexcept { return times_.size(); }

  /// (1 - w) * this + w * other, sample by sample. Time grids must agree.
  SourcePair blend(const SourcePair& other, double w) const;

 private:
  std::vector<double> times_;
  std::vector<double> f_;
  std::vector<double> g_;
};

/// Trapezoidal L2(0, T) norm of a series on its time grid.
double l2_time_norm(std::span<const double> times, std::span<const double> v);

/// sqrt(||f||^2 + ||g||^2) in L2(0, T).
double l2_norm(const SourcePair& s);

/// L2(0, T) norm of the sample-wise difference of two pairs.
double l2_distance(const SourcePair& a, const SourcePair& b);

/// Spatial shapes m(x, t) and q(x, t) of the body forces F = f (grad h - m),
/// G = g q. Evaluated lazily at any time.
class ShapeForcing {
 public:
  using MFunction = std::function<VectorField(double)>;
  using QFunction = std::function<ScalarField(double)>;

  ShapeForcing(Grid grid, MFunction m, QFunction q);

  /// Time-independent shapes.
  static ShapeForcing steady(VectorField m, ScalarField q);

  const Grid& grid() const noexcept { return grid_; }

  /// Throws NonFiniteInput / GridMismatch if the shape is invalid at t.
  VectorField m(double t) const;
  ScalarField q(double t) const;

 private:
  Grid grid_;
  MFunction m_;
  QFunction q_;
};

}  // namespace micropolar
