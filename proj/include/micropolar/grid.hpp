/**
 * @file grid.hpp
 * @brief Rectangular MAC grid and the discrete fields living on it.
 *
 * Layout (cell (i, j) spans [i dx, (i+1) dx] x [j dy, (j+1) dy]):
 *
 *   - ScalarField: one value per cell center, index j * nx + i.
 *   - VectorField: x-components on vertical faces (i = 0..nx, j = 0..ny-1,
 *     index j * (nx+1) + i), y-components on horizontal faces
 *     (i = 0..nx-1, j = 0..ny, index j * nx + i).
 *   - NodeField: one value per cell corner (i = 0..nx, j = 0..ny).
 *
 * All four walls are no-slip boundaries. Boundary faces are the x-faces with
 * i = 0 or i = nx and the y-faces with j = 0 or j = ny.
 */
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace micropolar {

enum class Side { West, East, South, North };

class Grid {
 public:
  Grid(int nx, int ny, double lx, double ly);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  double area() const noexcept { return lx_ * ly_; }
  double cell_volume() const noexcept { return dx_ * dy_; }

  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(nx_) * ny_;
  }
  std::size_t xface_count() const noexcept {
    return static_cast<std::size_t>(nx_ + 1) * ny_;
  }
  std::size_t yface_count() const noexcept {
    return static_cast<std::size_t>(nx_) * (ny_ + 1);
  }
  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1);
  }

  std::size_t cell(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  std::size_t xface(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * (nx_ + 1) + i;
  }
  std::size_t yface(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  std::size_t node(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * (nx_ + 1) + i;
  }

  /// Cell-center and node coordinates.
  double xc(int i) const noexcept { return (i + 0.5) * dx_; }
  double yc(int j) const noexcept { return (j + 0.5) * dy_; }
  double xn(int i) const noexcept { return i * dx_; }
  double yn(int j) const noexcept { return j * dy_; }

  bool is_boundary_xface(int i) const noexcept { return i == 0 || i == nx_; }
  bool is_boundary_yface(int j) const noexcept { return j == 0 || j == ny_; }

  /// Unit outward normal of a wall, as integer components.
  static std::array<int, 2> outward_normal(Side side) noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
  double dx_;
  double dy_;
};

/// Throws GridMismatch unless a == b.
void require_same_grid(const Grid& a, const Grid& b, const char* context);

class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  /// Samples fn(x, y) at every cell center.
  template <class Fn>
  static ScalarField sample(const Grid& grid, Fn&& fn) {
    ScalarField s(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) s(i, j) = fn(grid.xc(i), grid.yc(j));
    return s;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int i, int j) noexcept { return values_[grid_.cell(i, j)]; }
  double operator()(int i, int j) const noexcept {
    return values_[grid_.cell(i, j)];
  }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double a);
  /// this += a * other
  ScalarField& axpy(double a, const ScalarField& other);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField s);
/// Cellwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

class VectorField {
 public:
  explicit VectorField(const Grid& grid, double fill = 0.0);
  VectorField(const Grid& grid, std::vector<double> xs, std::vector<double> ys);

  /// Samples fx at x-face centers and fy at y-face centers.
  template <class Fx, class Fy>
  static VectorField sample(const Grid& grid, Fx&& fx, Fy&& fy) {
    VectorField v(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i <= grid.nx(); ++i)
        v.x(i, j) = fx(grid.xn(i), grid.yc(j));
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i)
        v.y(i, j) = fy(grid.xc(i), grid.yn(j));
    return v;
  }

  const Grid& grid() const noexcept { return grid_; }

  double& x(int i, int j) noexcept { return xs_[grid_.xface(i, j)]; }
  double x(int i, int j) const noexcept { return xs_[grid_.xface(i, j)]; }
  double& y(int i, int j) noexcept { return ys_[grid_.yface(i, j)]; }
  double y(int i, int j) const noexcept { return ys_[grid_.yface(i, j)]; }

  std::span<double> x_values() noexcept { return xs_; }
  std::span<const double> x_values() const noexcept { return xs_; }
  std::span<double> y_values() noexcept { return ys_; }
  std::span<const double> y_values() const noexcept { return ys_; }

  double max_abs() const;
  bool all_finite() const;
  /// Largest |value| over boundary faces only.
  double max_abs_boundary() const;
  /// Sets every boundary face to zero.
  void zero_boundary();

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double a);
  VectorField& axpy(double a, const VectorField& other);

 private:
  Grid grid_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double a, VectorField v);

class NodeField {
 public:
  explicit NodeField(const Grid& grid, double fill = 0.0);

  template <class Fn>
  static NodeField sample(const Grid& grid, Fn&& fn) {
    NodeField s(grid);
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i <= grid.nx(); ++i) s(i, j) = fn(grid.xn(i), grid.yn(j));
    return s;
  }

  const Grid& grid() const noexcept { return grid_; }
  double& operator()(int i, int j) noexcept { return values_[grid_.node(i, j)]; }
  double operator()(int i, int j) const noexcept {
    return values_[grid_.node(i, j)];
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace micropolar
