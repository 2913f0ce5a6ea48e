#include "micropolar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micropolar/errors.hpp"

namespace micropolar {

Grid::Grid(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), dx_(lx / nx), dy_(ly / ny) {
  if (nx < 4 || ny < 4)
    throw ValidationError("grid", "nx and ny must be at least 4, got " +
                                      std::to_string(nx) + "x" +
                                      std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw ValidationError("grid", "domain extents must be positive and finite");
}

std::array<int, 2> Grid::outward_normal(Side side) noexcept {
  switch (side) {
    case Side::West:
      return {-1, 0};
    case Side::East:
      return {1, 0};
    case Side::South:
      return {0, -1};
    case Side::North:
      return {0, 1};
  }
  return {0, 0};
}

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  if (!(a == b)) throw GridMismatch(std::string(context) + ": grid mismatch");
}

namespace {

double max_abs_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool finite_all(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const Grid& grid, double fill)
    : grid_(grid), values_(grid.cell_count(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count())
    throw GridMismatch("ScalarField: expected " +
                       std::to_string(grid_.cell_count()) + " values, got " +
                       std::to_string(values_.size()));
}

double ScalarField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}
double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}
double ScalarField::max_abs() const { return max_abs_of(values_); }
bool ScalarField::all_finite() const { return finite_all(values_); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  return axpy(1.0, other);
}
ScalarField& ScalarField::operator-=(const ScalarField& other) {
  return axpy(-1.0, other);
}
ScalarField& ScalarField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}
ScalarField& ScalarField::axpy(double a, const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "ScalarField::axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * other[k];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField s) { return s *= a; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(const Grid& grid, double fill)
    : grid_(grid),
      xs_(grid.xface_count(), fill),
      ys_(grid.yface_count(), fill) {}

VectorField::VectorField(const Grid& grid, std::vector<double> xs,
                         std::vector<double> ys)
    : grid_(grid), xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != grid_.xface_count() || ys_.size() != grid_.yface_count())
    throw GridMismatch("VectorField: component sizes do not match face counts");
}

double VectorField::max_abs() const {
  return std::max(max_abs_of(xs_), max_abs_of(ys_));
}
bool VectorField::all_finite() const {
  return finite_all(xs_) && finite_all(ys_);
}

double VectorField::max_abs_boundary() const {
  double m = 0.0;
  for (int j = 0; j < grid_.ny(); ++j)
    m = std::max({m, std::abs(x(0, j)), std::abs(x(grid_.nx(), j))});
  for (int i = 0; i < grid_.nx(); ++i)
    m = std::max({m, std::abs(y(i, 0)), std::abs(y(i, grid_.ny()))});
  return m;
}

void VectorField::zero_boundary() {
  for (int j = 0; j < grid_.ny(); ++j) x(0, j) = x(grid_.nx(), j) = 0.0;
  for (int i = 0; i < grid_.nx(); ++i) y(i, 0) = y(i, grid_.ny()) = 0.0;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  return axpy(1.0, other);
}
VectorField& VectorField::operator-=(const VectorField& other) {
  return axpy(-1.0, other);
}
VectorField& VectorField::operator*=(double a) {
  for (double& v : xs_) v *= a;
  for (double& v : ys_) v *= a;
  return *this;
}
VectorField& VectorField::axpy(double a, const VectorField& other) {
  require_same_grid(grid_, other.grid_, "VectorField::axpy");
  for (std::size_t k = 0; k < xs_.size(); ++k) xs_[k] += a * other.xs_[k];
  for (std::size_t k = 0; k < ys_.size(); ++k) ys_[k] += a * other.ys_[k];
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double a, VectorField v) { return v *= a; }

// ------------------------------------------------------------------ NodeField

NodeField::NodeField(const Grid& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

}  // namespace micropolar
