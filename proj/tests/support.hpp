// Small helpers shared by the unit tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "micropolar/grid.hpp"
#include "oracles.hpp"

namespace testing {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Rounding budget for a stencil of a few terms applied to data of size
// `data_scale` with coefficients up to `coef_scale`.
inline double stencil_eps(double data_scale, double coef_scale) {
  return 16.0 * kEps * data_scale * coef_scale;
}

}  // namespace testing
