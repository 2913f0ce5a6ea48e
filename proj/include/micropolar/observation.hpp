/**
 * @file observation.hpp
 * @brief Integral measurements phi_u(t) = int rho u . psi_u and
 *        phi_w(t) = int rho w psi_w, probes, and synthetic data.
 *
 * Observations CSV: header `t,phi_u,phi_w`, one row per sample, values with
 * 17 significant digits. Lines starting with `#` are comments; a comment of
 * the form `# noise amplitude=<a> seed=<n>` records the noise descriptor.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "micropolar/direct_solver.hpp"
#include "micropolar/grid.hpp"

namespace micropolar {

struct ProbeSet {
  VectorField psi_u;
  ScalarField psi_w;

  /// Throws ValidationError("H5") unless div psi_u <= 1e-10 cellwise, both
  /// probes vanish on the boundary faces / boundary cells, and both are
  /// finite and not identically zero.
  void validate() const;
};

/// Built-in probes:
///   "default"  psi_u = curl of sin^2(pi x/lx) sin^2(pi y/ly) (node sampled),
///              psi_w = (1 - r^2/R^2)^2 bump, R = 0.35 min(lx, ly), centered
///   "offset"   same shapes, bump centered at (0.4 lx, 0.6 ly), R = 0.25
/// The result is validated before it is returned.
ProbeSet build_probe(const std::string& kind, const Grid& grid);

/// (int rho u . psi_u, int rho w psi_w) by midpoint quadrature with u and
/// psi_u interpolated to cell centers.
std::pair<double, double> observe(const FlowState& state, const ProbeSet& probes);

struct NoiseSpec {
  double amplitude = 0.0;  ///< relative to max |series|
  std::uint64_t seed = 0;
};

struct Observations {
  std::vector<double> times;
  std::vector<double> phi_u;
  std::vector<double> phi_w;
  std::optional<NoiseSpec> noise;

  std::size_t size() const noexcept { return times.size(); }
  /// Throws AlignmentError / NonFiniteInput.
  void validate() const;
};

/// Second-order centered differences inside, second-order one-sided at the
/// ends. Needs at least three samples on a uniform or mildly non-uniform
/// grid (uses the general three-point formulas).
Observations differentiate_series(const Observations& s);

/// observe() at every state, optionally restricted to `times` (which must
/// be a subset of the trajectory times, else AlignmentError). With a
/// nonzero amplitude, adds N(0, (amplitude * max|series|)^2) noise drawn
/// from a mt19937_64 seeded with `noise.seed`.
Observations generate_synthetic_observations(
    const Trajectory& trajectory, const ProbeSet& probes,
    const NoiseSpec& noise = {},
    const std::vector<double>* times = nullptr);

void write_observations_csv(std::ostream& os, const Observations& obs);
Observations read_observations_csv(std::istream& is);

void save_observations(const std::string& path, const Observations& obs);
Observations load_observations(const std::string& path);

}  // namespace micropolar
