/**
 * @file diagnostics.hpp
 * @brief Per-step monitors and the paired-run perturbation experiment.
 *
 * Monitor CSV columns:
 *   step,t,rho_min,rho_max,max_div,h_integral,energy,grad_u,grad_w,
 *   gamma_1,gamma_2,grad_h,grad_h_bound
 * where energy = int rho |u|^2 + int rho w^2, grad_u and grad_w are the
 * discrete H1 seminorms, grad_h is ||grad h|| over interior faces and
 * grad_h_bound = (beta / alpha) ||m|| over the same faces.
 */
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "micropolar/direct_solver.hpp"
#include "micropolar/observation.hpp"

namespace micropolar {

struct MonitorThresholds {
  double divergence = 1e-8;       ///< max |div u| <= value * (1 + max |u|)
  double density_slack = 1e-12;   ///< alpha - slack <= rho <= beta + slack
  double potential_mean = 1e-10;  ///< |int h| <= value * |domain| * max |h|
  double potential_bound_slack = 1e-8;  ///< relative slack on the h bound
  /// Flag energy growth between consecutive steps. Only meaningful for
  /// unforced runs.
  bool energy_non_increasing = false;
  double energy_slack = 0.0;  ///< relative growth tolerated per step
  bool strict = false;        ///< throw MonitorViolation on the first violation

  void validate() const;
};

struct MonitorRecord {
  int step = 0;
  double t = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double max_div = 0.0;
  double h_integral = 0.0;
  double energy = 0.0;
  double grad_u = 0.0;
  double grad_w = 0.0;
  double gamma_1 = 0.0;
  double gamma_2 = 0.0;
  double grad_h = 0.0;
  double grad_h_bound = 0.0;
};

struct Violation {
  int step = 0;
  std::string monitor;
  std::string detail;
};

struct MonitorReport {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<MonitorRecord> records;
  std::vector<Violation> violations;

  void write_csv(std::ostream& os) const;
  /// Summary: record count, violations, energy trend, extreme values.
  std::string summary_json() const;
};

/// int rho |u|^2 (face quadrature, rho averaged to faces) + int rho w^2.
double kinetic_energy(const FlowState& state);

/// Evaluates every monitor on each state it is shown. Never modifies a state.
class Monitor {
 public:
  Monitor(MonitorThresholds thresholds, const ShapeForcing* shapes = nullptr,
          const ProbeSet* probes = nullptr);

  void observe(const FlowState& state, int step);
  const MonitorReport& report() const noexcept { return report_; }

  /// Adapter for solve_forward. The Monitor must outlive the solve.
  StepObserver observer();

 private:
  void flag(int step, const std::string& monitor, const std::string& detail);

  MonitorThresholds thresholds_;
  const ShapeForcing* shapes_;
  const ProbeSet* probes_;
  MonitorReport report_;
  int next_step_ = 0;
};

/// Replays the monitors over a stored trajectory. `steps` gives the step
/// index of each state; when empty, states are numbered 0, 1, ...
MonitorReport attach_monitors(const Trajectory& trajectory,
                              const MonitorThresholds& thresholds,
                              const ShapeForcing* shapes = nullptr,
                              const ProbeSet* probes = nullptr,
                              const std::vector<int>& steps = {});

struct PerturbationRow {
  double amplitude = 0.0;
  double delta_norm = 0.0;  ///< ||delta||_{L2(0,T)}
  double du = 0.0;          ///< ||u1 - u2||_{L-inf L2}
  double drho = 0.0;
  double dgrad_h = 0.0;
  double dw = 0.0;
  double ratio_u = 0.0;  ///< du / delta_norm (0 when delta_norm = 0)
  double ratio_rho = 0.0;
  double ratio_grad_h = 0.0;
  double ratio_w = 0.0;
};

/// Paired forward runs with base and base + amplitude (constant in time)
/// added to f (slot 'f') or g (slot 'g').
std::vector<PerturbationRow> perturbation_experiment(
    const ForwardSetup& setup, const SourcePair& base,
    const std::vector<double>& amplitudes, char slot = 'f');

void write_perturbation_csv(std::ostream& os,
                            const std::vector<PerturbationRow>& rows);

}  // namespace micropolar
