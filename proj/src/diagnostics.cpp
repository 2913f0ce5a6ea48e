#include "micropolar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "micropolar/errors.hpp"
#include "micropolar/field_io.hpp"
#include "micropolar/inverse.hpp"
#include "micropolar/operators.hpp"

namespace micropolar {

void MonitorThresholds::validate() const {
  if (!(divergence > 0.0) || !(density_slack >= 0.0) ||
      !(potential_mean > 0.0) || !(potential_bound_slack >= 0.0) ||
      !(energy_slack >= 0.0))
    throw ValidationError("monitors", "monitor thresholds must be positive");
}

double kinetic_energy(const FlowState& s) {
  const VectorField rho_f = face_average(s.rho.field());
  VectorField ru = s.u;
  auto x = ru.x_values();
  auto y = ru.y_values();
  for (std::size_t k = 0; k < x.size(); ++k) x[k] *= rho_f.x_values()[k];
  for (std::size_t k = 0; k < y.size(); ++k) y[k] *= rho_f.y_values()[k];
  return inner_product(ru, s.u) + inner_product(hadamard(s.rho.field(), s.w), s.w);
}

Monitor::Monitor(MonitorThresholds thresholds, const ShapeForcing* shapes,
                 const ProbeSet* probes)
    : thresholds_(thresholds), shapes_(shapes), probes_(probes) {
  thresholds_.validate();
}

void Monitor::flag(int step, const std::string& monitor,
                   const std::string& detail) {
  report_.violations.push_back({step, monitor, detail});
  if (thresholds_.strict)
    throw MonitorViolation("monitor '" + monitor + "' violated at step " +
                               std::to_string(step) + ": " + detail,
                           step, monitor);
}

void Monitor::observe(const FlowState& s, int step) {
  if (report_.records.empty()) {
    report_.alpha = s.rho.alpha();
    report_.beta = s.rho.beta();
  }
  const Grid& g = s.rho.grid();
  MonitorRecord r;
  r.step = step;
  r.t = s.t;
  r.rho_min = s.rho.field().min();
  r.rho_max = s.rho.field().max();
  r.max_div = divergence(s.u).max_abs();
  r.h_integral = integrate(s.h);
  r.energy = kinetic_energy(s);
  r.grad_u = std::sqrt(dirichlet_form(s.u, s.u));
  r.grad_w = std::sqrt(dirichlet_form(s.w, s.w));
  r.grad_h = l2_norm_interior(gradient(s.h));
  if (shapes_) {
    r.grad_h_bound = report_.beta / report_.alpha *
                     l2_norm_interior(shapes_->m(s.t));
    if (probes_) std::tie(r.gamma_1, r.gamma_2) = eval_gamma(s, *shapes_, *probes_);
  }
  const double alpha = report_.alpha;
  const double beta = report_.beta;
  const bool has_prev = !report_.records.empty();
  const double prev_energy = has_prev ? report_.records.back().energy : 0.0;
  report_.records.push_back(r);

  if (r.rho_min < alpha - thresholds_.density_slack ||
      r.rho_max > beta + thresholds_.density_slack)
    flag(step, "density_bounds",
         "rho in [" + format_double(r.rho_min) + ", " + format_double(r.rho_max) +
             "] outside [" + format_double(alpha) + ", " + format_double(beta) + "]");
  if (r.max_div > thresholds_.divergence * (1.0 + s.u.max_abs()))
    flag(step, "divergence", "max |div u| = " + format_double(r.max_div));
  if (std::abs(r.h_integral) >
      thresholds_.potential_mean * g.area() * s.h.max_abs() + 1e-300)
    flag(step, "potential_mean", "|int h| = " + format_double(std::abs(r.h_integral)));
  if (shapes_ &&
      r.grad_h > r.grad_h_bound * (1.0 + thresholds_.potential_bound_slack) + 1e-300)
    flag(step, "potential_bound",
         "||grad h|| = " + format_double(r.grad_h) + " > " +
             format_double(r.grad_h_bound));
  if (!std::isfinite(r.energy) || !std::isfinite(r.grad_u) ||
      !std::isfinite(r.grad_w))
    flag(step, "finiteness", "non-finite norm");
  if (thresholds_.energy_non_increasing && has_prev &&
      r.energy > prev_energy * (1.0 + thresholds_.energy_slack))
    flag(step, "energy",
         "E grew from " + format_double(prev_energy) + " to " +
             format_double(r.energy));
}

StepObserver Monitor::observer() {
  return [this](const FlowState& s, const StepDiagnostics* d) {
    observe(s, d ? d->step : next_step_);
    next_step_ = (d ? d->step : next_step_) + 1;
  };
}

MonitorReport attach_monitors(const Trajectory& trajectory,
                              const MonitorThresholds& thresholds,
                              const ShapeForcing* shapes, const ProbeSet* probes,
                              const std::vector<int>& steps) {
  if (!steps.empty() && steps.size() != trajectory.states.size())
    throw AlignmentError("attach_monitors: step list does not match states");
  Monitor m(thresholds, shapes, probes);
  for (std::size_t k = 0; k < trajectory.states.size(); ++k)
    m.observe(trajectory.states[k], steps.empty() ? static_cast<int>(k) : steps[k]);
  return m.report();
}

void MonitorReport::write_csv(std::ostream& os) const {
  os << "step,t,rho_min,rho_max,max_div,h_integral,energy,grad_u,grad_w,"
        "gamma_1,gamma_2,grad_h,grad_h_bound\n";
  for (const MonitorRecord& r : records) {
    os << r.step;
    for (double v : {r.t, r.rho_min, r.rho_max, r.max_div, r.h_integral,
                     r.energy, r.grad_u, r.grad_w, r.gamma_1, r.gamma_2,
                     r.grad_h, r.grad_h_bound})
      os << ',' << format_double(v);
    os << '\n';
  }
}

std::string MonitorReport::summary_json() const {
  using nlohmann::json;
  json j;
  j["records"] = records.size();
  j["alpha"] = alpha;
  j["beta"] = beta;
  json v = json::array();
  for (const Violation& x : violations)
    v.push_back({{"step", x.step}, {"monitor", x.monitor}, {"detail", x.detail}});
  j["violations"] = std::move(v);
  if (!records.empty()) {
    double rho_min = records.front().rho_min, rho_max = records.front().rho_max;
    double max_div = 0.0, max_energy = 0.0, max_h = 0.0;
    double worst_bound = 0.0;
    bool energy_non_increasing = true;
    // First step at which the energy grows, or -1.
    int energy_growth_step = -1;
    for (std::size_t k = 0; k < records.size(); ++k) {
      const MonitorRecord& r = records[k];
      rho_min = std::min(rho_min, r.rho_min);
      rho_max = std::max(rho_max, r.rho_max);
      max_div = std::max(max_div, r.max_div);
      max_energy = std::max(max_energy, r.energy);
      max_h = std::max(max_h, std::abs(r.h_integral));
      if (r.grad_h_bound > 0.0)
        worst_bound = std::max(worst_bound, r.grad_h / r.grad_h_bound);
      if (k > 0 && r.energy > records[k - 1].energy) {
        if (energy_growth_step < 0) energy_growth_step = r.step;
        energy_non_increasing = false;
      }
    }
    j["rho_min"] = rho_min;
    j["rho_max"] = rho_max;
    j["density_margin"] = std::min(rho_min - alpha, beta - rho_max);
    j["max_div"] = max_div;
    j["max_abs_h_integral"] = max_h;
    j["max_energy"] = max_energy;
    j["final_energy"] = records.back().energy;
    j["energy_non_increasing"] = energy_non_increasing;
    j["energy_first_growth_step"] = energy_growth_step;
    j["max_grad_h_ratio"] = worst_bound;
  }
  return j.dump(2);
}

// ------------------------------------------------------------ perturbation

std::vector<PerturbationRow> perturbation_experiment(
    const ForwardSetup& setup, const SourcePair& base,
    const std::vector<double>& amplitudes, char slot) {
  if (slot != 'f' && slot != 'g')
    throw ValidationError("slot", "perturbation slot must be 'f' or 'g'");
  const Trajectory ref = solve_forward(base, setup);
  std::vector<PerturbationRow> rows;
  for (double a : amplitudes) {
    std::vector<double> f(base.f().begin(), base.f().end());
    std::vector<double> g(base.g().begin(), base.g().end());
    std::vector<double> delta(base.size(), a);
    for (std::size_t k = 0; k < base.size(); ++k) (slot == 'f' ? f : g)[k] += a;
    const SourcePair pert(std::vector<double>(base.times().begin(), base.times().end()),
                          std::move(f), std::move(g));
    const Trajectory run = solve_forward(pert, setup);
    PerturbationRow row;
    row.amplitude = a;
    row.delta_norm = l2_time_norm(base.times(), delta);
    for (std::size_t k = 0; k < ref.states.size(); ++k) {
      const FlowState& s1 = ref.states[k];
      const FlowState& s2 = run.states[k];
      row.du = std::max(row.du, l2_norm(s1.u - s2.u));
      row.drho = std::max(row.drho, l2_norm(s1.rho.field() - s2.rho.field()));
      row.dgrad_h = std::max(row.dgrad_h, l2_norm_interior(gradient(s1.h - s2.h)));
      row.dw = std::max(row.dw, l2_norm(s1.w - s2.w));
    }
    if (row.delta_norm > 0.0) {
      row.ratio_u = row.du / row.delta_norm;
      row.ratio_rho = row.drho / row.delta_norm;
      row.ratio_grad_h = row.dgrad_h / row.delta_norm;
      row.ratio_w = row.dw / row.delta_norm;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_perturbation_csv(std::ostream& os,
                            const std::vector<PerturbationRow>& rows) {
  os << "amplitude,delta_norm,du,drho,dgrad_h,dw,ratio_u,ratio_rho,"
        "ratio_grad_h,ratio_w\n";
  for (const PerturbationRow& r : rows) {
    os << format_double(r.amplitude);
    for (double v : {r.delta_norm, r.du, r.drho, r.dgrad_h, r.dw, r.ratio_u,
                     r.ratio_rho, r.ratio_grad_h, r.ratio_w})
      os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace micropolar
