// micropolar: batch front end for the forward, twin, invert, diagnose and
// sweep commands. Errors are printed to stderr as one JSON object and, when
// an output directory is known, written to <out>/error.json.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "micropolar/errors.hpp"
#include "micropolar/harness.hpp"

namespace {

using namespace micropolar;
using nlohmann::json;

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kNumerical = 3, kMonitor = 4 };

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string observations;
  std::string trajectory;
  int jobs = 0;
};

Config resolve_config(const Options& o) {
  Config c = o.config.empty() ? Config() : load_config_or_manifest(o.config);
  if (o.seed) c.set("run.seed", std::to_string(*o.seed));
  if (o.strict) c.set("monitors.strict", "true");
  return c;
}

json describe(const std::exception& e, int& code) {
  json j;
  j["message"] = e.what();
  code = kFailure;
  if (auto* v = dynamic_cast<const ValidationError*>(&e)) {
    j["error"] = "validation";
    j["hypothesis"] = v->hypothesis();
    code = kInvalid;
  } else if (auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["error"] = "parse";
    j["line"] = p->line();
    code = kInvalid;
  } else if (auto* c = dynamic_cast<const CompatibilityError*>(&e)) {
    j["error"] = "compatibility";
    j["residual_u"] = c->residual_u();
    j["residual_w"] = c->residual_w();
    code = kInvalid;
  } else if (auto* m = dynamic_cast<const MonitorViolation*>(&e)) {
    j["error"] = "monitor";
    j["step"] = m->step();
    j["monitor"] = m->monitor();
    code = kMonitor;
  } else if (auto* s = dynamic_cast<const StepError*>(&e)) {
    j["error"] = dynamic_cast<const CflViolation*>(&e)         ? "cfl"
                 : dynamic_cast<const LinearSolverFailure*>(&e) ? "linear_solver"
                                                                : "invariant";
    if (std::isfinite(s->time())) j["time"] = s->time();
    code = kNumerical;
  } else if (auto* d = dynamic_cast<const DegeneracyError*>(&e)) {
    j["error"] = "degeneracy";
    j["component"] = d->component();
    j["time"] = d->time();
    code = kNumerical;
  } else if (dynamic_cast<const AlignmentError*>(&e)) {
    j["error"] = "alignment";
    code = kInvalid;
  } else if (dynamic_cast<const Error*>(&e)) {
    j["error"] = "error";
  } else {
    j["error"] = "internal";
  }
  return j;
}

int report_error(const std::exception& e, const std::string& out_dir) {
  int code = kFailure;
  const json j = describe(e, code);
  std::cerr << j.dump() << "\n";
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream os(std::filesystem::path(out_dir) / "error.json");
    if (os) os << j.dump(2) << "\n";
  }
  return code;
}

void print_summary(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse source solver for 2D nonhomogeneous micropolar flow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(code_version()));
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "config file or manifest.json");
    sub->add_option("--out", o.out, "output directory (overrides run.output)");
    sub->add_option("--seed", o.seed, "noise seed (overrides run.seed)");
    sub->add_flag("--strict", o.strict, "abort on the first monitor violation");
  };
  CLI::App* forward = app.add_subcommand("forward", "forward solve with monitors");
  CLI::App* twin = app.add_subcommand("twin", "twin experiment");
  CLI::App* invert = app.add_subcommand("invert", "reconstruct from a CSV");
  CLI::App* diagnose = app.add_subcommand("diagnose", "replay monitors");
  CLI::App* sweep = app.add_subcommand("sweep", "concurrent twin runs");
  for (CLI::App* sub : {forward, twin, invert, diagnose, sweep}) common(sub);
  invert->add_option("--observations", o.observations, "observations CSV")
      ->required();
  diagnose->add_option("--trajectory", o.trajectory, "trajectory directory")
      ->required();
  sweep->add_option("--jobs", o.jobs, "concurrent variants (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  std::string out_dir = o.out;
  try {
    if (diagnose->parsed()) {
      std::optional<Config> override_config;
      if (!o.config.empty()) override_config = resolve_config(o);
      if (out_dir.empty()) out_dir = "diagnose";
      const MonitorReport r = run_diagnose(
          o.trajectory, out_dir, override_config ? &*override_config : nullptr);
      print_summary({{"command", "diagnose"},
                     {"records", r.records.size()},
                     {"violations", r.violations.size()},
                     {"out", out_dir}});
      return r.violations.empty() ? kOk : kMonitor;
    }

    const Config config = resolve_config(o);
    if (out_dir.empty()) out_dir = config.text("run.output");
    if (sweep->parsed()) {
      const int jobs = o.jobs > 0 ? o.jobs
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
      const auto entries = run_sweep(config, out_dir, jobs);
      json rows = json::array();
      bool failed = false;
      for (const auto& e : entries) {
        rows.push_back({{"value", e.value}, {"status", e.status},
                        {"error_f", e.error_f}, {"error_g", e.error_g}});
        failed = failed || e.status != "converged";
      }
      print_summary({{"command", "sweep"}, {"variants", rows}, {"out", out_dir}});
      return failed ? kNumerical : kOk;
    }

    const Scenario sc = build_scenario(config);
    if (forward->parsed()) {
      const ForwardResult r = run_forward(sc, out_dir);
      print_summary({{"command", "forward"},
                     {"steps", r.trajectory.states.size() - 1},
                     {"violations", r.monitors.violations.size()},
                     {"out", out_dir}});
      return kOk;
    }
    if (twin->parsed()) {
      const TwinResult r = run_twin(sc, out_dir);
      print_summary({{"command", "twin"},
                     {"status", r.report.status},
                     {"iterations", r.report.iterations},
                     {"error_f", r.error_f},
                     {"error_g", r.error_g},
                     {"error_kind_f", r.relative_f ? "relative" : "absolute"},
                     {"error_kind_g", r.relative_g ? "relative" : "absolute"},
                     {"noisy_data", sc.noise.amplitude > 0.0},
                     {"out", out_dir}});
      return r.report.converged ? kOk : kNumerical;
    }
    if (invert->parsed()) {
      const Observations obs = load_observations(o.observations);
      const ReconstructionReport r = run_invert(sc, obs, out_dir);
      print_summary({{"command", "invert"},
                     {"status", r.status},
                     {"iterations", r.iterations},
                     {"out", out_dir}});
      return r.converged ? kOk : kNumerical;
    }
  } catch (const std::exception& e) {
    return report_error(e, out_dir);
  }
  return kFailure;
}
