#include "micropolar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "json.hpp"
#include "micropolar/errors.hpp"
#include "micropolar/field_io.hpp"
#include "micropolar/profiles.hpp"

#ifndef MICROPOLAR_VERSION
#define MICROPOLAR_VERSION "unknown"
#endif

namespace micropolar {

namespace fs = std::filesystem;
using nlohmann::json;

const char* code_version() noexcept { return MICROPOLAR_VERSION; }

Scenario build_scenario(const Config& c) {
  PhysicalParams params{c.number("physics.mu"), c.number("physics.mu_r"),
                        c.number("physics.c_a"), c.number("physics.c_d"),
                        c.number("physics.c_0")};
  params.validate();
  const Grid grid(c.integer("grid.nx"), c.integer("grid.ny"), c.number("grid.lx"),
                  c.number("grid.ly"));

  DensityProfile dp{c.text("initial.density"), c.number("initial.density_base"),
                    c.number("initial.density_amplitude"),
                    c.number("initial.density_cx"), c.number("initial.density_cy"),
                    c.number("initial.density_sigma")};
  VelocityProfile vp{c.text("initial.velocity"),
                     c.number("initial.velocity_amplitude")};
  MicrorotationProfile wp{c.text("initial.microrotation"),
                          c.number("initial.microrotation_amplitude")};
  MShapeProfile mp{c.text("forcing.m"), c.number("forcing.m_curl"),
                   c.number("forcing.m_grad"), c.number("forcing.m_modulation")};
  QShapeProfile qp{c.text("forcing.q"), c.number("forcing.q_amplitude"),
                   c.number("forcing.q_cx"), c.number("forcing.q_cy"),
                   c.number("forcing.q_radius")};
  SourceProfile sp{c.text("sources.profile"), c.number("sources.f_mean"),
                   c.number("sources.f_amplitude"), c.number("sources.g_mean"),
                   c.number("sources.g_amplitude"), c.number("sources.period")};

  Tolerances tol;
  tol.potential = c.number("solver.potential_tolerance");
  tol.pressure = c.number("solver.pressure_tolerance");
  tol.momentum = c.number("solver.momentum_tolerance");
  tol.max_iterations = c.integer("solver.max_iterations");
  tol.divergence = c.number("solver.divergence_tolerance");

  const int steps = c.integer("time.steps");
  const double final_time = c.number("time.final_time");
  if (steps < 0 || !(final_time > 0.0))
    throw ValidationError("time", "need steps >= 0 and final_time > 0");

  InitialData initial{make_density(dp, grid), make_velocity(vp, grid),
                      make_microrotation(wp, grid)};
  validate_initial_data(initial);

  ForwardSetup setup{grid,  params, std::move(initial), make_shapes(mp, qp, grid),
                     final_time, steps, tol};
  SourcePair sources = make_sources(sp, setup.times());
  ProbeSet probes = build_probe(c.text("probes.kind"), grid);

  InverseConfig inv;
  if (!c.is_auto("inverse.h_eps")) inv.h_eps = c.number("inverse.h_eps");
  if (!c.is_auto("inverse.r_eps")) inv.r_eps = c.number("inverse.r_eps");
  inv.tolerance = c.number("inverse.tolerance");
  inv.max_iterations = c.integer("inverse.max_iterations");
  inv.relaxation = c.number("inverse.relaxation");
  inv.compatibility_tolerance = c.number("inverse.compatibility_tolerance");
  inv.initial_guess = SourcePair::constant(setup.times(), c.number("inverse.initial_f"),
                                           c.number("inverse.initial_g"));
  inv.validate();

  MonitorThresholds mon;
  mon.strict = c.boolean("monitors.strict");
  mon.energy_non_increasing = c.boolean("monitors.energy_non_increasing");
  mon.energy_slack = c.number("monitors.energy_slack");
  mon.divergence = c.number("monitors.divergence");
  mon.density_slack = c.number("monitors.density_slack");
  mon.potential_mean = c.number("monitors.potential_mean");
  mon.validate();

  NoiseSpec noise{c.number("observation.noise"), c.unsigned_integer("run.seed")};
  if (noise.amplitude < 0.0)
    throw ValidationError("noise", "observation.noise must be non-negative");

  const int save_every = c.integer("time.save_every");
  if (save_every < 1) throw ValidationError("save_every", "time.save_every must be >= 1");

  return Scenario{c,     std::move(setup), std::move(probes), std::move(sources),
                  inv,   noise,            mon,               save_every,
                  c.text("run.output")};
}

Config load_config_or_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), 0, path);
    }
    if (!j.contains("config") || !j["config"].is_string())
      throw ParseError("manifest has no embedded config", 0, path);
    return Config::parse(j["config"].get<std::string>());
  }
  try {
    return Config::parse(text);
  } catch (const ParseError& e) {
    throw e.in_file(path);
  }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("write failed for " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const Config& config, const std::vector<std::string>& outputs) {
  const std::string canonical = config.serialize();
  json j;
  j["tool"] = "micropolar";
  j["version"] = code_version();
  j["command"] = command;
  j["seed"] = config.unsigned_integer("run.seed");
  j["config_sha256"] = sha256_hex(canonical);
  j["config"] = canonical;
  json out = json::object();
  for (const std::string& rel : outputs) {
    const fs::path p = dir / rel;
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file()) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files)
        out[fs::relative(f, dir).generic_string()] = sha256_file(f.string());
    } else {
      out[rel] = sha256_file(p.string());
    }
  }
  j["outputs"] = std::move(out);
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

void write_monitors(const fs::path& dir, const MonitorReport& report) {
  std::ostringstream csv;
  report.write_csv(csv);
  write_text(dir / "monitor.csv", csv.str());
  write_text(dir / "monitor.json", report.summary_json() + "\n");
}

double error_norm(std::span<const double> t, std::span<const double> got,
                  std::span<const double> want, bool& relative) {
  std::vector<double> d(got.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = got[k] - want[k];
  const double num = l2_time_norm(t, d);
  const double den = l2_time_norm(t, want);
  relative = den > 0.0;
  return relative ? num / den : num;
}

}  // namespace

void save_sources_csv(const std::string& path, const SourcePair& s) {
  std::ostringstream os;
  os << "t,f,g\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    os << format_double(s.times()[k]) << ',' << format_double(s.f()[k]) << ','
       << format_double(s.g()[k]) << '\n';
  write_text(path, os.str());
}

ForwardResult run_forward(const Scenario& sc, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  Monitor monitor(sc.monitors, &sc.setup.shapes, &sc.probes);
  ForwardResult r{solve_forward(sc.sources, sc.setup, monitor.observer()), {}, {}};
  r.monitors = monitor.report();
  r.observations = generate_synthetic_observations(r.trajectory, sc.probes, sc.noise);

  export_trajectory(r.trajectory, (dir / "trajectory").string(), sc.save_every,
                    sc.config.serialize());
  save_observations((dir / "observations.csv").string(), r.observations);
  write_monitors(dir, r.monitors);
  write_manifest(dir, "forward", sc.config,
                 {"trajectory", "observations.csv", "monitor.csv", "monitor.json"});
  return r;
}

TwinResult run_twin(const Scenario& sc, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  Monitor monitor(sc.monitors, &sc.setup.shapes, &sc.probes);
  const Trajectory truth_run = solve_forward(sc.sources, sc.setup, monitor.observer());
  TwinResult r{.report = {.recovered = sc.sources}};
  r.monitors = monitor.report();
  r.observations = generate_synthetic_observations(truth_run, sc.probes, sc.noise);

  r.report = reconstruct(r.observations, sc.probes, sc.setup, sc.inverse);
  const SourcePair& got = r.report.recovered;
  r.error_f = error_norm(got.times(), got.f(), sc.sources.f(), r.relative_f);
  r.error_g = error_norm(got.times(), got.g(), sc.sources.g(), r.relative_g);

  save_sources_csv((dir / "truth.csv").string(), sc.sources);
  save_sources_csv((dir / "recovered.csv").string(), got);
  save_observations((dir / "observations.csv").string(), r.observations);
  write_monitors(dir, r.monitors);
  write_text(dir / "report.json", report_to_json(r.report) + "\n");
  json m;
  m["status"] = r.report.status;
  m["converged"] = r.report.converged;
  m["iterations"] = r.report.iterations;
  m["error_f"] = r.error_f;
  m["error_g"] = r.error_g;
  m["error_f_kind"] = r.relative_f ? "relative" : "absolute";
  m["error_g_kind"] = r.relative_g ? "relative" : "absolute";
  m["noise"] = sc.noise.amplitude;
  m["noise_seed"] = sc.noise.seed;
  m["noisy_data"] = sc.noise.amplitude > 0.0;
  write_text(dir / "metrics.json", m.dump(2) + "\n");
  write_manifest(dir, "twin", sc.config,
                 {"truth.csv", "recovered.csv", "observations.csv", "monitor.csv",
                  "monitor.json", "report.json", "metrics.json"});
  return r;
}

ReconstructionReport run_invert(const Scenario& sc, const Observations& obs,
                                const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  ReconstructionReport report = reconstruct(obs, sc.probes, sc.setup, sc.inverse);
  save_sources_csv((dir / "recovered.csv").string(), report.recovered);
  write_text(dir / "report.json", report_to_json(report) + "\n");
  write_manifest(dir, "invert", sc.config, {"recovered.csv", "report.json"});
  return report;
}

MonitorReport run_diagnose(const std::string& trajectory_dir,
                           const std::string& out_dir,
                           const Config* config_override) {
  const StoredTrajectory stored = load_trajectory(trajectory_dir);
  const Config config =
      config_override ? *config_override : Config::parse(stored.config_text);
  const Scenario sc = build_scenario(config);
  if (!stored.trajectory.states.empty())
    require_same_grid(sc.setup.grid, stored.trajectory.states.front().rho.grid(),
                      "diagnose");
  MonitorReport report = attach_monitors(stored.trajectory, sc.monitors,
                                         &sc.setup.shapes, &sc.probes, stored.steps);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_monitors(dir, report);
  write_manifest(dir, "diagnose", config, {"monitor.csv", "monitor.json"});
  return report;
}

std::vector<SweepEntry> run_sweep(const Config& config, const std::string& out_dir,
                                  int jobs) {
  const std::string key = config.text("sweep.key");
  std::vector<std::string> values;
  {
    std::stringstream ss(config.text("sweep.values"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      values.push_back(item.substr(b, e - b + 1));
    }
  }
  // Validate every variant up front so a bad value fails before any work.
  std::vector<Config> variants;
  for (std::size_t k = 0; k < values.size(); ++k) {
    Config v = config;
    v.set(key, values[k]);
    build_scenario(v);
    variants.push_back(std::move(v));
  }

  std::vector<SweepEntry> entries(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < variants.size(); k = next++) {
      SweepEntry& e = entries[k];
      e.value = values[k];
      try {
        const Scenario sc = build_scenario(variants[k]);
        const TwinResult r = run_twin(
            sc, (fs::path(out_dir) / ("variant_" + std::to_string(k))).string());
        e.status = r.report.status;
        e.error_f = r.error_f;
        e.error_g = r.error_g;
        e.iterations = r.report.iterations;
      } catch (const std::exception& ex) {
        e.status = "error";
        e.error = ex.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(variants.size())));
  std::vector<std::future<void>> pool;
  for (int k = 0; k < n; ++k) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  json j;
  j["key"] = key;
  json rows = json::array();
  for (const SweepEntry& e : entries)
    rows.push_back({{"value", e.value},
                    {"status", e.status},
                    {"error_f", e.error_f},
                    {"error_g", e.error_g},
                    {"iterations", e.iterations},
                    {"error", e.error}});
  j["variants"] = std::move(rows);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text(dir / "sweep.json", j.dump(2) + "\n");
  write_manifest(dir, "sweep", config, {"sweep.json"});
  return entries;
}

}  // namespace micropolar
