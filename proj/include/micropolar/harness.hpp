/**
 * @file harness.hpp
 * @brief Scenario assembly from a Config and the batch commands behind the
 *        command-line tool.
 *
 * Every command writes a manifest.json into its output directory:
 *
 *     {
 *       "tool": "micropolar", "version": "<code version>",
 *       "command": "forward" | "twin" | "invert" | "diagnose" | "sweep",
 *       "seed": <run.seed>,
 *       "config_sha256": "<hex of the canonical config text>",
 *       "config": "<canonical config text>",
 *       "outputs": { "<relative path>": "<sha256 hex>", ... }
 *     }
 *
 * Passing a manifest back as --config replays the run with the embedded
 * config.
 */
#pragma once

#include <string>
#include <vector>

#include "micropolar/config.hpp"
#include "micropolar/diagnostics.hpp"
#include "micropolar/direct_solver.hpp"
#include "micropolar/inverse.hpp"
#include "micropolar/observation.hpp"

namespace micropolar {

const char* code_version() noexcept;

struct Scenario {
  Config config;
  ForwardSetup setup;
  ProbeSet probes;
  SourcePair sources;  ///< forward sources, also the twin ground truth
  InverseConfig inverse;
  NoiseSpec noise;
  MonitorThresholds monitors;
  int save_every = 1;
  std::string output;
};

/// Resolves every named profile and validates the physical side condition,
/// H1-H3 for the initial data and H5 for the probes. Throws ValidationError
/// naming the violated hypothesis.
Scenario build_scenario(const Config& config);

/// Reads a config file, or the config embedded in a manifest.json.
Config load_config_or_manifest(const std::string& path);

struct ForwardResult {
  Trajectory trajectory;
  Observations observations;
  MonitorReport monitors;
};

/// solve_forward with monitors; writes trajectory/, observations.csv,
/// monitor.csv, monitor.json and manifest.json into `out_dir`.
ForwardResult run_forward(const Scenario& scenario, const std::string& out_dir);

struct TwinResult {
  ReconstructionReport report;
  Observations observations;
  MonitorReport monitors;
  double error_f = 0.0;  ///< relative, or absolute when ||f*|| = 0
  double error_g = 0.0;
  bool relative_f = true;
  bool relative_g = true;
};

/// Ground-truth forward run, synthetic observations (noise per config),
/// reconstruction from the configured initial guess. Writes truth.csv,
/// observations.csv, monitor.csv, monitor.json, report.json, recovered.csv,
/// metrics.json and manifest.json.
TwinResult run_twin(const Scenario& scenario, const std::string& out_dir);

/// Reconstruction from external observations. Writes report.json,
/// recovered.csv and manifest.json.
ReconstructionReport run_invert(const Scenario& scenario,
                                const Observations& observations,
                                const std::string& out_dir);

/// Replays the monitors over a stored trajectory, using the config stored
/// in its index unless `config_override` is given. Writes monitor.csv,
/// monitor.json and manifest.json.
MonitorReport run_diagnose(const std::string& trajectory_dir,
                           const std::string& out_dir,
                           const Config* config_override = nullptr);

struct SweepEntry {
  std::string value;
  std::string status;
  double error_f = 0.0;
  double error_g = 0.0;
  int iterations = 0;
  std::string error;  ///< non-empty when the variant failed
};

/// Twin runs for every value of sweep.key, `jobs` at a time, into
/// out_dir/variant_<k>. Writes sweep.json and manifest.json.
std::vector<SweepEntry> run_sweep(const Config& config, const std::string& out_dir,
                                  int jobs);

/// Writes `t,f,g` rows with 17 significant digits.
void save_sources_csv(const std::string& path, const SourcePair& s);

}  // namespace micropolar
