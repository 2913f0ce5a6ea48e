#include "micropolar/observation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "micropolar/errors.hpp"
#include "micropolar/field_io.hpp"
#include "micropolar/operators.hpp"

namespace micropolar {

void ProbeSet::validate() const {
  require_same_grid(psi_u.grid(), psi_w.grid(), "ProbeSet");
  const Grid& g = psi_u.grid();
  if (!psi_u.all_finite() || !psi_w.all_finite())
    throw ValidationError("H5", "probe values are not finite");
  const double div = divergence(psi_u).max_abs();
  if (div > 1e-10)
    throw ValidationError("H5", "psi_u is not divergence free (max |div| = " +
                                    format_double(div) + ")");
  if (psi_u.max_abs_boundary() != 0.0)
    throw ValidationError("H5", "psi_u does not vanish on the boundary faces");
  for (int i = 0; i < g.nx(); ++i)
    if (psi_w(i, 0) != 0.0 || psi_w(i, g.ny() - 1) != 0.0)
      throw ValidationError("H5", "psi_w does not vanish on the boundary cells");
  for (int j = 0; j < g.ny(); ++j)
    if (psi_w(0, j) != 0.0 || psi_w(g.nx() - 1, j) != 0.0)
      throw ValidationError("H5", "psi_w does not vanish on the boundary cells");
  if (psi_u.max_abs() == 0.0 || psi_w.max_abs() == 0.0)
    throw ValidationError("H5", "probes must not vanish identically");
}

ProbeSet build_probe(const std::string& kind, const Grid& grid) {
  double cx = 0.5, cy = 0.5, radius = 0.35;
  if (kind == "offset") {
    cx = 0.4;
    cy = 0.6;
    radius = 0.25;
  } else if (kind != "default") {
    throw ValidationError("probe", "unknown probe kind '" + kind + "'");
  }
  const double lx = grid.lx();
  const double ly = grid.ly();
  const double pi = std::acos(-1.0);
  const NodeField stream = NodeField::sample(grid, [&](double x, double y) {
    const double sx = std::sin(pi * x / lx);
    const double sy = std::sin(pi * y / ly);
    return sx * sx * sy * sy;
  });
  VectorField psi_u = curl_of_stream(stream);
  // sin(pi) is not exactly zero in floating point; the wall nodes are.
  psi_u.zero_boundary();

  const double r0 = radius * std::min(lx, ly);
  ScalarField psi_w = ScalarField::sample(grid, [&](double x, double y) {
    const double dx = x - cx * lx;
    const double dy = y - cy * ly;
    const double s = 1.0 - (dx * dx + dy * dy) / (r0 * r0);
    return s > 0.0 ? s * s : 0.0;
  });
  ProbeSet probes{std::move(psi_u), std::move(psi_w)};
  probes.validate();
  return probes;
}

std::pair<double, double> observe(const FlowState& state, const ProbeSet& probes) {
  const Grid& g = state.rho.grid();
  require_same_grid(g, probes.psi_u.grid(), "observe");
  const ScalarField& rho = state.rho.field();
  const CenterVector u = center_average(state.u);
  const CenterVector p = center_average(probes.psi_u);
  double su = 0.0, sw = 0.0;
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    su += rho[k] * (u.x[k] * p.x[k] + u.y[k] * p.y[k]);
    sw += rho[k] * state.w[k] * probes.psi_w[k];
  }
  return {su * g.cell_volume(), sw * g.cell_volume()};
}

void Observations::validate() const {
  if (phi_u.size() != times.size() || phi_w.size() != times.size())
    throw AlignmentError("observations: series lengths differ from the time grid");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw AlignmentError("observations: times must be strictly increasing");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(times) || !finite(phi_u) || !finite(phi_w))
    throw NonFiniteInput("observations: non-finite sample");
}

namespace {

std::vector<double> derivative(const std::vector<double>& t,
                               const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> d(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h1 = t[k] - t[k - 1];
    const double h2 = t[k + 1] - t[k];
    d[k] = -h2 / (h1 * (h1 + h2)) * f[k - 1] + (h2 - h1) / (h1 * h2) * f[k] +
           h1 / (h2 * (h1 + h2)) * f[k + 1];
  }
  {
    const double h1 = t[1] - t[0];
    const double h2 = t[2] - t[1];
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] +
           (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double h1 = t[n - 2] - t[n - 3];
    const double h2 = t[n - 1] - t[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] -
               (h1 + h2) / (h1 * h2) * f[n - 2] +
               (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
  }
  return d;
}

}  // namespace

Observations differentiate_series(const Observations& s) {
  s.validate();
  if (s.size() < 3)
    throw ValidationError("samples", "differentiation needs at least 3 samples");
  Observations out;
  out.times = s.times;
  out.phi_u = derivative(s.times, s.phi_u);
  out.phi_w = derivative(s.times, s.phi_w);
  out.noise = s.noise;
  return out;
}

Observations generate_synthetic_observations(const Trajectory& trajectory,
                                             const ProbeSet& probes,
                                             const NoiseSpec& noise,
                                             const std::vector<double>* times) {
  if (trajectory.states.empty())
    throw AlignmentError("synthetic observations: empty trajectory");
  probes.validate();
  Observations obs;
  const std::vector<double> traj_times = trajectory.times();
  std::vector<std::size_t> picks;
  if (times) {
    std::size_t cursor = 0;
    for (double t : *times) {
      while (cursor < traj_times.size() &&
             traj_times[cursor] < t - 1e-12 * (1.0 + std::abs(t)))
        ++cursor;
      if (cursor == traj_times.size() ||
          std::abs(traj_times[cursor] - t) > 1e-12 * (1.0 + std::abs(t)))
        throw AlignmentError("synthetic observations: time " + format_double(t) +
                             " is not a trajectory time");
      picks.push_back(cursor);
    }
  } else {
    for (std::size_t k = 0; k < traj_times.size(); ++k) picks.push_back(k);
  }
  for (std::size_t k : picks) {
    const auto [pu, pw] = observe(trajectory.states[k], probes);
    obs.times.push_back(traj_times[k]);
    obs.phi_u.push_back(pu);
    obs.phi_w.push_back(pw);
  }
  if (noise.amplitude < 0.0 || !std::isfinite(noise.amplitude))
    throw ValidationError("noise", "noise amplitude must be finite and >= 0");
  if (noise.amplitude > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto perturb = [&](std::vector<double>& v) {
      double scale = 0.0;
      for (double x : v) scale = std::max(scale, std::abs(x));
      scale *= noise.amplitude;
      for (double& x : v) x += scale * normal(rng);
    };
    perturb(obs.phi_u);
    perturb(obs.phi_w);
    obs.noise = noise;
  }
  return obs;
}

// ---------------------------------------------------------------------- CSV

void write_observations_csv(std::ostream& os, const Observations& obs) {
  obs.validate();
  if (obs.noise)
    os << "# noise amplitude=" << format_double(obs.noise->amplitude)
       << " seed=" << obs.noise->seed << "\n";
  os << "t,phi_u,phi_w\n";
  for (std::size_t k = 0; k < obs.size(); ++k)
    os << format_double(obs.times[k]) << ',' << format_double(obs.phi_u[k])
       << ',' << format_double(obs.phi_w[k]) << '\n';
}

namespace {

double parse_number(std::string_view text, int line, const char* column) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(std::string("invalid number in column ") + column + ": '" +
                         std::string(text) + "'",
                     line);
  if (!std::isfinite(v))
    throw ParseError(std::string("non-finite value in column ") + column, line);
  return v;
}

}  // namespace

Observations read_observations_csv(std::istream& is) {
  Observations obs;
  std::string text;
  int line = 0;
  bool header = false;
  while (std::getline(is, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (text.front() == '#') {
      std::istringstream ss(text.substr(1));
      std::string word;
      ss >> word;
      if (word == "noise") {
        NoiseSpec n;
        std::string kv;
        while (ss >> kv) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) continue;
          const std::string key = kv.substr(0, eq);
          const std::string val = kv.substr(eq + 1);
          try {
            if (key == "amplitude") n.amplitude = std::stod(val);
            if (key == "seed") n.seed = std::stoull(val);
          } catch (const std::exception&) {
            throw ParseError("malformed noise descriptor", line);
          }
        }
        obs.noise = n;
      }
      continue;
    }
    if (!header) {
      if (text != "t,phi_u,phi_w")
        throw ParseError("expected header 't,phi_u,phi_w', got '" + text + "'",
                         line);
      header = true;
      continue;
    }
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string::npos || text.find(',', c2 + 1) != std::string::npos)
      throw ParseError("expected 3 comma-separated fields", line);
    const std::string_view view(text);
    const double t = parse_number(view.substr(0, c1), line, "t");
    const double pu = parse_number(view.substr(c1 + 1, c2 - c1 - 1), line, "phi_u");
    const double pw = parse_number(view.substr(c2 + 1), line, "phi_w");
    if (!obs.times.empty() && !(t > obs.times.back()))
      throw ParseError("times must be strictly increasing", line);
    obs.times.push_back(t);
    obs.phi_u.push_back(pu);
    obs.phi_w.push_back(pw);
  }
  if (!header) throw ParseError("missing header 't,phi_u,phi_w'", line);
  if (obs.times.empty()) throw ParseError("no samples after header", line);
  return obs;
}

void save_observations(const std::string& path, const Observations& obs) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_observations_csv(os, obs);
  if (!os) throw Error("write failed for " + path);
}

Observations load_observations(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  try {
    return read_observations_csv(is);
  } catch (const ParseError& e) {
    throw e.in_file(path);
  }
}

}  // namespace micropolar
