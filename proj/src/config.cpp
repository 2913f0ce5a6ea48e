#include "micropolar/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "micropolar/errors.hpp"

namespace micropolar {

namespace {

using VT = ValueType;

constexpr ConfigKey kKeys[] = {
    {"grid.nx", VT::Integer, "64", "cells in x (>= 4)"},
    {"grid.ny", VT::Integer, "64", "cells in y (>= 4)"},
    {"grid.lx", VT::Number, "1", "domain width"},
    {"grid.ly", VT::Number, "1", "domain height"},

    {"time.final_time", VT::Number, "0.5", "horizon T"},
    {"time.steps", VT::Integer, "200", "number of time steps"},
    {"time.save_every", VT::Integer, "1", "trajectory export cadence"},

    {"physics.mu", VT::Number, "0.05", "Newtonian viscosity"},
    {"physics.mu_r", VT::Number, "0.02", "microrotation viscosity"},
    {"physics.c_a", VT::Number, "0.02", "angular viscosity c_a"},
    {"physics.c_d", VT::Number, "0.03", "angular viscosity c_d"},
    {"physics.c_0", VT::Number, "0.03", "angular viscosity c_0"},

    {"initial.density", VT::Text, "gaussian", "uniform | gaussian"},
    {"initial.density_base", VT::Number, "1", "background density"},
    {"initial.density_amplitude", VT::Number, "0.3", "gaussian amplitude"},
    {"initial.density_cx", VT::Number, "0.4", "gaussian center x / lx"},
    {"initial.density_cy", VT::Number, "0.55", "gaussian center y / ly"},
    {"initial.density_sigma", VT::Number, "0.12", "gaussian width"},
    {"initial.velocity", VT::Text, "rest", "rest | vortex"},
    {"initial.velocity_amplitude", VT::Number, "0", "vortex stream amplitude"},
    {"initial.microrotation", VT::Text, "rest", "rest | bump"},
    {"initial.microrotation_amplitude", VT::Number, "0", "bump amplitude"},

    {"forcing.m", VT::Text, "default", "default | gradient | zero"},
    {"forcing.m_curl", VT::Number, "0.1", "solenoidal coefficient of m"},
    {"forcing.m_grad", VT::Number, "0.05", "gradient coefficient of m"},
    {"forcing.m_modulation", VT::Number, "0", "m(x,t) = (1 + a sin 2 pi t) m(x)"},
    {"forcing.q", VT::Text, "bump", "bump | uniform | zero"},
    {"forcing.q_amplitude", VT::Number, "1", "q amplitude"},
    {"forcing.q_cx", VT::Number, "0.5", "bump center x / lx"},
    {"forcing.q_cy", VT::Number, "0.5", "bump center y / ly"},
    {"forcing.q_radius", VT::Number, "0.3", "bump radius / min(lx, ly)"},

    {"probes.kind", VT::Text, "default", "default | offset"},

    {"sources.profile", VT::Text, "harmonic", "harmonic | constant | zero"},
    {"sources.f_mean", VT::Number, "1", "f mean"},
    {"sources.f_amplitude", VT::Number, "0.3", "f sine amplitude"},
    {"sources.g_mean", VT::Number, "1", "g mean"},
    {"sources.g_amplitude", VT::Number, "-0.2", "g cosine amplitude"},
    {"sources.period", VT::Number, "1", "period of the harmonic profile"},

    {"observation.noise", VT::Number, "0", "relative Gaussian noise amplitude"},

    {"inverse.tolerance", VT::Number, "1e-6", "Picard increment tolerance"},
    {"inverse.max_iterations", VT::Integer, "50", "Picard iteration budget"},
    {"inverse.relaxation", VT::Number, "1", "relaxation weight in (0, 1]"},
    {"inverse.h_eps", VT::NumberOrAuto, "auto", "gamma_1 threshold"},
    {"inverse.r_eps", VT::NumberOrAuto, "auto", "gamma_2 threshold"},
    {"inverse.initial_f", VT::Number, "0", "constant initial guess for f"},
    {"inverse.initial_g", VT::Number, "0", "constant initial guess for g"},
    {"inverse.compatibility_tolerance", VT::Number, "1e-9",
     "absolute t = 0 compatibility tolerance"},

    {"solver.potential_tolerance", VT::Number, "1e-10", "potential PCG tolerance"},
    {"solver.pressure_tolerance", VT::Number, "1e-12", "pressure PCG tolerance"},
    {"solver.momentum_tolerance", VT::Number, "1e-12", "diffusion PCG tolerance"},
    {"solver.max_iterations", VT::Integer, "500", "PCG iteration budget"},
    {"solver.divergence_tolerance", VT::Number, "1e-8",
     "max |div u| / (1 + max |u|) after projection"},

    {"monitors.strict", VT::Boolean, "false", "abort on first violation"},
    {"monitors.energy_non_increasing", VT::Boolean, "false",
     "flag energy growth (unforced runs)"},
    {"monitors.energy_slack", VT::Number, "0", "relative energy growth allowed"},
    {"monitors.divergence", VT::Number, "1e-8", "divergence monitor threshold"},
    {"monitors.density_slack", VT::Number, "1e-12", "density bound slack"},
    {"monitors.potential_mean", VT::Number, "1e-10", "zero-mean monitor threshold"},

    {"run.seed", VT::Integer, "0", "noise seed"},
    {"run.output", VT::Text, "out", "output directory"},

    {"sweep.key", VT::Text, "inverse.relaxation", "key varied by the sweep"},
    {"sweep.values", VT::NumberList, "1", "comma-separated values"},
};

const ConfigKey* find_key(std::string_view name) {
  for (const ConfigKey& k : kKeys)
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && p == s.data() + s.size() &&
         std::isfinite(out);
}

bool parse_long(std::string_view s, long long& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && p == s.data() + s.size();
}

/// Empty string when valid, else a description of the problem.
std::string check_value(const ConfigKey& key, const std::string& v) {
  double d = 0.0;
  long long i = 0;
  switch (key.type) {
    case VT::Number:
      return parse_double(v, d) ? "" : "expected a finite number";
    case VT::Integer:
      return parse_long(v, i) ? "" : "expected an integer";
    case VT::Boolean:
      return v == "true" || v == "false" ? "" : "expected true or false";
    case VT::Text:
      return v.empty() ? "expected a non-empty value" : "";
    case VT::NumberOrAuto:
      return v == "auto" || parse_double(v, d) ? "" : "expected a number or auto";
    case VT::NumberList: {
      std::stringstream ss(v);
      std::string item;
      int count = 0;
      while (std::getline(ss, item, ',')) {
        if (!parse_double(trim(item), d)) return "expected comma-separated numbers";
        ++count;
      }
      return count > 0 ? "" : "expected at least one number";
    }
  }
  return "unknown type";
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

Config::Config() {
  for (const ConfigKey& k : kKeys) values_[k.name] = k.default_value;
}

void Config::set(const std::string& key, const std::string& value) {
  const ConfigKey* k = find_key(key);
  if (!k) throw ValidationError("config", "unknown key '" + key + "'");
  const std::string v = trim(value);
  const std::string problem = check_value(*k, v);
  if (!problem.empty())
    throw ValidationError("config", key + ": " + problem + ", got '" + v + "'");
  values_[key] = v;
}

Config Config::parse(std::string_view text) {
  Config c;
  std::map<std::string, int> seen;
  std::string section;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      const std::string prefix = section + ".";
      const bool known = std::any_of(std::begin(kKeys), std::end(kKeys), [&](const ConfigKey& k) {
        return std::string_view(k.name).starts_with(prefix);
      });
      if (!known) throw ParseError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    if (section.empty()) throw ParseError("key outside of any section", line);
    const std::string key = section + "." + trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    const ConfigKey* k = find_key(key);
    if (!k) throw ParseError("unknown key '" + key + "'", line);
    if (auto it = seen.find(key); it != seen.end())
      throw ParseError("duplicate key '" + key + "' (first set on line " +
                           std::to_string(it->second) + ")",
                       line);
    seen[key] = line;
    const std::string problem = check_value(*k, value);
    if (!problem.empty())
      throw ParseError(key + ": " + problem + ", got '" + value + "'", line);
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw e.in_file(path);
  }
}

std::string Config::serialize() const {
  std::string out;
  std::string section;
  for (const ConfigKey& k : kKeys) {
    const std::string_view name(k.name);
    const auto dot = name.find('.');
    const std::string sec(name.substr(0, dot));
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += std::string(name.substr(dot + 1)) + " = " + values_.at(k.name) + "\n";
  }
  return out;
}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("config", "unknown key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const {
  double d = 0.0;
  if (!parse_double(text(key), d))
    throw ValidationError("config", key + " is not a number");
  return d;
}

int Config::integer(const std::string& key) const {
  long long i = 0;
  if (!parse_long(text(key), i) || i < std::numeric_limits<int>::min() ||
      i > std::numeric_limits<int>::max())
    throw ValidationError("config", key + " is not an integer");
  return static_cast<int>(i);
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  long long i = 0;
  if (!parse_long(text(key), i) || i < 0)
    throw ValidationError("config", key + " must be a non-negative integer");
  return static_cast<std::uint64_t>(i);
}

bool Config::boolean(const std::string& key) const { return text(key) == "true"; }

bool Config::is_auto(const std::string& key) const { return text(key) == "auto"; }

// ------------------------------------------------------------------ hashing

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw Error("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace micropolar
