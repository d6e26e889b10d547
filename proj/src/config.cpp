#include "l96da/config.hpp"

#include <algorithm>
#include <fstream>

#include "l96da/io.hpp"

namespace l96da {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    return parse_double(v);
  } catch (const IoError&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string low = v;
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low == "true" || low == "1" || low == "yes" || low == "on") return true;
  if (low == "false" || low == "0" || low == "no" || low == "off") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "harness.method") {
      const auto m = parse_method(value);
      if (!m) throw ConfigError("unknown method: '" + value + "'");
      cfg.method = *m;
    } else if (key == "harness.obs") {
      const auto o = parse_obs_kind(value);
      if (!o) throw ConfigError("unknown observing system: '" + value + "'");
      cfg.obs = *o;
    } else if (key == "harness.n") {
      cfg.ensemble_size = static_cast<int>(to_int(key, value));
    } else if (key == "harness.cycles") {
      cfg.n_cycles = static_cast<int>(to_int(key, value));
    } else if (key == "harness.spinup") {
      cfg.spinup_cycles = static_cast<int>(to_int(key, value));
    } else if (key == "harness.seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "harness.inflation") {
      cfg.inflation = to_real(key, value);
    } else if (key == "harness.random_obs_order") {
      cfg.random_obs_order = to_bool(key, value);
    } else if (key == "harness.divergence_threshold") {
      cfg.divergence_threshold = to_real(key, value);
    } else if (key == "integrator.forcing") {
      cfg.integrator.forcing = to_real(key, value);
    } else if (key == "integrator.window") {
      cfg.integrator.window = to_real(key, value);
    } else if (key == "integrator.substeps") {
      cfg.integrator.substeps = static_cast<int>(to_int(key, value));
    } else if (key == "integrator.n_sites") {
      cfg.integrator.n_sites = static_cast<int>(to_int(key, value));
    } else if (key == "observations.noise_sd") {
      cfg.obs_noise_sd = to_real(key, value);
    } else if (key == "observations.slope") {
      cfg.obs_slope = to_real(key, value);
    } else if (key == "observations.center") {
      cfg.obs_center = to_real(key, value);
    } else if (key == "localization.radius") {
      cfg.loc_radius = to_real(key, value);
    } else if (key == "localization.chordal") {
      cfg.chordal_localization = to_bool(key, value);
    } else if (key == "anamorphosis.anchor_state_maps") {
      cfg.pl_anchor_state_maps = to_bool(key, value);
    } else {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }
}

}  // namespace l96da
