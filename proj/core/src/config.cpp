#include "swlme/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "swlme/scenarios.hpp"

namespace swlme {

std::string to_string(SchemeKind k) {
  return k == SchemeKind::pcdg_still ? "pcdg-still" : "pcdg-moving";
}

std::string to_string(BoundaryKind k) {
  return k == BoundaryKind::free ? "free" : "periodic";
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid number for " + key + ": '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for " + key + ": '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError("config: invalid boolean for " + key + ": '" + value + "'");
}

}  // namespace

SchemeConfig parse_config(const std::string& text) {
  SchemeConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value': '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "model.N") {
      c.n_moments = parse_int(key, value);
    } else if (key == "model.g") {
      c.gravity = parse_number(key, value);
    } else if (key == "mesh.nx") {
      c.nx = parse_int(key, value);
    } else if (key == "mesh.domain") {
      const std::size_t comma = value.find(',');
      if (comma == std::string::npos) {
        throw ConfigError("config: mesh.domain needs 'left,right'");
      }
      c.x_left = parse_number(key, trim(value.substr(0, comma)));
      c.x_right = parse_number(key, trim(value.substr(comma + 1)));
    } else if (key == "dg.degree") {
      c.degree = parse_int(key, value);
    } else if (key == "time.cfl") {
      c.cfl = parse_number(key, value);
    } else if (key == "time.t_end") {
      c.t_end = parse_number(key, value);
    } else if (key == "scheme") {
      if (value == "pcdg-still") c.scheme = SchemeKind::pcdg_still;
      else if (value == "pcdg-moving") c.scheme = SchemeKind::pcdg_moving;
      else throw ConfigError("config: unknown scheme '" + value + "'");
    } else if (key == "limiter.enabled") {
      c.limiter_enabled = parse_bool(key, value);
    } else if (key == "limiter.M") {
      c.limiter_m = parse_number(key, value);
    } else if (key == "newton.tol") {
      c.newton_tol = parse_number(key, value);
    } else if (key == "newton.max_iter") {
      c.newton_max_iter = parse_int(key, value);
    } else if (key == "scenario.name") {
      c.scenario = value;
    } else if (key == "scenario.epsilon") {
      c.scenario_epsilon = parse_number(key, value);
    } else if (key == "boundary") {
      if (value == "free") c.boundary = BoundaryKind::free;
      else if (value == "periodic") c.boundary = BoundaryKind::periodic;
      else throw ConfigError("config: unknown boundary '" + value + "'");
      c.boundary_set = true;
    } else if (key == "output.path") {
      c.output_path = value;
    } else if (key == "output.sample_points") {
      c.sample_points = parse_int(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return c;
}

SchemeConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void SchemeConfig::resolve() {
  if (scenario.empty()) throw ConfigError("config: scenario.name is required");
  const Scenario& s = find_scenario(scenario);
  if (n_moments < 0) n_moments = s.n_moments;
  if (nx < 0) nx = s.default_nx;
  if (t_end < 0.0) t_end = s.default_t_end;
  if (newton_tol < 0.0) newton_tol = s.default_newton_tol;
  if (x_left == 0.0 && x_right == 0.0) {
    x_left = s.x_left;
    x_right = s.x_right;
  }
  if (!boundary_set) {
    boundary = s.boundary;
    boundary_set = true;
  }

  if (n_moments < 1 || n_moments > kMaxMoments) {
    throw ConfigError("config: model.N out of range");
  }
  if (!(gravity > 0.0)) throw ConfigError("config: model.g must be positive");
  if (nx < 1) throw ConfigError("config: mesh.nx must be positive");
  if (!(x_left < x_right)) throw ConfigError("config: degenerate mesh.domain");
  if (degree < 0 || degree > 8) throw ConfigError("config: dg.degree out of range");
  if (!(cfl > 0.0)) throw ConfigError("config: time.cfl must be positive");
  if (t_end < 0.0) throw ConfigError("config: time.t_end must be non-negative");
  if (!(newton_tol > 0.0)) throw ConfigError("config: newton.tol must be positive");
  if (newton_max_iter < 1) throw ConfigError("config: newton.max_iter must be positive");
  if (limiter_m < 0.0) throw ConfigError("config: limiter.M must be non-negative");
  if (sample_points < 0) throw ConfigError("config: output.sample_points must be non-negative");
  resolved = true;
}

std::string emit_config(const SchemeConfig& config) {
  std::ostringstream os;
  os << "model.N = " << config.n_moments << "\n";
  os << "model.g = " << format_double(config.gravity) << "\n";
  os << "mesh.nx = " << config.nx << "\n";
  os << "mesh.domain = " << format_double(config.x_left) << ","
     << format_double(config.x_right) << "\n";
  os << "dg.degree = " << config.degree << "\n";
  os << "time.cfl = " << format_double(config.cfl) << "\n";
  os << "time.t_end = " << format_double(config.t_end) << "\n";
  os << "scheme = " << to_string(config.scheme) << "\n";
  os << "limiter.enabled = " << (config.limiter_enabled ? "true" : "false") << "\n";
  os << "limiter.M = " << format_double(config.limiter_m) << "\n";
  os << "newton.tol = " << format_double(config.newton_tol) << "\n";
  os << "newton.max_iter = " << config.newton_max_iter << "\n";
  os << "scenario.name = " << config.scenario << "\n";
  if (config.scenario_epsilon >= 0.0) {
    os << "scenario.epsilon = " << format_double(config.scenario_epsilon) << "\n";
  }
  os << "boundary = " << to_string(config.boundary) << "\n";
  os << "output.path = " << config.output_path << "\n";
  os << "output.sample_points = " << config.sample_points << "\n";
  return os.str();
}

}  // namespace swlme
