#include "refugium/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace refugium {

ConfigError::ConfigError(int line, const std::string& message)
    : Error(line > 0 ? fmt::format("config:{}: {}", line, message) : fmt::format("config: {}", message)),
      line_(line) {}

SettleOptions SolverConfig::settle_options() const {
  SettleOptions o;
  o.evolve.dt = dt;
  o.evolve.t_max = t_max;
  o.evolve.steady_tol = steady_tol;
  o.newton.max_steps = newton_max_steps;
  o.newton.max_halvings = newton_max_halvings;
  o.newton.tol = newton_tol;
  o.eps_pos = eps_pos;
  o.eigen_tol = eigen_tol;
  return o;
}

DomainSpec default_domain() {
  DomainSpec d;
  d.dimension = 1;
  d.lx = 1.0;
  d.resolution = 201;
  d.zone = std::array<Interval, 2>{Interval{0.25, 0.75}, Interval{0.0, 0.0}};
  return d;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, int line, const std::string& key) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ConfigError(line, fmt::format("{}: expected a finite number, got '{}'", key, text));
  return value;
}

long long parse_integer(const std::string& text, int line, const std::string& key) {
  long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError(line, fmt::format("{}: expected an integer, got '{}'", key, text));
  return value;
}

bool parse_bool(const std::string& text, int line, const std::string& key) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError(line, fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::vector<double> parse_list(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) throw ConfigError(line, fmt::format("{}: empty list entry", key));
    out.push_back(parse_double(t, line, key));
  }
  if (out.empty()) throw ConfigError(line, fmt::format("{}: list is empty", key));
  return out;
}

void require_ascending(const std::vector<double>& v, int line, const std::string& key) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError(line, fmt::format("{}: values must be strictly ascending", key));
}

void require_positive(double v, int line, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(line, fmt::format("{}: must be positive, got {}", key, v));
}

Interval parse_interval(const std::string& text, int line, const std::string& key) {
  const std::vector<double> v = parse_list(text, line, key);
  if (v.size() != 2) throw ConfigError(line, fmt::format("{}: expected 'lo, hi'", key));
  if (!(v[0] < v[1])) throw ConfigError(line, fmt::format("{}: lower end must be below upper end", key));
  return {v[0], v[1]};
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

}  // namespace

RunConfig parse_config(std::istream& in) {
  static const std::map<std::string, std::set<std::string>> allowed{
      {"domain", {"dimension", "lx", "ly", "resolution", "zone", "zone_x", "zone_y"}},
      {"params", {"theta", "mu", "a", "c", "m", "k", "d1", "d2"}},
      {"solver",
       {"eigen_tol", "dt", "t_max", "steady_tol", "newton_tol", "eps_pos", "newton_max_steps", "newton_max_halvings",
        "multistart", "seed"}},
      {"sweep",
       {"theta_grid", "theta_min", "theta_max", "theta_points", "direction", "warm_start", "compute_eta", "mu_list",
        "zone_widths"}},
      {"output", {"dir"}},
  };

  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::string current;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(line, "unterminated section header");
      current = trim(text.substr(1, text.size() - 2));
      if (!allowed.count(current)) throw ConfigError(line, fmt::format("unknown section [{}]", current));
      if (section_line.count(current)) throw ConfigError(line, fmt::format("duplicate section [{}]", current));
      section_line[current] = line;
      sections[current];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    if (current.empty()) throw ConfigError(line, "key outside of any section");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (value.empty()) throw ConfigError(line, fmt::format("{}: missing value", key));
    if (!allowed.at(current).count(key)) throw ConfigError(line, fmt::format("unknown key '{}' in [{}]", key, current));
    Section& sec = sections[current];
    if (sec.count(key)) throw ConfigError(line, fmt::format("duplicate key '{}'", key));
    sec[key] = {value, line};
  }

  RunConfig cfg;
  cfg.domain = default_domain();

  auto each = [&](const std::string& name, const std::function<void(const std::string&, const Entry&)>& fn) {
    const auto it = sections.find(name);
    if (it == sections.end()) return false;
    for (const auto& [key, entry] : it->second) fn(key, entry);
    return true;
  };

  cfg.has_domain = each("domain", [&](const std::string& key, const Entry& e) {
    DomainSpec& d = cfg.domain;
    if (key == "dimension") {
      const long long v = parse_integer(e.value, e.line, key);
      if (v != 1 && v != 2) throw ConfigError(e.line, "dimension: must be 1 or 2");
      d.dimension = static_cast<int>(v);
    } else if (key == "lx") {
      d.lx = parse_double(e.value, e.line, key);
      require_positive(d.lx, e.line, key);
    } else if (key == "ly") {
      d.ly = parse_double(e.value, e.line, key);
      require_positive(d.ly, e.line, key);
    } else if (key == "resolution") {
      const long long v = parse_integer(e.value, e.line, key);
      if (v < 3 || v > 100000) throw ConfigError(e.line, "resolution: must lie in [3, 100000]");
      d.resolution = static_cast<int>(v);
    } else if (key == "zone") {
      if (e.value != "none") throw ConfigError(e.line, "zone: only 'none' is accepted; use zone_x / zone_y");
    }
  });
  if (cfg.has_domain) {
    const Section& sec = sections["domain"];
    const bool none = sec.count("zone") > 0;
    if (none && (sec.count("zone_x") || sec.count("zone_y")))
      throw ConfigError(sec.at("zone").line, "zone: 'none' conflicts with zone_x / zone_y");
    if (none) {
      cfg.domain.zone.reset();
    } else if (sec.count("zone_x") || sec.count("zone_y")) {
      std::array<Interval, 2> z{Interval{0.0, 0.0}, Interval{0.0, 0.0}};
      if (!sec.count("zone_x")) throw ConfigError(sec.at("zone_y").line, "zone_y given without zone_x");
      z[0] = parse_interval(sec.at("zone_x").value, sec.at("zone_x").line, "zone_x");
      if (cfg.domain.dimension == 2) {
        if (!sec.count("zone_y")) throw ConfigError(sec.at("zone_x").line, "2D zone needs zone_y as well");
        z[1] = parse_interval(sec.at("zone_y").value, sec.at("zone_y").line, "zone_y");
      } else if (sec.count("zone_y")) {
        throw ConfigError(sec.at("zone_y").line, "zone_y: not allowed in 1D");
      }
      cfg.domain.zone = z;
    }
    try {
      const Mesh probe(cfg.domain);
    } catch (const GeometryError& err) {
      int at = section_line["domain"];
      if (sec.count("zone_x")) at = sec.at("zone_x").line;
      throw ConfigError(at, err.what());
    }
  }

  cfg.has_params = each("params", [&](const std::string& key, const Entry& e) {
    const double v = parse_double(e.value, e.line, key);
    ParamSet& p = cfg.params;
    if (key == "theta") p.theta = v;
    else if (key == "mu") p.mu = v;
    else if (key == "a") p.a = v;
    else if (key == "c") p.c = v;
    else if (key == "m") p.m = v;
    else if (key == "k") p.k = v;
    else if (key == "d1") p.d1 = v;
    else if (key == "d2") p.d2 = v;
  });
  if (cfg.has_params) {
    try {
      cfg.params.validate();
    } catch (const ParameterError& err) {
      throw ConfigError(section_line["params"], err.what());
    }
  }

  cfg.has_solver = each("solver", [&](const std::string& key, const Entry& e) {
    SolverConfig& s = cfg.solver;
    if (key == "eigen_tol") {
      s.eigen_tol = parse_double(e.value, e.line, key);
      require_positive(s.eigen_tol, e.line, key);
    } else if (key == "dt") {
      s.dt = parse_double(e.value, e.line, key);
      require_positive(s.dt, e.line, key);
    } else if (key == "t_max") {
      s.t_max = parse_double(e.value, e.line, key);
      require_positive(s.t_max, e.line, key);
    } else if (key == "steady_tol") {
      s.steady_tol = parse_double(e.value, e.line, key);
      require_positive(s.steady_tol, e.line, key);
    } else if (key == "newton_tol") {
      s.newton_tol = parse_double(e.value, e.line, key);
      require_positive(s.newton_tol, e.line, key);
    } else if (key == "eps_pos") {
      s.eps_pos = parse_double(e.value, e.line, key);
      require_positive(s.eps_pos, e.line, key);
    } else if (key == "newton_max_steps" || key == "newton_max_halvings" || key == "multistart") {
      const long long v = parse_integer(e.value, e.line, key);
      if (v < 1 || v > 100000) throw ConfigError(e.line, fmt::format("{}: must lie in [1, 100000]", key));
      if (key == "newton_max_steps") s.newton_max_steps = static_cast<int>(v);
      else if (key == "newton_max_halvings") s.newton_max_halvings = static_cast<int>(v);
      else s.multistart = static_cast<int>(v);
    } else if (key == "seed") {
      const long long v = parse_integer(e.value, e.line, key);
      if (v < 0) throw ConfigError(e.line, "seed: must be nonnegative");
      s.seed = static_cast<unsigned long long>(v);
    }
  });

  cfg.has_sweep = each("sweep", [&](const std::string& key, const Entry& e) {
    SweepConfig& s = cfg.sweep;
    if (key == "theta_grid") {
      s.theta_grid = parse_list(e.value, e.line, key);
      require_ascending(s.theta_grid, e.line, key);
      for (double t : s.theta_grid) require_positive(t, e.line, key);
    } else if (key == "theta_min") {
      s.theta_min = parse_double(e.value, e.line, key);
      require_positive(*s.theta_min, e.line, key);
    } else if (key == "theta_max") {
      s.theta_max = parse_double(e.value, e.line, key);
      require_positive(*s.theta_max, e.line, key);
    } else if (key == "theta_points") {
      const long long v = parse_integer(e.value, e.line, key);
      if (v < 2 || v > 100000) throw ConfigError(e.line, "theta_points: must lie in [2, 100000]");
      s.theta_points = static_cast<int>(v);
    } else if (key == "direction") {
      if (e.value == "ascending") s.descending = false;
      else if (e.value == "descending") s.descending = true;
      else throw ConfigError(e.line, "direction: expected ascending or descending");
    } else if (key == "warm_start") {
      s.warm_start = parse_bool(e.value, e.line, key);
    } else if (key == "compute_eta") {
      s.compute_eta = parse_bool(e.value, e.line, key);
    } else if (key == "mu_list") {
      s.mu_list = parse_list(e.value, e.line, key);
      require_ascending(s.mu_list, e.line, key);
    } else if (key == "zone_widths") {
      s.zone_widths = parse_list(e.value, e.line, key);
      require_ascending(s.zone_widths, e.line, key);
      for (double w : s.zone_widths) require_positive(w, e.line, key);
    }
  });
  if (cfg.has_sweep) {
    const Section& sec = sections["sweep"];
    if (cfg.sweep.theta_min && cfg.sweep.theta_max && !(*cfg.sweep.theta_min < *cfg.sweep.theta_max))
      throw ConfigError(sec.at("theta_max").line, "theta_max: must exceed theta_min");
    if (sec.count("theta_grid") && (sec.count("theta_min") || sec.count("theta_max") || sec.count("theta_points")))
      throw ConfigError(sec.at("theta_grid").line, "theta_grid: conflicts with theta_min / theta_max / theta_points");
  }

  each("output", [&](const std::string&, const Entry& e) { cfg.output_dir = e.value; });
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, fmt::format("cannot open '{}'", path));
  return parse_config(in);
}

}  // namespace refugium
