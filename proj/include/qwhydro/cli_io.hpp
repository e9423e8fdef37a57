#pragma once

// Experiment runner: flat key = value configs, long-format CSV output and a
// JSON run manifest per experiment.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qwhydro/asymptotics.hpp"
#include "qwhydro/init.hpp"
#include "qwhydro/madelung.hpp"
#include "qwhydro/nonrel.hpp"
#include "qwhydro/parallel.hpp"
#include "qwhydro/schrodinger.hpp"
#include "qwhydro/walk.hpp"

namespace qwhydro::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for malformed or out-of-range configuration (exit code 2).
class ConfigError : public Error {
public:
  using Error::Error;
};

enum class Experiment {
  dtqw_shock,
  dtqw_planewave,
  schrodinger_shock,
  pearcey_map,
  asymptotic_zones,
  nonrel_compare,
  validation
};

struct ExperimentInfo {
  Experiment id;
  const char* name;
  const char* summary;
};

inline const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> list = {
      {Experiment::dtqw_shock, "dtqw_shock", "walk density j0(x,t) from phase-modulated data"},
      {Experiment::dtqw_planewave, "dtqw_planewave",
       "plane-wave walk: norm drift and continuum-limit residual fit"},
      {Experiment::schrodinger_shock, "schrodinger_shock",
       "free Schrodinger shock: n(x,t) and v(x,t)"},
      {Experiment::pearcey_map, "pearcey_map", "|A I_P(-T,X)|^2 over an (x,t) window"},
      {Experiment::asymptotic_zones, "asymptotic_zones",
       "zone labels and composite saddle/Airy approximation over (x,t)"},
      {Experiment::nonrel_compare, "nonrel_compare",
       "walk vs Schrodinger oracle: density and velocity errors"},
      {Experiment::validation, "validation", "quick self-checks of the core identities"},
  };
  return list;
}

inline std::string experiment_name(Experiment e) {
  for (const auto& info : experiments())
    if (info.id == e) return info.name;
  return "?";
}

// ---------------------------------------------------------------------------
// Config

struct SimConfig {
  Experiment experiment = Experiment::validation;
  std::size_t n_sites = 0;
  double mass = 0.0;
  double q_max = 0.0;
  std::vector<init::ModeSpec> modes;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  std::string output_dir = "out";
  std::map<std::string, double> tolerances;

  double q = 0.0;                 // dtqw_planewave wavenumber
  std::size_t n_steps = 0;        // dtqw_planewave, overrides t_final
  std::size_t frames = 64;        // rows of the walk density CSV
  std::size_t x_stride = 1;       // write every x_stride-th site
  double x_min = -1.0, x_max = 1.0;
  double t_min = 0.8, t_max = 1.6;
  std::size_t nx = 121, nt = 121;
  double band = asymptotics::kDefaultBand;
  nonrel::Comparator comparator = nonrel::Comparator::mean;

  std::set<std::string> given;    // keys present in the file
};

/// Known tolerance names and their defaults.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"norm_drift", 1e-12},  {"schrodinger_norm", 1e-12}, {"pearcey", 1e-8},
      {"density_l2", 0.05},   {"roundtrip", 1e-12},        {"current_identity", 1e-12},
      {"oracle", 1e-9},
  };
  return t;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

inline double to_double(const std::string& v, const std::string& key, int line) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(d))
    throw ConfigError("line " + std::to_string(line) + ": `" + key + "` expects a number, got '" +
                      v + "'");
  return d;
}

inline std::size_t to_count(const std::string& v, const std::string& key, int line) {
  const double d = to_double(v, key, line);
  if (d < 0 || d != std::floor(d) || d > 1e12)
    throw ConfigError("line " + std::to_string(line) + ": `" + key +
                      "` expects a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(d);
}

}  // namespace detail

/// Parse `key = value` lines. '#' starts a comment. `mode` may repeat;
/// every other key may appear once.
inline SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected `key = value`");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(line) + ": empty key or value");
    if (key != "mode" && cfg.given.count(key))
      throw ConfigError("line " + std::to_string(line) + ": duplicate key `" + key + "`");
    cfg.given.insert(key);
    auto num = [&] { return detail::to_double(val, key, line); };
    auto count = [&] { return detail::to_count(val, key, line); };

    if (key == "experiment") {
      bool found = false;
      for (const auto& info : experiments())
        if (val == info.name) {
          cfg.experiment = info.id;
          found = true;
        }
      if (!found)
        throw ConfigError("line " + std::to_string(line) + ": unknown experiment '" + val + "'");
    } else if (key == "n_sites") {
      cfg.n_sites = count();
    } else if (key == "mass") {
      cfg.mass = num();
    } else if (key == "q_max") {
      cfg.q_max = num();
    } else if (key == "mode") {
      const auto parts = detail::split(val, ',');
      if (parts.size() != 3)
        throw ConfigError("line " + std::to_string(line) +
                          ": `mode` expects amplitude,wavenumber,phase");
      init::ModeSpec md;
      md.amplitude = detail::to_double(parts[0], "mode amplitude", line);
      const double k = detail::to_double(parts[1], "mode wavenumber", line);
      if (k < 1 || k != std::floor(k))
        throw ConfigError("line " + std::to_string(line) +
                          ": mode wavenumber must be a positive integer");
      md.wavenumber = static_cast<long>(k);
      md.phase_offset = detail::to_double(parts[2], "mode phase", line);
      cfg.modes.push_back(md);
    } else if (key == "t_final") {
      cfg.t_final = num();
    } else if (key == "snapshot_times") {
      for (const auto& p : detail::split(val, ','))
        cfg.snapshot_times.push_back(detail::to_double(p, key, line));
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key.rfind("tolerance.", 0) == 0) {
      const std::string name = key.substr(10);
      if (!default_tolerances().count(name))
        throw ConfigError("line " + std::to_string(line) + ": unknown tolerance `" + name + "`");
      const double v = num();
      if (!(v > 0)) throw ConfigError("line " + std::to_string(line) + ": tolerance must be > 0");
      cfg.tolerances[name] = v;
    } else if (key == "q") {
      cfg.q = num();
    } else if (key == "n_steps") {
      cfg.n_steps = count();
    } else if (key == "frames") {
      cfg.frames = count();
    } else if (key == "x_stride") {
      cfg.x_stride = count();
    } else if (key == "x_min") {
      cfg.x_min = num();
    } else if (key == "x_max") {
      cfg.x_max = num();
    } else if (key == "t_min") {
      cfg.t_min = num();
    } else if (key == "t_max") {
      cfg.t_max = num();
    } else if (key == "nx") {
      cfg.nx = count();
    } else if (key == "nt") {
      cfg.nt = count();
    } else if (key == "band") {
      cfg.band = num();
    } else if (key == "comparator") {
      if (val == "mean")
        cfg.comparator = nonrel::Comparator::mean;
      else if (val == "left")
        cfg.comparator = nonrel::Comparator::left;
      else
        throw ConfigError("line " + std::to_string(line) + ": comparator must be mean or left");
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key `" + key + "`");
    }
  }

  // per-experiment requirements and ranges
  auto need = [&](const char* key) {
    if (!cfg.given.count(key)) throw ConfigError(std::string("missing required key `") + key + "`");
  };
  need("experiment");
  const Experiment e = cfg.experiment;
  const bool walk = e == Experiment::dtqw_shock || e == Experiment::dtqw_planewave ||
                    e == Experiment::nonrel_compare || e == Experiment::validation;
  const bool shock = e == Experiment::dtqw_shock || e == Experiment::schrodinger_shock ||
                     e == Experiment::nonrel_compare;
  const bool grid = e == Experiment::pearcey_map || e == Experiment::asymptotic_zones;
  need("mass");
  if (!(cfg.mass > 0)) throw ConfigError("`mass` must be positive");
  if (walk || shock) {
    need("n_sites");
    if (cfg.n_sites < 4 || cfg.n_sites % 2 != 0)
      throw ConfigError("`n_sites` must be even and >= 4, got " + std::to_string(cfg.n_sites));
  }
  if (shock) {
    need("q_max");
    if (cfg.modes.empty()) throw ConfigError("missing required key `mode` (at least one)");
    if (!(cfg.q_max > 0)) throw ConfigError("`q_max` must be positive");
    for (const auto& md : cfg.modes)
      if (static_cast<std::size_t>(md.wavenumber) > cfg.n_sites / 2)
        throw ConfigError("mode wavenumber " + std::to_string(md.wavenumber) +
                          " exceeds n_sites/2");
    if (!cfg.given.count("t_final")) cfg.t_final = 1.5 * cfg.mass / cfg.q_max;
  }
  if (e == Experiment::dtqw_planewave) {
    if (!cfg.given.count("n_steps") && !cfg.given.count("t_final"))
      throw ConfigError("dtqw_planewave needs `n_steps` or `t_final`");
    if (std::abs(cfg.q - std::round(cfg.q)) > 1e-12 ||
        std::abs(cfg.q) > static_cast<double>(cfg.n_sites / 2))
      throw ConfigError("`q` must be an integer wavenumber with |q| <= n_sites/2");
    if (cfg.given.count("n_steps")) {
      if (cfg.n_steps == 0) throw ConfigError("`n_steps` must be positive");
      cfg.t_final = static_cast<double>(cfg.n_steps) * periodic_spacing(cfg.n_sites);
    }
  }
  if (e == Experiment::validation && !cfg.given.count("t_final"))
    cfg.t_final = 1000.0 * periodic_spacing(cfg.n_sites);
  if (grid) {
    if (!(cfg.x_max > cfg.x_min)) throw ConfigError("`x_max` must exceed `x_min`");
    if (!(cfg.t_min > 0) || !(cfg.t_max > cfg.t_min))
      throw ConfigError("need 0 < `t_min` < `t_max`");
    if (cfg.nx < 2 || cfg.nt < 2) throw ConfigError("`nx` and `nt` must be >= 2");
    if (!(cfg.band > 0)) throw ConfigError("`band` must be positive");
    cfg.t_final = cfg.t_max;
  }
  if (!(cfg.t_final > 0)) throw ConfigError("`t_final` must be positive");
  for (double t : cfg.snapshot_times)
    if (t < 0 || t > cfg.t_final * (1 + 1e-12))
      throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, t_final]");
  if (cfg.frames < 2) throw ConfigError("`frames` must be >= 2");
  if (cfg.x_stride < 1) throw ConfigError("`x_stride` must be >= 1");
  for (const auto& [name, v] : default_tolerances())
    if (!cfg.tolerances.count(name)) cfg.tolerances[name] = v;
  return cfg;
}

inline SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// CSV

/// Row-per-time grid; values are stored t-major, values[it·nx + ix].
struct SpacetimeGrid {
  RealField x;
  RealField t;
  RealField values;
};

struct ComplexSpacetimeGrid {
  RealField x;
  RealField t;
  ComplexField values;
};

namespace detail {

inline void put(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw Error("write failed: " + path.string());
}

}  // namespace detail

inline std::filesystem::path emit_spacetime_csv(const SpacetimeGrid& g,
                                                const std::filesystem::path& path) {
  if (g.values.size() != g.x.size() * g.t.size())
    throw Error("emit_spacetime_csv: grid dimensions inconsistent");
  std::string out = "t,x,value\n";
  out.reserve(out.size() + g.values.size() * 60);
  for (std::size_t it = 0; it < g.t.size(); ++it)
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
      detail::put(out, g.t[it]);
      out += ',';
      detail::put(out, g.x[ix]);
      out += ',';
      detail::put(out, g.values[it * g.x.size() + ix]);
      out += '\n';
    }
  detail::write_file(path, out);
  return path;
}

inline std::filesystem::path emit_spacetime_csv(const ComplexSpacetimeGrid& g,
                                                const std::filesystem::path& path) {
  if (g.values.size() != g.x.size() * g.t.size())
    throw Error("emit_spacetime_csv: grid dimensions inconsistent");
  std::string out = "t,x,re,im\n";
  out.reserve(out.size() + g.values.size() * 80);
  for (std::size_t it = 0; it < g.t.size(); ++it)
    for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
      const Complex v = g.values[it * g.x.size() + ix];
      detail::put(out, g.t[it]);
      out += ',';
      detail::put(out, g.x[ix]);
      out += ',';
      detail::put(out, v.real());
      out += ',';
      detail::put(out, v.imag());
      out += '\n';
    }
  detail::write_file(path, out);
  return path;
}

// ---------------------------------------------------------------------------
// Experiments

struct RunResult {
  std::vector<std::filesystem::path> outputs;
  nlohmann::json manifest;
  bool ok = true;
  std::vector<std::string> failures;
};

namespace detail {

inline init::ShockInitSpec shock_spec(const SimConfig& cfg) {
  return {cfg.modes, cfg.q_max, cfg.mass};
}

inline std::size_t step_of(double t, double dt) {
  return static_cast<std::size_t>(std::floor(t / dt + 1e-9));
}

inline nlohmann::json config_echo(const SimConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["n_sites"] = cfg.n_sites;
  j["mass"] = cfg.mass;
  j["q_max"] = cfg.q_max;
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : cfg.modes)
    modes.push_back({{"amplitude", m.amplitude}, {"wavenumber", m.wavenumber},
                     {"phase", m.phase_offset}});
  j["modes"] = modes;
  j["t_final"] = cfg.t_final;
  j["snapshot_times"] = cfg.snapshot_times;
  j["output_dir"] = cfg.output_dir;
  j["tolerances"] = cfg.tolerances;
  j["q"] = cfg.q;
  j["n_steps"] = cfg.n_steps;
  j["frames"] = cfg.frames;
  j["x_stride"] = cfg.x_stride;
  j["x_range"] = {cfg.x_min, cfg.x_max};
  j["t_range"] = {cfg.t_min, cfg.t_max};
  j["nx"] = cfg.nx;
  j["nt"] = cfg.nt;
  j["band"] = cfg.band;
  j["comparator"] = cfg.comparator == nonrel::Comparator::mean ? "mean" : "left";
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void check(RunResult& r, const std::string& name, double value, double tol) {
  r.manifest["checks"][name] = {{"value", value}, {"tolerance", tol}, {"pass", value <= tol}};
  if (!(value <= tol)) {
    r.ok = false;
    r.failures.push_back(name + " = " + std::to_string(value) + " exceeds " + std::to_string(tol));
  }
}

// Walk steps at which to record: requested snapshot times (rounded down to
// whole steps) or `frames` evenly spaced steps including 0 and the last.
inline std::vector<std::size_t> record_steps(const SimConfig& cfg, double dt,
                                             std::size_t n_steps, nlohmann::json& times) {
  std::vector<std::size_t> steps;
  if (!cfg.snapshot_times.empty()) {
    for (double t : cfg.snapshot_times) {
      const std::size_t j = std::min(step_of(t, dt), n_steps);
      steps.push_back(j);
      times.push_back({{"requested", t}, {"step", j}, {"realized", dt * static_cast<double>(j)}});
    }
  } else {
    for (std::size_t f = 0; f < cfg.frames; ++f)
      steps.push_back(f * n_steps / (cfg.frames - 1));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

inline RealField strided_x(std::size_t n_sites, std::size_t stride) {
  RealField x;
  const RealField full = periodic_grid(n_sites);
  for (std::size_t i = 0; i < n_sites; i += stride) x.push_back(full[i]);
  return x;
}

template <typename Rows>
void append_row(RealField& values, const Rows& row, std::size_t stride) {
  for (std::size_t i = 0; i < row.size(); i += stride) values.push_back(row[i]);
}

// Evolve and hand each recorded state to `visit`; returns max relative norm drift.
template <typename Visit>
double walk_run(const SpinorField& initial, const WalkParams& params,
                const std::vector<std::size_t>& steps, bool every_step_drift, Visit&& visit) {
  const auto [c, s] = unitary_coin(params.coin_angle);
  const double p0 = total_norm(initial, params);
  double drift = 0.0;
  SpinorField cur = initial;
  std::size_t next = 0;
  const std::size_t last = steps.empty() ? 0 : steps.back();
  for (std::size_t j = 0;; ++j) {
    if (every_step_drift || (next < steps.size() && steps[next] == j))
      drift = std::max(drift, std::abs(total_norm(cur, params) - p0) / p0);
    if (next < steps.size() && steps[next] == j) {
      visit(cur);
      ++next;
    }
    if (j >= last) break;
    advance(cur, c, s);
  }
  return drift;
}

inline void dump_failure(const SpinorField& s, const WalkParams& p, const std::filesystem::path& dir,
                         RunResult& r) {
  ComplexSpacetimeGrid g{periodic_grid(p.n_sites), {p.time(s.step_index)}, {}};
  g.values = s.left;
  r.outputs.push_back(emit_spacetime_csv(g, dir / "failure_left.csv"));
  g.values = s.right;
  r.outputs.push_back(emit_spacetime_csv(g, dir / "failure_right.csv"));
}

inline void run_dtqw_shock(const SimConfig& cfg, const std::filesystem::path& dir, RunResult& r) {
  const WalkParams p = build_walk(cfg.n_sites, cfg.mass);
  const SpinorField s0 = init::phase_modulated_state(p, shock_spec(cfg));
  const std::size_t n_steps = step_of(cfg.t_final, p.dt);
  nlohmann::json times = nlohmann::json::array();
  const auto steps = record_steps(cfg, p.dt, n_steps, times);
  SpacetimeGrid g{strided_x(p.n_sites, cfg.x_stride), {}, {}};
  double j0_min = 1e300;
  SpinorField last;
  const double drift = walk_run(s0, p, steps, false, [&](const SpinorField& s) {
    const auto c = madelung::currents(s);
    g.t.push_back(p.time(s.step_index));
    append_row(g.values, c.j0, cfg.x_stride);
    for (double v : c.j0) j0_min = std::min(j0_min, v);
    last = s;
  });
  r.outputs.push_back(emit_spacetime_csv(g, dir / "density.csv"));
  r.manifest["times"] = times;
  r.manifest["diagnostics"] = {{"n_steps", n_steps},
                               {"realized_t_final", p.time(n_steps)},
                               {"max_norm_drift", drift},
                               {"min_j0", j0_min},
                               {"coin_angle", p.coin_angle}};
  check(r, "norm_drift", drift, cfg.tolerances.at("norm_drift"));
  if (!r.ok) dump_failure(last, p, dir, r);
}

// log-log least-squares slope
inline double fit_order(const RealField& h, const RealField& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline void run_dtqw_planewave(const SimConfig& cfg, const std::filesystem::path& dir,
                               RunResult& r) {
  const WalkParams p = build_walk(cfg.n_sites, cfg.mass);
  const SpinorField s0 = init::plane_wave(p, cfg.q);
  const std::size_t n_steps = cfg.n_steps ? cfg.n_steps : step_of(cfg.t_final, p.dt);
  nlohmann::json times = nlohmann::json::array();
  const auto steps = record_steps(cfg, p.dt, n_steps, times);
  SpacetimeGrid g{strided_x(p.n_sites, cfg.x_stride), {}, {}};
  SpinorField last;
  const double drift = walk_run(s0, p, steps, true, [&](const SpinorField& s) {
    g.t.push_back(p.time(s.step_index));
    append_row(g.values, madelung::currents(s).j0, cfg.x_stride);
    last = s;
  });
  r.outputs.push_back(emit_spacetime_csv(g, dir / "density.csv"));

  // continuum limit: residual on N, 2N, 4N at fixed m
  RealField hs, res;
  nlohmann::json study = nlohmann::json::array();
  for (std::size_t f = 1; f <= 4; f *= 2) {
    const WalkParams pr = build_walk(cfg.n_sites * f, cfg.mass);
    const Trajectory tr = evolve(init::plane_wave(pr, cfg.q), pr, 2);
    const double e = dirac_residual(tr, pr);
    hs.push_back(pr.spacing);
    res.push_back(e);
    study.push_back({{"n_sites", pr.n_sites}, {"spacing", pr.spacing}, {"dirac_residual", e}});
  }
  bool monotone = res[1] < res[0] && res[2] < res[1];
  r.manifest["times"] = times;
  r.manifest["diagnostics"] = {{"n_steps", n_steps},
                               {"max_norm_drift", drift},
                               {"coin_angle", p.coin_angle},
                               {"refinement", study},
                               {"residual_monotone", monotone},
                               {"fitted_order", fit_order(hs, res)}};
  check(r, "norm_drift", drift, cfg.tolerances.at("norm_drift"));
  if (!monotone) {
    r.ok = false;
    r.failures.push_back("dirac residual not decreasing under refinement");
  }
  if (!r.ok) dump_failure(last, p, dir, r);
}

inline std::vector<double> schrodinger_times(const SimConfig& cfg) {
  if (!cfg.snapshot_times.empty()) return cfg.snapshot_times;
  return {0.0, cfg.t_final / 3.0, 2.0 * cfg.t_final / 3.0, cfg.t_final};
}

// The Jacobi–Anger oracle applies when φ = cos x exactly with q_max = m.
inline bool single_cosine(const SimConfig& cfg) {
  return cfg.modes.size() == 1 && cfg.modes[0].wavenumber == 1 &&
         cfg.modes[0].phase_offset == 0.0 && cfg.modes[0].amplitude * cfg.q_max == cfg.mass;
}

inline void run_schrodinger_shock(const SimConfig& cfg, const std::filesystem::path& dir,
                                  RunResult& r) {
  const Wavefunction psi0 = init::schrodinger_initial(cfg.n_sites, shock_spec(cfg));
  const double dx = periodic_spacing(cfg.n_sites);
  const double norm0 = l2_norm(std::span<const Complex>(psi0.values), dx);
  const auto times = schrodinger_times(cfg);
  SpacetimeGrid gn{strided_x(cfg.n_sites, cfg.x_stride), {}, {}};
  SpacetimeGrid gv = gn;
  double drift = 0.0, oracle = 0.0;
  const bool use_oracle = single_cosine(cfg);
  std::optional<schrodinger::ShockSeries> series;
  if (use_oracle) series.emplace(cfg.mass);
  const RealField xs = periodic_grid(cfg.n_sites);
  for (double t : times) {
    const Wavefunction psi = schrodinger::spectral_propagate(psi0, cfg.mass, t);
    const auto h = schrodinger::schrodinger_hydro(psi, cfg.mass);
    gn.t.push_back(t);
    gv.t.push_back(t);
    append_row(gn.values, h.n, cfg.x_stride);
    append_row(gv.values, h.v, cfg.x_stride);
    drift = std::max(drift, std::abs(l2_norm(std::span<const Complex>(psi.values), dx) - norm0) / norm0);
    if (use_oracle) {
      const ComplexField ref = series->evaluate(xs, t);
      for (std::size_t i = 0; i < ref.size(); ++i)
        oracle = std::max(oracle, std::abs(ref[i] - psi.values[i]));
    }
  }
  r.outputs.push_back(emit_spacetime_csv(gn, dir / "density.csv"));
  r.outputs.push_back(emit_spacetime_csv(gv, dir / "velocity.csv"));
  r.manifest["times"] = times;
  r.manifest["diagnostics"] = {{"max_norm_drift", drift}};
  check(r, "schrodinger_norm", drift, cfg.tolerances.at("schrodinger_norm"));
  if (use_oracle) {
    r.manifest["diagnostics"]["bessel_oracle_max_diff"] = oracle;
    check(r, "oracle", oracle, cfg.tolerances.at("oracle"));
  }
}

inline RealField linspace(double a, double b, std::size_t n) {
  RealField v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

inline void run_pearcey_map(const SimConfig& cfg, const std::filesystem::path& dir, RunResult& r) {
  const auto chart = asymptotics::make_chart(cfg.mass);
  SpacetimeGrid g{linspace(cfg.x_min, cfg.x_max, cfg.nx), linspace(cfg.t_min, cfg.t_max, cfg.nt), {}};
  g.values.assign(cfg.nx * cfg.nt, 0.0);
  const double tol = cfg.tolerances.at("pearcey");
  parallel_for(g.values.size(), [&](std::size_t k) {
    const std::size_t it = k / cfg.nx, ix = k % cfg.nx;
    g.values[k] = std::norm(asymptotics::pearcey_shock_approx(g.x[ix], g.t[it], chart, tol));
  });
  r.outputs.push_back(emit_spacetime_csv(g, dir / "pearcey.csv"));
  r.manifest["diagnostics"] = {{"a", chart.a}, {"eps", chart.eps}, {"points", g.values.size()}};
}

inline void run_asymptotic_zones(const SimConfig& cfg, const std::filesystem::path& dir,
                                 RunResult& r) {
  const auto chart = asymptotics::make_chart(cfg.mass);
  SpacetimeGrid zones{linspace(cfg.x_min, cfg.x_max, cfg.nx), linspace(cfg.t_min, cfg.t_max, cfg.nt), {}};
  zones.values.assign(cfg.nx * cfg.nt, 0.0);
  SpacetimeGrid approx = zones, flags = zones;
  parallel_for(zones.values.size(), [&](std::size_t k) {
    const std::size_t it = k / cfg.nx, ix = k % cfg.nx;
    const auto v = asymptotics::composite_approx(zones.x[ix], zones.t[it], chart, cfg.band);
    zones.values[k] = static_cast<double>(static_cast<int>(v.zone));
    approx.values[k] = std::norm(v.value);
    flags.values[k] = v.low_confidence ? 1.0 : 0.0;
  });
  r.outputs.push_back(emit_spacetime_csv(zones, dir / "zones.csv"));
  r.outputs.push_back(emit_spacetime_csv(approx, dir / "approx.csv"));
  r.outputs.push_back(emit_spacetime_csv(flags, dir / "low_confidence.csv"));
  std::size_t counts[4] = {0, 0, 0, 0}, low = 0;
  for (std::size_t k = 0; k < zones.values.size(); ++k) {
    ++counts[static_cast<int>(zones.values[k])];
    low += flags.values[k] > 0 ? 1 : 0;
  }
  r.manifest["diagnostics"] = {{"zone_I", counts[1]},
                               {"zone_II", counts[2]},
                               {"zone_III", counts[3]},
                               {"low_confidence", low},
                               {"band", cfg.band}};
}

inline void run_nonrel_compare(const SimConfig& cfg, const std::filesystem::path& dir,
                               RunResult& r) {
  const WalkParams p = build_walk(cfg.n_sites, cfg.mass);
  const auto spec = shock_spec(cfg);
  const SpinorField s0 = init::phase_modulated_state(p, spec);
  const Wavefunction psi0 = init::schrodinger_initial(p, spec);
  const std::size_t n_steps = step_of(cfg.t_final, p.dt);
  nlohmann::json times = nlohmann::json::array();
  const auto steps = record_steps(cfg, p.dt, n_steps, times);
  SpacetimeGrid gw{strided_x(p.n_sites, cfg.x_stride), {}, {}};
  SpacetimeGrid gs = gw;
  nlohmann::json records = nlohmann::json::array();
  double worst = 0.0;
  walk_run(s0, p, steps, false, [&](const SpinorField& s) {
    const double t = p.time(s.step_index);
    const Wavefunction oracle = schrodinger::spectral_propagate(psi0, p.mass, t);
    const auto rec = nonrel::compare_snapshot(s, p, oracle, 1.0, cfg.comparator);
    records.push_back(nonrel::to_json(rec));
    worst = std::max(worst, rec.density_l2);
    const SpinorField bar = nonrel::strip_rest_phase(s, p.mass, 1.0, t);
    const auto hw = schrodinger::schrodinger_hydro(nonrel::comparator_field(bar, cfg.comparator), p.mass);
    const auto hs = schrodinger::schrodinger_hydro(oracle, p.mass);
    gw.t.push_back(t);
    gs.t.push_back(t);
    append_row(gw.values, hw.n, cfg.x_stride);
    append_row(gs.values, hs.n, cfg.x_stride);
  });
  r.outputs.push_back(emit_spacetime_csv(gw, dir / "walk_density.csv"));
  r.outputs.push_back(emit_spacetime_csv(gs, dir / "oracle_density.csv"));
  const auto err_path = dir / "errors.json";
  detail::write_file(err_path, records.dump(2) + "\n");
  r.outputs.push_back(err_path);
  r.manifest["times"] = times;
  r.manifest["diagnostics"] = {{"records", records}, {"worst_density_l2", worst}};
  check(r, "density_l2", worst, cfg.tolerances.at("density_l2"));
}

inline void run_validation(const SimConfig& cfg, const std::filesystem::path& dir, RunResult& r) {
  const WalkParams p = build_walk(cfg.n_sites, cfg.mass);
  std::string csv = "check,value,tolerance,pass\n";
  auto record = [&](const std::string& name, double v, double tol) {
    check(r, name, v, tol);
    csv += name + ",";
    put(csv, v);
    csv += ",";
    put(csv, tol);
    csv += v <= tol ? ",1\n" : ",0\n";
  };
  // unitarity of a plane wave over the configured horizon
  const std::size_t n_steps = step_of(cfg.t_final, p.dt);
  const double drift = walk_run(init::plane_wave(p, 0.0), p, {n_steps}, true, [](const SpinorField&) {});
  record("norm_drift", drift, cfg.tolerances.at("norm_drift"));
  // roundtrip and current identity on a smooth deterministic state
  SpinorField s(p.n_sites);
  for (std::size_t i = 0; i < p.n_sites; ++i) {
    const double x = p.position(i);
    s.left[i] = std::polar(0.6 + 0.2 * std::sin(x), 1.3 * std::cos(2 * x) + 2.0);
    s.right[i] = std::polar(0.7 + 0.1 * std::cos(3 * x), -0.9 * std::sin(x) + 2.9);
  }
  const auto c = madelung::currents(s);
  const SpinorField back = madelung::spinor_from_hydro(c, madelung::phases(s));
  double rt = 0.0, ci = 0.0;
  for (std::size_t i = 0; i < p.n_sites; ++i) {
    rt = std::max({rt, std::abs(back.left[i] - s.left[i]), std::abs(back.right[i] - s.right[i])});
    const double lhs = c.j0[i] * c.j0[i] - c.j1[i] * c.j1[i];
    ci = std::max(ci, std::abs(lhs - 4 * std::norm(s.left[i]) * std::norm(s.right[i])));
  }
  record("roundtrip", rt, cfg.tolerances.at("roundtrip"));
  record("current_identity", ci, cfg.tolerances.at("current_identity"));
  const Complex ip = asymptotics::pearcey(0.0, 0.0, 1e-12);
  const Complex closed = 0.5 * std::tgamma(0.25) * std::polar(1.0, kPi / 8);
  record("pearcey", std::abs(ip - closed), cfg.tolerances.at("pearcey"));
  const auto path = dir / "checks.csv";
  write_file(path, csv);
  r.outputs.push_back(path);
}

}  // namespace detail

/// Run one experiment and write its manifest. Diagnostics beyond the
/// configured tolerances mark the result not ok (the CLI exits 1).
inline RunResult run_experiment(const SimConfig& cfg) {
  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  RunResult r;
  r.manifest["experiment"] = experiment_name(cfg.experiment);
  r.manifest["version"] = kVersion;
  r.manifest["config"] = detail::config_echo(cfg);
  r.manifest["threads"] = worker_count();
  r.manifest["checks"] = nlohmann::json::object();
  switch (cfg.experiment) {
    case Experiment::dtqw_shock: detail::run_dtqw_shock(cfg, dir, r); break;
    case Experiment::dtqw_planewave: detail::run_dtqw_planewave(cfg, dir, r); break;
    case Experiment::schrodinger_shock: detail::run_schrodinger_shock(cfg, dir, r); break;
    case Experiment::pearcey_map: detail::run_pearcey_map(cfg, dir, r); break;
    case Experiment::asymptotic_zones: detail::run_asymptotic_zones(cfg, dir, r); break;
    case Experiment::nonrel_compare: detail::run_nonrel_compare(cfg, dir, r); break;
    case Experiment::validation: detail::run_validation(cfg, dir, r); break;
  }
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : r.outputs) outs.push_back(o.filename().string());
  r.manifest["outputs"] = outs;
  r.manifest["status"] = r.ok ? "ok" : "failed";
  r.manifest["failures"] = r.failures;
  r.manifest["timestamp"] = detail::utc_timestamp();
  const auto mpath = dir / "manifest.json";
  detail::write_file(mpath, r.manifest.dump(2) + "\n");
  r.outputs.push_back(mpath);
  return r;
}

}  // namespace qwhydro::cli
