#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "kswave/error.hpp"
#include "kswave/heteroclinic.hpp"
#include "kswave/pde.hpp"
#include "kswave/regions.hpp"
#include "kswave/spectra.hpp"
#include "run_dir.hpp"
#include "svg.hpp"

namespace kswave::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, what + ": not a number: '" + text + "'");
  }
}

std::vector<std::pair<double, double>> read_chi_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "chi table: cannot read " + path.string());
  std::vector<std::pair<double, double>> nodes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a)) continue;
    if (!(fields >> b)) throw Error(ErrorCode::InvalidChiTable, path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      nodes.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      if (!nodes.empty() || lineno > 1) {
        throw Error(ErrorCode::InvalidChiTable, path.string() + ":" + std::to_string(lineno) + ": not numeric");
      }
    }
  }
  return nodes;
}

// Options shared by every subcommand except sweep.
struct Common {
  double mu = 1.0;
  double beta = 1.0;
  double diff = 0.0;
  std::string chi = "const:0";
  std::string config;
  std::string out;
  std::string run_dir;
};

void add_io(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file; flags override its values");
  sub->add_option("--out", c.out, std::string("Output root (default: $") + kOutputRootEnv + " or ./runs)");
  sub->add_option("--run-dir", c.run_dir, "Exact run directory to write into");
}

void add_params(CLI::App* sub, Common& c) {
  sub->add_option("--mu", c.mu, "Logistic growth rate")->capture_default_str();
  sub->add_option("--beta", c.beta, "Chemical decay rate")->capture_default_str();
  sub->add_option("--D", c.diff, "Chemical diffusion")->capture_default_str();
  sub->add_option("--chi", c.chi, "Sensitivity: const:k | affine:a,b | table:path")->capture_default_str();
  add_io(sub, c);
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "config: cannot read " + path);
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config: top level must be an object");
    return j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
}

// Copies config values into options that were not given on the command line.
// Keys under "params" are treated like top-level keys; "chi" may be an object.
Json apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return Json::object();
  const Json cfg = load_config(path);
  Json flat = Json::object();
  Json chi_object;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "params") {
      if (!value.is_object()) throw Error(ErrorCode::ConfigError, "params: expected an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "chi" && v.is_object()) chi_object = v;
        else flat[k] = v;
      }
    } else if (key == "chi" && value.is_object()) {
      chi_object = value;
    } else {
      flat[key] = value;
    }
  }
  for (const auto& [key, value] : flat.items()) {
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorCode::ConfigError, key + ": unknown key for '" + sub->get_name() + "'");
    }
    if (key == "config" || opt->count() > 0) continue;
    auto add = [&](const Json& v) {
      if (v.is_object() || v.is_array() || v.is_null()) throw Error(ErrorCode::ConfigError, key + ": expected a scalar");
      opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
    };
    if (value.is_array()) {
      if (value.empty()) throw Error(ErrorCode::ConfigError, key + ": empty list");
      for (const auto& v : value) add(v);
    } else {
      add(value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::ConfigError, key + ": " + e.what());
    }
  }
  Json extra = Json::object();
  if (!chi_object.is_null()) extra["chi"] = chi_object;
  return extra;
}

struct Resolved {
  ModelParams params;
  std::vector<fs::path> inputs;
};

Resolved resolve_params(const Common& c, const CLI::App* sub, const Json& extra) {
  Resolved r;
  r.params.mu = c.mu;
  r.params.beta = c.beta;
  r.params.diff = c.diff;
  if (extra.contains("chi") && sub->get_option("--chi")->count() == 0) {
    r.params.chi = chi_from_json(extra.at("chi"), "params.chi");
  } else {
    r.params.chi = parse_chi(c.chi, c.mu);
    if (c.chi.rfind("table:", 0) == 0) r.inputs.emplace_back(c.chi.substr(6));
  }
  if (!c.config.empty()) r.inputs.emplace_back(c.config);
  r.params = validate_params(r.params);
  return r;
}

fs::path output_root(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return "runs";
}

RunDirectory open_run(const Common& c, const std::string& command, const Json& config,
                      const std::vector<fs::path>& inputs) {
  RunDirectory run(output_root(c), command, config, c.run_dir);
  for (const auto& in : inputs) run.add_input(in);
  return run;
}

SurfaceParam parse_eta(const std::string& text, double c) {
  if (text == "half") return default_eta(c);
  if (text == "paper") return five_eighths_eta(c);
  return SurfaceParam{parse_double(text, "eta")};
}

std::string profile_svg(const TravelingWaveProfile& prof) {
  std::vector<svg::Series> series{{"U", prof.xi, prof.u, "#1f77b4"}};
  if (!prof.v.empty()) series.push_back({"V", prof.xi, prof.v, "#d62728"});
  return svg::line_plot("Wave profile, c = " + num(prof.speed), "xi", "", series);
}

std::string counts_string(const std::vector<SpeedTrial>& trials) {
  std::map<OutcomeKind, int> counts;
  for (const auto& t : trials) ++counts[t.kind];
  std::string s;
  for (const auto& [kind, n] : counts) {
    if (!s.empty()) s += ';';
    s += std::string(to_string(kind)) + ":" + std::to_string(n);
  }
  return s;
}

Json trials_json(const std::vector<SpeedTrial>& trials) {
  Json arr = Json::array();
  for (const auto& t : trials) arr.push_back({{"c", t.c}, {"kind", std::string(to_string(t.kind))}});
  return arr;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

// Subcommand bodies --------------------------------------------------------

int cmd_speed(const Common& c, const CLI::App* sub, const Json& extra, bool as_json, std::ostream& out) {
  const auto r = resolve_params(c, sub, extra);
  const Json j = speed_json(r.params);
  if (as_json) {
    out << j.dump(2) << '\n';
  } else {
    const auto m = min_wave_speed(r.params);
    out << "c* = " << format_number(m.c_star) << "  (binding: " << to_string(m.binding) << ")\n";
    if (r.params.diff == 0.0) {
      const auto b = literature_bounds(r.params);
      out << "prior bounds: " << format_number(b.lower) << " <= c* <= " << format_number(b.upper) << '\n';
    }
  }
  // Persist only when an output location was requested.
  if (!c.out.empty() || !c.run_dir.empty() || std::getenv(kOutputRootEnv)) {
    auto run = open_run(c, "speed", Json{{"params", to_json(r.params)}}, r.inputs);
    run.write("speed.json", j.dump(2) + "\n");
    run.finish(j);
    if (!as_json) out << "run directory: " << run.path().string() << '\n';
  }
  return kExitOk;
}

struct ShootOptions {
  double c = 0.0;
  double epsilon = 1e-6;
  double rel_tol = 1e-10;
  int points = 2048;
};

ShootConfig shoot_config(const ShootOptions& o) {
  ShootConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.integrator.rel_tol = o.rel_tol;
  return cfg;
}

int cmd_shoot(const Common& c, const CLI::App* sub, const Json& extra, const ShootOptions& o, std::ostream& out) {
  const auto r = resolve_params(c, sub, extra);
  const auto cfg = shoot_config(o);
  const Json config{{"params", to_json(r.params)}, {"c", o.c}, {"points", o.points}, {"shoot", to_json(cfg)}};
  auto run = open_run(c, "shoot", config, r.inputs);
  const auto outcome = shoot(r.params, o.c, cfg);
  Json result = to_json(outcome);
  out << "c = " << num(o.c) << ": " << to_string(outcome.kind);
  if (outcome.face) out << " (face " << to_string(*outcome.face) << ")";
  out << '\n';
  if (outcome.kind == OutcomeKind::ConvergedToOrigin) {
    ProfileOptions popts;
    popts.points = static_cast<std::size_t>(o.points);
    const auto prof = extract_profile(outcome, r.params, popts);
    const double residual = comoving_residual(prof, r.params);
    result["residual"] = residual;
    result["ordering_violations"] = prof.checks.ordering_violations;
    result["monotonicity_violations"] = prof.checks.monotonicity_violations;
    run.write("profile.csv", profile_csv(prof));
    run.write("profile.json", profile_json(prof, r.params, cfg).dump(2) + "\n");
    run.write("profile.svg", profile_svg(prof));
    out << "profile: " << prof.size() << " points, residual " << num(residual) << '\n';
  }
  run.write("outcome.json", result.dump(2) + "\n");
  run.finish(result);
  out << "run directory: " << run.path().string() << '\n';
  return kExitOk;
}

struct MinSpeedOptions {
  std::optional<double> c_lo, c_hi;
  double tol = 1e-3;
};

int cmd_minspeed(const Common& c, const CLI::App* sub, const Json& extra, const MinSpeedOptions& o,
                 std::ostream& out) {
  const auto r = resolve_params(c, sub, extra);
  const auto closed = min_wave_speed(r.params);
  const double lo = o.c_lo.value_or(0.25 * closed.c_star);
  const double hi = o.c_hi.value_or(2.0 * closed.c_star);
  const Json config{{"params", to_json(r.params)}, {"c_lo", lo}, {"c_hi", hi}, {"tol", o.tol}};
  auto run = open_run(c, "minspeed", config, r.inputs);
  const auto emp = find_min_speed_empirical(r.params, lo, hi, o.tol);
  const double half_width = 0.5 * (emp.upper - emp.lower);
  Json result{{"c_star_empirical", emp.speed},
              {"half_width", half_width},
              {"bracket", {emp.lower, emp.upper}},
              {"c_star_closed", closed.c_star},
              {"binding", std::string(to_string(closed.binding))},
              {"abs_err", std::abs(emp.speed - closed.c_star)},
              {"evaluations", emp.evaluations},
              {"trials", trials_json(emp.trials)}};
  std::vector<svg::StripMark> marks;
  for (const auto& t : emp.trials) marks.push_back({t.c, std::string(to_string(t.kind))});
  run.write("minspeed.json", result.dump(2) + "\n");
  run.write("trials.svg", svg::strip_plot("Shooting outcome by speed", "c", marks));
  run.finish(result);
  char line[160];
  std::snprintf(line, sizeof line, "empirical c* = %.4f +/- %.4f   closed form c* = %s (%s)\n", emp.speed,
                half_width, format_number(closed.c_star).c_str(), std::string(to_string(closed.binding)).c_str());
  out << line << "run directory: " << run.path().string() << '\n';
  return kExitOk;
}

struct TrapOptions {
  std::optional<double> c;
  long samples = 10000;
};

int cmd_trapcheck(const Common& c, const CLI::App* sub, const Json& extra, const TrapOptions& o, std::ostream& out) {
  const auto r = resolve_params(c, sub, extra);
  const double speed = o.c.value_or(min_wave_speed(r.params).c_star);
  const Json config{{"params", to_json(r.params)}, {"c", speed}, {"samples", o.samples}};
  auto run = open_run(c, "trapcheck", config, r.inputs);
  const auto region = make_region(r.params, speed);
  Json reports = Json::array();
  bool certified = true;
  char line[200];
  std::snprintf(line, sizeof line, "%-9s %8s %14s  %s\n", "face", "samples", "worst_margin", "worst_point");
  out << line;
  for (FaceId face : faces_of(region.kind)) {
    if (face == FaceId::Yslant && !region.rho) continue;
    const auto rep = face_flux_check(r.params, speed, face, o.samples);
    reports.push_back(to_json(rep));
    if (face != FaceId::W0 && rep.worst_margin < kFluxTol) certified = false;
    std::string point;
    for (double x : rep.worst_point) point += (point.empty() ? "" : ", ") + num(x);
    std::snprintf(line, sizeof line, "%-9s %8ld %14.6e  (%s)\n", std::string(to_string(face)).c_str(), rep.samples,
                  rep.worst_margin, point.c_str());
    out << line;
  }
  const Json result{{"c", speed}, {"certified", certified}, {"faces", reports}};
  run.write("trapcheck.json", result.dump(2) + "\n");
  run.finish(result);
  out << (certified ? "all faces except W0 inward" : "outward flux on a face other than W0") << '\n';
  return certified ? kExitOk : kExitCertification;
}

struct SurfaceOptions {
  std::optional<double> c;
  std::string eta = "half";
  int grid = 200;
  int y_grid = 50;
};

int cmd_surface(const Common& c, const CLI::App* sub, const Json& extra, const SurfaceOptions& o, std::ostream& out) {
  const auto r = resolve_params(c, sub, extra);
  const double speed = o.c.value_or(min_wave_speed(r.params).c_star);
  const auto eta = parse_eta(o.eta, speed);
  const Json config{{"params", to_json(r.params)}, {"c", speed}, {"eta", eta.eta}, {"grid", o.grid}, {"y_grid", o.y_grid}};
  auto run = open_run(c, "surface", config, r.inputs);
  const auto check = verify_surface(r.params, speed, eta, o.grid, o.y_grid);
  Json result = to_json(check);
  result["eta"] = eta.eta;
  result["c"] = speed;
  run.write("surface.json", result.dump(2) + "\n");
  run.finish(result);
  out << "eta = " << format_number(eta.eta) << ", c = " << format_number(speed) << ": "
      << (check.holds ? "holds" : "fails") << ", worst value " << num(check.worst_value) << '\n';
  return check.holds ? kExitOk : kExitCertification;
}

struct SimulateOptions {
  std::optional<double> length;
  int n = 3000;
  double t_end = 60.0;
  std::string frame = "lab";
  std::string init = "step";
  std::optional<double> c;
  double edge = 20.0;
  double snapshot_every = 1.0;
  double front_every = 0.1;
  std::vector<double> window;
  bool adaptive = false;
  std::string advection = "second";
};

std::string monitors_csv(const SpaceTimeSolution& sol) {
  std::string s = "t,min_u,min_v,max_gap,max_u,drift_u,drift_v\n";
  for (const auto& m : sol.monitors) {
    s += format_number(m.t) + ',' + format_number(m.min_u) + ',' + format_number(m.min_v) + ',' +
         format_number(m.max_gap) + ',' + format_number(m.max_u) + ',' + format_number(m.drift_u) + ',' +
         format_number(m.drift_v) + '\n';
  }
  return s;
}

int cmd_simulate(const Common& c, const CLI::App* sub, const Json& extra, const SimulateOptions& o,
                 std::ostream& out) {
  const auto r = resolve_params(c, sub, extra);
  const auto& p = r.params;
  if (o.frame != "lab" && o.frame != "comoving") throw Error(ErrorCode::ConfigError, "frame: expected lab or comoving");
  if (o.init != "step" && o.init != "profile") throw Error(ErrorCode::ConfigError, "init: expected step or profile");
  if (o.advection != "first" && o.advection != "second") {
    throw Error(ErrorCode::ConfigError, "advection: expected first or second");
  }
  if (!o.window.empty() && o.window.size() != 2) throw Error(ErrorCode::ConfigError, "window: expected two values");
  const bool comoving = o.frame == "comoving";
  const double speed = o.c.value_or(min_wave_speed(p).c_star + 0.5);

  std::optional<TravelingWaveProfile> prof;
  if (o.init == "profile") {
    const auto outcome = shoot(p, speed);
    if (outcome.kind != OutcomeKind::ConvergedToOrigin) {
      throw Error(ErrorCode::NotConverged, "shooting at c = " + num(speed) + " gave " + std::string(to_string(outcome.kind)));
    }
    prof = extract_profile(outcome, p);
  }
  Grid1D grid;
  if (prof && comoving && !o.length) {
    grid = make_grid(prof->xi.back() - prof->xi.front(), o.n, prof->xi.front());
  } else {
    const double len = o.length.value_or(300.0);
    grid = make_grid(len, o.n, comoving ? -0.5 * len : 0.0);
  }
  const FieldPair init = prof ? seed_from_profile(*prof, grid, comoving ? 0.0 : o.edge)
                              : step_front(grid, comoving ? 0.0 : o.edge, p.beta);

  SimulationConfig cfg;
  cfg.rhs.frame_speed = comoving ? speed : 0.0;
  cfg.rhs.advection = o.advection == "first" ? AdvectionScheme::FirstOrderUpwind : AdvectionScheme::SecondOrderUpwind;
  cfg.stepping = o.adaptive ? Stepping::Adaptive : Stepping::SspRk3;
  cfg.snapshot_interval = o.snapshot_every;
  cfg.front_interval = o.front_every;

  Json config{{"params", to_json(p)},  {"grid", to_json(grid)},   {"t_end", o.t_end},
              {"frame", o.frame},      {"init", o.init},          {"c", speed},
              {"edge", o.edge},        {"snapshot_every", o.snapshot_every},
              {"front_every", o.front_every}, {"adaptive", o.adaptive}, {"advection", o.advection}};
  auto run = open_run(c, "simulate", config, r.inputs);
  const auto sol = simulate(p, grid, init, o.t_end, cfg);

  for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
    char name[40];
    std::snprintf(name, sizeof name, "snapshots/snap_%05zu.csv", k);
    run.write(name, snapshot_csv(grid, sol.snapshots[k]));
  }
  std::string front = "t,x\n";
  std::vector<double> ft, fx;
  for (const auto& f : sol.front_series) {
    front += format_number(f.t) + ',' + format_number(f.x) + '\n';
    ft.push_back(f.t);
    fx.push_back(f.x);
  }
  run.write("front.csv", front);
  run.write("monitors.csv", monitors_csv(sol));

  Json result{{"grid", to_json(grid)},
              {"dt_policy",
               {{"stepping", o.adaptive ? "adaptive" : "ssp_rk3"},
                {"diffusive_safety", cfg.diffusive_safety},
                {"advective_safety", cfg.advective_safety},
                {"max_dt", sol.max_dt},
                {"steps", sol.steps}}},
              {"snapshot_times", sol.times},
              {"monitor_series", "monitors.csv"},
              {"front_series", "front.csv"},
              {"max_drift_u", sol.max_drift_u()},
              {"max_drift_v", sol.max_drift_v()},
              {"max_gap", sol.max_gap()},
              {"min_v", sol.min_v()}};
  if (!comoving) {
    const double ta = o.window.empty() ? 0.5 * o.t_end : o.window[0];
    const double tb = o.window.empty() ? o.t_end : o.window[1];
    try {
      const auto est = estimate_speed(sol.front_series, ta, tb);
      result["front_speed"] = {{"window", {ta, tb}}, {"speed", est.speed}, {"stderr", est.stderr_}, {"samples", est.samples}};
      out << "front speed over [" << num(ta) << ", " << num(tb) << "]: " << num(est.speed) << " +/- "
          << num(est.stderr_) << '\n';
    } catch (const Error& e) {
      result["front_speed"] = {{"error", e.what()}};
      out << "front speed: " << e.what() << '\n';
    }
    run.write("front.svg", svg::line_plot("Front position", "t", "x", {{"u = 1/2", ft, fx, "#1f77b4"}}));
  } else {
    std::vector<double> t, du, dv;
    for (const auto& m : sol.monitors) {
      t.push_back(m.t);
      du.push_back(m.drift_u);
      dv.push_back(m.drift_v);
    }
    run.write("drift.svg", svg::line_plot("Co-moving drift", "t", "sup norm",
                                          {{"u", t, du, "#1f77b4"}, {"v", t, dv, "#d62728"}}));
    out << "max drift u " << num(sol.max_drift_u()) << ", v " << num(sol.max_drift_v()) << '\n';
  }
  run.write("simulate.json", result.dump(2) + "\n");
  run.finish(result);
  out << sol.steps << " steps, " << sol.snapshots.size() << " snapshots\nrun directory: " << run.path().string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Common& c, const SweepSpec& spec, std::ostream& out) {
  validate_sweep(spec);
  Json config{{"mu", spec.mu},   {"beta", spec.beta},          {"D", spec.diff}, {"chi", spec.chi},
              {"tol", spec.tol}, {"threads", spec.parallelism}, {"cap", spec.cap}};
  std::vector<fs::path> inputs;
  if (!c.config.empty()) inputs.emplace_back(c.config);
  for (const auto& id : spec.chi) {
    if (id.rfind("table:", 0) == 0) inputs.emplace_back(id.substr(6));
  }
  auto run = open_run(c, "sweep", config, inputs);
  const auto rows = run_sweep(spec);

  std::vector<std::string> cell_labels;
  std::vector<std::vector<double>> cells;
  bool complete = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    char dir[32];
    std::snprintf(dir, sizeof dir, "rows/%04zu/row.json", i);
    Json j{{"mu", row.mu}, {"beta", row.beta}, {"D", row.diff}, {"chi_id", row.chi_id},
           {"c_star_closed", row.c_star_closed}, {"outcome_counts", row.outcome_counts}};
    if (row.c_star_empirical) j["c_star_empirical"] = *row.c_star_empirical;
    if (!row.error.empty()) j["error"] = row.error;
    j["detail"] = row.detail;
    run.write(dir, j.dump(2) + "\n");
    complete = complete && row.c_star_empirical.has_value();

    const std::size_t col = i % spec.chi.size();
    if (col == 0) {
      cell_labels.push_back("mu=" + num(row.mu) + " beta=" + num(row.beta) + " D=" + num(row.diff));
      cells.emplace_back(spec.chi.size(), std::nan(""));
    }
    if (row.c_star_empirical) cells.back()[col] = row.abs_err() / row.c_star_closed;
  }
  run.write("sweep.csv", sweep_csv(rows));
  run.write("heatmap.svg", svg::heatmap("Empirical vs closed-form minimum speed", cell_labels, spec.chi, cells, 0.02));
  const Json summary{{"rows", rows.size()}, {"complete", complete}};
  run.finish(summary);
  out << rows.size() << " rows" << (complete ? "" : " (some failed)") << "\nrun directory: " << run.path().string()
      << '\n';
  return complete ? kExitOk : kExitNumerical;
}

}  // namespace

ChiFunction parse_chi(const std::string& spec, double mu) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "chi: expected const:<k>, affine:<a>,<b>, table:<path> or rel:<f>, got '" + spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  if (kind == "const") return ChiFunction::constant(parse_double(body, "chi"));
  if (kind == "rel") return ChiFunction::constant(parse_double(body, "chi") * mu);
  if (kind == "affine") {
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ConfigError, "chi: affine needs two values a,b");
    return ChiFunction::affine(parse_double(body.substr(0, comma), "chi.a"), parse_double(body.substr(comma + 1), "chi.b"));
  }
  if (kind == "table") return ChiFunction::tabulated(read_chi_table(body));
  throw Error(ErrorCode::ConfigError, "chi: unknown kind '" + kind + "'");
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveRate:
    case ErrorCode::NegativeDiffusion:
    case ErrorCode::ChiOutOfRange:
    case ErrorCode::InvalidChiTable:
    case ErrorCode::ConfigError:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::InvalidFace:
    case ErrorCode::BracketInvalid:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

Json speed_json(const ModelParams& p) {
  Json j{{"params", to_json(p)}};
  j.update(to_json(min_wave_speed(p)));
  if (p.diff == 0.0) j["literature_bounds"] = to_json(literature_bounds(p));
  return j;
}

double SweepRow::abs_err() const {
  return c_star_empirical ? std::abs(*c_star_empirical - c_star_closed) : std::nan("");
}

void validate_sweep(const SweepSpec& spec) {
  const std::pair<const char*, std::size_t> axes[] = {
      {"mu", spec.mu.size()}, {"beta", spec.beta.size()}, {"D", spec.diff.size()}, {"chi", spec.chi.size()}};
  std::size_t total = 1;
  for (const auto& [name, size] : axes) {
    if (size == 0) throw Error(ErrorCode::ConfigError, std::string("sweep.") + name + ": empty axis");
    total *= size;
  }
  if (total > spec.cap) {
    throw Error(ErrorCode::ConfigError, "sweep: " + std::to_string(total) + " grid points exceed the cap of " +
                                            std::to_string(spec.cap));
  }
  if (!(spec.tol > 0.0)) throw Error(ErrorCode::ConfigError, "sweep.tol: must be positive");
  if (spec.parallelism < 1) throw Error(ErrorCode::ConfigError, "sweep.threads: must be at least 1");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  std::vector<SweepRow> rows;
  for (double mu : spec.mu)
    for (double beta : spec.beta)
      for (double diff : spec.diff)
        for (const auto& chi : spec.chi) {
          SweepRow row;
          row.mu = mu;
          row.beta = beta;
          row.diff = diff;
          row.chi_id = chi;
          rows.push_back(std::move(row));
        }

  auto evaluate = [&spec](SweepRow& row) {
    try {
      ModelParams p;
      p.mu = row.mu;
      p.beta = row.beta;
      p.diff = row.diff;
      p.chi = parse_chi(row.chi_id, row.mu);
      p = validate_params(p);
      row.c_star_closed = min_wave_speed(p).c_star;
      const auto emp = find_min_speed_empirical(p, 0.25 * row.c_star_closed, 2.0 * row.c_star_closed, spec.tol);
      row.c_star_empirical = emp.speed;
      row.outcome_counts = counts_string(emp.trials);
      row.detail = {{"bracket", {emp.lower, emp.upper}}, {"trials", trials_json(emp.trials)}};
    } catch (const Error& e) {
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) evaluate(rows[i]);
  };
  const int n_threads = std::min<int>(spec.parallelism, static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    s += format_number(r.mu) + ',' + format_number(r.beta) + ',' + format_number(r.diff) + ',' + csv_field(r.chi_id) +
         ',' + format_number(r.c_star_closed) + ',' +
         (r.c_star_empirical ? format_number(*r.c_star_empirical) : "") + ',' +
         (r.c_star_empirical ? format_number(r.abs_err()) : "") + ',' + csv_field(r.outcome_counts) + '\n';
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traveling waves of the logistic Keller-Segel model", "kswave"};
  app.require_subcommand(1);

  Common common;
  bool as_json = false;
  auto* speed = app.add_subcommand("speed", "Closed-form minimum wave speed");
  add_params(speed, common);
  speed->add_flag("--json", as_json, "Print JSON only");

  ShootOptions shoot_opts;
  auto* shoot_cmd = app.add_subcommand("shoot", "Shoot one orbit and extract its profile");
  add_params(shoot_cmd, common);
  shoot_cmd->add_option("--c", shoot_opts.c, "Wave speed")->required();
  shoot_cmd->add_option("--epsilon", shoot_opts.epsilon, "Offset along the unstable direction")->capture_default_str();
  shoot_cmd->add_option("--rel-tol", shoot_opts.rel_tol, "Integrator relative tolerance")->capture_default_str();
  shoot_cmd->add_option("--points", shoot_opts.points, "Profile grid size")->capture_default_str()->check(CLI::PositiveNumber);

  MinSpeedOptions min_opts;
  auto* minspeed = app.add_subcommand("minspeed", "Empirical minimum speed by bisection");
  add_params(minspeed, common);
  minspeed->add_option("--c-lo", min_opts.c_lo, "Lower bracket (default c*/4)");
  minspeed->add_option("--c-hi", min_opts.c_hi, "Upper bracket (default 2 c*)");
  minspeed->add_option("--tol", min_opts.tol, "Bisection tolerance")->capture_default_str();

  TrapOptions trap_opts;
  auto* trapcheck = app.add_subcommand("trapcheck", "Inward-flux check on every trap-region face");
  add_params(trapcheck, common);
  trapcheck->add_option("--c", trap_opts.c, "Wave speed (default c*)");
  trapcheck->add_option("--samples", trap_opts.samples, "Samples per face")->capture_default_str();

  SurfaceOptions surf_opts;
  auto* surface = app.add_subcommand("surface", "Check the lower surface W = eta U");
  add_params(surface, common);
  surface->add_option("--c", surf_opts.c, "Wave speed (default c*)");
  surface->add_option("--eta", surf_opts.eta, "half (c/2), paper (5c/8) or a number")->capture_default_str();
  surface->add_option("--grid", surf_opts.grid, "Grid density in (U, beta V)")->capture_default_str();
  surface->add_option("--y-grid", surf_opts.y_grid, "Grid density in Y when D > 0")->capture_default_str();

  SimulateOptions sim_opts;
  auto* simulate_cmd = app.add_subcommand("simulate", "Method-of-lines simulation");
  add_params(simulate_cmd, common);
  simulate_cmd->add_option("--L", sim_opts.length, "Domain length (default 300, or the profile span)");
  simulate_cmd->add_option("--n", sim_opts.n, "Number of cells")->capture_default_str();
  simulate_cmd->add_option("--t-end", sim_opts.t_end, "Final time")->capture_default_str();
  simulate_cmd->add_option("--frame", sim_opts.frame, "lab or comoving")->capture_default_str();
  simulate_cmd->add_option("--init", sim_opts.init, "step or profile")->capture_default_str();
  simulate_cmd->add_option("--c", sim_opts.c, "Frame/profile speed (default c* + 0.5)");
  simulate_cmd->add_option("--edge", sim_opts.edge, "Initial front position in the lab frame")->capture_default_str();
  simulate_cmd->add_option("--snapshot-every", sim_opts.snapshot_every, "Snapshot interval")->capture_default_str();
  simulate_cmd->add_option("--front-every", sim_opts.front_every, "Front sampling interval")->capture_default_str();
  simulate_cmd->add_option("--window", sim_opts.window, "Speed fit window t_a t_b (default second half)")->expected(2);
  simulate_cmd->add_flag("--adaptive", sim_opts.adaptive, "Adaptive Runge-Kutta time stepping");
  simulate_cmd->add_option("--advection", sim_opts.advection, "first or second order upwind")->capture_default_str();

  SweepSpec spec;
  auto* sweep = app.add_subcommand("sweep", "Empirical vs closed-form minimum speed over a parameter grid");
  sweep->add_option("--mu", spec.mu, "mu values")->expected(1, -1);
  sweep->add_option("--beta", spec.beta, "beta values")->expected(1, -1);
  sweep->add_option("--D", spec.diff, "D values")->expected(1, -1);
  sweep->add_option("--chi", spec.chi, "chi variants; rel:f means constant f*mu")->expected(1, -1);
  sweep->add_option("--tol", spec.tol, "Bisection tolerance")->capture_default_str();
  sweep->add_option("--threads", spec.parallelism, "Worker threads")->capture_default_str();
  sweep->add_option("--cap", spec.cap, "Maximum number of grid points")->capture_default_str();
  add_io(sweep, common);

  std::vector<std::string> storage{"kswave"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const Json extra = apply_config(sub, common.config);
    if (sub == speed) return cmd_speed(common, sub, extra, as_json, out);
    if (sub == shoot_cmd) return cmd_shoot(common, sub, extra, shoot_opts, out);
    if (sub == minspeed) return cmd_minspeed(common, sub, extra, min_opts, out);
    if (sub == trapcheck) return cmd_trapcheck(common, sub, extra, trap_opts, out);
    if (sub == surface) return cmd_surface(common, sub, extra, surf_opts, out);
    if (sub == simulate_cmd) return cmd_simulate(common, sub, extra, sim_opts, out);
    return cmd_sweep(common, spec, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace kswave::cli
