#include "kswave/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kswave/error.hpp"

namespace kswave {

Grid1D make_grid(double length, int n, double x0) {
  if (!(length > 0.0)) throw Error(ErrorCode::PreconditionViolated, "grid length must be positive");
  if (n < 16) throw Error(ErrorCode::GridTooCoarse, "grid needs at least 16 cells, got " + std::to_string(n));
  return {length, n, x0};
}

namespace {

// Mirror ghost cells: f[-1] = f[0], f[n] = f[n-1], and so on.
inline double at(const std::vector<double>& f, int i) {
  const int n = static_cast<int>(f.size());
  if (i < 0) return f[-i - 1];
  if (i >= n) return f[2 * n - i - 1];
  return f[i];
}

void check_fields(const FieldPair& f, const Grid1D& g) {
  if (f.u.size() != static_cast<std::size_t>(g.n) || f.v.size() != f.u.size()) {
    throw Error(ErrorCode::DimensionMismatch, "field arrays must both have n = " + std::to_string(g.n) + " entries");
  }
}

void rhs_into(const FieldPair& f, const ModelParams& p, const Grid1D& g, const RhsOptions& opts, FieldPair& out) {
  const int n = g.n;
  const double dx = g.dx();
  const double inv_dx2 = 1.0 / (dx * dx);
  const auto& u = f.u;
  const auto& v = f.v;
  out.u.assign(n, 0.0);
  out.v.assign(n, 0.0);

  for (int i = 0; i < n; ++i) {
    out.u[i] = (at(u, i - 1) - 2.0 * u[i] + at(u, i + 1)) * inv_dx2;
    if (p.diff > 0.0) out.v[i] = p.diff * (at(v, i - 1) - 2.0 * v[i] + at(v, i + 1)) * inv_dx2;
  }

  if (opts.chemotaxis) {
    // Interface fluxes F[i+1/2]; the two boundary interfaces carry zero flux.
    double left = 0.0;
    for (int i = 0; i < n; ++i) {
      double right = 0.0;
      if (i + 1 < n) {
        const double vel = p.chi_at(0.5 * (v[i] + v[i + 1])) * (v[i + 1] - v[i]) / dx;
        right = (vel > 0.0 ? u[i] : u[i + 1]) * vel;
      }
      out.u[i] -= (right - left) / dx;
      left = right;
    }
  }

  if (opts.reaction) {
    for (int i = 0; i < n; ++i) {
      out.u[i] += p.mu * u[i] * (1.0 - u[i]);
      out.v[i] += p.beta * v[i] - u[i];
    }
  }

  if (opts.frame_speed != 0.0) {
    const double c = opts.frame_speed;
    for (int i = 0; i < n; ++i) {
      double du, dv;
      if (opts.advection == AdvectionScheme::FirstOrderUpwind) {
        du = (at(u, i + 1) - u[i]) / dx;
        dv = (at(v, i + 1) - v[i]) / dx;
      } else {
        du = (-3.0 * u[i] + 4.0 * at(u, i + 1) - at(u, i + 2)) / (2.0 * dx);
        dv = (-3.0 * v[i] + 4.0 * at(v, i + 1) - at(v, i + 2)) / (2.0 * dx);
      }
      out.u[i] += c * du;
      out.v[i] += c * dv;
    }
  }
}

double chemotactic_speed(const FieldPair& f, const ModelParams& p, const Grid1D& g) {
  double m = 0.0;
  for (int i = 0; i + 1 < g.n; ++i) {
    m = std::max(m, std::abs(p.chi_at(0.5 * (f.v[i] + f.v[i + 1])) * (f.v[i + 1] - f.v[i]) / g.dx()));
  }
  return m;
}

bool finite(const FieldPair& f) {
  auto ok = [](double x) { return std::isfinite(x); };
  return std::all_of(f.u.begin(), f.u.end(), ok) && std::all_of(f.v.begin(), f.v.end(), ok);
}

MonitorSample monitor(double t, const FieldPair& f, const FieldPair& init, double beta) {
  MonitorSample m{t,
                  std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  0.0,
                  0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    m.min_u = std::min(m.min_u, f.u[i]);
    m.min_v = std::min(m.min_v, f.v[i]);
    m.max_gap = std::max(m.max_gap, f.u[i] - beta * f.v[i]);
    m.max_u = std::max(m.max_u, f.u[i]);
    m.drift_u = std::max(m.drift_u, std::abs(f.u[i] - init.u[i]));
    m.drift_v = std::max(m.drift_v, std::abs(f.v[i] - init.v[i]));
  }
  return m;
}

[[noreturn]] void blowup(double t) {
  std::ostringstream msg;
  msg << "non-finite field at t = " << t;
  throw Error(ErrorCode::NonFiniteState, msg.str());
}

// Shared bookkeeping for both stepping modes.
class Recorder {
 public:
  Recorder(SpaceTimeSolution& sol, const FieldPair& init, const ModelParams& p, const SimulationConfig& cfg,
           double t_end)
      : sol_(sol), init_(init), p_(p), cfg_(cfg), t_end_(t_end) {
    sol_.monitors.push_back(monitor(0.0, init, init, p.beta));
    sol_.times.push_back(0.0);
    sol_.snapshots.push_back(init);
    record_front(0.0, init);
  }

  double next_target() const {
    return std::min({t_end_, (snaps_ + 1) * cfg_.snapshot_interval, (fronts_ + 1) * cfg_.front_interval});
  }

  void after_step(double t, const FieldPair& f) { sol_.monitors.push_back(monitor(t, f, init_, p_.beta)); }

  // Called when t has reached next_target().
  void at_target(double t, const FieldPair& f) {
    const double eps = 1e-12 * std::max(1.0, t);
    if (t >= (fronts_ + 1) * cfg_.front_interval - eps) {
      ++fronts_;
      record_front(t, f);
    }
    const bool last = t >= t_end_ - eps;
    if (t >= (snaps_ + 1) * cfg_.snapshot_interval - eps || last) {
      if (t >= (snaps_ + 1) * cfg_.snapshot_interval - eps) ++snaps_;
      if (sol_.times.back() < t) {
        sol_.times.push_back(t);
        sol_.snapshots.push_back(f);
      }
    }
  }

 private:
  void record_front(double t, const FieldPair& f) {
    try {
      sol_.front_series.push_back({t, front_position(f, sol_.grid, cfg_.front_level)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCrossing) throw;
    }
  }

  SpaceTimeSolution& sol_;
  const FieldPair& init_;
  const ModelParams& p_;
  const SimulationConfig& cfg_;
  double t_end_;
  long snaps_ = 0;
  long fronts_ = 0;
};

}  // namespace

FieldPair pde_rhs(const FieldPair& f, const ModelParams& p, const Grid1D& g, const RhsOptions& opts) {
  check_fields(f, g);
  FieldPair out;
  rhs_into(f, p, g, opts, out);
  return out;
}

SpaceTimeSolution simulate(const ModelParams& p, const Grid1D& g, const FieldPair& init, double t_end,
                           const SimulationConfig& cfg) {
  check_fields(init, g);
  if (!(t_end > 0.0)) throw Error(ErrorCode::PreconditionViolated, "t_end must be positive");
  if (!(cfg.snapshot_interval > 0.0) || !(cfg.front_interval > 0.0)) {
    throw Error(ErrorCode::PreconditionViolated, "snapshot and front intervals must be positive");
  }
  if (!finite(init)) blowup(0.0);

  SpaceTimeSolution sol;
  sol.grid = g;
  Recorder rec(sol, init, p, cfg, t_end);
  const double dx = g.dx();
  const double diffusive_dt = cfg.diffusive_safety * dx * dx / std::max(1.0, p.diff);
  const double eps = 1e-12 * std::max(1.0, t_end);

  FieldPair f = init;
  double t = 0.0;

  if (cfg.stepping == Stepping::SspRk3) {
    FieldPair k, s1, s2;
    const int n = g.n;
    while (t < t_end - eps) {
      const double speed = std::abs(cfg.rhs.frame_speed) + (cfg.rhs.chemotaxis ? chemotactic_speed(f, p, g) : 0.0);
      double dt = diffusive_dt;
      if (speed > 0.0) dt = std::min(dt, cfg.advective_safety * dx / speed);
      const double target = rec.next_target();
      bool hit = false;
      if (t + dt >= target - eps) {
        dt = target - t;
        hit = true;
      }

      rhs_into(f, p, g, cfg.rhs, k);
      s1.u.resize(n);
      s1.v.resize(n);
      for (int i = 0; i < n; ++i) {
        s1.u[i] = f.u[i] + dt * k.u[i];
        s1.v[i] = f.v[i] + dt * k.v[i];
      }
      rhs_into(s1, p, g, cfg.rhs, k);
      s2.u.resize(n);
      s2.v.resize(n);
      for (int i = 0; i < n; ++i) {
        s2.u[i] = 0.75 * f.u[i] + 0.25 * (s1.u[i] + dt * k.u[i]);
        s2.v[i] = 0.75 * f.v[i] + 0.25 * (s1.v[i] + dt * k.v[i]);
      }
      rhs_into(s2, p, g, cfg.rhs, k);
      for (int i = 0; i < n; ++i) {
        f.u[i] = (f.u[i] + 2.0 * (s2.u[i] + dt * k.u[i])) / 3.0;
        f.v[i] = (f.v[i] + 2.0 * (s2.v[i] + dt * k.v[i])) / 3.0;
      }
      t = hit ? target : t + dt;
      ++sol.steps;
      sol.max_dt = std::max(sol.max_dt, dt);
      if (!finite(f)) blowup(t);
      rec.after_step(t, f);
      if (hit) rec.at_target(t, f);
    }
    return sol;
  }

  // Adaptive: the semi-discrete system as one ODE in (u, v).
  const std::size_t n = static_cast<std::size_t>(g.n);
  FieldPair scratch_in, scratch_out;
  integrate::Rhs ode = [&](double, std::span<const double> y, std::span<double> dy) {
    scratch_in.u.assign(y.begin(), y.begin() + n);
    scratch_in.v.assign(y.begin() + n, y.end());
    rhs_into(scratch_in, p, g, cfg.rhs, scratch_out);
    std::copy(scratch_out.u.begin(), scratch_out.u.end(), dy.begin());
    std::copy(scratch_out.v.begin(), scratch_out.v.end(), dy.begin() + n);
  };
  integrate::IntegratorConfig icfg = cfg.integrator;
  icfg.store_trajectory = false;
  std::vector<double> y(2 * n);
  std::copy(f.u.begin(), f.u.end(), y.begin());
  std::copy(f.v.begin(), f.v.end(), y.begin() + n);
  FieldPair view;
  auto unpack = [&](std::span<const double> s, FieldPair& out) {
    out.u.assign(s.begin(), s.begin() + n);
    out.v.assign(s.begin() + n, s.end());
  };
  while (t < t_end - eps) {
    const double target = rec.next_target();
    auto traj = integrate::integrate(ode, y, t, target, icfg, {}, [&](double tt, std::span<const double> s) {
      unpack(s, view);
      rec.after_step(tt, view);
    });
    if (traj.termination == integrate::Termination::NonFinite) blowup(traj.final_time());
    integrate::require_success(traj);
    sol.steps += traj.steps_accepted;
    y = traj.final_state();
    t = target;
    unpack(y, f);
    rec.at_target(t, f);
  }
  return sol;
}

double SpaceTimeSolution::max_drift_u() const {
  double m = 0.0;
  for (const auto& s : monitors) m = std::max(m, s.drift_u);
  return m;
}

double SpaceTimeSolution::max_drift_v() const {
  double m = 0.0;
  for (const auto& s : monitors) m = std::max(m, s.drift_v);
  return m;
}

double SpaceTimeSolution::max_gap() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : monitors) m = std::max(m, s.max_gap);
  return m;
}

double SpaceTimeSolution::min_v() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : monitors) m = std::min(m, s.min_v);
  return m;
}

double front_position(const FieldPair& f, const Grid1D& g, double level) {
  const auto& u = f.u;
  for (int i = static_cast<int>(u.size()) - 2; i >= 0; --i) {
    const bool a = u[i] >= level;
    const bool b = u[i + 1] >= level;
    if (a != b) {
      const double frac = (u[i] - level) / (u[i] - u[i + 1]);
      return g.x(i) + frac * g.dx();
    }
  }
  std::ostringstream msg;
  msg << "u never crosses " << level;
  throw Error(ErrorCode::NoCrossing, msg.str());
}

SpeedEstimate estimate_speed(const std::vector<FrontSample>& series, double t_a, double t_b) {
  std::vector<FrontSample> w;
  std::copy_if(series.begin(), series.end(), std::back_inserter(w),
               [&](const FrontSample& s) { return s.t >= t_a && s.t <= t_b; });
  const long n = static_cast<long>(w.size());
  if (n < 10) {
    throw Error(ErrorCode::InsufficientSamples,
                std::to_string(n) + " front samples in the window, at least 10 are needed");
  }
  double mt = 0.0, mx = 0.0;
  for (const auto& s : w) {
    mt += s.t;
    mx += s.x;
  }
  mt /= n;
  mx /= n;
  double stt = 0.0, stx = 0.0;
  for (const auto& s : w) {
    stt += (s.t - mt) * (s.t - mt);
    stx += (s.t - mt) * (s.x - mx);
  }
  const double slope = stx / stt;
  const double icpt = mx - slope * mt;
  double ssr = 0.0;
  for (const auto& s : w) {
    const double r = s.x - (icpt + slope * s.t);
    ssr += r * r;
  }
  return {slope, std::sqrt(ssr / static_cast<double>(n - 2) / stt), n};
}

double comoving_residual(const TravelingWaveProfile& profile, const ModelParams& p) {
  const std::size_t n = profile.size();
  if (n < 64) throw Error(ErrorCode::GridTooCoarse, "residual needs at least 64 profile points");
  const double h = (profile.xi.back() - profile.xi.front()) / static_cast<double>(n - 1);
  const double c = profile.speed;
  const auto& u = profile.u;
  const auto& v = profile.v;
  const bool has_v = !v.empty();

  auto d1 = [h](const std::vector<double>& f, std::size_t i) {
    return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
  };
  auto d2 = [h](const std::vector<double>& f, std::size_t i) {
    return (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
  };

  // Chemotactic flux U chi(V) V' where V' is available (two cells in from each end).
  std::vector<double> flux(n, 0.0);
  if (has_v) {
    for (std::size_t i = 2; i + 2 < n; ++i) flux[i] = u[i] * p.chi_at(v[i]) * d1(v, i);
  }

  double worst = 0.0;
  for (std::size_t i = 5; i + 5 < n; ++i) {
    const double cells = d2(u, i) + c * d1(u, i) + p.mu * u[i] * (1.0 - u[i]) - (has_v ? d1(flux, i) : 0.0);
    worst = std::max(worst, std::abs(cells));
    if (has_v) {
      const double chem = p.diff * d2(v, i) + c * d1(v, i) + p.beta * v[i] - u[i];
      worst = std::max(worst, std::abs(chem));
    }
  }
  return worst;
}

FieldPair seed_from_profile(const TravelingWaveProfile& profile, const Grid1D& g, double offset) {
  FieldPair f;
  f.u.resize(g.n);
  f.v.resize(g.n);
  const bool has_v = !profile.v.empty();
  for (int i = 0; i < g.n; ++i) {
    const auto s = profile.evaluate(g.x(i) - offset);
    f.u[i] = s[0];
    f.v[i] = has_v ? s[1] : s[0] / profile.beta;
  }
  return f;
}

FieldPair step_front(const Grid1D& g, double edge, double beta) {
  FieldPair f;
  f.u.resize(g.n);
  f.v.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    f.u[i] = g.x(i) < edge ? 1.0 : 0.0;
    f.v[i] = f.u[i] / beta;
  }
  return f;
}

}  // namespace kswave
