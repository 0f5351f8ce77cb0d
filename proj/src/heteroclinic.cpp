#include "kswave/heteroclinic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <functional>
#include <sstream>

#include "kswave/error.hpp"
#include "kswave/spectra.hpp"

namespace kswave {

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::ConvergedToOrigin: return "ConvergedToOrigin";
    case OutcomeKind::ExitedRegion: return "ExitedRegion";
    case OutcomeKind::NegativityDetected: return "NegativityDetected";
    case OutcomeKind::Stalled: return "Stalled";
  }
  return "Unknown";
}

namespace {

using integrate::Direction;
using integrate::EventSpec;

double max_abs(std::span<const double> s) {
  double m = 0.0;
  for (double x : s) m = std::max(m, std::abs(x));
  return m;
}

// Everything the outcome logic needs to know about one wave system.
struct WaveSystem {
  int dim;
  int iu, iv, iy, iw;  // component indices, -1 when absent
  integrate::Rhs rhs;
  std::vector<double> invading;
  std::vector<double> start;
  double c;
  double beta;
  std::optional<double> rho;
  double horizon = 0.0;  // lower bound on xi_max from the linear rates
};

// Enough e-folds to leave the invading state along lambda_u and to decay into
// the ball along the slowest stable mode.
double rate_horizon(double lambda_u, const std::vector<std::complex<double>>& origin, double e_folds) {
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& z : origin) slowest = std::min(slowest, std::abs(z.real()));
  return e_folds * (1.0 / lambda_u + 1.0 / slowest);
}

enum class Role { Converge, Ball, Negative, Face };

struct Guard {
  Role role;
  int component = -1;
  FaceId face = FaceId::W0;
};

OrbitOutcome run(const WaveSystem& sys, const ShootConfig& cfg) {
  const double r = cfg.convergence_radius;
  const double r_deep = r * cfg.confirm_decay;
  const double beta = sys.beta;
  const double c = sys.c;
  const int iu = sys.iu, iv = sys.iv, iy = sys.iy, iw = sys.iw;

  auto uw_scale = [iu, iw](std::span<const double> s) { return std::max(std::abs(s[iu]), std::abs(s[iw])); };

  std::vector<EventSpec> events;
  std::vector<Guard> roles;
  auto add = [&](Guard g, std::function<double(std::span<const double>)> f, bool terminal) {
    events.push_back({[f = std::move(f)](double, std::span<const double> s) { return f(s); }, Direction::Down,
                      terminal});
    roles.push_back(g);
  };

  add({Role::Converge}, [=](std::span<const double> s) {
    return std::max(max_abs(s) / r, uw_scale(s) / r_deep) - 1.0;
  }, true);
  add({Role::Ball}, [=](std::span<const double> s) { return max_abs(s) - r; }, false);

  const double et = cfg.exit_tol;
  add({Role::Negative, iu}, [=](std::span<const double> s) { return s[iu] + et * uw_scale(s); }, true);
  if (iv >= 0) {
    add({Role::Negative, iv}, [=](std::span<const double> s) { return s[iv] + et * max_abs(s); }, true);
  }
  add({Role::Negative, iw}, [=](std::span<const double> s) { return s[iw] + et * uw_scale(s); }, true);

  const double ft = cfg.face_tol;
  if (iv >= 0) {
    add({Role::Face, -1, FaceId::UeqBetaV},
        [=](std::span<const double> s) { return beta * s[iv] - s[iu] + ft * max_abs(s); }, true);
    add({Role::Face, -1, FaceId::Vtop}, [=](std::span<const double> s) { return 1.0 - beta * s[iv] + ft; }, true);
  } else {
    add({Role::Face, -1, FaceId::Vtop}, [=](std::span<const double> s) { return 1.0 - s[iu] + ft; }, true);
  }
  add({Role::Face, -1, FaceId::WeqCU}, [=](std::span<const double> s) { return c * s[iu] - s[iw] + ft * max_abs(s); },
      true);
  if (iy >= 0) {
    add({Role::Face, -1, FaceId::Y0}, [=](std::span<const double> s) { return -s[iy] + ft * max_abs(s); }, true);
    if (sys.rho) {
      const double rh = *sys.rho;
      add({Role::Face, -1, FaceId::Yslant},
          [=](std::span<const double> s) { return s[iy] - rh * (s[iu] - beta * s[iv]) + ft * max_abs(s); }, true);
    }
  }

  const double xi_max = std::max(cfg.xi_max_factor / c, sys.horizon);
  auto traj = integrate::integrate(sys.rhs, sys.start, 0.0, xi_max, cfg.integrator, events);
  integrate::require_success(traj);

  OrbitOutcome out;
  out.c = c;
  out.dimension = sys.dim;
  out.start = sys.start;
  out.invading = sys.invading;

  bool ball = false;
  for (const auto& ev : traj.events) {
    if (roles[ev.index].role == Role::Ball) {
      out.xi_ball = ev.t;
      ball = true;
      break;
    }
  }

  if (const auto* term = traj.terminal_event()) {
    const Guard& g = roles[term->index];
    out.xi_event = term->t;
    switch (g.role) {
      case Role::Converge:
        out.kind = OutcomeKind::ConvergedToOrigin;
        if (!ball) out.xi_ball = term->t;
        break;
      case Role::Negative:
        out.kind = OutcomeKind::NegativityDetected;
        out.component = g.component;
        break;
      case Role::Face:
        out.kind = OutcomeKind::ExitedRegion;
        out.face = g.face;
        break;
      case Role::Ball: break;  // non-terminal
    }
  } else {
    // Horizon reached: a wave if the ball was entered without any exit.
    out.xi_event = traj.final_time();
    const bool settled = ball && max_abs(traj.final_state()) < r;
    out.kind = settled ? OutcomeKind::ConvergedToOrigin : OutcomeKind::Stalled;
  }
  out.trajectory = std::move(traj);
  return out;
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

// Cubic Hermite interpolation of one trajectory component.
double traj_component(const integrate::Trajectory& tr, int comp, double x) {
  const auto& ts = tr.times;
  auto it = std::upper_bound(ts.begin(), ts.end(), x);
  std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  k = std::min(k, ts.size() - 2);
  return hermite(ts[k], ts[k + 1], tr.states[k][comp], tr.states[k + 1][comp], tr.derivatives[k][comp],
                 tr.derivatives[k + 1][comp], x);
}

struct Layout {
  int iu, iv, iy, iw;
};

Layout layout_of(int dim) {
  switch (dim) {
    case 2: return {0, -1, -1, 1};
    case 3: return {0, 1, -1, 2};
    default: return {0, 1, 2, 3};
  }
}

TravelingWaveProfile build_profile(const OrbitOutcome& outcome, double beta,
                                   const std::function<void(std::span<const double>, std::span<double>)>& field,
                                   const ProfileOptions& opts) {
  if (outcome.kind != OutcomeKind::ConvergedToOrigin) {
    throw Error(ErrorCode::NotConverged,
                "orbit at c = " + std::to_string(outcome.c) + " ended as " + std::string(to_string(outcome.kind)));
  }
  if (opts.points < 2) throw Error(ErrorCode::PreconditionViolated, "profile needs at least two points");
  const auto& tr = outcome.trajectory;
  const Layout L = layout_of(outcome.dimension);
  const double xi_end = outcome.xi_ball;

  double xi_start = tr.times.front();
  for (std::size_t k = 0; k < tr.times.size() && tr.times[k] <= xi_end; ++k) {
    double dist = 0.0;
    for (std::size_t i = 0; i < outcome.invading.size(); ++i) {
      dist = std::max(dist, std::abs(tr.states[k][i] - outcome.invading[i]));
    }
    if (dist < 1e-6) xi_start = tr.times[k];
  }

  // U = 1/2 crossing: first sample at or below 1/2, then bisection on the interpolant.
  std::size_t k_half = tr.times.size();
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (tr.states[k][L.iu] <= 0.5) {
      k_half = k;
      break;
    }
  }
  if (k_half == 0 || k_half == tr.times.size() || tr.times[k_half] > xi_end) {
    throw Error(ErrorCode::NormalizationFailed, "U never crosses 1/2 on the computed orbit");
  }
  double lo = tr.times[k_half - 1], hi = tr.times[k_half];
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (traj_component(tr, L.iu, mid) > 0.5 ? lo : hi) = mid;
  }
  const double shift = 0.5 * (lo + hi);

  TravelingWaveProfile prof;
  prof.speed = outcome.c;
  prof.beta = beta;
  prof.shift = shift;
  prof.dimension = outcome.dimension;
  const std::size_t n = opts.points;
  const double h = (xi_end - xi_start) / static_cast<double>(n - 1);
  const std::size_t dim = static_cast<std::size_t>(outcome.dimension);
  std::vector<double> s(dim), ds(dim);
  prof.xi.resize(n);
  prof.u.resize(n);
  prof.w.resize(n);
  prof.du.resize(n);
  prof.dw.resize(n);
  if (L.iv >= 0) {
    prof.v.resize(n);
    prof.dv.resize(n);
  }
  if (L.iy >= 0) {
    prof.y.resize(n);
    prof.dy.resize(n);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double x = (k + 1 == n) ? xi_end : xi_start + h * static_cast<double>(k);
    for (std::size_t i = 0; i < dim; ++i) s[i] = traj_component(tr, static_cast<int>(i), x);
    field(s, ds);
    prof.xi[k] = x - shift;
    prof.u[k] = s[L.iu];
    prof.w[k] = s[L.iw];
    prof.du[k] = ds[L.iu];
    prof.dw[k] = ds[L.iw];
    if (L.iv >= 0) {
      prof.v[k] = s[L.iv];
      prof.dv[k] = ds[L.iv];
    }
    if (L.iy >= 0) {
      prof.y[k] = s[L.iy];
      prof.dy[k] = ds[L.iy];
    }
  }

  auto& ck = prof.checks;
  const bool has_v = !prof.v.empty();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = has_v ? beta * prof.v[k] : 1.0;
    const double excess = std::max({-prof.u[k], prof.u[k] - t, t - 1.0, 0.0});
    ck.max_ordering_excess = std::max(ck.max_ordering_excess, excess);
    if (excess > opts.ordering_tol) ++ck.ordering_violations;
    if (k > 0) {
      double inc = prof.u[k] - prof.u[k - 1];
      if (has_v) inc = std::max(inc, prof.v[k] - prof.v[k - 1]);
      ck.max_increase = std::max(ck.max_increase, inc);
      if (inc > opts.monotonicity_tol) ++ck.monotonicity_violations;
    }
  }
  const double v_inf = 1.0 / beta;
  ck.left_error = std::abs(prof.u.front() - 1.0);
  ck.right_error = std::abs(prof.u.back());
  if (has_v) {
    ck.left_error = std::max(ck.left_error, std::abs(prof.v.front() - v_inf));
    ck.right_error = std::max(ck.right_error, std::abs(prof.v.back()));
  }
  return prof;
}

}  // namespace

OrbitOutcome shoot(const ModelParams& p, double c, const ShootConfig& cfg) {
  if (!(c > 0.0)) throw Error(ErrorCode::PreconditionViolated, "wave speed must be positive");
  const auto eq = equilibria(p, c);
  const auto dir = unstable_direction(p, c);
  const TrapRegion region = make_region(p, c);

  WaveSystem sys;
  sys.dim = spatial_dimension(p);
  const Layout L = layout_of(sys.dim);
  sys.iu = L.iu;
  sys.iv = L.iv;
  sys.iy = L.iy;
  sys.iw = L.iw;
  sys.rhs = [p, c](double, std::span<const double> s, std::span<double> ds) { spatial_rhs(s, ds, p, c); };
  sys.invading = eq.invading;
  sys.start = eq.invading;
  for (std::size_t i = 0; i < sys.start.size(); ++i) sys.start[i] += cfg.epsilon * dir.direction[i];
  sys.c = c;
  sys.beta = p.beta;
  sys.rho = region.rho;
  sys.horizon = rate_horizon(dir.lambda_u, origin_spectrum(p, c).eigenvalues, cfg.horizon_e_folds);
  return run(sys, cfg);
}

OrbitOutcome shoot_reduced(double mu, double c, const ShootConfig& cfg) {
  if (!(c > 0.0) || !(mu > 0.0)) throw Error(ErrorCode::PreconditionViolated, "mu and c must be positive");
  // Unstable eigenpair of [[-c, 1], [mu, 0]] at (1, c).
  const double lambda = 0.5 * (-c + std::sqrt(c * c + 4.0 * mu));
  double du = -1.0, dw = -(c + lambda);
  const double norm = std::hypot(du, dw);
  du /= norm;
  dw /= norm;

  WaveSystem sys;
  sys.dim = 2;
  sys.iu = 0;
  sys.iv = -1;
  sys.iy = -1;
  sys.iw = 1;
  sys.rhs = [mu, c](double, std::span<const double> s, std::span<double> ds) {
    ds[0] = -c * s[0] + s[1];
    ds[1] = mu * s[0] * (s[0] - 1.0);
  };
  sys.invading = {1.0, c};
  sys.start = {1.0 + cfg.epsilon * du, c + cfg.epsilon * dw};
  sys.c = c;
  sys.beta = 1.0;
  const auto disc = std::sqrt(std::complex<double>(c * c - 4.0 * mu));
  sys.horizon = rate_horizon(lambda, {0.5 * (-c + disc), 0.5 * (-c - disc)}, cfg.horizon_e_folds);
  return run(sys, cfg);
}

EmpiricalSpeed find_min_speed_empirical(const ModelParams& p, double c_lo, double c_hi, double tol,
                                        const ShootConfig& cfg) {
  if (!(c_hi > c_lo) || !(c_lo > 0.0) || !(tol > 0.0)) {
    throw Error(ErrorCode::BracketInvalid, "need 0 < c_lo < c_hi and tol > 0");
  }
  EmpiricalSpeed out{0.0, c_lo, c_hi, 0, {}};
  auto wave = [&](double c) {
    const auto kind = shoot(p, c, cfg).kind;
    out.trials.push_back({c, kind});
    ++out.evaluations;
    return kind == OutcomeKind::ConvergedToOrigin;
  };
  if (wave(c_lo) || !wave(c_hi)) {
    std::ostringstream msg;
    msg << "bracket [" << c_lo << ", " << c_hi << "] does not straddle the wave threshold";
    throw Error(ErrorCode::BracketInvalid, msg.str());
  }
  while (out.upper - out.lower > tol) {
    const double mid = 0.5 * (out.lower + out.upper);
    (wave(mid) ? out.upper : out.lower) = mid;
  }
  out.speed = 0.5 * (out.lower + out.upper);
  return out;
}

TravelingWaveProfile extract_profile(const OrbitOutcome& outcome, const ModelParams& p, const ProfileOptions& opts) {
  const double c = outcome.c;
  return build_profile(
      outcome, p.beta, [&p, c](std::span<const double> s, std::span<double> ds) { spatial_rhs(s, ds, p, c); }, opts);
}

TravelingWaveProfile extract_reduced_profile(const OrbitOutcome& outcome, const ProfileOptions& opts) {
  if (outcome.dimension != 2) throw Error(ErrorCode::DimensionMismatch, "expected a reduced (U, W) orbit");
  const double c = outcome.c;
  // mu is recovered from the invading state's linearization: W' = mu U (U - 1).
  const auto& tr = outcome.trajectory;
  const auto& s0 = tr.states.front();
  const auto& d0 = tr.derivatives.front();
  const double mu = d0[1] / (s0[0] * (s0[0] - 1.0));
  return build_profile(
      outcome, 1.0,
      [mu, c](std::span<const double> s, std::span<double> ds) {
        ds[0] = -c * s[0] + s[1];
        ds[1] = mu * s[0] * (s[0] - 1.0);
      },
      opts);
}

std::vector<double> TravelingWaveProfile::evaluate(double x) const {
  const bool has_v = !v.empty();
  const bool has_y = !y.empty();
  auto pack = [&](double uu, double vv, double yy, double ww) {
    std::vector<double> out{uu};
    if (has_v) out.push_back(vv);
    if (has_y) out.push_back(yy);
    out.push_back(ww);
    return out;
  };
  if (x <= xi.front()) {
    if (x == xi.front()) return pack(u.front(), has_v ? v.front() : 0.0, has_y ? y.front() : 0.0, w.front());
    return pack(1.0, 1.0 / beta, 0.0, speed);
  }
  if (x >= xi.back()) {
    if (x == xi.back()) return pack(u.back(), has_v ? v.back() : 0.0, has_y ? y.back() : 0.0, w.back());
    return pack(0.0, 0.0, 0.0, 0.0);
  }
  const double h = (xi.back() - xi.front()) / static_cast<double>(xi.size() - 1);
  std::size_t k = static_cast<std::size_t>((x - xi.front()) / h);
  k = std::min(k, xi.size() - 2);
  auto at = [&](const std::vector<double>& f, const std::vector<double>& df) {
    return hermite(xi[k], xi[k + 1], f[k], f[k + 1], df[k], df[k + 1], x);
  };
  return pack(at(u, du), has_v ? at(v, dv) : 0.0, has_y ? at(y, dy) : 0.0, at(w, dw));
}

double manifold_offset_check(const ModelParams& p, double c, const ShootConfig& cfg) {
  ShootConfig half = cfg;
  half.epsilon = 0.5 * cfg.epsilon;
  const auto a = extract_profile(shoot(p, c, cfg), p);
  const auto b = extract_profile(shoot(p, c, half), p);
  const double lo = std::max(a.xi.front(), b.xi.front());
  const double hi = std::min(a.xi.back(), b.xi.back());
  double worst = 0.0;
  for (double x : a.xi) {
    if (x < lo || x > hi) continue;
    const auto sa = a.evaluate(x);
    const auto sb = b.evaluate(x);
    for (std::size_t i = 0; i < sa.size(); ++i) worst = std::max(worst, std::abs(sa[i] - sb[i]));
  }
  return worst;
}

std::vector<ExistenceRow> wave_existence_table(const ModelParams& p, std::vector<double> speeds,
                                               const ShootConfig& cfg) {
  std::sort(speeds.begin(), speeds.end());
  std::vector<ExistenceRow> rows;
  rows.reserve(speeds.size());
  for (double c : speeds) {
    ExistenceRow row{c, std::nullopt, {}};
    try {
      row.kind = shoot(p, c, cfg).kind;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace kswave
