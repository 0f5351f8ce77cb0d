#include "kswave/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kswave/error.hpp"

namespace kswave::integrate {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller exponents.
constexpr double kAlpha = 0.2 - 0.04 * 0.75;
constexpr double kBeta = 0.04;
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kEventTol = 1e-12;

struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> r1, r2, r3, r4, r5;

  void eval(double t, std::span<double> out) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    for (std::size_t i = 0; i < r1.size(); ++i) {
      out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    }
  }
};

bool all_finite(std::span<const double> y) {
  return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

bool crossed(double g0, double g1, Direction dir) {
  const bool up = g0 < 0.0 && g1 >= 0.0;
  const bool down = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Up: return up;
    case Direction::Down: return down;
    case Direction::Any: return up || down;
  }
  return false;
}

double error_norm(std::span<const double> err, std::span<const double> y0, std::span<const double> y1,
                  const IntegratorConfig& cfg) {
  double acc = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = sc > 0.0 ? err[i] / sc : (err[i] == 0.0 ? 0.0 : HUGE_VAL);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step(const Rhs& rhs, double t0, std::span<const double> y0, std::span<const double> f0,
                    double span, const IntegratorConfig& cfg) {
  const std::size_t n = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
    if (sk <= 0.0) continue;
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min({h, cfg.max_step, span});
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h * f0[i];
  rhs(t0 + h, y1, f1);
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
    if (sk <= 0.0) continue;
    const double d = (f1[i] - f0[i]) / sk;
    der2 += d * d;
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, cfg.max_step, span});
}

}  // namespace

const EventRecord* Trajectory::terminal_event() const {
  if (termination != Termination::Event || events.empty()) return nullptr;
  return &events.back();
}

Trajectory integrate(const Rhs& rhs, std::span<const double> y0_in, double t0, double t1,
                     const IntegratorConfig& cfg, const std::vector<EventSpec>& events,
                     const Observer& observer) {
  if (!(t1 > t0)) throw Error(ErrorCode::PreconditionViolated, "integration span must satisfy t1 > t0");
  if (!all_finite(y0_in)) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol >= 0.0) || cfg.max_steps <= 0) {
    throw Error(ErrorCode::ConfigError, "tolerances and max_steps must be positive");
  }

  const std::size_t n = y0_in.size();
  std::vector<double> y(y0_in.begin(), y0_in.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  Trajectory traj;
  rhs(t0, y, k1);
  auto store = [&](double t, std::span<const double> s, std::span<const double> f) {
    traj.times.push_back(t);
    traj.states.emplace_back(s.begin(), s.end());
    traj.derivatives.emplace_back(f.begin(), f.end());
  };
  store(t0, y, k1);

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].guard(t0, y);

  double t = t0;
  double h = cfg.initial_step > 0.0 ? cfg.initial_step : initial_step(rhs, t0, y, k1, t1 - t0, cfg);
  double err_old = 1e-4;
  bool last_rejected = false;
  DenseStep dense;
  long steps = 0;

  while (true) {
    if (steps >= cfg.max_steps) {
      traj.termination = Termination::StepLimit;
      break;
    }
    h = std::min(h, cfg.max_step);
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    rhs(t + h, ynew, k7);
    ++steps;

    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    double en = error_norm(err, y, ynew, cfg);
    const bool finite = all_finite(ynew) && all_finite(k7);
    if (!finite) en = HUGE_VAL;

    if (en > 1.0) {
      ++traj.steps_rejected;
      const double fac = finite ? std::max(kFacMin, kSafety * std::pow(en, -kAlpha)) : kFacMin;
      h *= last_rejected ? std::min(fac, 0.5) : fac;
      last_rejected = true;
      if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
        traj.termination = finite ? Termination::StepLimit : Termination::NonFinite;
        break;
      }
      continue;
    }

    // Accepted step: build the dense-output polynomial.
    dense.t0 = t;
    dense.h = h;
    dense.r1 = y;
    dense.r2.resize(n);
    dense.r3.resize(n);
    dense.r4.resize(n);
    dense.r5.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dy = ynew[i] - y[i];
      const double bspl = h * k1[i] - dy;
      dense.r2[i] = dy;
      dense.r3[i] = bspl;
      dense.r4[i] = dy - h * k7[i] - bspl;
      dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    ++traj.steps_accepted;
    const double t_new = final_step ? t1 : t + h;

    // Locate every guard crossing inside (t, t_new] on the dense output.
    std::vector<double> g_new(events.size());
    std::vector<std::pair<double, std::size_t>> located;
    for (std::size_t e = 0; e < events.size(); ++e) {
      g_new[e] = events[e].guard(t_new, ynew);
      if (!crossed(g_prev[e], g_new[e], events[e].direction)) continue;
      double lo = t, hi = t_new, g_lo = g_prev[e];
      while (hi - lo > kEventTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // below the spacing of doubles near t
        dense.eval(mid, ytmp);
        const double g_mid = events[e].guard(mid, ytmp);
        if (crossed(g_lo, g_mid, events[e].direction)) {
          hi = mid;
        } else {
          lo = mid;
          g_lo = g_mid;
        }
      }
      located.emplace_back(hi, e);
    }
    std::stable_sort(located.begin(), located.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t hit = events.size();
    double t_hit = t_new;
    for (const auto& [te, e] : located) {
      dense.eval(te, ytmp);
      traj.events.push_back({e, te, ytmp});
      if (events[e].terminal) {
        hit = e;
        t_hit = te;
        break;
      }
    }

    if (hit != events.size()) {
      dense.eval(t_hit, ytmp);
      rhs(t_hit, ytmp, k2);
      if (t_hit > t) store(t_hit, ytmp, k2);
      traj.termination = Termination::Event;
      if (observer) observer(t_hit, ytmp);
      break;
    }

    t = t_new;
    y.swap(ynew);
    k1.swap(k7);  // FSAL
    g_prev = g_new;
    if (cfg.store_trajectory || final_step) store(t, y, k1);
    if (observer) observer(t, y);

    if (final_step) {
      traj.termination = Termination::TimeLimit;
      break;
    }

    const double fac_raw = std::pow(en, -kAlpha) * std::pow(err_old, kBeta);
    double fac = std::clamp(kSafety * fac_raw, kFacMin, kFacMax);
    if (last_rejected) fac = std::min(fac, 1.0);
    h *= fac;
    err_old = std::max(en, 1e-4);
    last_rejected = false;
  }

  if (traj.termination == Termination::StepLimit || traj.termination == Termination::NonFinite) {
    if (traj.times.back() != t) store(t, y, k1);
  }
  return traj;
}

void require_success(const Trajectory& traj) {
  if (traj.termination == Termination::StepLimit) {
    std::ostringstream msg;
    msg << "step limit reached at t=" << traj.final_time()
        << "; the problem may be stiff, try looser tolerances";
    throw Error(ErrorCode::StepLimitExceeded, msg.str());
  }
  if (traj.termination == Termination::NonFinite) {
    std::ostringstream msg;
    msg << "non-finite state after t=" << traj.final_time() << "; last finite state stored";
    throw Error(ErrorCode::NonFiniteState, msg.str());
  }
}

}  // namespace kswave::integrate
