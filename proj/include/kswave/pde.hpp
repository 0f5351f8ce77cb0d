#pragma once

#include <optional>
#include <vector>

#include "kswave/heteroclinic.hpp"
#include "kswave/integrate.hpp"
#include "kswave/model.hpp"

namespace kswave {

/// Cell-centred grid on [x0, x0 + length] with n cells.
struct Grid1D {
  double length = 0.0;
  int n = 0;
  double x0 = 0.0;

  double dx() const { return length / n; }
  double x(int i) const { return x0 + (i + 0.5) * dx(); }
};

/// Throws GridTooCoarse for n < 16 and PreconditionViolated for length <= 0.
Grid1D make_grid(double length, int n, double x0 = 0.0);

struct FieldPair {
  std::vector<double> u;  // cell density
  std::vector<double> v;  // chemical concentration

  std::size_t size() const { return u.size(); }
};

enum class AdvectionScheme { FirstOrderUpwind, SecondOrderUpwind };

struct RhsOptions {
  double frame_speed = 0.0;  // c > 0 adds +c d/dx to both equations
  AdvectionScheme advection = AdvectionScheme::SecondOrderUpwind;
  bool reaction = true;    // mu u (1 - u) and beta v - u
  bool chemotaxis = true;  // -(u chi(v) v_x)_x
};

FieldPair pde_rhs(const FieldPair& f, const ModelParams& p, const Grid1D& g, const RhsOptions& opts = {});

enum class Stepping { SspRk3, Adaptive };

struct SimulationConfig {
  RhsOptions rhs;
  Stepping stepping = Stepping::SspRk3;
  double diffusive_safety = 0.4;  // dt <= safety dx^2 / max(1, D)
  double advective_safety = 0.8;  // dt <= safety dx / (c + chemotactic velocity)
  double snapshot_interval = 1.0;
  double front_interval = 0.1;
  double front_level = 0.5;
  integrate::IntegratorConfig integrator{1e-8, 1e-10};  // Adaptive only
};

struct MonitorSample {
  double t;
  double min_u;
  double min_v;
  double max_gap;  // max(u - beta v)
  double max_u;
  double drift_u;  // sup |u - u(0)|
  double drift_v;  // sup |v - v(0)|
};

struct FrontSample {
  double t;
  double x;
};

struct SpaceTimeSolution {
  Grid1D grid;
  std::vector<double> times;
  std::vector<FieldPair> snapshots;
  std::vector<FrontSample> front_series;
  std::vector<MonitorSample> monitors;  // one per step, plus t = 0
  long steps = 0;
  double max_dt = 0.0;

  const FieldPair& final_state() const { return snapshots.back(); }
  double max_drift_u() const;
  double max_drift_v() const;
  double max_gap() const;
  double min_v() const;
};

/// Method-of-lines simulation to t_end. Snapshots are taken at t = 0, every
/// snapshot_interval, and at t_end. Negative values are recorded, never
/// clipped. Throws NonFiniteState with the time of blow-up.
SpaceTimeSolution simulate(const ModelParams& p, const Grid1D& g, const FieldPair& init, double t_end,
                           const SimulationConfig& cfg = {});

/// Rightmost crossing of u = level, linearly interpolated between cell centres.
double front_position(const FieldPair& f, const Grid1D& g, double level = 0.5);

struct SpeedEstimate {
  double speed;
  double stderr_;
  long samples;
};

/// Least-squares slope of x_front against t over [t_a, t_b]; needs at least
/// ten samples (InsufficientSamples).
SpeedEstimate estimate_speed(const std::vector<FrontSample>& series, double t_a, double t_b);

/// Max-norm residual of the steady co-moving equations on the profile grid,
/// with fourth-order central differences and five cells trimmed at each end.
double comoving_residual(const TravelingWaveProfile& profile, const ModelParams& p);

/// Samples a profile onto the grid with the profile's xi = 0 placed at x = offset.
FieldPair seed_from_profile(const TravelingWaveProfile& profile, const Grid1D& g, double offset = 0.0);

/// u = 1 for x < edge, else 0; v = u / beta.
FieldPair step_front(const Grid1D& g, double edge, double beta);

}  // namespace kswave
