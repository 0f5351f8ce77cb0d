#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace kswave::integrate {

/// dy/dt = f(t, y), written into dydt.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 10'000'000;
  double initial_step = 0.0;  // 0 selects a step automatically
  bool store_trajectory = true;
};

enum class Direction { Any, Up, Down };

struct EventSpec {
  std::function<double(double t, std::span<const double> y)> guard;
  Direction direction = Direction::Any;
  bool terminal = false;
};

enum class Termination { TimeLimit, Event, StepLimit, NonFinite };

struct EventRecord {
  std::size_t index;
  double t;
  std::vector<double> state;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> derivatives;  // f(t, y) at each stored state
  std::vector<EventRecord> events;               // every located event, in order
  Termination termination = Termination::TimeLimit;
  long steps_accepted = 0;
  long steps_rejected = 0;

  const std::vector<double>& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
  /// The terminal event, if integration stopped on one.
  const EventRecord* terminal_event() const;
};

/// Called after every accepted step with the new (t, y).
using Observer = std::function<void(double t, std::span<const double> y)>;

/// Dormand-Prince 5(4) with PI step-size control and the fourth-order
/// continuous extension. Events are detected by a sign change of the guard
/// across an accepted step and located by bisection on the dense output to
/// 1e-12 in t. Failures are reported through Trajectory::termination; the
/// first and last states are always stored.
Trajectory integrate(const Rhs& rhs, std::span<const double> y0, double t0, double t1,
                     const IntegratorConfig& cfg = {}, const std::vector<EventSpec>& events = {},
                     const Observer& observer = {});

/// Throws kswave::Error for StepLimit / NonFinite terminations.
void require_success(const Trajectory& traj);

}  // namespace kswave::integrate
