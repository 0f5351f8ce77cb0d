#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kswave/integrate.hpp"
#include "kswave/model.hpp"
#include "kswave/regions.hpp"

namespace kswave {

struct ShootConfig {
  double epsilon = 1e-6;             // offset along the unstable direction
  double convergence_radius = 1e-8;  // max-norm ball around the origin
  // After the ball is entered, integration continues until max(|U|, |W|) has
  // fallen by this further factor. Just below c* the orbit spirals around
  // the origin with a very long period; a crossing of W = 0 can occur far
  // inside the ball.
  double confirm_decay = 1e-250;
  double exit_tol = 1e-9;   // negativity threshold, relative to the local state scale
  double face_tol = 1e-7;   // face-crossing threshold, relative to the local state scale
  double xi_max_factor = 1e4;  // xi_max >= xi_max_factor / c
  // xi_max is raised to horizon_e_folds * (1/lambda_u + 1/slowest origin rate)
  // when that is longer; both rates scale like mu / c for large c.
  double horizon_e_folds = 200.0;
  integrate::IntegratorConfig integrator{1e-10, 1e-300};
};

enum class OutcomeKind { ConvergedToOrigin, ExitedRegion, NegativityDetected, Stalled };

std::string_view to_string(OutcomeKind k);

struct OrbitOutcome {
  OutcomeKind kind;
  double c;
  int dimension;               // 2 (reduced Fisher-KPP), 3 or 4
  std::optional<FaceId> face;  // ExitedRegion
  int component = -1;          // NegativityDetected: 0 = U, 1 = V, last = W
  double xi_event = 0.0;       // location of the deciding event
  double xi_ball = 0.0;        // first entry into the convergence ball
  std::vector<double> start;   // invading state + epsilon * direction
  std::vector<double> invading;
  integrate::Trajectory trajectory;
};

OrbitOutcome shoot(const ModelParams& p, double c, const ShootConfig& cfg = {});

/// Fisher-KPP wave system U' = -cU + W, W' = mu U (U - 1), shot from (1, c)
/// with the same integrator and outcome logic (state (U, W)).
OrbitOutcome shoot_reduced(double mu, double c, const ShootConfig& cfg = {});

struct SpeedTrial {
  double c;
  OutcomeKind kind;
};

struct EmpiricalSpeed {
  double speed;  // midpoint of the final bracket
  double lower;  // largest speed seen without a wave
  double upper;  // smallest speed seen with a wave
  int evaluations;
  std::vector<SpeedTrial> trials;  // every shot, in evaluation order
};

/// Bisection on "shoot converges to the origin". Throws BracketInvalid unless
/// c_lo fails and c_hi succeeds.
EmpiricalSpeed find_min_speed_empirical(const ModelParams& p, double c_lo, double c_hi, double tol,
                                        const ShootConfig& cfg = {});

struct ProfileChecks {
  long ordering_violations = 0;
  long monotonicity_violations = 0;
  double max_ordering_excess = 0.0;   // largest violation of 0 <= U <= beta V <= 1
  double max_increase = 0.0;          // largest positive step of U or V
  double left_error = 0.0;            // |(U, V) - (1, 1/beta)| at the left end
  double right_error = 0.0;           // |(U, V)| at the right end
};

struct TravelingWaveProfile {
  std::vector<double> xi;
  std::vector<double> u, v, y, w;       // y empty for the 3D system
  std::vector<double> du, dv, dy, dw;   // d/dxi, from the vector field
  double speed = 0.0;
  double beta = 1.0;
  double shift = 0.0;  // xi_profile = xi_orbit - shift, so that U(0) = 1/2
  int dimension = 3;
  ProfileChecks checks;

  std::size_t size() const { return xi.size(); }
  /// Cubic Hermite evaluation of the state at xi; beyond the ends the
  /// profile is continued by the invading state (left) and zero (right).
  std::vector<double> evaluate(double x) const;
};

struct ProfileOptions {
  std::size_t points = 2048;
  double ordering_tol = 1e-8;
  double monotonicity_tol = 1e-8;
};

/// Resamples a converged orbit on a uniform grid from the last point within
/// 1e-6 of the invading state to the ball entry, shifted so that U(0) = 1/2.
TravelingWaveProfile extract_profile(const OrbitOutcome& outcome, const ModelParams& p,
                                     const ProfileOptions& opts = {});
/// Same for the reduced (U, W) system; v/y arrays stay empty.
TravelingWaveProfile extract_reduced_profile(const OrbitOutcome& outcome, const ProfileOptions& opts = {});

/// Re-shoots with epsilon / 2 and returns the sup-norm distance between the two
/// normalized profiles over their common range.
double manifold_offset_check(const ModelParams& p, double c, const ShootConfig& cfg = {});

struct ExistenceRow {
  double c;
  std::optional<OutcomeKind> kind;  // empty when the row failed
  std::string error;
};

std::vector<ExistenceRow> wave_existence_table(const ModelParams& p, std::vector<double> speeds,
                                               const ShootConfig& cfg = {});

}  // namespace kswave
