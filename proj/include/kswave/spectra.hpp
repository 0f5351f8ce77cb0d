#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kswave/model.hpp"

namespace kswave {

enum class Binding { Logistic, Chemical, Tie };
enum class Classification { AllRealNegative, ComplexPresent };

std::string_view to_string(Binding b);
std::string_view to_string(Classification c);

/// Eigenvalues with |imag| below this are treated as real.
inline constexpr double kRealnessTol = 1e-10;

struct MinSpeedResult {
  double c_star;
  Binding binding;
};

struct LiteratureBounds {
  double lower;
  double upper;
};

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // sorted by real, then imaginary part
  Classification classification;
  int dimension;
};

struct UnstableDirection {
  double lambda_u;
  std::vector<double> direction;  // unit 2-norm, oriented into the trap region
  bool below_min_speed;           // c < c*: computed anyway, flagged
};

/// Slope eta of the lower surface W = eta U.
struct SurfaceParam {
  double eta;
};

/// Feasible set of the surface inequality
///   eta^2 + b eta + mu (1 - U) <= 0
/// intersected with eta > 0 (the lower end is open when it was clipped at 0).
struct EtaInterval {
  bool empty;
  double lower;
  double upper;
  double critical;  // midpoint of the two roots
  bool lower_open;
};

struct PlanePoint {
  double u;
  double v;
};

struct SpacePoint {
  double u;
  double v;
  double y;
};

/// c* = 2 sqrt(mu) for D = 0, 2 max{sqrt(mu), sqrt(D beta)} for D > 0.
MinSpeedResult min_wave_speed(const ModelParams& p);

/// Prior bounds for D = 0:  2 sqrt(mu) <= c* <= max_v max{2 sqrt(mu), sqrt(beta chi(v) / mu)}.
LiteratureBounds literature_bounds(const ModelParams& p);

/// Jacobian of the traveling-wave vector field at an arbitrary state
/// (3x3 when D = 0, 4x4 otherwise).
Eigen::MatrixXd spatial_jacobian(const ModelParams& p, double c, const std::vector<double>& s);

/// General eigensolver for the small dense matrices used here.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

SpectrumReport origin_spectrum(const ModelParams& p, double c);

UnstableDirection unstable_direction(const ModelParams& p, double c);

/// rho = (c - sqrt(c^2 - 4 D beta)) / (2 D beta); checks rho <= 2 / c.
double rho(const ModelParams& p, double c);

EtaInterval eta_feasible_interval(PlanePoint point, const ModelParams& p, double c);
EtaInterval eta_feasible_interval(SpacePoint point, const ModelParams& p, double c);

/// Left-hand side of the surface inequality at a region point. Nonpositive
/// means trajectories cannot cross W = eta U downward there.
double surface_lhs(PlanePoint point, const ModelParams& p, double c, double eta);
double surface_lhs(SpacePoint point, const ModelParams& p, double c, double eta);

/// Certified default slope, eta = c / 2.
SurfaceParam default_eta(double c);
/// The slope 5c/8 used in the original existence argument; kept for comparison.
SurfaceParam five_eighths_eta(double c);

}  // namespace kswave
