#pragma once

// Logistic Keller-Segel model
//
//   u_t = u_xx - (u chi(v) v_x)_x + mu u (1 - u)
//   v_t = D v_xx + beta v - u
//
// and the two traveling-wave systems obtained with xi = x - c t:
//   D = 0 : (U, V, W)     with W = cU + U' - U chi(V) V'
//   D > 0 : (U, V, Y, W)  with Y = V'

#include <array>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace kswave {

struct ChiConstant {
  double kappa = 0.0;
};

/// chi(v) = a + b v
struct ChiAffine {
  double a = 0.0;
  double b = 0.0;
};

/// Piecewise-linear interpolation through (v, value) nodes.
struct ChiTabulated {
  std::vector<double> v;
  std::vector<double> value;
};

struct ChiValue {
  double value;
  bool clamped;  // v was outside [0, v_max] and was moved to the nearest end
};

class ChiFunction {
 public:
  using Variant = std::variant<ChiConstant, ChiAffine, ChiTabulated>;

  ChiFunction() : rep_(ChiConstant{0.0}) {}
  explicit ChiFunction(Variant rep) : rep_(std::move(rep)) {}

  static ChiFunction constant(double kappa) { return ChiFunction(ChiConstant{kappa}); }
  static ChiFunction affine(double a, double b) { return ChiFunction(ChiAffine{a, b}); }
  static ChiFunction tabulated(std::vector<std::pair<double, double>> nodes);

  /// Unclamped evaluation of the variant formula. Tabulated variants hold the
  /// end values outside the node range.
  double operator()(double v) const;
  /// d chi / dv (one-sided from the right at tabulated nodes).
  double derivative(double v) const;

  const Variant& variant() const { return rep_; }

  /// Points where the extrema over [0, v_max] of this variant can sit.
  std::vector<double> extremum_candidates(double v_max) const;

 private:
  Variant rep_;
};

/// Evaluates chi on [0, v_max], clamping out-of-range arguments.
ChiValue chi_eval(const ChiFunction& chi, double v, double v_max);

struct ModelParams {
  double mu = 1.0;
  double beta = 1.0;
  double diff = 0.0;  // D
  ChiFunction chi;

  double v_max() const { return 1.0 / beta; }
  /// chi(v) with v clamped to [0, 1/beta].
  double chi_at(double v) const { return chi_eval(chi, v, v_max()).value; }
  double chi_slope_at(double v) const;
};

/// Throws kswave::Error (NonPositiveRate, NegativeDiffusion, InvalidChiTable,
/// ChiOutOfRange) or returns the params unchanged.
ModelParams validate_params(ModelParams raw);

struct SpatialState3 {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  std::array<double, 3> to_array() const { return {u, v, w}; }
  static SpatialState3 from(std::span<const double> s) { return {s[0], s[1], s[2]}; }
  bool finite() const;
};

struct SpatialState4 {
  double u = 0.0;
  double v = 0.0;
  double y = 0.0;  // dV/dxi
  double w = 0.0;

  std::array<double, 4> to_array() const { return {u, v, y, w}; }
  static SpatialState4 from(std::span<const double> s) { return {s[0], s[1], s[2], s[3]}; }
  bool finite() const;
};

SpatialState3 spatial_rhs_3d(const SpatialState3& s, const ModelParams& p, double c);
SpatialState4 spatial_rhs_4d(const SpatialState4& s, const ModelParams& p, double c);

/// Dimension-generic form used by the integrator: 3 components when
/// p.diff == 0, otherwise 4.
void spatial_rhs(std::span<const double> s, std::span<double> ds, const ModelParams& p, double c);
int spatial_dimension(const ModelParams& p);

struct Equilibria {
  std::vector<double> invaded;   // origin
  std::vector<double> invading;  // (1, 1/beta, c) or (1, 1/beta, 0, c)
};

Equilibria equilibria(const ModelParams& p, double c);

}  // namespace kswave
