#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kswave/model.hpp"
#include "kswave/spectra.hpp"

namespace kswave {

enum class RegionKind { R3, S4 };

enum class FaceId { U0, Vtop, UeqBetaV, WeqCU, W0, Y0, Yslant };

std::string_view to_string(FaceId f);
std::optional<FaceId> face_from_string(std::string_view s);
std::vector<FaceId> faces_of(RegionKind kind);

/// R3 = {0 <= U <= beta V <= 1, 0 <= W <= c U}
/// S4 = R3 x {rho (U - beta V) <= Y <= 0}
///
/// For D > 0 and c < 2 sqrt(D beta) rho is not real; the region is then
/// built without the slanted Y face (rho empty).
struct TrapRegion {
  RegionKind kind;
  double c;
  double beta;
  std::optional<double> rho;

  int dimension() const { return kind == RegionKind::R3 ? 3 : 4; }
};

TrapRegion make_region(const ModelParams& p, double c);

inline constexpr double kContainsTol = 1e-12;

struct Slack {
  FaceId face;
  double value;  // >= 0 inside
};

struct Containment {
  bool inside;
  std::vector<Slack> slacks;

  /// Smallest slack; negative means outside.
  double min_slack() const;
};

Containment contains(const TrapRegion& region, std::span<const double> s, double tol = kContainsTol);

/// True when every slack is strictly positive.
bool strictly_inside(const TrapRegion& region, std::span<const double> s);

/// Inward-pointing component of a vector field on one face; nonnegative means
/// the field does not push states out through that face.
double inward_flux(const TrapRegion& region, FaceId face, std::span<const double> s,
                   std::span<const double> ds);

/// State derivative used by the face sweeps; the default wraps spatial_rhs.
using VectorField = std::function<void(std::span<const double> s, std::span<double> ds)>;

struct FluxReport {
  FaceId face;
  long samples;
  double worst_margin;
  std::vector<double> worst_point;
};

/// Minimum inward flux over a uniform grid of region points on the face,
/// followed by a local pattern-search refinement around the worst sample.
FluxReport face_flux_check(const ModelParams& p, double c, FaceId face, long n_samples);
FluxReport face_flux_check(const TrapRegion& region, const VectorField& field, FaceId face, long n_samples);

inline constexpr double kFluxTol = -1e-12;

struct SurfaceCheck {
  bool holds;
  double worst_value;
  std::vector<double> worst_point;  // (U, V) or (U, V, Y)
  bool condition_inside;            // 0 <= eta U <= c U
  bool condition_origin;            // N(0, 0) = 0
  long samples;
};

/// Evaluates the surface inequality for W = eta U over a grid of the region:
/// grid_density^2 points in (U, beta V), times y_density values of Y in
/// [rho (U - beta V), 0] when D > 0. Holds iff max <= 1e-12 and eta in (0, c].
SurfaceCheck verify_surface(const ModelParams& p, double c, SurfaceParam eta, int grid_density,
                            int y_density = 50);

/// [(U - beta V) chi(V) / c - c]^2 - 4 mu (1 - U).
double discriminant_margin(PlanePoint point, const ModelParams& p, double c);

/// Minimum of discriminant_margin over a grid_density^2 grid of the region.
double min_discriminant_margin(const ModelParams& p, double c, int grid_density);

}  // namespace kswave
