#include "kswave/regions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "kswave/error.hpp"

namespace kswave {

std::string_view to_string(FaceId f) {
  switch (f) {
    case FaceId::U0: return "U0";
    case FaceId::Vtop: return "Vtop";
    case FaceId::UeqBetaV: return "UeqBetaV";
    case FaceId::WeqCU: return "WeqCU";
    case FaceId::W0: return "W0";
    case FaceId::Y0: return "Y0";
    case FaceId::Yslant: return "Yslant";
  }
  return "Unknown";
}

std::optional<FaceId> face_from_string(std::string_view s) {
  for (FaceId f : {FaceId::U0, FaceId::Vtop, FaceId::UeqBetaV, FaceId::WeqCU, FaceId::W0, FaceId::Y0,
                   FaceId::Yslant}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::vector<FaceId> faces_of(RegionKind kind) {
  std::vector<FaceId> out{FaceId::U0, FaceId::Vtop, FaceId::UeqBetaV, FaceId::WeqCU, FaceId::W0};
  if (kind == RegionKind::S4) {
    out.push_back(FaceId::Y0);
    out.push_back(FaceId::Yslant);
  }
  return out;
}

TrapRegion make_region(const ModelParams& p, double c) {
  if (p.diff == 0.0) return {RegionKind::R3, c, p.beta, std::nullopt};
  TrapRegion r{RegionKind::S4, c, p.beta, std::nullopt};
  if (c * c >= 4.0 * p.diff * p.beta * (1.0 - 1e-12)) r.rho = rho(p, c);
  return r;
}

double Containment::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : slacks) m = std::min(m, s.value);
  return m;
}

namespace {

void require_dimension(const TrapRegion& region, std::size_t n) {
  if (static_cast<int>(n) != region.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(n) + " components, region expects " +
                                                  std::to_string(region.dimension()));
  }
}

// (U, V, Y, W) view of a 3- or 4-component state; Y = 0 for R3.
struct Components {
  double u, v, y, w;
};

Components components(const TrapRegion& region, std::span<const double> s) {
  if (region.kind == RegionKind::R3) return {s[0], s[1], 0.0, s[2]};
  return {s[0], s[1], s[2], s[3]};
}

std::vector<Slack> slacks_of(const TrapRegion& region, std::span<const double> s) {
  require_dimension(region, s.size());
  const auto x = components(region, s);
  const double t = region.beta * x.v;
  std::vector<Slack> out{
      {FaceId::U0, x.u},
      {FaceId::UeqBetaV, t - x.u},
      {FaceId::Vtop, 1.0 - t},
      {FaceId::W0, x.w},
      {FaceId::WeqCU, region.c * x.u - x.w},
  };
  if (region.kind == RegionKind::S4) {
    out.push_back({FaceId::Y0, -x.y});
    if (region.rho) out.push_back({FaceId::Yslant, x.y - *region.rho * (x.u - t)});
  }
  return out;
}

}  // namespace

Containment contains(const TrapRegion& region, std::span<const double> s, double tol) {
  Containment c{true, slacks_of(region, s)};
  for (const auto& sl : c.slacks) {
    if (sl.value < -tol) c.inside = false;
  }
  return c;
}

bool strictly_inside(const TrapRegion& region, std::span<const double> s) {
  const auto sl = slacks_of(region, s);
  return std::all_of(sl.begin(), sl.end(), [](const Slack& x) { return x.value > 0.0; });
}

double inward_flux(const TrapRegion& region, FaceId face, std::span<const double> s, std::span<const double> ds) {
  require_dimension(region, s.size());
  require_dimension(region, ds.size());
  const auto d = components(region, ds);
  const double b = region.beta;
  switch (face) {
    case FaceId::U0: return d.u;
    case FaceId::Vtop: return -d.v;
    case FaceId::UeqBetaV: return -(d.u - b * d.v);
    case FaceId::WeqCU: return -(d.w - region.c * d.u);
    case FaceId::W0: return d.w;
    case FaceId::Y0:
      if (region.kind != RegionKind::S4) break;
      return -d.y;
    case FaceId::Yslant:
      if (region.kind != RegionKind::S4 || !region.rho) break;
      return d.y - *region.rho * (d.u - b * d.v);
  }
  throw Error(ErrorCode::InvalidFace, std::string(to_string(face)) + " is not a face of this region");
}

namespace {

// Face samples are generated from normalized coordinates in [0, 1]:
//   U,  r -> beta V = U + r (1 - U),  s -> W = s c U,  y -> Y = y rho (U - beta V)
// with the coordinate that the face pins removed from the free list.
enum class Coord { U, R, S, Y };

struct FaceChart {
  std::vector<Coord> free;
  double u = 0.0, r = 0.0, s = 0.0, y = 0.0;  // pinned values
};

FaceChart chart_for(const TrapRegion& region, FaceId face) {
  const bool s4 = region.kind == RegionKind::S4;
  FaceChart ch;
  switch (face) {
    case FaceId::U0:
      ch.free = {Coord::R};
      ch.u = 0.0;
      break;
    case FaceId::Vtop:
      ch.free = {Coord::U, Coord::S};
      ch.r = 1.0;
      break;
    case FaceId::UeqBetaV:
      ch.free = {Coord::U, Coord::S};
      ch.r = 0.0;
      return ch;  // Y range collapses to {0}
    case FaceId::WeqCU:
      ch.free = {Coord::U, Coord::R};
      ch.s = 1.0;
      break;
    case FaceId::W0:
      ch.free = {Coord::U, Coord::R};
      ch.s = 0.0;
      break;
    case FaceId::Y0:
      if (!s4) throw Error(ErrorCode::InvalidFace, "Y0 is a face of S4 only");
      ch.free = {Coord::U, Coord::R, Coord::S};
      ch.y = 0.0;
      return ch;
    case FaceId::Yslant:
      if (!s4) throw Error(ErrorCode::InvalidFace, "Yslant is a face of S4 only");
      ch.free = {Coord::U, Coord::R, Coord::S};
      ch.y = 1.0;
      return ch;
  }
  if (s4) ch.free.push_back(Coord::Y);
  return ch;
}

void chart_point(const TrapRegion& region, const FaceChart& ch, std::span<const double> q, std::span<double> state) {
  double u = ch.u, r = ch.r, s = ch.s, y = ch.y;
  for (std::size_t k = 0; k < ch.free.size(); ++k) {
    switch (ch.free[k]) {
      case Coord::U: u = q[k]; break;
      case Coord::R: r = q[k]; break;
      case Coord::S: s = q[k]; break;
      case Coord::Y: y = q[k]; break;
    }
  }
  const double t = u + r * (1.0 - u);
  const double v = t / region.beta;
  const double w = s * region.c * u;
  if (region.kind == RegionKind::R3) {
    state[0] = u;
    state[1] = v;
    state[2] = w;
  } else {
    state[0] = u;
    state[1] = v;
    state[2] = y * region.rho.value_or(0.0) * (u - t);
    state[3] = w;
  }
}

}  // namespace

FluxReport face_flux_check(const TrapRegion& region, const VectorField& field, FaceId face, long n_samples) {
  if (region.kind == RegionKind::S4 && !region.rho) {
    throw Error(ErrorCode::NegativeDiscriminant, "S4 face sweeps need c >= 2 sqrt(D beta)");
  }
  const FaceChart ch = chart_for(region, face);
  const std::size_t dims = ch.free.size();
  const std::size_t n = static_cast<std::size_t>(region.dimension());
  const long per_axis =
      std::max(2L, static_cast<long>(std::ceil(std::pow(static_cast<double>(std::max(1L, n_samples)), 1.0 / dims) - 1e-9)));

  std::vector<double> q(dims), state(n), ds(n);
  auto margin_at = [&](std::span<const double> coords) {
    chart_point(region, ch, coords, state);
    field(state, ds);
    return inward_flux(region, face, state, ds);
  };

  FluxReport rep{face, 0, std::numeric_limits<double>::infinity(), {}};
  std::vector<double> best_q(dims);
  std::vector<long> idx(dims, 0);
  while (true) {
    for (std::size_t k = 0; k < dims; ++k) q[k] = static_cast<double>(idx[k]) / static_cast<double>(per_axis - 1);
    const double m = margin_at(q);
    ++rep.samples;
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      best_q = q;
    }
    std::size_t k = 0;
    while (k < dims && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dims) break;
  }

  // Pattern search around the worst sample.
  double step = 1.0 / static_cast<double>(per_axis - 1);
  for (int iter = 0; iter < 200 && step > 1e-9; ++iter) {
    bool moved = false;
    for (std::size_t k = 0; k < dims && !moved; ++k) {
      for (double sgn : {1.0, -1.0}) {
        q = best_q;
        q[k] = std::clamp(q[k] + sgn * step, 0.0, 1.0);
        const double m = margin_at(q);
        if (m < rep.worst_margin) {
          rep.worst_margin = m;
          best_q = q;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  chart_point(region, ch, best_q, state);
  rep.worst_point = state;
  return rep;
}

FluxReport face_flux_check(const ModelParams& p, double c, FaceId face, long n_samples) {
  const TrapRegion region = make_region(p, c);
  const VectorField field = [&p, c](std::span<const double> s, std::span<double> ds) { spatial_rhs(s, ds, p, c); };
  return face_flux_check(region, field, face, n_samples);
}

SurfaceCheck verify_surface(const ModelParams& p, double c, SurfaceParam eta, int grid_density, int y_density) {
  const int g = std::max(2, grid_density);
  const bool four_d = p.diff > 0.0;
  const int gy = four_d ? std::max(2, y_density) : 1;
  const double rho_c = four_d ? rho(p, c) : 0.0;

  SurfaceCheck out{true, -std::numeric_limits<double>::infinity(), {}, false, false, 0};
  for (int i = 0; i < g; ++i) {
    const double u = static_cast<double>(i) / (g - 1);
    for (int j = 0; j < g; ++j) {
      const double t = u + (1.0 - u) * static_cast<double>(j) / (g - 1);
      const double v = t / p.beta;
      for (int k = 0; k < gy; ++k) {
        double value;
        double y = 0.0;
        if (four_d) {
          y = rho_c * (u - t) * (1.0 - static_cast<double>(k) / (gy - 1));
          value = surface_lhs(SpacePoint{u, v, y}, p, c, eta.eta);
        } else {
          value = surface_lhs(PlanePoint{u, v}, p, c, eta.eta);
        }
        ++out.samples;
        if (value > out.worst_value) {
          out.worst_value = value;
          out.worst_point = four_d ? std::vector<double>{u, v, y} : std::vector<double>{u, v};
        }
      }
    }
  }
  out.condition_inside = eta.eta > 0.0 && eta.eta <= c;
  out.condition_origin = eta.eta * 0.0 == 0.0;
  out.holds = out.worst_value <= 1e-12 && out.condition_inside && out.condition_origin;
  return out;
}

double discriminant_margin(PlanePoint pt, const ModelParams& p, double c) {
  const double t = p.beta * pt.v;
  if (pt.u < -1e-12 || pt.u > t + 1e-12 || t > 1.0 + 1e-12) {
    throw Error(ErrorCode::PointOutsideRegion, "discriminant_margin needs 0 <= U <= beta V <= 1");
  }
  const double b = (pt.u - t) * p.chi_at(pt.v) / c - c;
  return b * b - 4.0 * p.mu * (1.0 - pt.u);
}

double min_discriminant_margin(const ModelParams& p, double c, int grid_density) {
  const int g = std::max(2, grid_density);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i) {
    const double u = static_cast<double>(i) / (g - 1);
    for (int j = 0; j < g; ++j) {
      const double t = u + (1.0 - u) * static_cast<double>(j) / (g - 1);
      worst = std::min(worst, discriminant_margin({u, t / p.beta}, p, c));
    }
  }
  return worst;
}

}  // namespace kswave
