#include "kswave/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kswave/error.hpp"
#include "kswave/regions.hpp"

namespace kswave {

std::string_view to_string(Binding b) {
  switch (b) {
    case Binding::Logistic: return "Logistic";
    case Binding::Chemical: return "Chemical";
    case Binding::Tie: return "Tie";
  }
  return "Unknown";
}

std::string_view to_string(Classification c) {
  return c == Classification::AllRealNegative ? "AllRealNegative" : "ComplexPresent";
}

namespace {

constexpr double kRegionTol = 1e-12;
constexpr double kOffset = 1e-6;

void require_plane_point(PlanePoint pt, const ModelParams& p) {
  const double t = p.beta * pt.v;
  if (pt.u < -kRegionTol || pt.u > t + kRegionTol || t > 1.0 + kRegionTol) {
    std::ostringstream msg;
    msg << "(U, beta V) = (" << pt.u << ", " << t << ") violates 0 <= U <= beta V <= 1";
    throw Error(ErrorCode::PointOutsideRegion, msg.str());
  }
}

}  // namespace

MinSpeedResult min_wave_speed(const ModelParams& p) {
  const double logistic = std::sqrt(p.mu);
  const double chemical = p.diff > 0.0 ? std::sqrt(p.diff * p.beta) : 0.0;
  const double big = std::max(logistic, chemical);
  Binding binding = logistic > chemical ? Binding::Logistic : Binding::Chemical;
  if (std::abs(logistic - chemical) < 1e-12 * big) binding = Binding::Tie;
  return {2.0 * big, binding};
}

LiteratureBounds literature_bounds(const ModelParams& p) {
  if (p.diff != 0.0) {
    throw Error(ErrorCode::PreconditionViolated, "the prior bounds are stated for D = 0 only");
  }
  const double lower = 2.0 * std::sqrt(p.mu);
  double upper = lower;
  auto consider = [&](double v) {
    upper = std::max(upper, std::sqrt(p.beta * std::max(0.0, p.chi_at(v)) / p.mu));
  };
  constexpr int kSamples = 1000;
  for (int i = 0; i <= kSamples; ++i) consider(p.v_max() * i / kSamples);
  for (double v : p.chi.extremum_candidates(p.v_max())) consider(v);
  return {lower, upper};
}

Eigen::MatrixXd spatial_jacobian(const ModelParams& p, double c, const std::vector<double>& s) {
  const double chi = p.chi_at(s[1]);
  const double dchi = p.chi_slope_at(s[1]);
  if (p.diff == 0.0) {
    const double u = s[0], v = s[1];
    const double gap = u - p.beta * v;
    Eigen::MatrixXd j(3, 3);
    j << -c + chi * (2.0 * u - p.beta * v) / c, u * (dchi * gap - chi * p.beta) / c, 1.0,  //
        1.0 / c, -p.beta / c, 0.0,                                                         //
        p.mu * (2.0 * u - 1.0), 0.0, 0.0;
    return j;
  }
  const double u = s[0], y = s[2];
  const double d = p.diff;
  Eigen::MatrixXd j(4, 4);
  j << -c + chi * y, u * dchi * y, u * chi, 1.0,  //
      0.0, 0.0, 1.0, 0.0,                         //
      1.0 / d, -p.beta / d, -c / d, 0.0,          //
      p.mu * (2.0 * u - 1.0), 0.0, 0.0, 0.0;
  return j;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.begin(), ev.end());

  // A defective real double root (discriminant zero) comes back from any
  // backward-stable solver as a pair split by up to ~sqrt(eps) |lambda|.
  // Such pairs are merged back onto the real axis.
  const double split_tol = 64.0 * std::sqrt(std::numeric_limits<double>::epsilon());
  for (auto& z : out) {
    if (z.imag() != 0.0 && std::abs(z.imag()) <= split_tol * std::max(1.0, std::abs(z))) {
      z = {z.real(), 0.0};
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

SpectrumReport origin_spectrum(const ModelParams& p, double c) {
  const int dim = spatial_dimension(p);
  const auto ev = eigenvalues(spatial_jacobian(p, c, std::vector<double>(dim, 0.0)));
  const bool all_real_negative = std::all_of(ev.begin(), ev.end(), [](const auto& z) {
    return std::abs(z.imag()) < kRealnessTol && z.real() < 0.0;
  });
  return {ev, all_real_negative ? Classification::AllRealNegative : Classification::ComplexPresent, dim};
}

UnstableDirection unstable_direction(const ModelParams& p, double c) {
  const auto eq = equilibria(p, c);
  const Eigen::MatrixXd jac = spatial_jacobian(p, c, eq.invading);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac);
  const auto& ev = solver.eigenvalues();

  const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
  std::vector<int> unstable;
  for (int k = 0; k < ev.size(); ++k) {
    if (ev[k].real() > 1e-12 * scale) unstable.push_back(k);
  }
  if (unstable.empty()) {
    throw Error(ErrorCode::NoUnstableEigenvalue, "no eigenvalue with positive real part at the invading state");
  }
  if (unstable.size() > 1) {
    throw Error(ErrorCode::MultipleUnstableEigenvalues,
                std::to_string(unstable.size()) + " eigenvalues with positive real part at the invading state");
  }
  const int k = unstable.front();
  if (std::abs(ev[k].imag()) >= kRealnessTol) {
    throw Error(ErrorCode::MultipleUnstableEigenvalues, "unstable eigenvalue is not real");
  }

  Eigen::VectorXd dir = solver.eigenvectors().col(k).real();
  dir.normalize();

  const TrapRegion region = make_region(p, c);
  std::vector<double> probe(eq.invading.size());
  for (double sign : {1.0, -1.0}) {
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = eq.invading[i] + sign * kOffset * dir[i];
    if (strictly_inside(region, probe)) {
      std::vector<double> d(dir.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = sign * dir[i];
      return {ev[k].real(), d, c < min_wave_speed(p).c_star};
    }
  }
  throw Error(ErrorCode::InteriorStepFailed,
              "neither orientation of the unstable eigenvector enters the trap region interior");
}

double rho(const ModelParams& p, double c) {
  if (p.diff == 0.0) throw Error(ErrorCode::ZeroDiffusion, "rho is defined for D > 0 only");
  const double four_d_beta = 4.0 * p.diff * p.beta;
  double disc = c * c - four_d_beta;
  if (disc < 0.0) {
    if (disc > -1e-12 * c * c) {
      disc = 0.0;
    } else {
      std::ostringstream msg;
      msg << "c = " << c << " < 2 sqrt(D beta) = " << std::sqrt(four_d_beta);
      throw Error(ErrorCode::NegativeDiscriminant, msg.str());
    }
  }
  // Conjugate form of (c - sqrt(disc)) / (2 D beta); no cancellation for large c.
  const double r = 2.0 / (c + std::sqrt(disc));
  if (!(r > 0.0) || r > 2.0 / c * (1.0 + 1e-14)) {
    throw Error(ErrorCode::PreconditionViolated, "rho outside (0, 2/c]");
  }
  return r;
}

namespace {

EtaInterval roots_of(double b, double q) {
  const double disc = b * b - 4.0 * q;
  EtaInterval out{true, 0.0, 0.0, -0.5 * b, false};
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  const double lo = 0.5 * (-b - sq);
  const double hi = 0.5 * (-b + sq);
  if (hi <= 0.0) return out;
  out.empty = false;
  out.upper = hi;
  out.lower = std::max(lo, 0.0);
  out.lower_open = lo <= 0.0;
  return out;
}

}  // namespace

EtaInterval eta_feasible_interval(PlanePoint pt, const ModelParams& p, double c) {
  require_plane_point(pt, p);
  const double b = (pt.u - p.beta * pt.v) * p.chi_at(pt.v) / c - c;
  return roots_of(b, p.mu * (1.0 - pt.u));
}

EtaInterval eta_feasible_interval(SpacePoint pt, const ModelParams& p, double c) {
  require_plane_point({pt.u, pt.v}, p);
  double y_min = -std::numeric_limits<double>::infinity();
  if (p.diff > 0.0 && c * c >= 4.0 * p.diff * p.beta) y_min = rho(p, c) * (pt.u - p.beta * pt.v);
  if (pt.y > kRegionTol || pt.y < y_min - kRegionTol) {
    std::ostringstream msg;
    msg << "Y = " << pt.y << " outside [" << y_min << ", 0]";
    throw Error(ErrorCode::PointOutsideRegion, msg.str());
  }
  const double b = p.chi_at(pt.v) * pt.y - c;
  return roots_of(b, p.mu * (1.0 - pt.u));
}

double surface_lhs(PlanePoint pt, const ModelParams& p, double c, double eta) {
  const double b = (pt.u - p.beta * pt.v) * p.chi_at(pt.v) / c - c;
  return eta * eta + b * eta + p.mu * (1.0 - pt.u);
}

double surface_lhs(SpacePoint pt, const ModelParams& p, double c, double eta) {
  const double b = p.chi_at(pt.v) * pt.y - c;
  return eta * eta + b * eta + p.mu * (1.0 - pt.u);
}

SurfaceParam default_eta(double c) { return {0.5 * c}; }

SurfaceParam five_eighths_eta(double c) { return {0.625 * c}; }

}  // namespace kswave
