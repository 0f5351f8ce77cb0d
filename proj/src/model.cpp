#include "kswave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kswave/error.hpp"

namespace kswave {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NegativeDiffusion: return "NegativeDiffusion";
    case ErrorCode::ChiOutOfRange: return "ChiOutOfRange";
    case ErrorCode::InvalidChiTable: return "InvalidChiTable";
    case ErrorCode::NoUnstableEigenvalue: return "NoUnstableEigenvalue";
    case ErrorCode::MultipleUnstableEigenvalues: return "MultipleUnstableEigenvalues";
    case ErrorCode::InteriorStepFailed: return "InteriorStepFailed";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::ZeroDiffusion: return "ZeroDiffusion";
    case ErrorCode::PointOutsideRegion: return "PointOutsideRegion";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::BracketInvalid: return "BracketInvalid";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NormalizationFailed: return "NormalizationFailed";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidFace: return "InvalidFace";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Index of the table segment containing v; callers clamp v to the node range.
std::size_t segment_of(const ChiTabulated& t, double v) {
  auto it = std::upper_bound(t.v.begin(), t.v.end(), v);
  std::size_t k = (it == t.v.begin()) ? 0 : static_cast<std::size_t>(it - t.v.begin()) - 1;
  return std::min(k, t.v.size() - 2);
}

}  // namespace

ChiFunction ChiFunction::tabulated(std::vector<std::pair<double, double>> nodes) {
  ChiTabulated t;
  t.v.reserve(nodes.size());
  t.value.reserve(nodes.size());
  for (const auto& [v, value] : nodes) {
    t.v.push_back(v);
    t.value.push_back(value);
  }
  return ChiFunction(std::move(t));
}

double ChiFunction::operator()(double v) const {
  return std::visit(
      overloaded{
          [](const ChiConstant& k) { return k.kappa; },
          [v](const ChiAffine& a) { return a.a + a.b * v; },
          [v](const ChiTabulated& t) {
            if (t.v.size() == 1) return t.value.front();
            if (v <= t.v.front()) return t.value.front();
            if (v >= t.v.back()) return t.value.back();
            const std::size_t k = segment_of(t, v);
            const double s = (v - t.v[k]) / (t.v[k + 1] - t.v[k]);
            return t.value[k] + s * (t.value[k + 1] - t.value[k]);
          },
      },
      rep_);
}

double ChiFunction::derivative(double v) const {
  return std::visit(
      overloaded{
          [](const ChiConstant&) { return 0.0; },
          [](const ChiAffine& a) { return a.b; },
          [v](const ChiTabulated& t) {
            if (t.v.size() < 2 || v < t.v.front() || v > t.v.back()) return 0.0;
            const std::size_t k = segment_of(t, v);
            return (t.value[k + 1] - t.value[k]) / (t.v[k + 1] - t.v[k]);
          },
      },
      rep_);
}

std::vector<double> ChiFunction::extremum_candidates(double v_max) const {
  std::vector<double> out{0.0, v_max};
  if (const auto* t = std::get_if<ChiTabulated>(&rep_)) {
    for (double v : t->v) {
      if (v >= 0.0 && v <= v_max) out.push_back(v);
    }
  }
  return out;
}

ChiValue chi_eval(const ChiFunction& chi, double v, double v_max) {
  const bool clamped = v < 0.0 || v > v_max;
  return {chi(std::clamp(v, 0.0, v_max)), clamped};
}

double ModelParams::chi_slope_at(double v) const {
  if (v < 0.0 || v > v_max()) return 0.0;
  return chi.derivative(v);
}

ModelParams validate_params(ModelParams raw) {
  if (!(raw.mu > 0.0) || !(raw.beta > 0.0)) {
    std::ostringstream msg;
    msg << "mu and beta must be positive (mu=" << raw.mu << ", beta=" << raw.beta << ")";
    throw Error(ErrorCode::NonPositiveRate, msg.str());
  }
  if (!(raw.diff >= 0.0)) {
    throw Error(ErrorCode::NegativeDiffusion, "D must be nonnegative, got " + std::to_string(raw.diff));
  }
  const double v_max = raw.v_max();
  if (const auto* t = std::get_if<ChiTabulated>(&raw.chi.variant())) {
    if (t->v.size() < 2 || t->v.size() != t->value.size()) {
      throw Error(ErrorCode::InvalidChiTable, "table needs at least two (v, value) nodes");
    }
    for (std::size_t k = 1; k < t->v.size(); ++k) {
      if (!(t->v[k] > t->v[k - 1])) {
        throw Error(ErrorCode::InvalidChiTable, "table nodes must be strictly increasing in v");
      }
    }
    if (t->v.front() > 0.0 || t->v.back() < v_max * (1.0 - 1e-12)) {
      std::ostringstream msg;
      msg << "table covers [" << t->v.front() << ", " << t->v.back() << "], needs [0, " << v_max << "]";
      throw Error(ErrorCode::InvalidChiTable, msg.str());
    }
  }

  auto check = [&](double v) {
    const double x = raw.chi(v);
    if (!(x >= 0.0 && x <= raw.mu)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "chi(" << v << ") = " << x << " outside [0, mu=" << raw.mu << "]";
      throw Error(ErrorCode::ChiOutOfRange, msg.str());
    }
  };
  constexpr int kSamples = 1000;
  for (int i = 0; i <= kSamples; ++i) check(v_max * i / kSamples);
  for (double v : raw.chi.extremum_candidates(v_max)) check(v);
  return raw;
}

bool SpatialState3::finite() const { return std::isfinite(u) && std::isfinite(v) && std::isfinite(w); }

bool SpatialState4::finite() const {
  return std::isfinite(u) && std::isfinite(v) && std::isfinite(y) && std::isfinite(w);
}

SpatialState3 spatial_rhs_3d(const SpatialState3& s, const ModelParams& p, double c) {
  const double gap = s.u - p.beta * s.v;
  return {
      -c * s.u + s.u * p.chi_at(s.v) * gap / c + s.w,
      gap / c,
      p.mu * s.u * (s.u - 1.0),
  };
}

SpatialState4 spatial_rhs_4d(const SpatialState4& s, const ModelParams& p, double c) {
  return {
      -c * s.u + s.u * p.chi_at(s.v) * s.y + s.w,
      s.y,
      (-c * s.y + (s.u - p.beta * s.v)) / p.diff,
      p.mu * s.u * (s.u - 1.0),
  };
}

int spatial_dimension(const ModelParams& p) { return p.diff == 0.0 ? 3 : 4; }

void spatial_rhs(std::span<const double> s, std::span<double> ds, const ModelParams& p, double c) {
  if (p.diff == 0.0) {
    const auto d = spatial_rhs_3d(SpatialState3::from(s), p, c);
    ds[0] = d.u;
    ds[1] = d.v;
    ds[2] = d.w;
  } else {
    const auto d = spatial_rhs_4d(SpatialState4::from(s), p, c);
    ds[0] = d.u;
    ds[1] = d.v;
    ds[2] = d.y;
    ds[3] = d.w;
  }
}

Equilibria equilibria(const ModelParams& p, double c) {
  if (p.diff == 0.0) return {{0.0, 0.0, 0.0}, {1.0, 1.0 / p.beta, c}};
  return {{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0 / p.beta, 0.0, c}};
}

}  // namespace kswave
