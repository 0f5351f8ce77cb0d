#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "kswave/error.hpp"
#include "kswave/regions.hpp"
#include "kswave/spectra.hpp"

using namespace kswave;
using cplx = std::complex<double>;

namespace {

ModelParams make(double mu, double beta, double d, double kappa = 0.0) {
  ModelParams p;
  p.mu = mu;
  p.beta = beta;
  p.diff = d;
  p.chi = ChiFunction::constant(kappa);
  return p;
}

// Roots of a x^2 + b x + q.
std::vector<cplx> quadratic(double a, double b, double q) {
  const cplx disc = std::sqrt(cplx(b * b - 4 * a * q, 0.0));
  return {(-b + disc) / (2 * a), (-b - disc) / (2 * a)};
}

std::vector<cplx> closed_form_origin(const ModelParams& p, double c) {
  auto out = quadratic(1.0, c, p.mu);
  if (p.diff == 0.0) {
    out.push_back(-p.beta / c);
  } else {
    auto more = quadratic(p.diff, c, p.beta);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

// Every oracle root has a computed eigenvalue within rel_tol (relative).
bool matches(const std::vector<cplx>& computed, const std::vector<cplx>& oracle, double rel_tol) {
  if (computed.size() != oracle.size()) return false;
  std::vector<bool> used(computed.size(), false);
  for (const auto& z : oracle) {
    std::size_t best = 0;
    double dist = INFINITY;
    for (std::size_t i = 0; i < computed.size(); ++i) {
      if (!used[i] && std::abs(computed[i] - z) < dist) {
        dist = std::abs(computed[i] - z);
        best = i;
      }
    }
    if (dist > rel_tol * std::max(1.0, std::abs(z))) return false;
    used[best] = true;
  }
  return true;
}

}  // namespace

TEST_CASE("min_wave_speed") {
  auto r = min_wave_speed(make(1, 1, 0));
  CHECK(r.c_star == 2.0);
  CHECK(r.binding == Binding::Logistic);
  r = min_wave_speed(make(1, 4, 1));
  CHECK(r.c_star == 4.0);
  CHECK(r.binding == Binding::Chemical);
  CHECK(min_wave_speed(make(2.25, 1, 0)).c_star == 3.0);
  CHECK(min_wave_speed(make(1, 1, 1)).binding == Binding::Tie);
}

TEST_CASE("min_wave_speed is monotone and chi-free") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.05, 5.0);
  for (int k = 0; k < 100; ++k) {
    const double mu = pos(rng), beta = pos(rng), d = pos(rng);
    const double c0 = min_wave_speed(make(mu, beta, d)).c_star;
    CHECK(min_wave_speed(make(mu * 1.1, beta, d)).c_star >= c0);
    CHECK(min_wave_speed(make(mu, beta * 1.1, d)).c_star >= c0);
    CHECK(min_wave_speed(make(mu, beta, d, mu)).c_star == c0);
  }
}

TEST_CASE("literature_bounds") {
  auto b = literature_bounds(make(1, 1, 0, 1));
  CHECK(b.lower == 2.0);
  CHECK(b.upper == 2.0);
  b = literature_bounds(make(1, 16, 0, 1));
  CHECK(b.upper == doctest::Approx(4.0));
  b = literature_bounds(make(1, 1, 0, 0));
  CHECK(b.upper == 2.0);
  CHECK_THROWS_AS(literature_bounds(make(1, 1, 1)), Error);
}

TEST_CASE("origin_spectrum examples") {
  auto r = origin_spectrum(make(1, 1, 0), 2.0);
  CHECK(r.dimension == 3);
  CHECK(r.classification == Classification::AllRealNegative);
  CHECK(matches(r.eigenvalues, {-1.0, -1.0, -0.5}, 1e-10));

  r = origin_spectrum(make(1, 1, 0), 1.0);
  CHECK(r.classification == Classification::ComplexPresent);
  CHECK(matches(r.eigenvalues, {cplx(-0.5, std::sqrt(0.75)), cplx(-0.5, -std::sqrt(0.75)), -1.0}, 1e-10));
  // Sorted by real part, then imaginary part.
  CHECK(r.eigenvalues[0] == cplx(-1.0, 0.0));
  CHECK(r.eigenvalues[1].imag() < r.eigenvalues[2].imag());

  r = origin_spectrum(make(1, 4, 1), 4.0);
  CHECK(r.dimension == 4);
  CHECK(r.classification == Classification::AllRealNegative);
  CHECK(matches(r.eigenvalues, {-2 + std::sqrt(3.0), -2 - std::sqrt(3.0), -2.0, -2.0}, 1e-10));
}

TEST_CASE("classification flips at c*") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.1, 4.0);
  for (int k = 0; k < 100; ++k) {
    const auto p = make(pos(rng), pos(rng), k % 2 ? pos(rng) : 0.0);
    const double cs = min_wave_speed(p).c_star;
    CHECK(origin_spectrum(p, cs * (1 - 1e-3)).classification == Classification::ComplexPresent);
    CHECK(origin_spectrum(p, cs * (1 + 1e-3)).classification == Classification::AllRealNegative);
  }
}

TEST_CASE("eigenvalues match closed forms") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(0.1, 4.0);
  for (int k = 0; k < 100; ++k) {
    const auto p = make(pos(rng), pos(rng), k % 2 ? pos(rng) : 0.0);
    const double c = pos(rng) * 2.0;
    const auto r = origin_spectrum(p, c);
    CHECK(matches(r.eigenvalues, closed_form_origin(p, c), 1e-10));
  }
}

TEST_CASE("unstable_direction, chi = 0, c = 2") {
  const auto p = make(1, 1, 0);
  const auto d = unstable_direction(p, 2.0);
  const double lam = std::sqrt(2.0) - 1.0;
  CHECK(d.lambda_u == doctest::Approx(lam).epsilon(1e-12));
  CHECK_FALSE(d.below_min_speed);
  std::vector<double> expect{-1.0, -0.5 / (lam + 0.5), -(2.0 + lam)};
  double norm = 0.0;
  for (double x : expect) norm += x * x;
  norm = std::sqrt(norm);
  for (int i = 0; i < 3; ++i) CHECK(d.direction[i] == doctest::Approx(expect[i] / norm).epsilon(1e-10));
}

TEST_CASE("unstable_direction steps into the region interior") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pos(0.2, 3.0), unit(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const double mu = pos(rng);
    const auto p = make(mu, pos(rng), k % 2 ? pos(rng) : 0.0, unit(rng) * mu);
    const double c = min_wave_speed(p).c_star * (1.0 + unit(rng));
    const auto d = unstable_direction(p, c);
    CHECK(d.lambda_u > 0.0);
    auto s = equilibria(p, c).invading;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += 1e-6 * d.direction[i];
    CHECK(strictly_inside(make_region(p, c), s));
  }
}

TEST_CASE("rho") {
  CHECK(rho(make(1, 1, 1), 2.0) == doctest::Approx(1.0));
  CHECK(rho(make(1, 2, 1), 3.0) == doctest::Approx(0.5));
  const double r = rho(make(1, 4, 1), 5.0);
  CHECK(r == doctest::Approx(0.25));
  CHECK(r <= 2.0 / 5.0);
  CHECK_THROWS_AS(rho(make(1, 1, 0), 2.0), Error);
  try {
    rho(make(1, 4, 1), 3.0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeDiscriminant);
  }
}

TEST_CASE("rho identity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0.1, 4.0), unit(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const auto p = make(1, pos(rng), pos(rng));
    const double c = 2.0 * std::sqrt(p.diff * p.beta) * (1.0 + unit(rng));
    const double r = rho(p, c);
    const double resid = r * 2 * p.diff * p.beta - c + std::sqrt(c * c - 4 * p.diff * p.beta);
    CHECK(std::abs(resid) < 1e-12 * std::max(1.0, c));
    CHECK(r <= 2.0 / c * (1 + 1e-14));
  }
}

TEST_CASE("eta_feasible_interval") {
  auto iv = eta_feasible_interval(PlanePoint{0, 0}, make(1, 1, 0), 2.0);
  CHECK_FALSE(iv.empty);
  CHECK(iv.lower == doctest::Approx(1.0));
  CHECK(iv.upper == doctest::Approx(1.0));
  CHECK(iv.critical == doctest::Approx(1.0));

  iv = eta_feasible_interval(PlanePoint{1, 1}, make(1, 1, 0, 1), 2.0);
  CHECK_FALSE(iv.empty);
  CHECK(iv.lower == 0.0);
  CHECK(iv.lower_open);
  CHECK(iv.upper == doctest::Approx(2.0));

  CHECK(eta_feasible_interval(PlanePoint{0, 0}, make(1, 1, 0), 1.0).empty);
  CHECK_THROWS_AS(eta_feasible_interval(PlanePoint{0.5, 0.4}, make(1, 1, 0), 2.0), Error);
  CHECK_THROWS_AS(eta_feasible_interval(SpacePoint{0.2, 0.5, -0.4}, make(1, 1, 1), 2.0), Error);
}

TEST_CASE("c/2 lies in the feasible interval over the region") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> pos(0.2, 3.0), unit(0.0, 1.0);
  for (int draw = 0; draw < 6; ++draw) {
    const double mu = pos(rng);
    const auto p = make(mu, pos(rng), 0.0, unit(rng) * mu);
    const double cs = min_wave_speed(p).c_star;
    for (double f : {1.0, 1.5, 2.0, 3.0}) {
      const double c = cs * f;
      const double eta = default_eta(c).eta;
      const int m = 200;
      bool ok = true;
      for (int i = 0; i < m && ok; ++i) {
        for (int j = 0; j <= i && ok; ++j) {
          const double t = double(i) / (m - 1), u = double(j) / (m - 1) * t;
          const auto iv = eta_feasible_interval(PlanePoint{u, t / p.beta}, p, c);
          ok = !iv.empty && eta >= iv.lower - 1e-12 && eta <= iv.upper + 1e-12;
        }
      }
      CHECK(ok);
    }
  }
}

TEST_CASE("surface values at the origin") {
  const auto p = make(1, 1, 0);
  CHECK(default_eta(2.0).eta == 1.0);
  CHECK(surface_lhs(PlanePoint{0, 0}, p, 2.0, default_eta(2.0).eta) == doctest::Approx(0.0));
  CHECK(std::abs(surface_lhs(PlanePoint{0, 0}, p, 2.0, five_eighths_eta(2.0).eta) - 0.0625) < 1e-12);
}
