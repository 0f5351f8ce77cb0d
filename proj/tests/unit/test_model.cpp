#include <random>

#include "doctest.h"
#include "kswave/error.hpp"
#include "kswave/model.hpp"

using namespace kswave;

namespace {

ModelParams make(double mu, double beta, double d, ChiFunction chi) {
  ModelParams p;
  p.mu = mu;
  p.beta = beta;
  p.diff = d;
  p.chi = std::move(chi);
  return p;
}

ErrorCode code_of(const ModelParams& p) {
  try {
    validate_params(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected validation error");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("validate_params") {
  CHECK_NOTHROW(validate_params(make(1, 1, 0, ChiFunction::constant(0.5))));
  CHECK(code_of(make(1, 1, 0, ChiFunction::constant(2))) == ErrorCode::ChiOutOfRange);
  CHECK(code_of(make(0, 1, 0, ChiFunction::constant(0))) == ErrorCode::NonPositiveRate);
  CHECK(code_of(make(1, -1, 0, ChiFunction::constant(0))) == ErrorCode::NonPositiveRate);
  CHECK(code_of(make(1, 1, -0.5, ChiFunction::constant(0))) == ErrorCode::NegativeDiffusion);
  // Affine exceeding mu only at the right end of [0, 1/beta].
  CHECK(code_of(make(1, 2, 0, ChiFunction::affine(0.5, 1.01))) == ErrorCode::ChiOutOfRange);
  CHECK_NOTHROW(validate_params(make(1, 2, 0, ChiFunction::affine(0.5, 1.0))));
  CHECK(code_of(make(1, 1, 0, ChiFunction::affine(-0.1, 1.0))) == ErrorCode::ChiOutOfRange);
  CHECK(code_of(make(1, 1, 0, ChiFunction::tabulated({{0, 0}, {0.5, 0}}))) == ErrorCode::InvalidChiTable);
  CHECK(code_of(make(1, 1, 0, ChiFunction::tabulated({{0, 0}, {0, 1}, {1, 0}}))) == ErrorCode::InvalidChiTable);
  // A narrow spike between samples is caught at its node.
  CHECK(code_of(make(1, 1, 0, ChiFunction::tabulated({{0, 0}, {0.30001, 0}, {0.300015, 5}, {0.30002, 0}, {1, 0}}))) ==
        ErrorCode::ChiOutOfRange);
}

TEST_CASE("ChiOutOfRange reports v and value") {
  try {
    validate_params(make(1, 1, 0, ChiFunction::constant(2)));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("chi(0) = 2") != std::string::npos);
  }
}

TEST_CASE("chi_eval") {
  CHECK(chi_eval(ChiFunction::constant(0.5), 0.3, 1).value == 0.5);
  CHECK(chi_eval(ChiFunction::affine(0.1, 0.2), 0.5, 1).value == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(chi_eval(ChiFunction::tabulated({{0, 0}, {1, 1}}), 0.25, 1).value == 0.25);
  const auto clamped = chi_eval(ChiFunction::affine(0.1, 0.2), 2.0, 1.0);
  CHECK(clamped.clamped);
  CHECK(clamped.value == doctest::Approx(0.3));
  CHECK(chi_eval(ChiFunction::affine(0.1, 0.2), -1.0, 1.0).value == doctest::Approx(0.1));
  CHECK_FALSE(chi_eval(ChiFunction::affine(0.1, 0.2), 1.0, 1.0).clamped);
}

TEST_CASE("tabulated copy of an affine chi") {
  const auto affine = ChiFunction::affine(0.1, 0.4);
  std::vector<std::pair<double, double>> nodes;
  const int m = 11;
  for (int i = 0; i < m; ++i) {
    const double v = i / double(m - 1);
    nodes.emplace_back(v, affine(v));
  }
  const auto table = ChiFunction::tabulated(nodes);
  for (const auto& [v, value] : nodes) CHECK(table(v) == value);
  const double dv = 1.0 / (m - 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = i / 999.0;
    CHECK(std::abs(table(v) - affine(v)) <= 0.4 * dv);
  }
}

TEST_CASE("spatial_rhs_3d") {
  const auto p = make(1, 1, 0, ChiFunction::constant(0));
  const auto d = spatial_rhs_3d({0.5, 0.5, 1.0}, p, 2.0);
  CHECK(d.u == doctest::Approx(0.0));
  CHECK(d.v == doctest::Approx(0.0));
  CHECK(d.w == doctest::Approx(-0.25));
}

TEST_CASE("spatial_rhs_4d") {
  const auto p = make(1, 1, 1, ChiFunction::constant(0));
  const auto d = spatial_rhs_4d({0.5, 0.5, -0.1, 1.0}, p, 2.0);
  CHECK(d.u == doctest::Approx(0.0));
  CHECK(d.v == doctest::Approx(-0.1));
  CHECK(d.y == doctest::Approx(0.2));
  CHECK(d.w == doctest::Approx(-0.25));
}

TEST_CASE("equilibria are zeros of both systems") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.1, 5.0), unit(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double mu = pos(rng);
    const double d = k % 2 ? pos(rng) : 0.0;
    const auto p = make(mu, pos(rng), d, ChiFunction::affine(unit(rng) * mu / 2, 0.0));
    const double c = pos(rng);
    const auto eq = equilibria(p, c);
    const int dim = spatial_dimension(p);
    REQUIRE(eq.invading.size() == std::size_t(dim));
    std::vector<double> ds(dim);
    for (const auto* s : {&eq.invaded, &eq.invading}) {
      spatial_rhs(*s, ds, p, c);
      for (double x : ds) CHECK(std::abs(x) < 1e-13 * std::max(1.0, c));
    }
  }
}

TEST_CASE("with chi = 0 the (U, W) rhs ignores V") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 2.0);
  const auto p = make(1.3, 0.7, 0, ChiFunction::constant(0));
  for (int k = 0; k < 200; ++k) {
    const double u = unit(rng), w = unit(rng);
    const auto a = spatial_rhs_3d({u, unit(rng), w}, p, 2.1);
    const auto b = spatial_rhs_3d({u, unit(rng), w}, p, 2.1);
    CHECK(a.u == b.u);
    CHECK(a.w == b.w);
  }
}

TEST_CASE("state helpers") {
  CHECK(SpatialState3{1, 2, 3}.finite());
  CHECK_FALSE(SpatialState4{1, 2, std::nan(""), 3}.finite());
  CHECK(SpatialState4::from(std::vector<double>{1, 2, 3, 4}).to_array() == std::array<double, 4>{1, 2, 3, 4});
}
