#include "doctest.h"
#include "kswave/error.hpp"
#include "kswave/serialize.hpp"

using namespace kswave;

TEST_CASE("params round-trip") {
  ModelParams p;
  p.mu = 2.0;
  p.beta = 0.5;
  p.diff = 0.25;
  for (const auto& chi : {ChiFunction::constant(0.3), ChiFunction::affine(0.1, 0.2),
                          ChiFunction::tabulated({{0, 0.1}, {1, 0.5}, {2, 0.2}})}) {
    p.chi = chi;
    const auto j = to_json(p);
    CHECK(to_json(params_from_json(j)).dump() == j.dump());
  }
  CHECK(to_json(p).dump() ==
        R"({"mu":2.0,"beta":0.5,"D":0.25,"chi":{"type":"tabulated","nodes":[[0.0,0.1],[1.0,0.5],[2.0,0.2]]}})");
}

TEST_CASE("config errors name the path") {
  auto expect_path = [](const char* text, const std::string& path) {
    try {
      params_from_json(Json::parse(text));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
  };
  expect_path(R"({"mu": "x"})", "params.mu");
  expect_path(R"({"chi": {"type": "constant"}})", "chi.kappa");
  expect_path(R"({"chi": {"type": "spline"}})", "chi.type");
  expect_path(R"({"chi": {"type": "tabulated", "nodes": [[0, 1], [2]]}})", "chi.nodes[1]");
}

TEST_CASE("spectrum json") {
  ModelParams p;
  const auto j = to_json(origin_spectrum(p, 1.0));
  CHECK(j["classification"] == "ComplexPresent");
  CHECK(j["eigenvalues"].size() == 3);
  CHECK(j["eigenvalues"][0][0].get<double>() == doctest::Approx(-1.0));
  CHECK(j["eigenvalues"][0][1].get<double>() == 0.0);
  CHECK(to_json(min_wave_speed(p)).dump() == R"({"c_star":2.0,"binding":"Logistic"})");
}

TEST_CASE("profile csv") {
  ModelParams p;
  const auto prof = extract_profile(shoot(p, 2.5), p, {64});
  const auto csv = profile_csv(prof);
  CHECK(csv.rfind("xi,U,V,Y,W\n", 0) == 0);
  const auto second = csv.substr(csv.find('\n') + 1);
  CHECK(second.find(",,") != std::string::npos);  // empty Y
  const auto j = profile_json(prof, p, {});
  CHECK(j["points"] == 64);
  CHECK_FALSE(j.contains("Y"));
}

TEST_CASE("snapshot csv") {
  const auto g = make_grid(16.0, 16);
  FieldPair f{std::vector<double>(16, 1.0), std::vector<double>(16, 0.5)};
  const auto csv = snapshot_csv(g, f);
  CHECK(csv.rfind("x,u,v\n0.5,1.0,0.5\n", 0) == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2.0");
}
