#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "kswave/error.hpp"
#include "run_dir.hpp"

using namespace kswave;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kswave_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

}  // namespace

TEST_CASE("chi grammar") {
  CHECK(cli::parse_chi("const:0.5")(0.3) == 0.5);
  CHECK(cli::parse_chi("rel:0.5", 4.0)(0.0) == 2.0);
  const auto affine = cli::parse_chi("affine:0.1,0.2");
  CHECK(affine(1.0) == doctest::Approx(0.3));

  const auto dir = scratch("table");
  std::ofstream(dir / "chi.csv") << "v,chi\n0,0.1\n# comment\n1,0.5\n";
  const auto table = cli::parse_chi("table:" + (dir / "chi.csv").string());
  CHECK(table(0.5) == doctest::Approx(0.3));

  for (const char* bad : {"0.5", "const:x", "affine:1", "spline:1"}) {
    CHECK_THROWS_AS(cli::parse_chi(bad), Error);
  }
  CHECK_THROWS_AS(cli::parse_chi("table:/nonexistent/chi.csv"), Error);
}

TEST_CASE("speed command") {
  auto r = run({"speed", "--mu", "1", "--beta", "1", "--D", "0"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("c* = 2.0") != std::string::npos);

  r = run({"speed", "--mu", "1", "--beta", "4", "--D", "1", "--json"});
  CHECK(r.code == cli::kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j["c_star"] == 4.0);
  CHECK(j["binding"] == "Chemical");
  CHECK_FALSE(j.contains("literature_bounds"));

  r = run({"speed", "--mu", "-1", "--beta", "1"});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("NonPositiveRate") != std::string::npos);

  CHECK(run({"speed", "--chi", "const:5"}).code == cli::kExitConfig);
  CHECK(run({"speed", "--nope"}).code == cli::kExitConfig);
  CHECK(run({}).code == cli::kExitConfig);
}

TEST_CASE("config file with flag overrides") {
  const auto dir = scratch("config");
  std::ofstream(dir / "cfg.json") << R"({"params": {"mu": 4, "beta": 1, "chi": {"type": "constant", "kappa": 1}}})";
  auto r = run({"speed", "--json", "--config", (dir / "cfg.json").string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(Json::parse(r.out)["c_star"] == 4.0);
  CHECK(Json::parse(r.out)["params"]["chi"]["kappa"] == 1.0);

  r = run({"speed", "--json", "--mu", "1", "--config", (dir / "cfg.json").string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(Json::parse(r.out)["c_star"] == 2.0);

  std::ofstream(dir / "bad.json") << R"({"mu": 1, "colour": "red"})";
  r = run({"speed", "--config", (dir / "bad.json").string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("colour") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{";
  CHECK(run({"speed", "--config", (dir / "broken.json").string()}).code == cli::kExitConfig);
}

TEST_CASE("certification exit codes") {
  const auto dir = scratch("cert");
  auto r = run({"trapcheck", "--mu", "1", "--beta", "1", "--D", "1", "--c", "4", "--samples", "10000", "--out",
                dir.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("WeqCU") != std::string::npos);

  r = run({"surface", "--eta", "paper", "--grid", "50", "--run-dir", (dir / "paper").string()});
  CHECK(r.code == cli::kExitCertification);
  CHECK(read_json(dir / "paper" / "surface.json")["worst_value"].get<double>() == doctest::Approx(0.0625).epsilon(1e-12));

  r = run({"surface", "--eta", "half", "--grid", "50", "--out", dir.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(run({"surface", "--eta", "steep"}).code == cli::kExitConfig);
}

TEST_CASE("manifest lists outputs with reproducible hashes") {
  const auto dir = scratch("manifest");
  for (const char* name : {"a", "b"}) {
    REQUIRE(run({"trapcheck", "--mu", "2", "--beta", "0.5", "--chi", "const:1", "--samples", "500", "--run-dir",
                 (dir / name).string()})
                .code == cli::kExitOk);
  }
  const auto a = read_json(dir / "a" / "manifest.json");
  const auto b = read_json(dir / "b" / "manifest.json");
  CHECK(a["command"] == "trapcheck");
  CHECK(a["config"]["params"]["mu"] == 2.0);
  REQUIRE(a["outputs"].size() == 1);
  CHECK(a["outputs"] == b["outputs"]);
  const auto& entry = a["outputs"][0];
  CHECK(entry["sha256"] == cli::sha256_file(dir / "a" / entry["path"].get<std::string>()));
}

TEST_CASE("sha256 of known strings") {
  CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sweep validation and layout") {
  cli::SweepSpec spec;
  spec.mu = {1.0};
  spec.beta = {1.0};
  spec.diff = {};
  spec.chi = {"const:0"};
  CHECK_THROWS_AS(cli::validate_sweep(spec), Error);
  spec.diff = {0.0};
  spec.cap = 0;
  CHECK_THROWS_AS(cli::validate_sweep(spec), Error);
  spec.cap = 10000;
  CHECK_NOTHROW(cli::validate_sweep(spec));

  spec.mu = {1.0, 0.25};
  spec.beta = {1.0, 4.0};
  spec.diff = {0.25, 1.0};
  spec.chi = {"rel:1"};
  spec.parallelism = 2;
  const auto rows = cli::run_sweep(spec);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].mu == 1.0);
  CHECK(rows[1].diff == 1.0);
  CHECK(rows[2].beta == 4.0);
  CHECK(rows[4].mu == 0.25);
  for (const auto& r : rows) {
    CHECK(r.c_star_closed == doctest::Approx(2.0 * std::max(std::sqrt(r.mu), std::sqrt(r.diff * r.beta))));
    // Failed rows carry the reason instead of a value.
    CHECK(r.c_star_empirical.has_value() != !r.error.empty());
  }
  const auto csv = cli::sweep_csv(rows);
  CHECK(csv.substr(0, csv.find('\n')) == cli::kSweepHeader);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("sweep command writes rows and figures") {
  const auto dir = scratch("sweep");
  auto r = run({"sweep", "--mu", "1", "--beta", "1", "--D", "0", "--chi", "rel:0", "rel:1", "--run-dir",
                (dir / "run").string()});
  CHECK(r.code == cli::kExitOk);
  for (const char* f : {"sweep.csv", "heatmap.svg", "manifest.json", "rows/0000/row.json", "rows/0001/row.json"}) {
    CHECK(fs::exists(dir / "run" / f));
  }
  std::ofstream(dir / "empty.json") << R"({"mu": [], "beta": [1], "D": [0], "chi": ["const:0"]})";
  CHECK(run({"sweep", "--config", (dir / "empty.json").string()}).code == cli::kExitConfig);
  CHECK(run({"sweep", "--beta", "1", "--D", "0", "--chi", "const:0"}).code == cli::kExitConfig);
}

TEST_CASE("shoot, minspeed and simulate produce run directories") {
  const auto dir = scratch("runs");
  auto r = run({"shoot", "--mu", "1", "--beta", "1", "--chi", "const:1", "--c", "2.5", "--points", "512",
                "--run-dir", (dir / "shoot").string()});
  CHECK(r.code == cli::kExitOk);
  const auto outcome = read_json(dir / "shoot" / "outcome.json");
  CHECK(outcome["kind"] == "ConvergedToOrigin");
  CHECK(outcome["residual"].get<double>() < 1e-4);
  for (const char* f : {"profile.csv", "profile.json", "profile.svg"}) CHECK(fs::exists(dir / "shoot" / f));

  r = run({"minspeed", "--mu", "1", "--beta", "1", "--chi", "const:0", "--tol", "1e-3", "--run-dir",
           (dir / "min").string()});
  CHECK(r.code == cli::kExitOk);
  const auto ms = read_json(dir / "min" / "minspeed.json");
  CHECK(std::abs(ms["c_star_empirical"].get<double>() - 2.0) <= 0.02);
  CHECK(ms["c_star_closed"] == 2.0);
  CHECK(fs::exists(dir / "min" / "trials.svg"));

  CHECK(run({"minspeed", "--c-lo", "3", "--c-hi", "4"}).code == cli::kExitConfig);

  r = run({"simulate", "--L", "40", "--n", "200", "--t-end", "2", "--edge", "10", "--window", "1", "2",
           "--snapshot-every", "1", "--run-dir", (dir / "sim").string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(fs::exists(dir / "sim" / "snapshots" / "snap_00002.csv"));
  CHECK(fs::exists(dir / "sim" / "front.svg"));
  const auto sim = read_json(dir / "sim" / "simulate.json");
  CHECK(sim["front_speed"].contains("speed"));

  CHECK(run({"simulate", "--n", "8"}).code == cli::kExitConfig);
  CHECK(run({"simulate", "--frame", "rotating"}).code == cli::kExitConfig);
}
